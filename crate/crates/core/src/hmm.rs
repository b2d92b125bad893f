//! Two-state (normal/abnormal) discrete HMM: supervised estimation by
//! counting labeled pairs, and log-space Viterbi decoding.

use serde::{Deserialize, Serialize};

use crate::discretize::ObservedSequence;
use crate::error::{Error, Result};
use crate::preprocess::{Label, LabelSequence};

/// Number of hidden states.
pub const STATES: usize = 2;

/// Λ = (A, B, Π) over hidden states {normal, abnormal} and symbols 1..M.
///
/// Serialized as `{"pi", "trans", "emit", "m_symbols"}`; floats use the
/// shortest decimal that round-trips to the same bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmModel {
    pub pi: [f64; STATES],
    pub trans: [[f64; STATES]; STATES],
    /// Row i holds P(symbol k+1 | state i).
    pub emit: [Vec<f64>; STATES],
    pub m_symbols: usize,
}

/// Most probable hidden path and its log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub states: LabelSequence,
    pub log_prob: f64,
}

fn normalized(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

/// Estimates Π, A and B from a labeled training sequence with additive
/// smoothing `alpha`:
///
/// * Π_i  = (#label i + α) / (T + 2α)
/// * a_ij = (#transitions i→j + α) / (#transitions out of i + 2α)
/// * b_ik = (#symbol k under label i + α) / (#label i + Mα)
///
/// With `alpha == 0`, a state that never occurs gets uniform (unreachable)
/// rows, while a state that occurs only at the final position has no
/// outgoing transitions to count and is reported as degenerate.
pub fn estimate_supervised(
    obs: &ObservedSequence,
    labels: &LabelSequence,
    m_symbols: usize,
    alpha: f64,
) -> Result<HmmModel> {
    let t = obs.len();
    if labels.len() != t {
        return Err(Error::DimensionMismatch {
            expected: t,
            actual: labels.len(),
        });
    }
    if t < 2 {
        return Err(Error::Data(format!("HMM estimation needs at least 2 points, got {t}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("smoothing must be >= 0, got {alpha}")));
    }
    if m_symbols == 0 || obs.alphabet() > m_symbols {
        return Err(Error::InvalidParameter(format!(
            "observations use {} symbols but the model has {m_symbols}",
            obs.alphabet()
        )));
    }

    let mut occupancy = [0.0; STATES];
    let mut trans = [[0.0; STATES]; STATES];
    let mut emit = [vec![0.0; m_symbols], vec![0.0; m_symbols]];
    let labels = labels.as_slice();
    for (k, (&s, &label)) in obs.symbols().iter().zip(labels).enumerate() {
        let i = label.index();
        occupancy[i] += 1.0;
        emit[i][s - 1] += 1.0;
        if let Some(next) = labels.get(k + 1) {
            trans[i][next.index()] += 1.0;
        }
    }

    let pi_counts: Vec<f64> = occupancy.iter().map(|c| c + alpha).collect();
    let pi = normalized(&pi_counts);
    let mut model = HmmModel {
        pi: [pi[0], pi[1]],
        trans: [[0.0; STATES]; STATES],
        emit: [Vec::new(), Vec::new()],
        m_symbols,
    };
    for i in 0..STATES {
        let row_total: f64 = trans[i].iter().sum::<f64>() + STATES as f64 * alpha;
        let emit_total = occupancy[i] + m_symbols as f64 * alpha;
        if occupancy[i] == 0.0 && alpha == 0.0 {
            model.trans[i] = [1.0 / STATES as f64; STATES];
            model.emit[i] = vec![1.0 / m_symbols as f64; m_symbols];
            continue;
        }
        if row_total == 0.0 {
            return Err(Error::Degenerate(format!(
                "state {} has no outgoing transitions; use smoothing > 0",
                i + 1
            )));
        }
        let row = normalized(&trans[i].map(|c| c + alpha));
        model.trans[i] = [row[0], row[1]];
        debug_assert!(emit_total > 0.0);
        let counts: Vec<f64> = emit[i].iter().map(|c| c + alpha).collect();
        model.emit[i] = normalized(&counts);
    }
    Ok(model)
}

fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl HmmModel {
    pub fn validate(&self) -> Result<()> {
        let bad_row = |row: &[f64]| {
            row.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9
        };
        if bad_row(&self.pi) || self.trans.iter().any(|r| bad_row(r)) || self.emit.iter().any(|r| bad_row(r)) {
            return Err(Error::Data("HMM parameters are not probability vectors".into()));
        }
        if self.emit.iter().any(|r| r.len() != self.m_symbols) {
            return Err(Error::DimensionMismatch {
                expected: self.m_symbols,
                actual: self.emit[0].len().min(self.emit[1].len()),
            });
        }
        Ok(())
    }

    /// Log-probability of a given hidden path jointly with the observations.
    pub fn path_log_prob(&self, obs: &ObservedSequence, path: &LabelSequence) -> f64 {
        let symbols = obs.symbols();
        let states = path.as_slice();
        let mut lp = 0.0;
        for (k, (&s, &q)) in symbols.iter().zip(states).enumerate() {
            let i = q.index();
            lp += if k == 0 {
                ln(self.pi[i])
            } else {
                ln(self.trans[states[k - 1].index()][i])
            };
            lp += ln(self.emit[i][s - 1]);
        }
        lp
    }
}

/// Most probable hidden path. Ties prefer the lower state index (normal).
pub fn viterbi(obs: &ObservedSequence, model: &HmmModel) -> Result<StatePath> {
    let symbols = obs.symbols();
    if let Some(&s) = symbols.iter().find(|&&s| s > model.m_symbols) {
        return Err(Error::InvalidParameter(format!(
            "symbol {s} exceeds the model alphabet {}",
            model.m_symbols
        )));
    }
    if symbols.is_empty() {
        return Ok(StatePath {
            states: LabelSequence::new(Vec::new()),
            log_prob: 0.0,
        });
    }
    let log_trans = model.trans.map(|row| row.map(ln));
    let log_emit: [Vec<f64>; STATES] = [
        model.emit[0].iter().map(|&p| ln(p)).collect(),
        model.emit[1].iter().map(|&p| ln(p)).collect(),
    ];

    let t_len = symbols.len();
    let mut back = vec![[0u8; STATES]; t_len];
    let mut delta = [0.0; STATES];
    for i in 0..STATES {
        delta[i] = ln(model.pi[i]) + log_emit[i][symbols[0] - 1];
    }
    for t in 1..t_len {
        let mut next = [f64::NEG_INFINITY; STATES];
        for j in 0..STATES {
            let mut best = 0;
            let mut best_score = delta[0] + log_trans[0][j];
            for i in 1..STATES {
                let score = delta[i] + log_trans[i][j];
                if score > best_score {
                    best = i;
                    best_score = score;
                }
            }
            back[t][j] = best as u8;
            next[j] = best_score + log_emit[j][symbols[t] - 1];
        }
        delta = next;
    }

    let mut last = 0;
    for i in 1..STATES {
        if delta[i] > delta[last] {
            last = i;
        }
    }
    let log_prob = delta[last];
    if log_prob == f64::NEG_INFINITY {
        return Err(Error::Undecodable);
    }
    let mut states = vec![Label::Normal; t_len];
    let mut cur = last;
    for t in (0..t_len).rev() {
        states[t] = Label::from_index(cur);
        cur = back[t][cur] as usize;
    }
    Ok(StatePath {
        states: LabelSequence::new(states),
        log_prob,
    })
}
