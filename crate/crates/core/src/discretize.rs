//! Equal-width binning of a fused scalar sequence into symbols 1..M.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of observed symbols, each in `1..=alphabet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedSequence {
    symbols: Vec<usize>,
    alphabet: usize,
}

impl ObservedSequence {
    pub fn new(symbols: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0 || s > alphabet) {
            return Err(Error::Data(format!("symbol {bad} outside 1..={alphabet}")));
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// Alphabet size M.
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub m_symbols: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Discretizer {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.m_symbols as f64
    }

    /// Lower edges of bins 1..M followed by the upper edge of bin M.
    pub fn edges(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..=self.m_symbols).map(|k| self.lo + k as f64 * w).collect()
    }

    /// 1-based symbol of a single value, clamped to `1..=M`.
    pub fn symbol(&self, v: f64) -> usize {
        let m = self.m_symbols as f64;
        let pos = (m * (v - self.lo) / (self.hi - self.lo)).floor();
        if pos.is_nan() || pos < 0.0 {
            1
        } else if pos >= m {
            self.m_symbols
        } else {
            pos as usize + 1
        }
    }
}

/// Fits M equal-width bins over the range of the training values. A range
/// narrower than 1e-12 is widened to `[lo − 0.5, hi + 0.5]`.
pub fn fit_bins(train_values: &[f64], m_symbols: usize) -> Result<Discretizer> {
    if train_values.len() < 2 {
        return Err(Error::Data(format!(
            "binning needs at least 2 values, got {}",
            train_values.len()
        )));
    }
    if m_symbols < 2 {
        return Err(Error::InvalidParameter(format!(
            "symbol count must be at least 2, got {m_symbols}"
        )));
    }
    let (mut lo, mut hi) = train_values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Data("non-finite value in binning input".into()));
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    Ok(Discretizer { m_symbols, lo, hi })
}

pub fn to_symbols(values: &[f64], disc: &Discretizer) -> ObservedSequence {
    ObservedSequence {
        symbols: values.iter().map(|&v| disc.symbol(v)).collect(),
        alphabet: disc.m_symbols,
    }
}
