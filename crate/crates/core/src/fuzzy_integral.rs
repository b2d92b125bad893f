//! λ-fuzzy measures and the Sugeno and Choquet integrals built on them.
//!
//! A λ-fuzzy measure over n variables is fixed by its densities g_i and the
//! interaction parameter λ > −1, the non-zero root of
//! `1 + λ = Π (1 + λ g_i)`. The measure of a union of disjoint sets is
//! `g(A ∪ B) = g(A) + g(B) + λ g(A) g(B)`, so integrals only ever need the
//! chain of nested "top-i" sets along a sort order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{Label, LabelSequence, MultivariateSeries};

/// Density sums within this distance of 1 are treated as additive (λ = 0).
pub const ADDITIVE_EPS: f64 = 1e-12;

/// Floor applied to zero label correlations before rescaling.
pub const CORRELATION_FLOOR: f64 = 1e-3;

/// Upper bound for a single density produced by [`densities_from_labels`].
const MAX_DENSITY: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyMeasure {
    densities: Vec<f64>,
    lambda: f64,
}

fn check_densities(densities: &[f64]) -> Result<()> {
    if densities.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "a λ-fuzzy measure needs at least 2 densities, got {}",
            densities.len()
        )));
    }
    if let Some(g) = densities.iter().find(|&&g| !(g > 0.0 && g < 1.0)) {
        return Err(Error::InvalidParameter(format!("density {g} outside (0, 1)")));
    }
    Ok(())
}

/// Elementary symmetric polynomials e_0..e_n of the densities.
fn elementary_symmetric(densities: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; densities.len() + 1];
    e[0] = 1.0;
    for (k, &g) in densities.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += g * e[j - 1];
        }
    }
    e
}

/// Solves `1 + λ = Π (1 + λ g_i)` for the admissible root λ > −1, λ ≠ 0.
///
/// Expanding the product gives `(e_1 − 1) λ + e_2 λ² + … + e_n λⁿ = 0`;
/// dividing out the trivial root leaves
/// `p(λ) = (e_1 − 1) + e_2 λ + … + e_n λ^{n−1}`, whose single admissible root
/// is found by bisection. For Σg < 1 the root is positive and p is increasing
/// on (0, ∞); for Σg > 1 it lies in (−1, 0) where p(−1) < 0 < p(0).
pub fn solve_lambda(densities: &[f64]) -> Result<f64> {
    check_densities(densities)?;
    let e = elementary_symmetric(densities);
    let excess = e[1] - 1.0;
    if excess.abs() <= ADDITIVE_EPS {
        return Ok(0.0);
    }
    let reduced = |x: f64| e[2..].iter().rev().fold(0.0, |acc, &c| acc * x + c) * x + excess;

    let (mut lo, mut hi) = if excess < 0.0 {
        let mut hi = 1.0;
        while reduced(hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Degenerate("λ root bracket diverged".into()));
            }
        }
        (0.0, hi)
    } else {
        (-1.0, 0.0)
    };
    // reduced(lo) < 0 < reduced(hi) in both cases.
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reduced(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = |x: f64| (measure_product(densities, x) - (1.0 + x)).abs();
    let root = if residual(lo) <= residual(hi) { lo } else { hi };
    Ok(root)
}

fn measure_product(densities: &[f64], lambda: f64) -> f64 {
    densities.iter().map(|g| 1.0 + lambda * g).product()
}

impl FuzzyMeasure {
    /// Builds the measure and solves for λ.
    pub fn new(densities: Vec<f64>) -> Result<Self> {
        let lambda = solve_lambda(&densities)?;
        Ok(Self { densities, lambda })
    }

    /// Equal densities `sum / n`.
    pub fn uniform(n: usize, sum: f64) -> Result<Self> {
        Self::new(uniform_densities(n, sum)?)
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    /// Residual of the normalization equation at the stored λ.
    pub fn residual(&self) -> f64 {
        (measure_product(&self.densities, self.lambda) - (1.0 + self.lambda)).abs()
    }

    /// Cumulative measures g(A_1), …, g(A_n) where A_i holds the first i
    /// variables of `order` (0-based indices).
    pub fn measure_chain(&self, order: &[usize]) -> Result<Vec<f64>> {
        let n = self.densities.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidParameter(format!(
                "order has {} entries, measure has {n}",
                order.len()
            )));
        }
        for &i in order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!(
                    "order is not a permutation: {order:?}"
                )));
            }
        }
        Ok(self.chain_unchecked(order))
    }

    fn chain_unchecked(&self, order: &[usize]) -> Vec<f64> {
        let mut acc = 0.0;
        order
            .iter()
            .map(|&i| {
                let g = self.densities[i];
                acc = g + acc + self.lambda * g * acc;
                acc
            })
            .collect()
    }

    fn descending(&self, h: &[f64]) -> Result<Vec<usize>> {
        if h.len() != self.densities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.densities.len(),
                actual: h.len(),
            });
        }
        if let Some(v) = h.iter().find(|&&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter(format!("integrand value {v} outside [0, 1]")));
        }
        let mut order: Vec<usize> = (0..h.len()).collect();
        order.sort_by(|&a, &b| h[b].total_cmp(&h[a]).then(a.cmp(&b)));
        Ok(order)
    }

    /// max_i min(h_(i), g(A_i)) with h sorted in descending order.
    pub fn sugeno(&self, h: &[f64]) -> Result<f64> {
        let order = self.descending(h)?;
        let chain = self.chain_unchecked(&order);
        Ok(order.iter().zip(&chain).map(|(&i, &g)| h[i].min(g)).fold(0.0, f64::max))
    }

    /// Σ_i (h_(i) − h_(i+1)) g(A_i) with h sorted in descending order and
    /// h_(n+1) = 0.
    pub fn choquet(&self, h: &[f64]) -> Result<f64> {
        let order = self.descending(h)?;
        let chain = self.chain_unchecked(&order);
        let n = order.len();
        Ok((0..n)
            .map(|k| {
                let next = if k + 1 < n { h[order[k + 1]] } else { 0.0 };
                (h[order[k]] - next) * chain[k]
            })
            .sum())
    }
}

pub fn sugeno_integral(h: &[f64], measure: &FuzzyMeasure) -> Result<f64> {
    measure.sugeno(h)
}

pub fn choquet_integral(h: &[f64], measure: &FuzzyMeasure) -> Result<f64> {
    measure.choquet(h)
}

/// Per-column training range used to map values onto [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRescaleParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

/// Column min/max of the training data; spans under 1e-12 become
/// `[v − 0.5, v + 0.5]`.
pub fn fit_unit_rescale(train: &MultivariateSeries) -> Result<UnitRescaleParams> {
    if train.len() < 2 {
        return Err(Error::Data(format!(
            "rescaling needs at least 2 rows, got {}",
            train.len()
        )));
    }
    let n = train.n_vars();
    let mut mins = vec![f64::INFINITY; n];
    let mut maxs = vec![f64::NEG_INFINITY; n];
    for row in train.rows() {
        for i in 0..n {
            mins[i] = mins[i].min(row[i]);
            maxs[i] = maxs[i].max(row[i]);
        }
    }
    for i in 0..n {
        if maxs[i] - mins[i] < 1e-12 {
            let v = mins[i];
            mins[i] = v - 0.5;
            maxs[i] = v + 0.5;
        }
    }
    Ok(UnitRescaleParams { mins, maxs })
}

/// `(v − min) / (max − min)` clamped to [0, 1].
pub fn apply_unit_rescale(series: &MultivariateSeries, params: &UnitRescaleParams) -> Result<MultivariateSeries> {
    if series.n_vars() != params.mins.len() {
        return Err(Error::DimensionMismatch {
            expected: params.mins.len(),
            actual: series.n_vars(),
        });
    }
    Ok(series.map_cells(|v, i| ((v - params.mins[i]) / (params.maxs[i] - params.mins[i])).clamp(0.0, 1.0)))
}

pub fn uniform_densities(n: usize, density_sum: f64) -> Result<Vec<f64>> {
    if n == 0 || !(density_sum > 0.0 && density_sum < n as f64) {
        return Err(Error::InvalidParameter(format!(
            "density sum must lie in (0, {n}), got {density_sum}"
        )));
    }
    Ok(vec![density_sum / n as f64; n])
}

/// Densities proportional to the absolute point-biserial correlation of each
/// column with the abnormal indicator, rescaled to sum to `density_sum`.
///
/// Zero correlations (including constant columns) are floored at
/// [`CORRELATION_FLOOR`]. No single density exceeds 0.99; any excess is
/// spread over the remaining columns in proportion to their weight.
pub fn densities_from_labels(train: &MultivariateSeries, labels: &LabelSequence, density_sum: f64) -> Result<Vec<f64>> {
    let n = train.n_vars();
    if labels.len() != train.len() {
        return Err(Error::DimensionMismatch {
            expected: train.len(),
            actual: labels.len(),
        });
    }
    if !(density_sum > 0.0 && density_sum < n as f64) {
        return Err(Error::InvalidParameter(format!(
            "density sum must lie in (0, {n}), got {density_sum}"
        )));
    }
    let t = train.len() as f64;
    let y: Vec<f64> = labels
        .iter()
        .map(|l| f64::from(u8::from(l == Label::Abnormal)))
        .collect();
    let y_mean = y.iter().sum::<f64>() / t;
    let y_var = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>();
    if y_var == 0.0 {
        return Err(Error::Degenerate(
            "label correlation undefined: training labels contain a single class".into(),
        ));
    }

    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let col = train.column(i);
            let mean = col.iter().sum::<f64>() / t;
            let (mut cov, mut var) = (0.0, 0.0);
            for (x, yv) in col.iter().zip(&y) {
                cov += (x - mean) * (yv - y_mean);
                var += (x - mean) * (x - mean);
            }
            let r = if var > 0.0 {
                (cov / (var * y_var).sqrt()).abs()
            } else {
                0.0
            };
            if r < 1e-12 {
                CORRELATION_FLOOR
            } else {
                r
            }
        })
        .collect();

    Ok(capped_rescale(&weights, density_sum, MAX_DENSITY))
}

/// Scales non-negative weights to sum to `total` while keeping each entry at
/// or below `cap`. Requires `total < cap · weights.len()`.
fn capped_rescale(weights: &[f64], total: f64, cap: f64) -> Vec<f64> {
    let mut out = vec![0.0; weights.len()];
    let mut free: Vec<usize> = (0..weights.len()).collect();
    let mut remaining = total;
    loop {
        let wsum: f64 = free.iter().map(|&i| weights[i]).sum();
        let over: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&i| weights[i] / wsum * remaining > cap)
            .collect();
        if over.is_empty() {
            for &i in &free {
                out[i] = weights[i] / wsum * remaining;
            }
            return out;
        }
        for &i in &over {
            out[i] = cap;
            remaining -= cap;
        }
        free.retain(|i| !over.contains(i));
    }
}
