//! Non-fuzzy fusion baselines: first principal component and row mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::MultivariateSeries;

const POWER_TOL: f64 = 1e-9;
const POWER_MAX_ITERS: usize = 1000;

/// Dominant direction of the training covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub direction: Vec<f64>,
    pub eigenvalue: f64,
    pub column_means: Vec<f64>,
}

/// Population covariance matrix of the columns around `means`.
#[allow(clippy::needless_range_loop)]
pub fn covariance(data: &MultivariateSeries, means: &[f64]) -> Vec<Vec<f64>> {
    let n = data.n_vars();
    let mut cov = vec![vec![0.0; n]; n];
    for row in data.rows() {
        for a in 0..n {
            let da = row[a] - means[a];
            for b in a..n {
                cov[a][b] += da * (row[b] - means[b]);
            }
        }
    }
    let t = data.len() as f64;
    for v in cov.iter_mut().flatten() {
        *v /= t;
    }
    for a in 0..n {
        for b in 0..a {
            cov[a][b] = cov[b][a];
        }
    }
    cov
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Power iteration from `start`. Returns the unit vector and its Rayleigh
/// quotient, or `None` if the iterate collapsed to zero.
fn power_iterate(cov: &[Vec<f64>], mut v: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    if normalize(&mut v) == 0.0 {
        return None;
    }
    for _ in 0..POWER_MAX_ITERS {
        let mut next = mat_vec(cov, &v);
        if normalize(&mut next) == 0.0 {
            return None;
        }
        // sign-insensitive change, so negative eigenvalues can't stall it
        let change = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            .min(v.iter().zip(&next).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max));
        v = next;
        if change < POWER_TOL {
            break;
        }
    }
    let rayleigh = dot(&v, &mat_vec(cov, &v));
    Some((v, rayleigh))
}

/// Fits the first principal component by power iteration on the covariance.
///
/// Two starts are tried: the all-ones vector and a fixed pseudo-random one.
/// The start with the larger Rayleigh quotient wins, which covers the case
/// where one start is orthogonal to the dominant eigenspace. The sign is
/// fixed so the largest-magnitude coordinate is positive.
pub fn pca_fit(train: &MultivariateSeries) -> Result<PcaModel> {
    let t = train.len();
    if t < 2 {
        return Err(Error::Data(format!("PCA needs at least 2 rows, got {t}")));
    }
    let n = train.n_vars();
    let means: Vec<f64> = (0..n).map(|i| train.column(i).iter().sum::<f64>() / t as f64).collect();
    let cov = covariance(train, &means);
    if cov.iter().flatten().all(|&c| c == 0.0) {
        return Err(Error::Degenerate(
            "zero covariance: all training points are identical".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x0005_eed0_f9ca);
    let random_start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (mut direction, eigenvalue) = [vec![1.0; n], random_start]
        .into_iter()
        .filter_map(|start| power_iterate(&cov, start))
        .fold(None::<(Vec<f64>, f64)>, |best, cand| match best {
            Some(b) if b.1 >= cand.1 => Some(b),
            _ => Some(cand),
        })
        .ok_or_else(|| Error::Degenerate("power iteration collapsed".into()))?;

    let pivot = (0..n)
        .max_by(|&a, &b| direction[a].abs().total_cmp(&direction[b].abs()).then(b.cmp(&a)))
        .expect("n >= 1");
    if direction[pivot] < 0.0 {
        direction.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(PcaModel {
        direction,
        eigenvalue: eigenvalue.max(0.0),
        column_means: means,
    })
}

pub fn pca_project(series: &MultivariateSeries, model: &PcaModel) -> Result<Vec<f64>> {
    if series.n_vars() != model.direction.len() {
        return Err(Error::DimensionMismatch {
            expected: model.direction.len(),
            actual: series.n_vars(),
        });
    }
    Ok(series
        .rows()
        .map(|x| {
            x.iter()
                .zip(&model.column_means)
                .zip(&model.direction)
                .map(|((v, m), d)| (v - m) * d)
                .sum()
        })
        .collect())
}

/// Row means.
pub fn mean_fusion(series: &MultivariateSeries) -> Vec<f64> {
    let n = series.n_vars() as f64;
    series.rows().map(|r| r.iter().sum::<f64>() / n).collect()
}
