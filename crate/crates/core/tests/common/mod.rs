//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use fuzzy_hmm::hmm::HmmModel;
use rand::Rng;

/// Measure of an arbitrary subset from the closed form of a λ-fuzzy measure.
pub fn subset_measure(g: &[f64], lambda: f64, members: &[bool]) -> f64 {
    if lambda == 0.0 {
        return g.iter().zip(members).filter(|(_, &m)| m).map(|(x, _)| x).sum();
    }
    let prod: f64 = g
        .iter()
        .zip(members)
        .filter(|(_, &m)| m)
        .map(|(x, _)| 1.0 + lambda * x)
        .product();
    (prod - 1.0) / lambda
}

/// Sugeno integral as the supremum over α-cuts; the supremum is attained at
/// one of the h values, so only those are evaluated.
pub fn sugeno_alpha_cuts(h: &[f64], g: &[f64], lambda: f64) -> f64 {
    h.iter()
        .map(|&alpha| {
            let cut: Vec<bool> = h.iter().map(|&x| x >= alpha).collect();
            alpha.min(subset_measure(g, lambda, &cut))
        })
        .fold(0.0, f64::max)
}

/// Choquet integral in ascending form:
/// Σ (h_(i) − h_(i−1)) · g({x : h(x) ≥ h_(i)}), h_(0) = 0.
pub fn choquet_ascending(h: &[f64], g: &[f64], lambda: f64) -> f64 {
    let mut sorted = h.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut total = 0.0;
    for &level in &sorted {
        let cut: Vec<bool> = h.iter().map(|&x| x >= level).collect();
        total += (level - prev) * subset_measure(g, lambda, &cut);
        prev = level;
    }
    total
}

/// Root of `1 + λ = Π(1 + λ g_i)` by plain bisection on the raw equation.
pub fn lambda_bisection(g: &[f64]) -> f64 {
    let f = |l: f64| g.iter().map(|x| 1.0 + l * x).product::<f64>() - (1.0 + l);
    let sum: f64 = g.iter().sum();
    let (mut lo, mut hi) = if sum < 1.0 { (1e-9, 1e6) } else { (-1.0 + 1e-15, -1e-12) };
    let lo_sign = f(lo).signum();
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exhaustive search over all 2^T hidden paths. Returns the best path
/// (0-based states), its log-probability and the runner-up log-probability.
pub fn brute_force_viterbi(model: &HmmModel, obs: &[usize]) -> (Vec<usize>, f64, f64) {
    let t_len = obs.len();
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for mask in 0u32..(1 << t_len) {
        let path: Vec<usize> = (0..t_len).map(|t| ((mask >> t) & 1) as usize).collect();
        let mut p = model.pi[path[0]] * model.emit[path[0]][obs[0] - 1];
        for t in 1..t_len {
            p *= model.trans[path[t - 1]][path[t]] * model.emit[path[t]][obs[t] - 1];
        }
        let lp = p.ln();
        if lp > best.1 {
            second = best.1;
            best = (path, lp);
        } else if lp > second {
            second = lp;
        }
    }
    (best.0, best.1, second)
}

pub fn random_stochastic<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

pub fn random_model<R: Rng>(rng: &mut R, m: usize) -> HmmModel {
    let pi = random_stochastic(rng, 2);
    let a0 = random_stochastic(rng, 2);
    let a1 = random_stochastic(rng, 2);
    HmmModel {
        pi: [pi[0], pi[1]],
        trans: [[a0[0], a0[1]], [a1[0], a1[1]]],
        emit: [random_stochastic(rng, m), random_stochastic(rng, m)],
        m_symbols: m,
    }
}

/// Largest eigenvalue of a symmetric 3×3 matrix via the trigonometric
/// solution of its characteristic cubic.
pub fn largest_eigenvalue_3x3(a: [[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

/// Population covariance of row-major data with `n` columns.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows[0].len();
    let t = rows.len() as f64;
    let means: Vec<f64> = (0..n).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / t).collect();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| rows.iter().map(|r| (r[a] - means[a]) * (r[b] - means[b])).sum::<f64>() / t)
                .collect()
        })
        .collect()
}

/// Minimum over prototype pairs of the FCM objective with memberships set
/// optimally (m = 2 gives Q = Σ_j 1 / Σ_i d_ij⁻²), by grid search: a coarse
/// pass at 0.01 followed by a 1e-3 pass around the best cell.
pub fn fcm_grid_min_1d(xs: &[f64], lo: (f64, f64), hi: (f64, f64)) -> (f64, f64, f64) {
    let q = |a: f64, b: f64| -> f64 {
        xs.iter()
            .map(|&x| {
                let (da, db) = ((x - a).powi(2), (x - b).powi(2));
                if da == 0.0 || db == 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 / da + 1.0 / db)
                }
            })
            .sum()
    };
    let search = |ra: (f64, f64), rb: (f64, f64), step: f64| {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let na = ((ra.1 - ra.0) / step).round() as usize;
        let nb = ((rb.1 - rb.0) / step).round() as usize;
        for i in 0..=na {
            let a = ra.0 + i as f64 * step;
            for j in 0..=nb {
                let b = rb.0 + j as f64 * step;
                let v = q(a, b);
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        best
    };
    let coarse = search(lo, hi, 0.01);
    search(
        (coarse.1 - 0.02, coarse.1 + 0.02),
        (coarse.2 - 0.02, coarse.2 + 0.02),
        1e-3,
    )
}
