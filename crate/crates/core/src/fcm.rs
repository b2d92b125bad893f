//! Fuzzy C-Means clustering of time points.
//!
//! Each time point is a vector in R^n. The fitted prototypes partition the
//! space, and the index of the prototype a point belongs to most strongly
//! (1-based) becomes its observed symbol.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::ObservedSequence;
use crate::error::{Error, Result};
use crate::preprocess::MultivariateSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    pub clusters: usize,
    /// Fuzzification coefficient m > 1.
    pub fuzzifier: f64,
    pub max_iters: usize,
    /// Stop once the largest membership change falls below this.
    pub tol: f64,
    pub seed: u64,
    /// ChaCha stream selector, so parallel runs sharing a seed stay independent.
    #[serde(default)]
    pub stream: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            clusters: 2,
            fuzzifier: 2.0,
            max_iters: 300,
            tol: 1e-6,
            seed: 0,
            stream: 0,
        }
    }
}

impl FcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 {
            return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
        }
        if !(self.fuzzifier > 1.0 && self.fuzzifier.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "fuzzifier must be > 1, got {}",
                self.fuzzifier
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcmModel {
    /// c×n cluster centres.
    pub prototypes: Vec<Vec<f64>>,
    /// c×T membership matrix of the training points.
    pub partition: Vec<Vec<f64>>,
    pub fuzzifier: f64,
    /// Objective value at the returned (partition, prototypes).
    pub objective: f64,
    /// Objective after every iteration, starting with the initial partition.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

impl FcmModel {
    pub fn clusters(&self) -> usize {
        self.prototypes.len()
    }

    /// Memberships of one point against the frozen prototypes.
    pub fn memberships(&self, point: &[f64]) -> Result<Vec<f64>> {
        let n = self.prototypes.first().map_or(0, Vec::len);
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: point.len(),
            });
        }
        let mut out = vec![0.0; self.prototypes.len()];
        let mut dist = vec![0.0; self.prototypes.len()];
        memberships_into(point, &self.prototypes, self.fuzzifier, &mut dist, &mut out);
        Ok(out)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Membership update for a single point.
///
/// u_i = 1 / Σ_l (d_i/d_l)^{2/(m-1)} is evaluated as a softmax over
/// -ln(d²)/(m-1), which stays finite for m close to 1. Points coinciding
/// with one or more prototypes share membership equally among those.
fn memberships_into(point: &[f64], protos: &[Vec<f64>], m: f64, dist: &mut [f64], out: &mut [f64]) {
    for (d, v) in dist.iter_mut().zip(protos) {
        *d = sq_dist(point, v);
    }
    let zeros = dist.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        for (u, &d) in out.iter_mut().zip(dist.iter()) {
            *u = if d == 0.0 { share } else { 0.0 };
        }
        return;
    }
    let inv = 1.0 / (m - 1.0);
    let mut best = f64::NEG_INFINITY;
    for (u, &d) in out.iter_mut().zip(dist.iter()) {
        *u = -d.ln() * inv;
        best = best.max(*u);
    }
    let mut total = 0.0;
    for u in out.iter_mut() {
        *u = (*u - best).exp();
        total += *u;
    }
    for u in out.iter_mut() {
        *u /= total;
    }
}

fn update_partition(data: &MultivariateSeries, protos: &[Vec<f64>], m: f64, partition: &mut [Vec<f64>]) {
    let c = protos.len();
    let mut dist = vec![0.0; c];
    let mut col = vec![0.0; c];
    for (j, x) in data.rows().enumerate() {
        memberships_into(x, protos, m, &mut dist, &mut col);
        for i in 0..c {
            partition[i][j] = col[i];
        }
    }
}

fn update_prototypes(data: &MultivariateSeries, partition: &[Vec<f64>], m: f64, protos: &mut [Vec<f64>]) {
    let n = data.n_vars();
    for (v, u) in protos.iter_mut().zip(partition) {
        let mut acc = vec![0.0; n];
        let mut weight = 0.0;
        for (x, &uij) in data.rows().zip(u) {
            let w = uij.powf(m);
            weight += w;
            for (a, xv) in acc.iter_mut().zip(x) {
                *a += w * xv;
            }
        }
        // A cluster with no weight at all keeps its previous centre.
        if weight > 0.0 {
            for (vk, a) in v.iter_mut().zip(acc) {
                *vk = a / weight;
            }
        }
    }
}

/// Q = Σ_i Σ_j u_ij^m · ‖x_j − v_i‖².
pub fn objective(data: &MultivariateSeries, partition: &[Vec<f64>], protos: &[Vec<f64>], m: f64) -> f64 {
    partition
        .iter()
        .zip(protos)
        .map(|(u, v)| {
            data.rows()
                .zip(u)
                .map(|(x, &uij)| uij.powf(m) * sq_dist(x, v))
                .sum::<f64>()
        })
        .sum()
}

/// Picks `c` starting prototypes among the data rows, preferring rows with
/// distinct values so that no two prototypes start on top of each other.
fn initial_prototypes(data: &MultivariateSeries, config: &FcmConfig) -> Vec<Vec<f64>> {
    let t = data.len();
    let c = config.clusters;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.stream);
    let order = sample(&mut rng, t, t);
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(c);
    let mut skipped = Vec::new();
    for j in order.iter() {
        if chosen.len() == c {
            break;
        }
        let row = data.row(j);
        if chosen.iter().any(|p| p.as_slice() == row) {
            skipped.push(j);
        } else {
            chosen.push(row.to_vec());
        }
    }
    for j in skipped {
        if chosen.len() == c {
            break;
        }
        chosen.push(data.row(j).to_vec());
    }
    chosen
}

/// Alternates the membership and prototype updates from a seeded start until
/// the largest membership change drops below `tol` or `max_iters` is hit.
pub fn fcm_fit(data: &MultivariateSeries, config: &FcmConfig) -> Result<FcmModel> {
    config.validate()?;
    let t = data.len();
    if t < config.clusters {
        return Err(Error::Data(format!(
            "FCM needs at least as many points ({t}) as clusters ({})",
            config.clusters
        )));
    }
    let m = config.fuzzifier;
    let c = config.clusters;

    let mut protos = initial_prototypes(data, config);
    let mut partition = vec![vec![0.0; t]; c];
    update_partition(data, &protos, m, &mut partition);
    let mut history = vec![objective(data, &partition, &protos, m)];
    let mut next = partition.clone();
    let mut iterations = 0;

    while iterations < config.max_iters {
        iterations += 1;
        update_prototypes(data, &partition, m, &mut protos);
        update_partition(data, &protos, m, &mut next);
        history.push(objective(data, &next, &protos, m));
        let change = partition
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        std::mem::swap(&mut partition, &mut next);
        if change < config.tol {
            break;
        }
    }

    Ok(FcmModel {
        prototypes: protos,
        partition,
        fuzzifier: m,
        objective: *history.last().expect("history is never empty"),
        objective_history: history,
        iterations,
    })
}

/// Hard assignment: the 1-based index of the prototype with the largest
/// membership, ties going to the lowest index.
pub fn fcm_assign(points: &MultivariateSeries, model: &FcmModel) -> Result<ObservedSequence> {
    let c = model.clusters();
    let n = model.prototypes.first().map_or(0, Vec::len);
    if points.n_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: points.n_vars(),
        });
    }
    let mut dist = vec![0.0; c];
    let mut u = vec![0.0; c];
    let symbols = points
        .rows()
        .map(|x| {
            memberships_into(x, &model.prototypes, model.fuzzifier, &mut dist, &mut u);
            argmax(&u) + 1
        })
        .collect();
    ObservedSequence::new(symbols, c)
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
