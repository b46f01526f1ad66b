//! Inverse r-th power long-range sampler.

use rand::Rng;

use crate::expertise::{distance_unchecked, ExpertId, ExpertiseVector};
use crate::network::candidates;

/// `d^-r` for every distance a model can produce, indexed by `d`.
#[derive(Debug, Clone)]
pub struct PowerLawWeights {
    r: f64,
    table: Vec<f64>,
}

impl PowerLawWeights {
    pub fn new(r: f64, max_distance: u64) -> Self {
        let table = (0..=max_distance).map(|d| power_weight(d, r)).collect();
        PowerLawWeights { r, table }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    #[inline]
    pub fn weight(&self, d: u64) -> f64 {
        match self.table.get(d as usize) {
            Some(&w) => w,
            None => power_weight(d, self.r),
        }
    }
}

/// `d^-r` via `exp(-r ln d)`. Exactly 1 when `r == 0`. Candidates always sit
/// at `d >= 1`; `d == 0` maps to 0 so it can never be drawn.
#[inline]
fn power_weight(d: u64, r: f64) -> f64 {
    if d == 0 {
        0.0
    } else if r == 0.0 {
        1.0
    } else {
        (-r * (d as f64).ln()).exp()
    }
}

/// Exact long-range distribution of `u`: each candidate with its probability,
/// in id order. Empty when `u` dominates everyone.
pub fn long_range_distribution(
    u: ExpertId,
    experts: &[ExpertiseVector],
    r: f64,
) -> Vec<(ExpertId, f64)> {
    let eu = &experts[u.0];
    let weighted: Vec<(ExpertId, f64)> = candidates(experts, u)
        .into_iter()
        .map(|w| (w, power_weight(distance_unchecked(eu, &experts[w.0]), r)))
        .collect();
    let total: f64 = weighted.iter().map(|(_, p)| p).sum();
    weighted.into_iter().map(|(w, p)| (w, p / total)).collect()
}

/// `k` independent draws from `u`'s inverse r-th power distribution over its
/// candidate set. Duplicates are kept.
pub fn sample_long_range<R: Rng + ?Sized>(
    u: ExpertId,
    experts: &[ExpertiseVector],
    k: usize,
    r: f64,
    rng: &mut R,
) -> Vec<ExpertId> {
    let eu = &experts[u.0];
    let max_d = experts
        .iter()
        .map(|ew| distance_unchecked(eu, ew))
        .max()
        .unwrap_or(0);
    sample_with(u, experts, k, &PowerLawWeights::new(r, max_d), rng)
}

pub(crate) fn sample_with<R: Rng + ?Sized>(
    u: ExpertId,
    experts: &[ExpertiseVector],
    k: usize,
    weights: &PowerLawWeights,
    rng: &mut R,
) -> Vec<ExpertId> {
    let eu = &experts[u.0];
    let mut ids = Vec::new();
    let mut cumulative = Vec::new();
    let mut total = 0.0;
    for (w, ew) in experts.iter().enumerate() {
        if w == u.0 || ew.dominated_by(eu) {
            continue;
        }
        total += weights.weight(distance_unchecked(eu, ew));
        ids.push(ExpertId(w));
        cumulative.push(total);
    }
    if ids.is_empty() {
        return Vec::new();
    }
    (0..k)
        .map(|_| {
            let x = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= x);
            ids[idx.min(ids.len() - 1)]
        })
        .collect()
}
