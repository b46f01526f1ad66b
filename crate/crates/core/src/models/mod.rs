//! Network builders for the unified and diversified models.
//!
//! Expert ids follow construction order. Unified: `row * (n/h) + column`.
//! Diversified: mixed radix, `sum_j (e_j - 1) * lambda^j` with area 0 as the
//! least significant digit.

mod ability;
mod sampler;

pub use ability::{ability_count, expected_ability, integer_root, AbilityHistogram};
pub use sampler::{long_range_distribution, sample_long_range, PowerLawWeights};

use rayon::prelude::*;

use crate::error::Result;
use crate::expertise::{ExpertId, ExpertiseVector, Level};
use crate::network::{ExpertNetwork, Model, ModelConfig};
use crate::seed::{self, EXPERT_STREAM};

pub fn build_unified(n: usize, h: usize, k: usize, r: f64, seed: u64) -> Result<ExpertNetwork> {
    build(&ModelConfig::unified(n, h, k, r, seed))
}

pub fn build_diversified(
    m: usize,
    lambda: Level,
    k: usize,
    r: f64,
    seed: u64,
) -> Result<ExpertNetwork> {
    build(&ModelConfig::diversified(m, lambda, k, r, seed))
}

/// Builds the substrate and samples `k` long-range contacts per expert. Each
/// expert draws from its own stream keyed by `(seed, id)`.
pub fn build(config: &ModelConfig) -> Result<ExpertNetwork> {
    config.validate()?;
    let (experts, local) = substrate(&config.model)?;
    let long_range = if config.no_long_range {
        vec![Vec::new(); experts.len()]
    } else {
        let weights = PowerLawWeights::new(config.r, max_distance(&config.model));
        (0..experts.len())
            .into_par_iter()
            .map(|u| {
                let mut rng = seed::stream(&[config.seed, EXPERT_STREAM, u as u64]);
                sampler::sample_with(ExpertId(u), &experts, config.k, &weights, &mut rng)
            })
            .collect()
    };
    Ok(ExpertNetwork::from_parts(*config, experts, local, long_range))
}

/// Largest possible expertise distance between two experts of the model.
pub(crate) fn max_distance(model: &Model) -> u64 {
    let span = u64::from(model.max_level() - model.min_level());
    match model {
        // d(u -> w) is the column gap
        Model::Unified { .. } => span,
        Model::Diversified { m, .. } => span * *m as u64,
    }
}

/// Expertise vectors and the deterministic local-contact lists.
pub(crate) fn substrate(model: &Model) -> Result<(Vec<ExpertiseVector>, Vec<Vec<ExpertId>>)> {
    model.validate()?;
    Ok(match *model {
        Model::Unified { n, h } => unified_substrate(n, h),
        Model::Diversified { m, lambda } => diversified_substrate(m, lambda),
    })
}

fn unified_substrate(n: usize, h: usize) -> (Vec<ExpertiseVector>, Vec<Vec<ExpertId>>) {
    let width = n / h;
    let mut experts = Vec::with_capacity(n);
    let mut local = Vec::with_capacity(n);
    for row in 0..h {
        for col in 0..width {
            let area1 = col as Level;
            let area2 = (width - 1 - col) as Level;
            experts.push(ExpertiseVector::new(vec![area1, area2]).expect("two areas"));

            let lo = col.saturating_sub(1);
            let hi = (col + 1).min(width - 1);
            let mut contacts = Vec::with_capacity(3 * h - 1);
            for other_row in 0..h {
                for other_col in lo..=hi {
                    if other_row != row || other_col != col {
                        contacts.push(ExpertId(other_row * width + other_col));
                    }
                }
            }
            local.push(contacts);
        }
    }
    (experts, local)
}

fn diversified_substrate(m: usize, lambda: Level) -> (Vec<ExpertiseVector>, Vec<Vec<ExpertId>>) {
    let base = lambda as usize;
    let n = base.pow(m as u32);
    let strides: Vec<usize> = (0..m).map(|j| base.pow(j as u32)).collect();
    let mut experts = Vec::with_capacity(n);
    let mut local = Vec::with_capacity(n);
    for id in 0..n {
        let digits: Vec<usize> = strides.iter().map(|&s| (id / s) % base).collect();
        experts.push(
            ExpertiseVector::new(digits.iter().map(|&d| d as Level + 1).collect())
                .expect("m >= 1"),
        );
        let mut contacts = Vec::with_capacity(2 * m);
        for (j, &d) in digits.iter().enumerate() {
            if d > 0 {
                contacts.push(ExpertId(id - strides[j]));
            }
            if d + 1 < base {
                contacts.push(ExpertId(id + strides[j]));
            }
        }
        contacts.sort_unstable();
        local.push(contacts);
    }
    (experts, local)
}
