//! Seeded Monte Carlo sweeps over network realizations and random queries.
//!
//! Every network and every trial draws from its own stream, keyed by
//! `(master seed, r index, k index, realization[, trial])`, and all
//! accumulators are integer sums, so a sweep's output does not depend on how
//! rayon schedules the work.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::path_cap;
use crate::error::{Error, Result};
use crate::expertise::{l1_difference, ExpertId, Query};
use crate::models;
use crate::network::{ExpertNetwork, ModelConfig};
use crate::routing::{route, ErrorModel, RouteResult};
use crate::seed::{self, NETWORK_STREAM, TRIAL_STREAM};

pub const DEFAULT_BIN_WIDTH: f64 = 0.1;

/// Uniform area in `1..=m`, uniform difficulty in `1..=max level`.
pub fn gen_query<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Query {
    let area = rng.random_range(1..=config.areas());
    let tau = rng.random_range(1..=config.model.max_level());
    Query { area, tau }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    /// `k`, `r` and `seed` are overridden by the sweep grid and master seed.
    pub config: ModelConfig,
    pub error: ErrorModel,
    pub realizations: usize,
    pub trials_per_realization: usize,
    pub bin_width: f64,
}

impl SweepPoint {
    pub fn new(config: ModelConfig, c: f64, realizations: usize, trials: usize) -> Result<Self> {
        let point = SweepPoint {
            config,
            error: ErrorModel::new(c)?,
            realizations,
            trials_per_realization: trials,
            bin_width: DEFAULT_BIN_WIDTH,
        };
        point.validate()?;
        Ok(point)
    }

    pub fn with_bin_width(mut self, width: f64) -> Result<Self> {
        self.bin_width = width;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.model.validate()?;
        if self.realizations == 0 || self.trials_per_realization == 0 {
            return Err(Error::InvalidInput(
                "realizations and trials must both be at least 1".into(),
            ));
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::InvalidInput("bin width must be positive".into()));
        }
        Ok(())
    }
}

/// Forwarding steps binned by relative expertise difference
/// `||e_w - e_u||_1 / ||e_u||_1`, bins `[i w, (i+1) w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardingHistogram {
    pub bin_width: f64,
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub probability: f64,
}

impl ForwardingHistogram {
    pub fn new(bin_width: f64) -> Self {
        ForwardingHistogram {
            bin_width,
            counts: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn record(&mut self, net: &ExpertNetwork, from: ExpertId, to: ExpertId) {
        let eu = net.expertise(from);
        let diff = l1_difference(eu, net.expertise(to)).expect("same network");
        let norm = eu.total_ability();
        debug_assert!(norm > 0, "forwarding expert with zero total ability");
        let rel = diff as f64 / norm as f64;
        // nudge so exact multiples of the width land in the upper bin despite
        // representation error in the division
        let bin = (rel / self.bin_width * (1.0 + 1e-12)).floor() as u64;
        *self.counts.entry(bin).or_default() += 1;
    }

    pub fn record_route(&mut self, net: &ExpertNetwork, route: &RouteResult) {
        for (u, w) in route.forwards() {
            self.record(net, u, w);
        }
    }

    pub fn merge(&mut self, other: &ForwardingHistogram) {
        for (&bin, &c) in &other.counts {
            *self.counts.entry(bin).or_default() += c;
        }
    }

    /// Empirical probability of every bin from 0 up to the highest observed
    /// one. Empty when there were no forwards.
    pub fn bins(&self) -> Vec<HistogramBin> {
        let total = self.total();
        let Some(&last) = self.counts.keys().next_back() else {
            return Vec::new();
        };
        (0..=last)
            .map(|i| HistogramBin {
                bin_lo: i as f64 * self.bin_width,
                bin_hi: (i + 1) as f64 * self.bin_width,
                probability: self.counts.get(&i).copied().unwrap_or(0) as f64 / total as f64,
            })
            .collect()
    }

    /// Lower edge of the most populated bin.
    pub fn mode(&self) -> Option<f64> {
        self.counts
            .iter()
            .max_by_key(|&(&bin, &c)| (c, std::cmp::Reverse(bin)))
            .map(|(&bin, _)| bin as f64 * self.bin_width)
    }
}

/// Histogram over every forwarding step of `routes`.
pub fn forwarding_histogram(
    routes: &[RouteResult],
    net: &ExpertNetwork,
    bin_width: f64,
) -> ForwardingHistogram {
    let mut hist = ForwardingHistogram::new(bin_width);
    for r in routes {
        hist.record_route(net, r);
    }
    hist
}

/// Mergeable per-worker totals.
#[derive(Debug, Clone, PartialEq)]
struct Tally {
    trials: u64,
    hop_sum: u64,
    hop_sq_sum: u64,
    max_hops: u64,
    aborted: u64,
    failed: u64,
    cap_violations: u64,
    histogram: ForwardingHistogram,
}

impl Tally {
    fn new(bin_width: f64) -> Self {
        Tally {
            trials: 0,
            hop_sum: 0,
            hop_sq_sum: 0,
            max_hops: 0,
            aborted: 0,
            failed: 0,
            cap_violations: 0,
            histogram: ForwardingHistogram::new(bin_width),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.hop_sum += other.hop_sum;
        self.hop_sq_sum += other.hop_sq_sum;
        self.max_hops = self.max_hops.max(other.max_hops);
        self.aborted += other.aborted;
        self.failed += other.failed;
        self.cap_violations += other.cap_violations;
        self.histogram.merge(&other.histogram);
        self
    }
}

/// Aggregate of one `(config, c, r, k)` point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub model: &'static str,
    pub n: usize,
    pub h_or_m: usize,
    pub k: usize,
    pub r: f64,
    pub c: f64,
    pub no_long_range: bool,
    /// Resolved trials that went into the statistics.
    pub trials: u64,
    pub mean_hops: f64,
    /// Pooled per-trial sample standard deviation over `sqrt(trials)`.
    pub stderr_hops: f64,
    pub max_hops: u64,
    pub path_cap: usize,
    pub cap_violations: u64,
    pub aborted: u64,
    /// Trials that errored during network construction or routing.
    pub failed: u64,
    pub master_seed: u64,
    pub histogram: ForwardingHistogram,
}

impl SweepReport {
    fn from_tally(config: &ModelConfig, c: f64, master_seed: u64, tally: Tally) -> Self {
        let n = tally.trials as f64;
        let mean = if tally.trials > 0 { tally.hop_sum as f64 / n } else { 0.0 };
        let stderr = if tally.trials > 1 {
            // integer sums keep this independent of accumulation order
            let ss = tally.hop_sq_sum as f64 - tally.hop_sum as f64 * mean;
            (ss.max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            0.0
        };
        SweepReport {
            model: config.model.name(),
            n: config.n(),
            h_or_m: config.model.h_or_m(),
            k: config.k,
            r: config.r,
            c,
            no_long_range: config.no_long_range,
            trials: tally.trials,
            mean_hops: mean,
            stderr_hops: stderr,
            max_hops: tally.max_hops,
            path_cap: path_cap(config),
            cap_violations: tally.cap_violations,
            aborted: tally.aborted,
            failed: tally.failed,
            master_seed,
            histogram: tally.histogram,
        }
    }
}

/// Runs every `(r, k)` combination of the grids at `point`, in grid order
/// (r outer, k inner).
pub fn run_sweep(
    point: &SweepPoint,
    r_grid: &[f64],
    k_grid: &[usize],
    master_seed: u64,
) -> Result<Vec<SweepReport>> {
    point.validate()?;
    if r_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::InvalidInput("r and k grids must be non-empty".into()));
    }
    let mut reports = Vec::with_capacity(r_grid.len() * k_grid.len());
    for (ri, &r) in r_grid.iter().enumerate() {
        for (ki, &k) in k_grid.iter().enumerate() {
            let config = ModelConfig {
                k,
                r,
                seed: 0,
                ..point.config
            };
            config.validate()?;
            let keys = [master_seed, ri as u64, ki as u64];
            let tally = (0..point.realizations)
                .into_par_iter()
                .map(|real| run_realization(point, config, keys, real as u64))
                .reduce(|| Tally::new(point.bin_width), Tally::merge);
            reports.push(SweepReport::from_tally(&config, point.error.c, master_seed, tally));
        }
    }
    Ok(reports)
}

fn run_realization(point: &SweepPoint, config: ModelConfig, keys: [u64; 3], real: u64) -> Tally {
    let mut tally = Tally::new(point.bin_width);
    let net_seed = seed::derive_seed(&[keys[0], NETWORK_STREAM, keys[1], keys[2], real]);
    let net = match models::build(&ModelConfig { seed: net_seed, ..config }) {
        Ok(net) => net,
        Err(_) => {
            tally.failed += point.trials_per_realization as u64;
            return tally;
        }
    };
    let cap = path_cap(&config) as u64;
    for trial in 0..point.trials_per_realization as u64 {
        let mut rng = seed::stream(&[keys[0], TRIAL_STREAM, keys[1], keys[2], real, trial]);
        let query = gen_query(&config, &mut rng);
        let start = ExpertId(rng.random_range(0..net.len()));
        match route(&query, start, &net, point.error, &mut rng) {
            Ok(res) if res.is_resolved() => {
                let hops = res.hops() as u64;
                tally.trials += 1;
                tally.hop_sum += hops;
                tally.hop_sq_sum += hops * hops;
                tally.max_hops = tally.max_hops.max(hops);
                if hops > cap {
                    tally.cap_violations += 1;
                }
                tally.histogram.record_route(&net, &res);
            }
            Ok(_) => tally.aborted += 1,
            Err(_) => tally.failed += 1,
        }
    }
    tally
}

/// Mean hop count over every `(area, tau, start)` combination, exact mode.
pub fn exhaustive_mean_hops(net: &ExpertNetwork) -> Result<f64> {
    let config = net.config();
    let mut rng = seed::stream(&[0]);
    let mut sum = 0u64;
    let mut count = 0u64;
    for area in 1..=config.areas() {
        for tau in 1..=config.model.max_level() {
            let query = Query { area, tau };
            for start in net.ids() {
                let res = route(&query, start, net, ErrorModel::EXACT, &mut rng)?;
                sum += res.hops() as u64;
                count += 1;
            }
        }
    }
    Ok(sum as f64 / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build;

    #[test]
    fn query_ranges() {
        let config = ModelConfig::unified(240, 4, 1, 0.0, 0);
        let mut rng = seed::stream(&[1]);
        let mut seen_tau = [false; 60];
        let mut seen_area = [false; 3];
        for _ in 0..20_000 {
            let q = gen_query(&config, &mut rng);
            assert!((1..=59).contains(&q.tau));
            assert!((1..=2).contains(&q.area));
            seen_tau[q.tau as usize] = true;
            seen_area[q.area] = true;
        }
        assert!(seen_tau[1..].iter().all(|&s| s));
        assert!(seen_area[1..].iter().all(|&s| s));
    }

    #[test]
    fn single_forward_histogram() {
        let net = build(&ModelConfig::diversified(1, 5, 1, 0.0, 0).without_long_range()).unwrap();
        let route = RouteResult {
            path: vec![ExpertId(0), ExpertId(1)],
            status: crate::routing::RouteStatus::Resolved,
        };
        let hist = forwarding_histogram(&[route], &net, 0.1);
        let bins = hist.bins();
        assert_eq!(hist.total(), 1);
        let last = bins.last().unwrap();
        assert_eq!(last.probability, 1.0);
        assert!((last.bin_lo - 1.0).abs() < 1e-12);
        assert!(bins[..bins.len() - 1].iter().all(|b| b.probability == 0.0));
    }

    #[test]
    fn empty_histogram() {
        let hist = ForwardingHistogram::new(0.1);
        assert!(hist.bins().is_empty());
        assert_eq!(hist.mode(), None);
    }

    #[test]
    fn local_only_differences_are_small() {
        let config = ModelConfig::diversified(2, 9, 1, 0.0, 0).without_long_range();
        let point = SweepPoint::new(config, 0.0, 2, 300).unwrap();
        let reports = run_sweep(&point, &[0.0], &[1], 3).unwrap();
        let bins = reports[0].histogram.bins();
        let mass_above_one: f64 = bins.iter().filter(|b| b.bin_lo >= 1.0).map(|b| b.probability).sum();
        assert_eq!(mass_above_one, 0.0);
        let total: f64 = bins.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn minimal_sweep() {
        let point = SweepPoint::new(ModelConfig::unified(24, 2, 1, 0.0, 0), 0.0, 1, 1).unwrap();
        let reports = run_sweep(&point, &[0.5], &[2], 9).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].trials, 1);
        assert_eq!(reports[0].k, 2);
        assert_eq!(reports[0].stderr_hops, 0.0);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let config = ModelConfig::unified(24, 2, 1, 0.0, 0);
        assert!(SweepPoint::new(config, 0.0, 0, 5).is_err());
        assert!(SweepPoint::new(config, -1.0, 1, 5).is_err());
        let point = SweepPoint::new(config, 0.0, 1, 5).unwrap();
        assert!(run_sweep(&point, &[], &[1], 0).is_err());
        assert!(run_sweep(&point, &[1.0], &[0], 0).is_err());
        assert!(point.with_bin_width(0.0).is_err());
    }

    #[test]
    fn sweep_is_schedule_independent() {
        let point = SweepPoint::new(ModelConfig::diversified(2, 9, 1, 0.0, 0), 0.5, 6, 50).unwrap();
        let a = run_sweep(&point, &[0.0, 1.0], &[1, 2], 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_sweep(&point, &[0.0, 1.0], &[1, 2], 42).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_unified_small() {
        let net = build(&ModelConfig::unified(8, 2, 1, 0.0, 0).without_long_range()).unwrap();
        // column distances: area 1 from column j needs max(tau - j, 0) hops,
        // area 2 needs max(tau - (3 - j), 0)
        let mut sum = 0u64;
        for tau in 1..=3u64 {
            for col in 0..4u64 {
                sum += 2 * tau.saturating_sub(col); // two rows
                sum += 2 * tau.saturating_sub(3 - col);
            }
        }
        let expected = sum as f64 / (2 * 3 * 8) as f64;
        assert_eq!(exhaustive_mean_hops(&net).unwrap(), expected);
    }
}
