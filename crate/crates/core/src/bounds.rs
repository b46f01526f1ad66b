//! Closed-form path-length bounds, the ratio predictor built on them, and a
//! maximum-likelihood fit of the power-law exponent from observed links.
//!
//! The default evaluators return the bound shapes with the hidden constant
//! dropped. [`Constants::Explicit`] switches to the constants carried through
//! the proofs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expertise::{distance_unchecked, ExpertId, ExpertiseVector};
use crate::network::{Model, ModelConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constants {
    /// Shape only, constant factor 1.
    #[default]
    Shape,
    /// Proof constants. `c0` is the per-distance population constant of the
    /// diversified upper bound; `None` uses `2m`.
    Explicit { c0: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperUnified,
    LowerUnified,
    UpperDiversified,
    LowerDiversified,
    CapUnified,
    CapDiversified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    pub n: usize,
    /// `h` for unified kinds, `m` for diversified ones.
    pub h_or_m: usize,
    pub k: usize,
    pub r: f64,
}

fn domain(bound: &'static str, r: f64, reason: &'static str) -> Error {
    Error::Domain { bound, r, reason }
}

fn check_upper_r(bound: &'static str, r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(bound, r, "upper bounds hold for 0 <= r <= 1"));
    }
    Ok(())
}

fn check_lower_r(bound: &'static str, r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(domain(bound, r, "lower bounds hold for r > 1"));
    }
    Ok(())
}

/// Leading factor of both lower bounds when evaluated with proof constants.
fn lower_bound_constant(r: f64) -> f64 {
    5.0 * (r - 1.0).min(1.0) / 192.0
}

/// `(ln(n/h))^(r+1)`, or `2 (ln(3n/h))^(r+1)` with explicit constants.
pub fn upper_unified(n: f64, h: f64, r: f64, constants: Constants) -> Result<f64> {
    check_upper_r("unified upper bound", r)?;
    if !(n > 8.0 * h && h > 0.0) {
        return Err(domain("unified upper bound", r, "requires n > 8h"));
    }
    Ok(match constants {
        Constants::Shape => (n / h).ln().powf(r + 1.0),
        Constants::Explicit { .. } => 2.0 * (3.0 * n / h).ln().powf(r + 1.0),
    })
}

/// `k^(-1/r) (n/h)^((r-1)/r)`.
pub fn lower_unified(n: f64, h: f64, k: f64, r: f64, constants: Constants) -> Result<f64> {
    check_lower_r("unified lower bound", r)?;
    if !(h > 0.0 && n > 0.0 && k >= 1.0) {
        return Err(Error::InvalidInput("lower bound needs n, h > 0 and k >= 1".into()));
    }
    let shape = k.powf(-1.0 / r) * (n / h).powf((r - 1.0) / r);
    Ok(match constants {
        Constants::Shape => shape,
        Constants::Explicit { .. } => lower_bound_constant(r) * shape,
    })
}

/// `m^(-r) (ln n)^(r+1)`, or `c0 m (ln(3 m lambda))^(r+1)` with explicit
/// constants.
pub fn upper_diversified(n: f64, m: usize, r: f64, constants: Constants) -> Result<f64> {
    check_upper_r("diversified upper bound", r)?;
    let m_f = m as f64;
    let lambda = n.powf(1.0 / m_f);
    if !(m >= 1 && lambda > 8.0) {
        return Err(domain(
            "diversified upper bound",
            r,
            "requires the m-th root of n to exceed 8",
        ));
    }
    Ok(match constants {
        Constants::Shape => m_f.powf(-r) * n.ln().powf(r + 1.0),
        Constants::Explicit { c0 } => {
            let c0 = c0.unwrap_or(2.0 * m_f);
            c0 * m_f * (3.0 * m_f * lambda).ln().powf(r + 1.0)
        }
    })
}

/// `k^(-1/r) n^((r-1)/(m r))`.
pub fn lower_diversified(n: f64, m: usize, k: f64, r: f64, constants: Constants) -> Result<f64> {
    check_lower_r("diversified lower bound", r)?;
    if !(m >= 1 && n > 0.0 && k >= 1.0) {
        return Err(Error::InvalidInput("lower bound needs n > 0, m >= 1 and k >= 1".into()));
    }
    let shape = k.powf(-1.0 / r) * n.powf((r - 1.0) / (m as f64 * r));
    Ok(match constants {
        Constants::Shape => shape,
        Constants::Explicit { .. } => lower_bound_constant(r) * shape,
    })
}

/// Hard cap on any path length: `n/h` or `lambda = n^(1/m)`.
pub fn path_cap(config: &ModelConfig) -> usize {
    match config.model {
        Model::Unified { n, h } => n / h,
        Model::Diversified { lambda, .. } => lambda as usize,
    }
}

/// Predicted ratio of mean path lengths at exponents `r1` and `r2` on the same
/// diversified network, from the diversified lower bound. Constants cancel.
pub fn predict_ratio(n: f64, m: usize, k: f64, r1: f64, r2: f64) -> Result<f64> {
    let a = lower_diversified(n, m, k, r1, Constants::Shape)?;
    let b = lower_diversified(n, m, k, r2, Constants::Shape)?;
    Ok(a / b)
}

/// Every bound that applies to `config` at its own `r`, plus the path cap.
pub fn evaluate(config: &ModelConfig, constants: Constants) -> Vec<BoundValue> {
    let (n, k, r) = (config.n(), config.k, config.r);
    let mut out = Vec::new();
    let mut push = |kind, value: Result<f64>, h_or_m| {
        if let Ok(value) = value {
            out.push(BoundValue { kind, value, n, h_or_m, k, r });
        }
    };
    let (nf, kf) = (n as f64, k as f64);
    match config.model {
        Model::Unified { h, .. } => {
            let hf = h as f64;
            push(BoundKind::UpperUnified, upper_unified(nf, hf, r, constants), h);
            push(BoundKind::LowerUnified, lower_unified(nf, hf, kf, r, constants), h);
            push(BoundKind::CapUnified, Ok(path_cap(config) as f64), h);
        }
        Model::Diversified { m, .. } => {
            push(BoundKind::UpperDiversified, upper_diversified(nf, m, r, constants), m);
            push(BoundKind::LowerDiversified, lower_diversified(nf, m, kf, r, constants), m);
            push(BoundKind::CapDiversified, Ok(path_cap(config) as f64), m);
        }
    }
    out
}

pub const FIT_R_MIN: f64 = 0.0;
pub const FIT_R_MAX: f64 = 10.0;
pub const FIT_TOLERANCE: f64 = 1e-3;

/// Sufficient statistics of an edge set for the inverse power-law likelihood.
#[derive(Debug, Clone)]
pub struct EdgeLikelihood {
    /// Sum of `ln d(src -> dst)` over all edges.
    log_distance_sum: f64,
    /// Per distinct source: its edge count and candidate count by distance.
    sources: Vec<(u64, Vec<(f64, u64)>)>,
}

impl EdgeLikelihood {
    pub fn new(edges: &[(ExpertId, ExpertId)], experts: &[ExpertiseVector]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidInput("no edges to fit".into()));
        }
        let n = experts.len();
        let mut per_source: BTreeMap<usize, u64> = BTreeMap::new();
        let mut log_distance_sum = 0.0;
        for (line, &(src, dst)) in edges.iter().enumerate() {
            if src.0 >= n || dst.0 >= n {
                return Err(Error::InvalidInput(format!(
                    "edge {line}: {src} -> {dst} references an unknown expert"
                )));
            }
            if experts[src.0].areas() != experts[dst.0].areas() {
                return Err(Error::LengthMismatch(experts[src.0].areas(), experts[dst.0].areas()));
            }
            let d = distance_unchecked(&experts[src.0], &experts[dst.0]);
            if d == 0 || src == dst {
                return Err(Error::InvalidInput(format!(
                    "edge {line}: {src} -> {dst} violates candidate set"
                )));
            }
            log_distance_sum += (d as f64).ln();
            *per_source.entry(src.0).or_default() += 1;
        }
        let sources = per_source
            .into_iter()
            .map(|(u, count)| {
                let eu = &experts[u];
                let mut by_distance: BTreeMap<u64, u64> = BTreeMap::new();
                for (w, ew) in experts.iter().enumerate() {
                    if w == u || ew.areas() != eu.areas() {
                        continue;
                    }
                    let d = distance_unchecked(eu, ew);
                    if d > 0 {
                        *by_distance.entry(d).or_default() += 1;
                    }
                }
                let hist = by_distance
                    .into_iter()
                    .map(|(d, c)| ((d as f64).ln(), c))
                    .collect();
                (count, hist)
            })
            .collect();
        Ok(EdgeLikelihood {
            log_distance_sum,
            sources,
        })
    }

    /// `sum_e [-r ln d_e - ln Z_src(r)]` with `Z_u(r) = sum_{v in C_u} d^-r`.
    pub fn log_likelihood(&self, r: f64) -> f64 {
        let normalizers: f64 = self
            .sources
            .iter()
            .map(|(count, hist)| {
                // log-sum-exp over distances
                let top = hist
                    .iter()
                    .map(|&(ln_d, _)| -r * ln_d)
                    .fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = hist
                    .iter()
                    .map(|&(ln_d, c)| c as f64 * (-r * ln_d - top).exp())
                    .sum();
                *count as f64 * (top + z.ln())
            })
            .sum();
        -r * self.log_distance_sum - normalizers
    }
}

/// Maximum-likelihood exponent on `[0, 10]` by golden-section search. The
/// log-likelihood is concave in `r`, so the search cannot stall at a local
/// optimum; the interval ends are checked explicitly.
pub fn fit_r(edges: &[(ExpertId, ExpertId)], experts: &[ExpertiseVector]) -> Result<f64> {
    let ll = EdgeLikelihood::new(edges, experts)?;
    Ok(golden_section_max(|r| ll.log_likelihood(r), FIT_R_MIN, FIT_R_MAX, FIT_TOLERANCE))
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / 2.0;
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const E10: f64 = 22026.465794806718;

    #[test]
    fn upper_unified_examples() {
        assert_relative_eq!(upper_unified(E10, 1.0, 0.0, Constants::Shape).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(upper_unified(E10, 1.0, 1.0, Constants::Shape).unwrap(), 100.0, max_relative = 1e-12);
        let explicit = upper_unified(240.0, 4.0, 1.0, Constants::Explicit { c0: None }).unwrap();
        assert!((explicit - 53.93).abs() < 0.01, "{explicit}");
        assert!(upper_unified(240.0, 4.0, 1.5, Constants::Shape).is_err());
        assert!(upper_unified(30.0, 4.0, 0.5, Constants::Shape).is_err());
    }

    #[test]
    fn lower_unified_examples() {
        assert_relative_eq!(lower_unified(64.0, 1.0, 1.0, 2.0, Constants::Shape).unwrap(), 8.0, max_relative = 1e-12);
        assert_relative_eq!(
            lower_unified(64.0, 1.0, 8.0, 2.0, Constants::Shape).unwrap(),
            8.0 / 8f64.sqrt(),
            max_relative = 1e-12
        );
        // large r approaches n/h
        let v = lower_unified(60.0, 1.0, 1.0, 1e6, Constants::Shape).unwrap();
        assert!((v - 60.0).abs() < 1e-3);
        assert!(lower_unified(64.0, 1.0, 1.0, 1.0, Constants::Shape).is_err());
        let explicit = lower_unified(64.0, 1.0, 1.0, 2.0, Constants::Explicit { c0: None }).unwrap();
        assert_relative_eq!(explicit, 8.0 * 5.0 / 192.0, max_relative = 1e-12);
    }

    #[test]
    fn upper_diversified_examples() {
        for m in [1, 2, 4] {
            assert_relative_eq!(upper_diversified(E10, m, 0.0, Constants::Shape).unwrap(), 10.0, max_relative = 1e-12);
        }
        assert_relative_eq!(upper_diversified(E10, 2, 1.0, Constants::Shape).unwrap(), 50.0, max_relative = 1e-12);
        // 0.5 * ln(729)^1.5
        let v = upper_diversified(729.0, 2, 0.5, Constants::Shape).unwrap();
        assert_relative_eq!(v, 2f64.powf(-0.5) * 729f64.ln().powf(1.5), max_relative = 1e-12);
        // n^(1/m) must exceed 8
        assert!(upper_diversified(729.0, 4, 0.5, Constants::Shape).is_err());
        assert!(upper_diversified(E10, 2, 2.0, Constants::Shape).is_err());
        let explicit = upper_diversified(729.0, 1, 1.0, Constants::Explicit { c0: Some(1.0) }).unwrap();
        assert_relative_eq!(explicit, (3.0f64 * 729.0).ln().powi(2), max_relative = 1e-12);
    }

    #[test]
    fn lower_diversified_examples() {
        assert_relative_eq!(lower_diversified(64.0, 1, 1.0, 2.0, Constants::Shape).unwrap(), 8.0, max_relative = 1e-12);
        let v = lower_diversified(729.0, 3, 1.0, 1e6, Constants::Shape).unwrap();
        assert!((v - 9.0).abs() < 1e-3);
        let v = lower_diversified(184.0, 2, 1.0, 1.98, Constants::Shape).unwrap();
        assert!((v - 3.63).abs() < 0.01, "{v}");
        assert!(lower_diversified(184.0, 2, 1.0, 0.5, Constants::Shape).is_err());
    }

    #[test]
    fn path_caps() {
        assert_eq!(path_cap(&ModelConfig::unified(240, 4, 1, 0.0, 0)), 60);
        assert_eq!(path_cap(&ModelConfig::diversified(3, 9, 1, 0.0, 0)), 9);
        assert_eq!(path_cap(&ModelConfig::diversified(1, 5, 1, 0.0, 0)), 5);
    }

    #[test]
    fn dataset_ratios() {
        let rows = [
            (184.0, 1.98, 1.44, 1.63),
            (122.0, 1.24, 1.04, 1.45),
            (305.0, 1.61, 1.01, 2.87),
            (266.0, 1.14, 1.04, 1.26),
        ];
        for (n, r1, r2, expected) in rows {
            let v = predict_ratio(n, 2, 1.0, r1, r2).unwrap();
            assert!((v - expected).abs() <= 0.02, "n={n}: {v}");
        }
        assert_eq!(predict_ratio(184.0, 2, 1.0, 1.5, 1.5).unwrap(), 1.0);
        assert!(predict_ratio(184.0, 2, 1.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn evaluate_picks_applicable_bounds() {
        let low_r = evaluate(&ModelConfig::unified(240, 4, 1, 0.5, 0), Constants::Shape);
        let kinds: Vec<BoundKind> = low_r.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, [BoundKind::UpperUnified, BoundKind::CapUnified]);
        let high_r = evaluate(&ModelConfig::diversified(3, 9, 2, 2.0, 0), Constants::Shape);
        let kinds: Vec<BoundKind> = high_r.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, [BoundKind::LowerDiversified, BoundKind::CapDiversified]);
    }

    #[test]
    fn fit_rejects_bad_edges() {
        let experts: Vec<ExpertiseVector> = [[1, 1], [2, 1], [1, 2], [2, 2]]
            .iter()
            .map(|v| ExpertiseVector::new(v.to_vec()).unwrap())
            .collect();
        assert!(fit_r(&[], &experts).is_err());
        let err = fit_r(&[(ExpertId(3), ExpertId(0))], &experts).unwrap_err();
        assert!(err.to_string().contains("violates candidate set"));
        assert!(fit_r(&[(ExpertId(0), ExpertId(9))], &experts).is_err());
    }

    #[test]
    fn fit_unit_distance_edges_hits_upper_bound() {
        let experts: Vec<ExpertiseVector> = (1..=6)
            .map(|x| ExpertiseVector::new(vec![x]).unwrap())
            .collect();
        let edges: Vec<_> = (0..5).map(|u| (ExpertId(u), ExpertId(u + 1))).collect();
        assert_eq!(fit_r(&edges, &experts).unwrap(), FIT_R_MAX);
    }

    #[test]
    fn golden_section_finds_quadratic_peak() {
        let x = golden_section_max(|x| -(x - 3.3) * (x - 3.3), 0.0, 10.0, 1e-6);
        assert!((x - 3.3).abs() < 1e-5);
    }

    #[test]
    fn likelihood_is_concave_on_grid() {
        let experts: Vec<ExpertiseVector> = (1..=10)
            .flat_map(|a| (1..=10).map(move |b| ExpertiseVector::new(vec![a, b]).unwrap()))
            .collect();
        let edges: Vec<_> = (0..80).map(|u| (ExpertId(u), ExpertId(99 - (u % 7)))).collect();
        let ll = EdgeLikelihood::new(&edges, &experts).unwrap();
        let values: Vec<f64> = (0..=40).map(|i| ll.log_likelihood(i as f64 * 0.25)).collect();
        for w in values.windows(3) {
            assert!(w[0] + w[2] <= 2.0 * w[1] + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn bounds_increase_with_r(r in 0.0f64..0.99, step in 0.001f64..0.01, n in 1000.0f64..1e6) {
            let a = upper_unified(n, 4.0, r, Constants::Shape).unwrap();
            let b = upper_unified(n, 4.0, r + step, Constants::Shape).unwrap();
            prop_assert!(b > a);
            let a = upper_diversified(n, 2, r, Constants::Shape).unwrap();
            let b = upper_diversified(n, 2, r + step, Constants::Shape).unwrap();
            prop_assert!(b > a);
        }

        #[test]
        fn lower_bounds_increase_with_r(r in 1.01f64..8.0, step in 0.01f64..1.0, n in 100.0f64..1e5, k in 1u32..5) {
            let k = f64::from(k);
            prop_assert!(lower_unified(n, 4.0, k, r + step, Constants::Shape).unwrap()
                > lower_unified(n, 4.0, k, r, Constants::Shape).unwrap());
            prop_assert!(lower_diversified(n, 2, k, r + step, Constants::Shape).unwrap()
                > lower_diversified(n, 2, k, r, Constants::Shape).unwrap());
        }

        #[test]
        fn ratio_of_equal_exponents_is_one(n in 10.0f64..1e5, m in 1usize..5, k in 1u32..5, r in 1.01f64..10.0) {
            prop_assert_eq!(predict_ratio(n, m, f64::from(k), r, r).unwrap(), 1.0);
        }

        #[test]
        fn explicit_lower_bounds_below_cap(
            width in 9usize..500, h in 1usize..10, k in 1usize..5, r in 1.01f64..20.0,
            lambda in 2u32..40, m in 1usize..4,
        ) {
            let unified = ModelConfig::unified(width * h, h, k, r, 0);
            let v = lower_unified((width * h) as f64, h as f64, k as f64, r, Constants::Explicit { c0: None }).unwrap();
            prop_assert!(v <= path_cap(&unified) as f64);
            let div = ModelConfig::diversified(m, lambda, k, r, 0);
            let v = lower_diversified(div.n() as f64, m, k as f64, r, Constants::Explicit { c0: None }).unwrap();
            prop_assert!(v <= path_cap(&div) as f64);
        }
    }
}
