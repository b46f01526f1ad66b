//! Decentralized greedy search, exact and under difficulty misinterpretation.
//!
//! A holder that cannot resolve `(area, tau)` forwards to the contact that
//! maximizes `min(level - tau, 0)`, seeing only its own contacts. Ties go to
//! the highest level in the query area, then to the smallest id.

use std::cmp::Reverse;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::expertise::{ExpertId, Level, Query};
use crate::network::ExpertNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteStatus {
    Resolved,
    /// Hop count exceeded the network size. Unreachable on well-formed models.
    AbortedHopCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteResult {
    /// First holder through resolver.
    pub path: Vec<ExpertId>,
    pub status: RouteStatus,
}

impl RouteResult {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_resolved(&self) -> bool {
        self.status == RouteStatus::Resolved
    }

    /// Consecutive `(holder, next)` pairs.
    pub fn forwards(&self) -> impl Iterator<Item = (ExpertId, ExpertId)> + '_ {
        self.path.windows(2).map(|p| (p[0], p[1]))
    }
}

/// Misinterpretation model: a holder at level `e` reads `tau` as a draw from
/// a normal with mean `tau` and std `c * (tau - e)`, truncated below at `e`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorModel {
    pub c: f64,
}

impl ErrorModel {
    pub const EXACT: ErrorModel = ErrorModel { c: 0.0 };

    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "error scaling factor must be finite and non-negative, got {c}"
            )));
        }
        Ok(ErrorModel { c })
    }

    pub fn is_exact(&self) -> bool {
        self.c == 0.0
    }
}

/// Greedy choice among `u`'s contacts for difficulty `tau_eff` in the query
/// area.
pub fn next_hop(u: ExpertId, query: &Query, net: &ExpertNetwork, tau_eff: i64) -> Result<ExpertId> {
    net.check_id(u)?;
    let area = query.area_index();
    net.contacts(u)
        .max_by_key(|&w| {
            let level = i64::from(net.expertise(w).level(area));
            ((level - tau_eff).min(0), level, Reverse(w))
        })
        .ok_or(Error::NoContacts(u.0))
}

/// Routes `query` from `start` until a holder with enough expertise in the
/// query area is reached. The exit test always uses the true `tau`; only the
/// forwarding choice sees the misread difficulty. No randomness is consumed
/// in exact mode.
pub fn route<R: Rng + ?Sized>(
    query: &Query,
    start: ExpertId,
    net: &ExpertNetwork,
    error: ErrorModel,
    rng: &mut R,
) -> Result<RouteResult> {
    net.check_id(start)?;
    if query.area > net.config().areas() {
        return Err(Error::InvalidInput(format!(
            "query area {} outside 1..={}",
            query.area,
            net.config().areas()
        )));
    }
    let area = query.area_index();
    let cap = net.len();
    let mut path = vec![start];
    let mut holder = start;
    loop {
        let level = net.expertise(holder).level(area);
        if level >= query.tau {
            return Ok(RouteResult {
                path,
                status: RouteStatus::Resolved,
            });
        }
        if path.len() > cap {
            return Ok(RouteResult {
                path,
                status: RouteStatus::AbortedHopCap,
            });
        }
        let tau_eff = if error.is_exact() {
            i64::from(query.tau)
        } else {
            sample_misread_tau(level, query.tau, error.c, rng)
        };
        holder = next_hop(holder, query, net, tau_eff)?;
        path.push(holder);
    }
}

/// Draws the misread difficulty `tau'` for a holder at `level < tau`,
/// rounded half away from zero. Inverse-CDF sampling on the upper tail
/// `[level, inf)`, so the cost does not depend on where the cut falls.
pub fn sample_misread_tau<R: Rng + ?Sized>(level: Level, tau: Level, c: f64, rng: &mut R) -> i64 {
    if c == 0.0 || level >= tau {
        return i64::from(tau);
    }
    let mean = f64::from(tau);
    let sigma = c * (mean - f64::from(level));
    let x = mean + sigma * upper_tail_standard_normal((f64::from(level) - mean) / sigma, rng);
    // x >= level, and level is an integer, so rounding keeps tau' >= level
    (x.round() as i64).max(i64::from(level))
}

/// Standard normal conditioned on `Z >= lower`.
fn upper_tail_standard_normal<R: Rng + ?Sized>(lower: f64, rng: &mut R) -> f64 {
    let std = Normal::standard();
    // mass above the cut, taken from the complementary side to keep
    // precision when the cut sits far out in the upper tail
    let tail = std.cdf(-lower);
    // q in (0, tail]
    let q = tail * (1.0 - rng.random::<f64>());
    let z = -std.inverse_cdf(q);
    z.max(lower)
}
