//! Closed-form total-ability distribution of the diversified model.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// `C(a, b)`, zero whenever `a < b`, `a < 0` or `b < 0`.
fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || a < 0 || a < b {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Number of points of `[1, lambda]^m` whose coordinates sum to `phi`, by
/// inclusion-exclusion over the coordinates that overflow `lambda`.
pub fn ability_count(phi: u64, m: usize, lambda: u32) -> BigUint {
    let (phi, m_i, lam) = (phi as i64, m as i64, i64::from(lambda));
    if m == 0 || lambda == 0 || phi < m_i {
        return BigUint::zero();
    }
    let upper = ((phi - m_i) / lam).min(m_i);
    let mut total = BigInt::zero();
    for q in 0..=upper {
        let term = binomial(m_i, q) * binomial(phi - 1 - q * lam, m_i - 1);
        if q % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    debug_assert!(!total.is_negative());
    total.to_biguint().unwrap_or_default()
}

/// Mean total ability `(m + m * n^(1/m)) / 2` for `n = lambda^m`.
pub fn expected_ability(m: usize, n: u64) -> f64 {
    let m_f = m as f64;
    let root = integer_root(n, m)
        .map(|r| r as f64)
        .unwrap_or_else(|| (n as f64).powf(1.0 / m_f));
    (m_f + m_f * root) / 2.0
}

/// `n^(1/m)` when `n` is a perfect `m`-th power.
pub fn integer_root(n: u64, m: usize) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let guess = (n as f64).powf(1.0 / m as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&c| {
        u32::try_from(m)
            .ok()
            .and_then(|e| c.checked_pow(e))
            .is_some_and(|p| p == n)
    })
}

/// Expert counts by total ability, `phi` in `[m, m * lambda]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbilityHistogram {
    pub m: usize,
    pub lambda: u32,
    pub counts: BTreeMap<u64, BigUint>,
}

impl AbilityHistogram {
    pub fn new(m: usize, lambda: u32) -> Self {
        let lo = m as u64;
        let hi = m as u64 * u64::from(lambda);
        let counts = (lo..=hi)
            .map(|phi| (phi, ability_count(phi, m, lambda)))
            .collect();
        AbilityHistogram { m, lambda, counts }
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// `(phi, count, probability)` rows in increasing `phi`.
    pub fn rows(&self) -> Vec<(u64, BigUint, f64)> {
        let total = self.total();
        let total_f = total.to_f64().unwrap_or(f64::INFINITY);
        self.counts
            .iter()
            .map(|(&phi, c)| (phi, c.clone(), c.to_f64().unwrap_or(0.0) / total_f))
            .collect()
    }

    /// Mean as an exact fraction `(numerator, denominator)`.
    pub fn mean_fraction(&self) -> (BigUint, BigUint) {
        let num = self
            .counts
            .iter()
            .map(|(&phi, c)| c * BigUint::from(phi))
            .sum();
        (num, self.total())
    }

    pub fn is_symmetric(&self) -> bool {
        let lo = self.m as u64;
        let hi = lo * u64::from(self.lambda);
        self.counts
            .iter()
            .all(|(&phi, c)| self.counts.get(&(lo + hi - phi)) == Some(c))
    }

    /// Non-decreasing up to the peak, non-increasing after.
    pub fn is_unimodal(&self) -> bool {
        let values: Vec<&BigUint> = self.counts.values().collect();
        let mut falling = false;
        for pair in values.windows(2) {
            if pair[1] < pair[0] {
                falling = true;
            } else if pair[1] > pair[0] && falling {
                return false;
            }
        }
        true
    }
}
