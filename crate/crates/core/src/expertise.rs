//! Expertise vectors and the pairwise measures built on them.
//!
//! An expert's skill profile is a vector of `m` non-negative integer levels,
//! one per problem area. Everything that decides who links to whom (local
//! contacts by L1 similarity, long-range candidates by one-sided superiority)
//! is computed from these vectors with exact integer arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Skill level in a single area.
pub type Level = u32;

/// Dense index of an expert inside a network, in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpertId(pub usize);

impl ExpertId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ExpertId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for ExpertId {
    fn from(id: usize) -> Self {
        ExpertId(id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpertiseVector(Vec<Level>);

impl ExpertiseVector {
    /// Fails on an empty vector; every expert covers at least one area.
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput(
                "expertise vector must have at least one area".into(),
            ));
        }
        Ok(ExpertiseVector(levels))
    }

    /// Number of areas `m`.
    #[inline]
    pub fn areas(&self) -> usize {
        self.0.len()
    }

    /// Level in the 0-based area `idx`.
    #[inline]
    pub fn level(&self, idx: usize) -> Level {
        self.0[idx]
    }

    #[inline]
    pub fn levels(&self) -> &[Level] {
        &self.0
    }

    /// Total ability: the L1 norm of the vector.
    pub fn total_ability(&self) -> u64 {
        l1_norm(self)
    }

    /// True when every entry is `<=` the matching entry of `other`.
    pub fn dominated_by(&self, other: &ExpertiseVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for ExpertiseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Level>> for ExpertiseVector {
    type Error = Error;

    fn try_from(levels: Vec<Level>) -> Result<Self> {
        ExpertiseVector::new(levels)
    }
}

fn check_len(u: &ExpertiseVector, w: &ExpertiseVector) -> Result<()> {
    if u.areas() != w.areas() {
        return Err(Error::LengthMismatch(u.areas(), w.areas()));
    }
    Ok(())
}

pub fn l1_norm(v: &ExpertiseVector) -> u64 {
    v.0.iter().map(|&x| u64::from(x)).sum()
}

/// One-sided distance `d(u -> w)`: the sum of the areas where `w` is ahead of
/// `u`, counting only the amount by which it is ahead.
pub fn expertise_distance(u: &ExpertiseVector, w: &ExpertiseVector) -> Result<u64> {
    check_len(u, w)?;
    Ok(distance_unchecked(u, w))
}

#[inline]
pub(crate) fn distance_unchecked(u: &ExpertiseVector, w: &ExpertiseVector) -> u64 {
    u.0.iter()
        .zip(&w.0)
        .map(|(&a, &b)| u64::from(b.saturating_sub(a)))
        .sum()
}

/// `||w - u||_1`.
pub fn l1_difference(u: &ExpertiseVector, w: &ExpertiseVector) -> Result<u64> {
    check_len(u, w)?;
    Ok(u.0
        .iter()
        .zip(&w.0)
        .map(|(&a, &b)| u64::from(a.abs_diff(b)))
        .sum())
}

/// Homophily predicate on vectors. Whether `u` and `w` are the same expert is
/// the caller's business: distinct experts may share a vector.
pub fn is_local_contact(u: &ExpertiseVector, w: &ExpertiseVector, delta: u64) -> Result<bool> {
    Ok(l1_difference(u, w)? <= delta)
}

/// `w` is a long-range candidate for `u` iff `w` is not componentwise `<= u`.
pub fn is_candidate(u: &ExpertiseVector, w: &ExpertiseVector) -> Result<bool> {
    check_len(u, w)?;
    Ok(!w.dominated_by(u))
}

/// A single-area query `(area, tau)`. `area` is 1-based, `tau` is the minimum
/// level in that area needed to resolve it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub area: usize,
    pub tau: Level,
}

impl Query {
    pub fn new(area: usize, tau: Level) -> Result<Self> {
        if area == 0 {
            return Err(Error::InvalidInput("query areas are numbered from 1".into()));
        }
        if tau == 0 {
            return Err(Error::InvalidInput("query difficulty must be positive".into()));
        }
        Ok(Query { area, tau })
    }

    /// 0-based area index for vector access.
    #[inline]
    pub fn area_index(&self) -> usize {
        self.area - 1
    }

    #[inline]
    pub fn solved_by(&self, e: &ExpertiseVector) -> bool {
        e.level(self.area_index()) >= self.tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(levels: &[Level]) -> ExpertiseVector {
        ExpertiseVector::new(levels.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(l1_norm(&v(&[0, 0])), 0);
        assert_eq!(l1_norm(&v(&[3, 1])), 4);
        assert_eq!(l1_norm(&v(&[2, 2, 2])), 6);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(expertise_distance(&v(&[0, 0]), &v(&[3, 1])).unwrap(), 4);
        assert_eq!(expertise_distance(&v(&[3, 1]), &v(&[0, 0])).unwrap(), 0);
        assert_eq!(expertise_distance(&v(&[2, 3]), &v(&[4, 1])).unwrap(), 2);
        assert_eq!(expertise_distance(&v(&[5, 7, 1]), &v(&[5, 7, 1])).unwrap(), 0);
    }

    #[test]
    fn distance_length_mismatch() {
        let err = expertise_distance(&v(&[1, 2]), &v(&[1, 2, 3])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch(2, 3));
        assert!(is_local_contact(&v(&[1]), &v(&[1, 1]), 1).is_err());
    }

    #[test]
    fn local_contact_examples() {
        // adjacent unified columns differ by exactly 2
        assert!(is_local_contact(&v(&[3, 56]), &v(&[4, 55]), 2).unwrap());
        // diversified grid has no diagonals
        assert!(!is_local_contact(&v(&[1, 1]), &v(&[2, 2]), 1).unwrap());
        assert!(is_local_contact(&v(&[4, 4]), &v(&[4, 4]), 1).unwrap());
    }

    #[test]
    fn empty_vector_rejected() {
        assert!(ExpertiseVector::new(vec![]).is_err());
        assert!(Query::new(0, 1).is_err());
        assert!(Query::new(1, 0).is_err());
    }

    fn pair() -> impl Strategy<Value = (ExpertiseVector, ExpertiseVector)> {
        (1usize..6).prop_flat_map(|m| {
            (
                prop::collection::vec(0u32..50, m),
                prop::collection::vec(0u32..50, m),
            )
                .prop_map(|(a, b)| (v(&a), v(&b)))
        })
    }

    proptest! {
        #[test]
        fn distance_splits_l1((u, w) in pair()) {
            let fwd = expertise_distance(&u, &w).unwrap();
            let back = expertise_distance(&w, &u).unwrap();
            prop_assert_eq!(fwd + back, l1_difference(&u, &w).unwrap());
        }

        #[test]
        fn zero_distance_iff_dominated((u, w) in pair()) {
            let d = expertise_distance(&u, &w).unwrap();
            prop_assert_eq!(d == 0, w.dominated_by(&u));
            prop_assert_eq!(is_candidate(&u, &w).unwrap(), d >= 1);
        }

        #[test]
        fn local_contact_symmetric((u, w) in pair(), delta in 0u64..10) {
            prop_assert_eq!(
                is_local_contact(&u, &w, delta).unwrap(),
                is_local_contact(&w, &u, delta).unwrap()
            );
        }
    }
}
