//! Model parameters and the assembled expert network.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expertise::{self, ExpertId, ExpertiseVector, Level, Query};
use crate::models;

/// Which generative model a network follows, with its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    /// `h` rows by `n / h` columns, two areas, similarity degree 2.
    Unified { n: usize, h: usize },
    /// One expert per point of `[1, lambda]^m`, similarity degree 1.
    Diversified { m: usize, lambda: Level },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Unified { .. } => "unified",
            Model::Diversified { .. } => "diversified",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Unified { n, h } => {
                if h == 0 {
                    return Err(Error::InvalidConfig("h must be at least 1".into()));
                }
                if n % h != 0 {
                    return Err(Error::InvalidConfig("n must be divisible by h".into()));
                }
                if n / h < 2 {
                    return Err(Error::InvalidConfig("n/h must be at least 2".into()));
                }
                if Level::try_from(n / h).is_err() {
                    return Err(Error::InvalidConfig("n/h does not fit an expertise level".into()));
                }
                Ok(())
            }
            Model::Diversified { m, lambda } => {
                if m == 0 {
                    return Err(Error::InvalidConfig("m must be at least 1".into()));
                }
                if lambda < 2 {
                    return Err(Error::InvalidConfig("lambda must be at least 2".into()));
                }
                let exp = u32::try_from(m)
                    .map_err(|_| Error::InvalidConfig("m is too large".into()))?;
                (lambda as usize)
                    .checked_pow(exp)
                    .ok_or_else(|| Error::InvalidConfig("lambda^m overflows".into()))?;
                Ok(())
            }
        }
    }

    /// Number of experts. Only meaningful on a validated model.
    pub fn n(&self) -> usize {
        match *self {
            Model::Unified { n, .. } => n,
            Model::Diversified { m, lambda } => (lambda as usize).pow(m as u32),
        }
    }

    /// Number of problem areas `m`.
    pub fn areas(&self) -> usize {
        match *self {
            Model::Unified { .. } => 2,
            Model::Diversified { m, .. } => m,
        }
    }

    pub fn delta(&self) -> u64 {
        match self {
            Model::Unified { .. } => 2,
            Model::Diversified { .. } => 1,
        }
    }

    /// `h` for the unified model, `m` for the diversified one.
    pub fn h_or_m(&self) -> usize {
        match *self {
            Model::Unified { h, .. } => h,
            Model::Diversified { m, .. } => m,
        }
    }

    /// Highest level any expert reaches in any area. Both models are
    /// symmetric across areas.
    pub fn max_level(&self) -> Level {
        match *self {
            Model::Unified { n, h } => (n / h - 1) as Level,
            Model::Diversified { lambda, .. } => lambda,
        }
    }

    /// Lowest level any expert has in any area.
    pub fn min_level(&self) -> Level {
        match self {
            Model::Unified { .. } => 0,
            Model::Diversified { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub model: Model,
    /// Long-range draws per expert.
    pub k: usize,
    /// Exponent of the inverse power law over expertise distance.
    pub r: f64,
    /// The `r -> infinity` limit: no long-range contacts at all.
    #[serde(default)]
    pub no_long_range: bool,
    pub seed: u64,
}

impl ModelConfig {
    pub fn unified(n: usize, h: usize, k: usize, r: f64, seed: u64) -> Self {
        ModelConfig {
            model: Model::Unified { n, h },
            k,
            r,
            no_long_range: false,
            seed,
        }
    }

    pub fn diversified(m: usize, lambda: Level, k: usize, r: f64, seed: u64) -> Self {
        ModelConfig {
            model: Model::Diversified { m, lambda },
            k,
            r,
            no_long_range: false,
            seed,
        }
    }

    pub fn without_long_range(mut self) -> Self {
        self.no_long_range = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "r must be a finite non-negative number, got {}",
                self.r
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.model.n()
    }

    #[inline]
    pub fn areas(&self) -> usize {
        self.model.areas()
    }

    #[inline]
    pub fn delta(&self) -> u64 {
        self.model.delta()
    }
}

/// Experts, their deterministic substrate, and one draw of long-range links.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertNetwork {
    config: ModelConfig,
    experts: Vec<ExpertiseVector>,
    local: Vec<Vec<ExpertId>>,
    long_range: Vec<Vec<ExpertId>>,
}

impl ExpertNetwork {
    pub(crate) fn from_parts(
        config: ModelConfig,
        experts: Vec<ExpertiseVector>,
        local: Vec<Vec<ExpertId>>,
        long_range: Vec<Vec<ExpertId>>,
    ) -> Self {
        debug_assert_eq!(experts.len(), local.len());
        debug_assert_eq!(experts.len(), long_range.len());
        ExpertNetwork {
            config,
            experts,
            local,
            long_range,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn experts(&self) -> &[ExpertiseVector] {
        &self.experts
    }

    pub fn ids(&self) -> impl Iterator<Item = ExpertId> + '_ {
        (0..self.experts.len()).map(ExpertId)
    }

    pub fn check_id(&self, u: ExpertId) -> Result<()> {
        if u.0 >= self.experts.len() {
            return Err(Error::UnknownExpert(u.0, self.experts.len()));
        }
        Ok(())
    }

    #[inline]
    pub fn expertise(&self, u: ExpertId) -> &ExpertiseVector {
        &self.experts[u.0]
    }

    #[inline]
    pub fn local_contacts(&self, u: ExpertId) -> &[ExpertId] {
        &self.local[u.0]
    }

    #[inline]
    pub fn long_range_contacts(&self, u: ExpertId) -> &[ExpertId] {
        &self.long_range[u.0]
    }

    /// Local then long-range contacts. Duplicates are possible.
    pub fn contacts(&self, u: ExpertId) -> impl Iterator<Item = ExpertId> + '_ {
        self.local[u.0]
            .iter()
            .chain(self.long_range[u.0].iter())
            .copied()
    }

    /// Experts not componentwise dominated by `u`, in id order.
    pub fn candidate_set(&self, u: ExpertId) -> Result<Vec<ExpertId>> {
        self.check_id(u)?;
        Ok(candidates(&self.experts, u))
    }

    /// Whether some expert can resolve `query`.
    pub fn is_answerable(&self, query: &Query) -> bool {
        query.area <= self.config.areas() && query.tau <= self.config.model.max_level()
    }

    /// Checks every structural invariant; used on load and in tests.
    pub fn validate(&self) -> Result<()> {
        let n = self.experts.len();
        let delta = self.config.delta();
        for u in 0..n {
            let eu = &self.experts[u];
            for &w in &self.local[u] {
                if w.0 >= n || w.0 == u {
                    return Err(Error::InvalidInput(format!(
                        "expert {u} has invalid local contact {w}"
                    )));
                }
                if !expertise::is_local_contact(eu, &self.experts[w.0], delta)? {
                    return Err(Error::InvalidInput(format!(
                        "local contact {u}-{w} exceeds similarity degree {delta}"
                    )));
                }
                if !self.local[w.0].contains(&ExpertId(u)) {
                    return Err(Error::InvalidInput(format!(
                        "local contact {u}-{w} is not symmetric"
                    )));
                }
            }
            if self.long_range[u].len() > self.config.k {
                return Err(Error::InvalidInput(format!(
                    "expert {u} has {} long-range contacts, more than k = {}",
                    self.long_range[u].len(),
                    self.config.k
                )));
            }
            for &w in &self.long_range[u] {
                if w.0 >= n || !expertise::is_candidate(eu, &self.experts[w.0])? {
                    return Err(Error::InvalidInput(format!(
                        "long-range contact {u}->{w} violates candidate set"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = NetworkFile {
            config: self.config,
            experts: self.experts.clone(),
            long_range: self.long_range.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Loads a serialized network. The substrate is rebuilt from the config
    /// and the stored expertise vectors must match it.
    pub fn from_json(json: &str) -> Result<Self> {
        let file: NetworkFile =
            serde_json::from_str(json).map_err(|e| Error::InvalidInput(e.to_string()))?;
        file.config.validate()?;
        let (experts, local) = models::substrate(&file.config.model)?;
        if experts != file.experts {
            return Err(Error::InvalidInput(
                "stored expertise vectors do not match the model configuration".into(),
            ));
        }
        if file.long_range.len() != experts.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} long-range lists, found {}",
                experts.len(),
                file.long_range.len()
            )));
        }
        let net = ExpertNetwork::from_parts(file.config, experts, local, file.long_range);
        net.validate()?;
        Ok(net)
    }
}

pub(crate) fn candidates(experts: &[ExpertiseVector], u: ExpertId) -> Vec<ExpertId> {
    let eu = &experts[u.0];
    experts
        .iter()
        .enumerate()
        .filter(|&(w, ew)| w != u.0 && !ew.dominated_by(eu))
        .map(|(w, _)| ExpertId(w))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    config: ModelConfig,
    experts: Vec<ExpertiseVector>,
    long_range: Vec<Vec<ExpertId>>,
}
