//! Decentralized query routing in expert networks.
//!
//! Experts carry integer skill vectors. Each links to every expert within a
//! small L1 distance (local contacts) and to `k` experts drawn with
//! probability falling off as `d^-r` in one-sided expertise distance
//! (long-range contacts). Queries `(area, tau)` are forwarded greedily until
//! any expert with level `>= tau` in the area holds them.
//!
//! - [`expertise`]: vectors, distances, queries
//! - [`network`]: model parameters and the assembled network
//! - [`models`]: unified and diversified builders, long-range sampler,
//!   total-ability distribution
//! - [`routing`]: greedy search, with optional difficulty misreading
//! - [`bounds`]: path-length bounds, ratio prediction, exponent fitting
//! - [`harness`]: Monte Carlo sweeps and forwarding histograms

pub mod bounds;
pub mod error;
pub mod expertise;
pub mod harness;
pub mod models;
pub mod network;
pub mod routing;
pub mod seed;

pub use error::{Error, Result};
pub use expertise::{ExpertId, ExpertiseVector, Level, Query};
pub use network::{ExpertNetwork, Model, ModelConfig};
pub use routing::{ErrorModel, RouteResult, RouteStatus};
