//! Core- and FJR-fair clustering with semi-centroid losses.
//!
//! Agents are charged a loss that adds the distance to their cluster's
//! center and the largest distance to a cluster-mate. The crate provides the
//! greedy-capture family, the dual-metric and semi-ball algorithms, iterative
//! most-cohesive-cluster extraction, exact core/FJR auditors, classical
//! baselines, and exhaustive certificates for the known lower-bound
//! instances.

pub mod audit;
pub mod baselines;
pub mod counterexamples;
pub mod error;
pub mod fair;
pub mod greedy;
pub mod instance;
pub mod loss;
pub mod mcc;
pub mod metric;
pub mod random;
mod util;

pub use audit::{bruteforce_violation, exact_violation, AuditOptions, AuditReport, Criterion};
pub use error::{Error, Result};
pub use instance::{validate_clustering, Cluster, Clustering, Deviation, Instance, Metrics};
pub use loss::{LossModel, LossTarget};
pub use metric::{complete_metric, validate_pseudometric, DistanceMatrix};
pub use util::ratio;
