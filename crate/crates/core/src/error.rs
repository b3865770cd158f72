use thiserror::Error;

use crate::instance::Clustering;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("negative or non-finite distance d({x},{y}) = {value}")]
    NegativeEntry { x: usize, y: usize, value: f64 },
    #[error("nonzero self-distance d({x},{x}) = {value}")]
    NonzeroDiagonal { x: usize, value: f64 },
    #[error("asymmetric entries d({x},{y}) != d({y},{x})")]
    AsymmetricEntry { x: usize, y: usize },
    #[error("triangle inequality violated: d({x},{y}) > d({x},{z}) + d({z},{y})")]
    TriangleViolation { x: usize, z: usize, y: usize },

    #[error("edge ({x},{y}) listed twice with different lengths")]
    InconsistentEdges { x: usize, y: usize },
    #[error("edge ({x},{y}) of length {given} is longer than a path of length {shortest} through other edges")]
    NonMetricEdge {
        x: usize,
        y: usize,
        given: f64,
        shortest: f64,
    },
    #[error("points {x} and {y} are disconnected and no big value was supplied")]
    DisconnectedWithNoBig { x: usize, y: usize },
    #[error("edge endpoint {point} out of range for {points} points")]
    PointOutOfRange { point: usize, points: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("agent {agent} is not a member of the given cluster")]
    AgentNotInCluster { agent: usize },
    #[error("agent {agent} appears in more than one cluster")]
    OverlappingClusters { agent: usize },
    #[error("agent {agent} is not covered by any cluster")]
    UncoveredAgent { agent: usize },
    #[error("cluster {cluster} has infeasible center {center}")]
    InfeasibleCenter { cluster: usize, center: usize },
    #[error("{count} clusters exceed k = {k}")]
    TooManyClusters { count: usize, k: usize },
    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },
    #[error("agent index {agent} out of range")]
    AgentOutOfRange { agent: usize },

    #[error("exact search needs {evaluations} evaluations, above the budget of {budget}")]
    PoolTooLargeForExact { evaluations: f64, budget: f64 },
    #[error("brute-force audit needs {evaluations} evaluations, above the budget of {budget}")]
    BudgetExceeded { evaluations: f64, budget: f64 },
    #[error("empty agent pool")]
    EmptyPool,

    #[error("MCC approximation factor {0} is below 1")]
    AlphaBelowOne(f64),
    #[error("lambda {0} is outside the admissible range")]
    LambdaOutOfRange(f64),
    #[error("operation requires a weighted single-metric instance")]
    RequiresWeighted,

    #[error("instance has no coordinates")]
    NoCoordinates,
    #[error("bad counterexample parameters: {0}")]
    BadParameters(String),
    #[error("{n} agents is too many to enumerate clusterings (limit {limit})")]
    TooLargeToEnumerate { n: usize, limit: usize },
    #[error("theorem {theorem} falsified: value {value} below threshold {threshold}")]
    TheoremFalsified {
        theorem: String,
        value: f64,
        threshold: f64,
        clustering: Box<Clustering>,
    },
}
