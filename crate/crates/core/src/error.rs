use thiserror::Error;

use crate::game::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coalition {members:?} does not match any relaying template")]
    InvalidCoalition { members: Vec<usize> },

    #[error("node {0} appears in more than one coalition")]
    OverlappingCoalitions(NodeId),

    #[error("node {node} is out of range for a {n}-node game")]
    UnknownNode { node: usize, n: usize },

    #[error("coalition structure does not cover node {0}")]
    Uncovered(NodeId),

    #[error("coalition {0} is not in the feasible catalog")]
    Infeasible(String),

    #[error("no coalition in {0} can reach the base station")]
    NoReachableCoalition(String),

    #[error("coalition {0} cannot reach the base station")]
    UnreachableCoalition(String),

    #[error("group share must be positive, got {0}")]
    NonPositiveShare(String),

    #[error("mergence into {coalition} is not valid from {structure}")]
    InvalidMergence { coalition: String, structure: String },

    #[error("negative externality requires more than 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("partition function has no value for embedded coalition ({coalition}, {structure})")]
    MissingValue { coalition: String, structure: String },

    #[error("compensated value system is singular at lambda = {lambda}")]
    Singular { lambda: f64 },

    #[error("compensation weight must be finite and non-negative, got {0}")]
    InvalidLambda(f64),

    #[error("rho must lie strictly between 0 and 1, got {0}")]
    InvalidRho(f64),

    #[error("distance must be positive and finite, got {0}")]
    InvalidDistance(f64),

    #[error("invalid ring geometry: {0}")]
    InvalidGeometry(String),

    #[error("{0} is not a single-agreement structure")]
    NotSingleAgreement(String),

    #[error("no utilities recorded for {0}")]
    MissingUtilities(String),

    #[error("core recursion exceeded depth {0}")]
    RecursionDepth(usize),

    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error("invalid value {value} for sweep axis {axis}: {reason}")]
    SweepValue {
        axis: String,
        value: String,
        reason: String,
    },
}
