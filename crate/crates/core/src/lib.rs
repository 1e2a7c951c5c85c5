//! Coalition games for relaying in asymmetric multihop cellular networks.
//!
//! Nodes in three concentric rings around a base station share uplink
//! bandwidth. Outer nodes can only reach the base station through relays,
//! and the crate models how bandwidth is split between and inside relaying
//! groups, which groupings are stable, and how much coverage cooperation buys.

pub mod allocation;
pub mod analytic;
pub mod error;
pub mod game;
pub mod physical;
pub mod simulator;
pub mod solvers;
pub mod stability;

pub use allocation::{intra_bea_split, payoff_vector, traffic_vector, AllocationVector, TrafficVector};
pub use error::{Error, Result};
pub use game::{
    check_negative_externality, enumerate_all, enumerate_feasible_cs, enumerate_mergences, inter_bea_value, Catalog,
    Coalition, CoalitionKind, CoalitionStructure, ExternalityReport, Mergence, NodeId, PartitionFunction, Ring,
};
pub use physical::{
    evaluate, power_vector, required_power, utility_vector, CsOutcome, Position, PowerModel, RingGeometry, UtilitySpec,
};
pub use simulator::{
    run_monte_carlo, run_sweep, sweep_csv, AggregateMetrics, NodeClass, RunMetrics, SimConfig, SweepAxis, SweepRow,
};
pub use solvers::{
    cmv_closed_form_3, compensated_myerson_value, lattice_myerson_value, myerson_value, CompensationSpec,
    RestrictedGame, ValueVector,
};
pub use stability::{
    external_stability, inductive_core, internal_stability, joint_exit_deviations, residual_core, CoreResult,
    Deviation, UtilityTable,
};

/// Exact share arithmetic.
pub type Rational = num_rational::Ratio<i128>;
