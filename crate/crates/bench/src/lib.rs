//! Shared inputs for the benchmarks.

use bea_core::analytic::{self, AnalyticGame};
use bea_core::{PowerModel, SimConfig, UtilitySpec, UtilityTable};

/// Five-node reference game with its utility table.
pub fn five_node_table() -> (AnalyticGame, UtilityTable) {
    let g = analytic::five_node();
    let t = UtilityTable::build(
        &g.catalog,
        &g.positions,
        &PowerModel::for_geometry(&g.geometry),
        &UtilitySpec::default(),
    )
    .expect("reference game utilities");
    (g, t)
}

/// Default coverage parameters with fewer realizations.
pub fn quick_config(realizations: usize) -> SimConfig {
    SimConfig {
        realizations,
        ..SimConfig::default()
    }
}
