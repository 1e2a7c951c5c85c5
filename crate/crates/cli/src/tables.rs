//! Partition function, payoff, traffic, power and utility tables as CSV.

use std::fmt::Write as _;

use bea_core::analytic::AnalyticGame;
use bea_core::physical::to_f64;
use bea_core::{
    enumerate_all, evaluate, payoff_vector, traffic_vector, PartitionFunction, PowerModel, Rational, UtilitySpec,
};
use clap::ValueEnum;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Pf,
    Payoff,
    Traffic,
    Power,
    Utility,
}

/// Exact power values are dyadic in the reference games.
fn exact_power(p: f64) -> String {
    Rational::approximate_float(p).map_or_else(|| p.to_string(), |r| r.to_string())
}

fn node_header(out: &mut String, n: usize, exact: bool) {
    out.push_str("structure");
    if exact {
        for i in 1..=n {
            let _ = write!(out, ",MS{i}");
        }
    }
    for i in 1..=n {
        let _ = write!(out, ",MS{i}_dec");
    }
    out.push('\n');
}

pub fn render(game: &AnalyticGame, which: Which, rho: f64) -> CliResult<String> {
    let n = game.node_count();
    let model = PowerModel::for_geometry(&game.geometry);
    let spec = UtilitySpec::new(rho)?;
    let mut out = String::new();
    match which {
        Which::Pf => {
            out.push_str("structure,coalition,share,share_dec\n");
            let v = PartitionFunction::inter_bea(&game.catalog);
            for (cs, shares) in v.iter() {
                for (c, s) in cs.coalitions().iter().zip(shares) {
                    let _ = writeln!(out, "{cs},{c},{s},{}", to_f64(*s));
                }
            }
        }
        Which::Payoff | Which::Traffic => {
            node_header(&mut out, n, true);
            for cs in enumerate_all(&game.catalog) {
                let row = if which == Which::Payoff {
                    payoff_vector(&cs)?.phi
                } else {
                    traffic_vector(&cs)?.t
                };
                let _ = write!(out, "{cs}");
                for x in &row {
                    let _ = write!(out, ",{x}");
                }
                for x in &row {
                    let _ = write!(out, ",{}", to_f64(*x));
                }
                out.push('\n');
            }
        }
        Which::Power | Which::Utility => {
            node_header(&mut out, n, which == Which::Power);
            for cs in enumerate_all(&game.catalog) {
                let o = evaluate(&cs, &game.positions, &model, &spec)?;
                let _ = write!(out, "{cs}");
                if which == Which::Power {
                    for p in &o.power {
                        let _ = write!(out, ",{}", exact_power(*p));
                    }
                }
                for x in if which == Which::Power { &o.power } else { &o.utility } {
                    let _ = write!(out, ",{x}");
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}
