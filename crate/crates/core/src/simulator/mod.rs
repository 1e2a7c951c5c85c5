//! Monte Carlo coverage and efficiency experiments.

mod config;
mod formation;
mod metrics;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use config::{SimConfig, KEYS};
pub use formation::{form_coalitions, place_nodes, Scenario};
pub use metrics::{
    connectivity, connectivity_noncoop, node_efficiency, relative_efficiency, run_metrics, NodeClass, NodeEfficiency,
    RelativeEfficiency, RunMetrics, Summary,
};

/// Generator for realization `index`: one stream per index under the seed.
pub fn realization_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Place, form and measure one realization.
pub fn run_realization(config: &SimConfig, index: usize) -> Result<(Scenario, RunMetrics)> {
    let mut rng = realization_rng(config.seed, index);
    let placed = place_nodes(config, &mut rng)?;
    let formed = form_coalitions(&placed, config, &mut rng)?;
    let m = run_metrics(&formed, config)?;
    Ok((formed, m))
}

/// Realization results folded into means and standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    pub realizations: usize,
    pub connectivity: Summary,
    pub connectivity_noncoop: Summary,
    pub cooperative_gain: Summary,
    pub n1: Summary,
    pub n2: Summary,
    pub n3: Summary,
    pub efficiency: BTreeMap<NodeClass, Summary>,
    pub relative: BTreeMap<NodeClass, Summary>,
    pub all_avg: Option<Summary>,
}

fn fold(runs: &[RunMetrics]) -> AggregateMetrics {
    let pick = |f: &dyn Fn(&RunMetrics) -> f64| {
        let xs: Vec<f64> = runs.iter().map(f).collect();
        Summary::of(&xs).unwrap_or(Summary {
            mean: 0.0,
            std_err: 0.0,
            count: 0,
        })
    };
    let by_class = |f: &dyn Fn(&RunMetrics) -> &BTreeMap<NodeClass, f64>| {
        NodeClass::ALL
            .iter()
            .filter_map(|&c| {
                let xs: Vec<f64> = runs.iter().filter_map(|r| f(r).get(&c).copied()).collect();
                Summary::of(&xs).map(|s| (c, s))
            })
            .collect::<BTreeMap<_, _>>()
    };
    let all_avg: Vec<f64> = runs.iter().filter_map(|r| r.all_avg).collect();
    AggregateMetrics {
        realizations: runs.len(),
        connectivity: pick(&|r| r.connectivity),
        connectivity_noncoop: pick(&|r| r.connectivity_noncoop),
        cooperative_gain: pick(&|r| r.cooperative_gain),
        n1: pick(&|r| r.n1 as f64),
        n2: pick(&|r| r.n2 as f64),
        n3: pick(&|r| r.n3 as f64),
        efficiency: by_class(&|r| &r.efficiency),
        relative: by_class(&|r| &r.relative),
        all_avg: Summary::of(&all_avg),
    }
}

/// Every realization's metrics, in index order.
pub fn run_all(config: &SimConfig) -> Result<Vec<RunMetrics>> {
    config.validate()?;
    (0..config.realizations)
        .into_par_iter()
        .map(|k| run_realization(config, k).map(|(_, m)| m))
        .collect()
}

/// Aggregated metrics; identical for a given config whatever the thread count.
pub fn run_monte_carlo(config: &SimConfig) -> Result<AggregateMetrics> {
    Ok(fold(&run_all(config)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NodeCount,
    /// Service area diameter in metres.
    ServiceArea,
    /// Width moved from the inner to the outer ring, as a fraction of the cell diameter.
    RingWidthDelta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NodeCount => "node_count",
            SweepAxis::ServiceArea => "service_area",
            SweepAxis::RingWidthDelta => "ring_width_delta",
        }
    }

    /// `config` with the axis set to `value`.
    pub fn apply(self, config: &SimConfig, value: f64) -> Result<SimConfig> {
        let reject = |reason: &str| Error::SweepValue {
            axis: self.name().into(),
            value: value.to_string(),
            reason: reason.into(),
        };
        let mut c = config.clone();
        match self {
            SweepAxis::NodeCount => {
                if !(value.is_finite() && value >= 0.0 && value.fract() == 0.0) {
                    return Err(reject("node count must be a non-negative integer"));
                }
                c.node_count = value as usize;
            }
            SweepAxis::ServiceArea => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(reject("service area diameter must be positive"));
                }
                c.service_area_diameter_m = value;
            }
            SweepAxis::RingWidthDelta => {
                if !(value.is_finite() && value.abs() < 1.0 / 6.0) {
                    return Err(reject("shift must keep every ring width positive (|delta| < 1/6)"));
                }
                c.ring_widths_m = c.ring_widths_for_delta(value);
            }
        }
        c.validate().map_err(|e| reject(&e.to_string()))?;
        Ok(c)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node_count" => Ok(SweepAxis::NodeCount),
            "service_area" => Ok(SweepAxis::ServiceArea),
            "ring_width_delta" | "ring_width" => Ok(SweepAxis::RingWidthDelta),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

/// One aggregated row per sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub config: SimConfig,
    pub metrics: AggregateMetrics,
}

pub fn run_sweep(config: &SimConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    let configs = values
        .iter()
        .map(|&v| axis.apply(config, v))
        .collect::<Result<Vec<_>>>()?;
    values
        .iter()
        .zip(configs)
        .map(|(&value, c)| {
            Ok(SweepRow {
                value,
                metrics: run_monte_carlo(&c)?,
                config: c,
            })
        })
        .collect()
}

fn push_summary(out: &mut String, s: Option<&Summary>) {
    match s {
        Some(s) => {
            let _ = write!(out, ",{},{}", s.mean, s.std_err);
        }
        None => out.push_str(",,"),
    }
}

/// Header plus one line per row.
pub fn sweep_csv(axis: Option<SweepAxis>, rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "axis,value,realizations,node_count,service_area_diameter_m,ring_width_inner_m,ring_width_middle_m,ring_width_outer_m",
    );
    for name in [
        "connectivity",
        "connectivity_noncoop",
        "cooperative_gain",
        "n1",
        "n2",
        "n3",
        "all_avg",
    ] {
        let _ = write!(out, ",{name},{name}_se");
    }
    for prefix in ["eff", "rel"] {
        for c in NodeClass::ALL {
            let _ = write!(out, ",{prefix}_{c},{prefix}_{c}_se");
        }
    }
    out.push('\n');
    for row in rows {
        let c = &row.config;
        let m = &row.metrics;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            axis.map_or("none", SweepAxis::name),
            axis.map_or(String::new(), |_| row.value.to_string()),
            m.realizations,
            c.node_count,
            c.service_area_diameter_m,
            c.ring_widths_m[0],
            c.ring_widths_m[1],
            c.ring_widths_m[2]
        );
        for s in [
            Some(&m.connectivity),
            Some(&m.connectivity_noncoop),
            Some(&m.cooperative_gain),
            Some(&m.n1),
            Some(&m.n2),
            Some(&m.n3),
            m.all_avg.as_ref(),
        ] {
            push_summary(&mut out, s);
        }
        for map in [&m.efficiency, &m.relative] {
            for c in NodeClass::ALL {
                push_summary(&mut out, map.get(&c));
            }
        }
        out.push('\n');
    }
    out
}
