//! Monte Carlo runs written to a directory with a manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bea_core::{run_monte_carlo, run_sweep, sweep_csv, SimConfig, SweepAxis, SweepRow};

use crate::error::{CliError, CliResult};
use crate::manifest::{self, RunManifest};

pub fn output_name(sweep: Option<&(SweepAxis, Vec<f64>)>) -> String {
    sweep.map_or_else(|| "montecarlo.csv".to_string(), |(a, _)| format!("sweep_{a}.csv"))
}

/// Rows for a plain run or a sweep.
pub fn compute(config: &SimConfig, sweep: Option<&(SweepAxis, Vec<f64>)>) -> CliResult<Vec<SweepRow>> {
    Ok(match sweep {
        Some((axis, values)) => run_sweep(config, *axis, values)?,
        None => vec![SweepRow {
            value: 0.0,
            metrics: run_monte_carlo(config)?,
            config: config.clone(),
        }],
    })
}

pub fn summary(rows: &[SweepRow], sweep: Option<&(SweepAxis, Vec<f64>)>) -> String {
    let mut s = String::new();
    for r in rows {
        let m = &r.metrics;
        if let Some((axis, _)) = sweep {
            let _ = write!(s, "{axis}={} ", r.value);
        }
        let _ = writeln!(
            s,
            "connectivity {:.3} (single hop {:.3}, gain {:.3} +/- {:.3}) over {} realizations",
            m.connectivity.mean,
            m.connectivity_noncoop.mean,
            m.cooperative_gain.mean,
            m.cooperative_gain.std_err,
            m.realizations
        );
    }
    s
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Run, write the CSV and manifest into `out`, and return the manifest.
pub fn run(config: &SimConfig, sweep: Option<(SweepAxis, Vec<f64>)>, out: &Path) -> CliResult<(RunManifest, String)> {
    config.validate()?;
    let started = now();
    let rows = compute(config, sweep.as_ref())?;
    let csv = sweep_csv(sweep.as_ref().map(|(a, _)| *a), &rows);
    let finished = now();
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let name = output_name(sweep.as_ref());
    let path = out.join(&name);
    fs::write(&path, &csv).map_err(CliError::io(&path))?;
    let text = summary(&rows, sweep.as_ref());
    let m = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished,
        config: config.clone(),
        sweep,
        outputs: vec![(name, manifest::digest(csv.as_bytes()))],
    };
    let mpath = out.join(manifest::FILE_NAME);
    fs::write(&mpath, m.to_text()).map_err(CliError::io(&mpath))?;
    Ok((m, text))
}

/// Re-run a manifest and compare digests; writes outputs if `out` is given.
pub fn replay(manifest_path: &Path, out: Option<&Path>) -> CliResult<String> {
    let text = fs::read_to_string(manifest_path).map_err(CliError::io(manifest_path))?;
    let m = RunManifest::parse(&text)?;
    let (fresh, _) = match out {
        Some(dir) => run(&m.config, m.sweep.clone(), dir)?,
        None => {
            let rows = compute(&m.config, m.sweep.as_ref())?;
            let csv = sweep_csv(m.sweep.as_ref().map(|(a, _)| *a), &rows);
            let outputs = vec![(output_name(m.sweep.as_ref()), manifest::digest(csv.as_bytes()))];
            (RunManifest { outputs, ..m.clone() }, String::new())
        }
    };
    let mut report = String::new();
    for (name, hash) in &m.outputs {
        match fresh.outputs.iter().find(|(n, _)| n == name) {
            Some((_, h)) if h == hash => {
                let _ = writeln!(report, "{name}: sha256 {hash} reproduced");
            }
            Some((_, h)) => return Err(CliError::Mismatch(format!("{name}: expected {hash}, got {h}"))),
            None => return Err(CliError::Mismatch(format!("{name}: not produced by replay"))),
        }
    }
    Ok(report)
}
