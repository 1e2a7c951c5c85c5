//! Run manifests: what was run, when, and digests of what it wrote.

use std::fmt::Write as _;

use bea_core::{SimConfig, SweepAxis};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const FILE_NAME: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub started: String,
    pub finished: String,
    pub config: SimConfig,
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
    /// File name and SHA-256 hex digest.
    pub outputs: Vec<(String, String)>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# bea run manifest\n");
        let _ = writeln!(s, "tool=bea");
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "started={}", self.started);
        let _ = writeln!(s, "finished={}", self.finished);
        let _ = writeln!(s, "seed={}", self.config.seed);
        if let Some((axis, values)) = &self.sweep {
            let v: Vec<String> = values.iter().map(f64::to_string).collect();
            let _ = writeln!(s, "sweep.axis={axis}");
            let _ = writeln!(s, "sweep.values={}", v.join(","));
        }
        for line in self.config.to_key_value().lines() {
            let _ = writeln!(s, "config.{line}");
        }
        for (name, hash) in &self.outputs {
            let _ = writeln!(s, "output.{name}=sha256:{hash}");
        }
        s
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let bad = |m: String| CliError::Manifest(m);
        let mut version = None;
        let mut started = String::new();
        let mut finished = String::new();
        let mut seed = None;
        let mut axis = None;
        let mut values = None;
        let mut config_text = String::new();
        let mut outputs = Vec::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
            if let Some(key) = k.strip_prefix("config.") {
                let _ = writeln!(config_text, "{key}={v}");
            } else if let Some(name) = k.strip_prefix("output.") {
                let hash = v
                    .strip_prefix("sha256:")
                    .ok_or_else(|| bad(format!("{name}: digest must start with sha256:")))?;
                outputs.push((name.to_string(), hash.to_string()));
            } else {
                match k {
                    "tool" => {}
                    "version" => version = Some(v.to_string()),
                    "started" => started = v.to_string(),
                    "finished" => finished = v.to_string(),
                    "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad(format!("bad seed {v:?}")))?),
                    "sweep.axis" => axis = Some(v.parse::<SweepAxis>()?),
                    "sweep.values" => values = Some(parse_values(v).map_err(bad)?),
                    other => return Err(bad(format!("unknown key {other:?}"))),
                }
            }
        }
        let config = SimConfig::parse(&config_text)?;
        if seed.is_some_and(|s| s != config.seed) {
            return Err(bad("seed disagrees with the config snapshot".into()));
        }
        let sweep = match (axis, values) {
            (Some(a), Some(v)) => Some((a, v)),
            (None, None) => None,
            _ => return Err(bad("sweep.axis and sweep.values go together".into())),
        };
        Ok(RunManifest {
            version: version.ok_or_else(|| bad("missing version".into()))?,
            started,
            finished,
            config,
            sweep,
            outputs,
        })
    }
}

/// Comma-separated numbers; `p/q` fractions allowed.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad value {t:?}"));
            match t.split_once('/') {
                Some((p, q)) => Ok(num(p)? / num(q)?),
                None => num(t),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        RunManifest {
            version: "0.1.0".into(),
            started: "2026-01-01T00:00:00+00:00".into(),
            finished: "2026-01-01T00:00:01+00:00".into(),
            config: SimConfig::default(),
            sweep: Some((SweepAxis::RingWidthDelta, vec![-1.0 / 16.0, 0.0, 1.0 / 32.0])),
            outputs: vec![("sweep_ring_width_delta.csv".into(), digest(b"abc"))],
        }
    }

    #[test]
    fn round_trip() {
        let m = sample();
        assert_eq!(RunManifest::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(RunManifest::parse("nonsense").is_err());
        let text = sample().to_text().replace("config.node_count", "config.nodes");
        assert!(RunManifest::parse(&text).is_err());
        let text = sample().to_text().replace("\nseed=20110\n", "\nseed=1\n");
        assert!(RunManifest::parse(&text).is_err());
    }

    #[test]
    fn values_and_digest() {
        assert_eq!(parse_values("-1/16, 0,1/32").unwrap(), vec![-0.0625, 0.0, 0.03125]);
        assert!(parse_values("1/x").is_err());
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
