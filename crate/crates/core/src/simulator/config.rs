use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::physical::RingGeometry;

/// Monte Carlo parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub cell_diameter_m: f64,
    /// Inner, Middle, Outer.
    pub ring_widths_m: [f64; 3],
    pub service_area_diameter_m: f64,
    pub noise_dbw: f64,
    pub path_loss_exponent: f64,
    pub snr_threshold_db: f64,
    pub node_count: usize,
    pub realizations: usize,
    pub rho: f64,
    pub seed: u64,
}

pub const KEYS: [&str; 10] = [
    "cell_diameter_m",
    "ring_width_m",
    "service_area_diameter_m",
    "noise_dbw",
    "path_loss_exponent",
    "snr_threshold_db",
    "node_count",
    "realizations",
    "rho",
    "seed",
];

impl Default for SimConfig {
    fn default() -> Self {
        let d = 500.0;
        SimConfig {
            cell_diameter_m: d,
            ring_widths_m: [d / 6.0; 3],
            service_area_diameter_m: 1.1 * d / 3.0,
            noise_dbw: -133.0,
            path_loss_exponent: 2.0,
            snr_threshold_db: 10.0,
            node_count: 60,
            realizations: 50,
            rho: 0.5,
            seed: 20110,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl SimConfig {
    pub fn cell_radius(&self) -> f64 {
        self.cell_diameter_m / 2.0
    }

    pub fn service_radius(&self) -> f64 {
        self.service_area_diameter_m / 2.0
    }

    pub fn geometry(&self) -> Result<RingGeometry> {
        RingGeometry::new(self.ring_widths_m, self.path_loss_exponent)
    }

    /// Widths shifted by `delta * D` from the inner ring to the outer ring.
    pub fn ring_widths_for_delta(&self, delta: f64) -> [f64; 3] {
        let d = self.cell_diameter_m;
        [d / 6.0 - delta * d, d / 6.0, d / 6.0 + delta * d]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.cell_diameter_m.is_finite() && self.cell_diameter_m > 0.0) {
            return bad(format!(
                "cell_diameter_m must be positive, got {}",
                self.cell_diameter_m
            ));
        }
        if self.ring_widths_m.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad(format!("ring widths must be positive, got {:?}", self.ring_widths_m));
        }
        let sum: f64 = self.ring_widths_m.iter().sum();
        if (sum - self.cell_radius()).abs() > 1e-9 * self.cell_radius().max(1.0) {
            return bad(format!(
                "ring widths sum to {sum}, expected the cell radius {}",
                self.cell_radius()
            ));
        }
        if !(self.service_area_diameter_m.is_finite() && self.service_area_diameter_m > 0.0) {
            return bad(format!(
                "service_area_diameter_m must be positive, got {}",
                self.service_area_diameter_m
            ));
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 0.0) {
            return bad(format!(
                "path_loss_exponent must be positive, got {}",
                self.path_loss_exponent
            ));
        }
        if !self.noise_dbw.is_finite() || !self.snr_threshold_db.is_finite() {
            return bad("noise_dbw and snr_threshold_db must be finite".into());
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie strictly between 0 and 1, got {}", self.rho));
        }
        Ok(())
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "cell_diameter_m" => self.cell_diameter_m = num(key, value)?,
            "ring_width_m" => {
                let parts: Vec<f64> = value.split(',').map(|v| num(key, v)).collect::<Result<_>>()?;
                self.ring_widths_m = match parts.as_slice() {
                    [w] => [*w; 3],
                    [a, b, c] => [*a, *b, *c],
                    _ => {
                        return Err(Error::Config(format!(
                            "ring_width_m takes 1 or 3 values, got {value:?}"
                        )))
                    }
                };
            }
            "service_area_diameter_m" => self.service_area_diameter_m = num(key, value)?,
            "noise_dbw" => self.noise_dbw = num(key, value)?,
            "path_loss_exponent" => self.path_loss_exponent = num(key, value)?,
            "snr_threshold_db" => self.snr_threshold_db = num(key, value)?,
            "node_count" => self.node_count = num(key, value)?,
            "realizations" => self.realizations = num(key, value)?,
            "rho" => self.rho = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parse `key=value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Text that [`SimConfig::parse`] reads back to an equal value.
    pub fn to_key_value(&self) -> String {
        let w = self.ring_widths_m;
        let mut s = String::new();
        let _ = writeln!(s, "cell_diameter_m={}", self.cell_diameter_m);
        let _ = writeln!(s, "ring_width_m={},{},{}", w[0], w[1], w[2]);
        let _ = writeln!(s, "service_area_diameter_m={}", self.service_area_diameter_m);
        let _ = writeln!(s, "noise_dbw={}", self.noise_dbw);
        let _ = writeln!(s, "path_loss_exponent={}", self.path_loss_exponent);
        let _ = writeln!(s, "snr_threshold_db={}", self.snr_threshold_db);
        let _ = writeln!(s, "node_count={}", self.node_count);
        let _ = writeln!(s, "realizations={}", self.realizations);
        let _ = writeln!(s, "rho={}", self.rho);
        let _ = writeln!(s, "seed={}", self.seed);
        s
    }
}
