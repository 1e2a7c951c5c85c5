//! Value vectors and lambda sweeps as CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use bea_core::analytic::AnalyticGame;
use bea_core::physical::to_f64;
use bea_core::{cmv_closed_form_3, compensated_myerson_value, myerson_value, CompensationSpec, PartitionFunction};
use clap::ValueEnum;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mv,
    Cmv,
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad number {p:?} in range {s:?}"))
            })
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("range {s:?} must be start:stop:step"));
        };
        if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
            return Err(format!("range {s:?} needs step > 0 and stop >= start"));
        }
        Ok(Range { start, stop, step })
    }
}

pub fn render(game: &AnalyticGame, method: Method, lambda: f64, sweep: Option<Range>) -> CliResult<String> {
    let n = game.node_count();
    let v = PartitionFunction::inter_bea(&game.catalog);
    let mut out = String::new();
    match method {
        Method::Mv => {
            if sweep.is_some() {
                return Err(CliError::Usage("--sweep applies to cmv only".into()));
            }
            let mv = myerson_value(&game.catalog, &v)?;
            out.push_str("node,value,value_dec\n");
            for (i, x) in mv.iter().enumerate() {
                let _ = writeln!(out, "MS{},{x},{}", i + 1, to_f64(*x));
            }
        }
        Method::Cmv => {
            let lambdas = sweep.map_or_else(|| vec![lambda], |r| r.points());
            let closed = n == 3;
            out.push_str("lambda");
            for i in 1..=n {
                let _ = write!(out, ",phi_{i}");
            }
            if closed {
                for i in 1..=n {
                    let _ = write!(out, ",closed_{i}");
                }
            }
            out.push('\n');
            for l in lambdas {
                let phi = compensated_myerson_value(&game.catalog, &v, CompensationSpec::new(l)?)?;
                let _ = write!(out, "{l}");
                for x in &phi.values {
                    let _ = write!(out, ",{x}");
                }
                if closed {
                    for x in &cmv_closed_form_3(l)?.values {
                        let _ = write!(out, ",{x}");
                    }
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bea_core::analytic;

    #[test]
    fn range_points() {
        let r: Range = "0:4:0.05".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 81);
        assert!((p[80] - 4.0).abs() < 1e-9);
        assert!("0:1".parse::<Range>().is_err());
        assert!("1:0:0.1".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
    }

    #[test]
    fn mv_three() {
        let t = render(&analytic::three_node(), Method::Mv, 0.0, None).unwrap();
        assert!(t.contains("MS1,11/24,0.4583333333333333"));
        assert!(t.contains("MS3,1/12,"));
    }

    #[test]
    fn negative_lambda_is_usage() {
        let e = render(&analytic::three_node(), Method::Cmv, -1.0, None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
