//! Ring geometry, the normalised power law, energy cost and utility.

use num_traits::ToPrimitive;

use crate::allocation::{payoff_vector, traffic_vector};
use crate::error::{Error, Result};
use crate::game::{inter_bea_value, CoalitionStructure, Ring};
use crate::Rational;

/// Polar coordinates around the base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub radius: f64,
    pub angle: f64,
}

impl Position {
    pub fn new(radius: f64, angle: f64) -> Self {
        Position { radius, angle }
    }

    pub fn origin() -> Self {
        Position::new(0.0, 0.0)
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        if self.angle == other.angle {
            return (self.radius - other.radius).abs();
        }
        let (ax, ay) = (self.radius * self.angle.cos(), self.radius * self.angle.sin());
        let (bx, by) = (other.radius * other.angle.cos(), other.radius * other.angle.sin());
        (ax - bx).hypot(ay - by)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    pub r_bs: f64,
    /// Inner, Middle, Outer.
    pub widths: [f64; 3],
    pub path_loss_a: f64,
}

impl RingGeometry {
    pub fn new(widths: [f64; 3], path_loss_a: f64) -> Result<Self> {
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGeometry(format!(
                "ring widths must be positive, got {widths:?}"
            )));
        }
        if !(path_loss_a.is_finite() && path_loss_a > 0.0) {
            return Err(Error::InvalidGeometry(format!("path loss exponent {path_loss_a}")));
        }
        Ok(RingGeometry {
            r_bs: widths.iter().sum(),
            widths,
            path_loss_a,
        })
    }

    pub fn equal(r_bs: f64, path_loss_a: f64) -> Result<Self> {
        Self::new([r_bs / 3.0; 3], path_loss_a)
    }

    /// Unit-width rings, so boundary radii are 1, 2 and 3.
    pub fn analytic() -> Self {
        RingGeometry {
            r_bs: 3.0,
            widths: [1.0; 3],
            path_loss_a: 2.0,
        }
    }

    pub fn outer_boundary(&self, ring: Ring) -> f64 {
        match ring {
            Ring::Inner => self.widths[0],
            Ring::Middle => self.widths[0] + self.widths[1],
            Ring::Outer => self.r_bs,
        }
    }

    /// Ring containing `radius`; a point on a boundary belongs to the inner side.
    pub fn ring_of(&self, radius: f64) -> Ring {
        if radius <= self.outer_boundary(Ring::Inner) {
            Ring::Inner
        } else if radius <= self.outer_boundary(Ring::Middle) {
            Ring::Middle
        } else {
            Ring::Outer
        }
    }
}

/// `p(d) = (d / d_ref)^(2a)` with `d_ref` the outer edge of the Middle ring
/// under equal widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub reference_distance: f64,
    pub exponent: f64,
}

impl PowerModel {
    pub fn for_geometry(geometry: &RingGeometry) -> Self {
        PowerModel {
            reference_distance: 2.0 * geometry.r_bs / 3.0,
            exponent: 2.0 * geometry.path_loss_a,
        }
    }

    pub fn power_at(&self, distance: f64) -> Result<f64> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::InvalidDistance(distance));
        }
        let x = distance / self.reference_distance;
        Ok(if self.exponent.fract() == 0.0 && self.exponent.abs() < 64.0 {
            x.powi(self.exponent as i32)
        } else {
            x.powf(self.exponent)
        })
    }
}

/// Power for a hop between two nodes on the same ray.
pub fn required_power(tx_radius: f64, rx_radius: f64, model: &PowerModel) -> Result<f64> {
    model.power_at((tx_radius - rx_radius).abs())
}

/// Per-subchannel power each node spends on its next hop. Idle nodes get 0.
pub fn power_vector(cs: &CoalitionStructure, positions: &[Position], model: &PowerModel) -> Result<Vec<f64>> {
    let mut p = vec![0.0; cs.node_count()];
    let bs = Position::origin();
    for c in cs.coalitions().iter().filter(|c| c.is_reachable()) {
        let chain = c.chain();
        for (k, id) in chain.iter().enumerate() {
            let next = if k == 0 { bs } else { positions[chain[k - 1].0] };
            p[id.0] = model.power_at(positions[id.0].distance_to(&next))?;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilitySpec {
    pub rho: f64,
}

impl UtilitySpec {
    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho < 1.0 {
            Ok(UtilitySpec { rho })
        } else {
            Err(Error::InvalidRho(rho))
        }
    }

    pub fn utility(&self, phi: f64, power: f64, traffic: f64) -> f64 {
        self.rho * phi - (1.0 - self.rho) * power * traffic
    }
}

impl Default for UtilitySpec {
    fn default() -> Self {
        UtilitySpec { rho: 0.5 }
    }
}

pub fn to_f64(x: Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Everything the physical model says about one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CsOutcome {
    pub shares: Vec<Rational>,
    pub phi: Vec<Rational>,
    pub traffic: Vec<Rational>,
    pub power: Vec<f64>,
    pub cost: Vec<f64>,
    pub utility: Vec<f64>,
}

/// Shares, payoffs, traffic, power, cost and utility of `cs`.
pub fn evaluate(
    cs: &CoalitionStructure,
    positions: &[Position],
    model: &PowerModel,
    spec: &UtilitySpec,
) -> Result<CsOutcome> {
    let shares = inter_bea_value(cs)?;
    let phi = payoff_vector(cs)?.phi;
    let traffic = traffic_vector(cs)?.t;
    let power = power_vector(cs, positions, model)?;
    let cost: Vec<f64> = power.iter().zip(&traffic).map(|(p, t)| p * to_f64(*t)).collect();
    let utility = phi
        .iter()
        .zip(&power)
        .zip(&traffic)
        .map(|((f, p), t)| spec.utility(to_f64(*f), *p, to_f64(*t)))
        .collect();
    Ok(CsOutcome {
        shares,
        phi,
        traffic,
        power,
        cost,
        utility,
    })
}

/// `u_i = rho phi_i - (1 - rho) p_i t_i` for every node.
pub fn utility_vector(
    cs: &CoalitionStructure,
    positions: &[Position],
    model: &PowerModel,
    spec: &UtilitySpec,
) -> Result<Vec<f64>> {
    Ok(evaluate(cs, positions, model, spec)?.utility)
}
