use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::game::{Coalition, CoalitionStructure, Ring};
use crate::physical::{Position, RingGeometry};

use super::config::SimConfig;

/// One realization: where nodes are and how they grouped.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub positions: Vec<Position>,
    pub rings: Vec<Ring>,
    pub structure: CoalitionStructure,
}

impl Scenario {
    /// Nodes at fixed positions, everyone alone.
    pub fn new(positions: Vec<Position>, geometry: &RingGeometry) -> Self {
        let rings: Vec<Ring> = positions.iter().map(|p| geometry.ring_of(p.radius)).collect();
        Scenario {
            structure: CoalitionStructure::singletons(&rings),
            positions,
            rings,
        }
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn count_in(&self, ring: Ring) -> usize {
        self.rings.iter().filter(|&&r| r == ring).count()
    }
}

/// Uniform points on the cell disk.
pub fn place_nodes<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Scenario> {
    let geometry = config.geometry()?;
    let radius = config.cell_radius();
    let positions = (0..config.node_count)
        .map(|_| {
            let u: f64 = rng.random();
            let a: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            Position::new(radius * u.sqrt(), a)
        })
        .collect();
    Ok(Scenario::new(positions, &geometry))
}

/// Free relay of ring `relay_ring` nearest to `source`, inside its service disk.
fn best_relay(
    scenario: &Scenario,
    source: usize,
    relay_ring: Ring,
    taken: &[bool],
    service_radius: f64,
) -> Option<usize> {
    let here = scenario.positions[source];
    (0..scenario.node_count())
        .filter(|&j| scenario.rings[j] == relay_ring && !taken[j])
        .map(|j| (scenario.positions[j].distance_to(&here), j))
        .filter(|(d, _)| *d <= service_radius)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, j)| j)
}

/// Two-phase distributed formation.
///
/// Outer nodes, in random order, attach to the nearest free Middle relay
/// whose service disk contains them. Then Middle nodes, in random order and
/// bringing along any Outer node they already serve, attach to the nearest
/// free Inner relay the same way. Each relay takes one applicant.
pub fn form_coalitions<R: Rng + ?Sized>(scenario: &Scenario, config: &SimConfig, rng: &mut R) -> Result<Scenario> {
    let n = scenario.node_count();
    let service = config.service_radius();
    let mut taken = vec![false; n];
    let mut served_by = vec![None::<usize>; n];

    let mut outer: Vec<usize> = (0..n).filter(|&i| scenario.rings[i] == Ring::Outer).collect();
    outer.shuffle(rng);
    for &o in &outer {
        if let Some(m) = best_relay(scenario, o, Ring::Middle, &taken, service) {
            taken[m] = true;
            served_by[o] = Some(m);
        }
    }

    let mut middle: Vec<usize> = (0..n).filter(|&i| scenario.rings[i] == Ring::Middle).collect();
    middle.shuffle(rng);
    let mut relay_of_middle = vec![None::<usize>; n];
    let mut inner_taken = vec![false; n];
    for &m in &middle {
        if let Some(i) = best_relay(scenario, m, Ring::Inner, &inner_taken, service) {
            inner_taken[i] = true;
            relay_of_middle[m] = Some(i);
        }
    }

    let mut member_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &m in &middle {
        let mut g = vec![m];
        if let Some(i) = relay_of_middle[m] {
            g.push(i);
        }
        if let Some(o) = (0..n).find(|&o| served_by[o] == Some(m)) {
            g.push(o);
        }
        for &x in &g {
            member_of[x] = groups.len();
        }
        groups.push(g);
    }
    for (i, slot) in member_of.iter().enumerate() {
        if *slot == usize::MAX {
            groups.push(vec![i]);
        }
    }
    let coalitions = groups
        .iter()
        .map(|g| Coalition::new(g, &scenario.rings))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        positions: scenario.positions.clone(),
        rings: scenario.rings.clone(),
        structure: CoalitionStructure::new(coalitions, n)?,
    })
}
