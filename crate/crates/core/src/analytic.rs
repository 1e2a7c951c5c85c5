//! The two boundary-placed reference games (three and five nodes).

use crate::game::{Catalog, Ring};
use crate::physical::{Position, RingGeometry};

/// A small game with nodes sitting on ring boundaries.
#[derive(Debug, Clone)]
pub struct AnalyticGame {
    pub rings: Vec<Ring>,
    pub catalog: Catalog,
    pub positions: Vec<Position>,
    pub geometry: RingGeometry,
}

impl AnalyticGame {
    /// Nodes grouped on rays; cooperation only within a ray.
    pub fn on_rays(rings: &[Ring], rays: &[Vec<usize>]) -> Self {
        let geometry = RingGeometry::analytic();
        let mut positions = vec![Position::origin(); rings.len()];
        for (k, ray) in rays.iter().enumerate() {
            let angle = k as f64 * std::f64::consts::FRAC_PI_2;
            for &i in ray {
                positions[i] = Position::new(geometry.outer_boundary(rings[i]), angle);
            }
        }
        AnalyticGame {
            rings: rings.to_vec(),
            catalog: Catalog::grouped(rings, rays),
            positions,
            geometry,
        }
    }

    /// All nodes on one ray with every template allowed.
    pub fn collinear(rings: &[Ring]) -> Self {
        Self::on_rays(rings, &[(0..rings.len()).collect()])
    }

    pub fn node_count(&self) -> usize {
        self.rings.len()
    }
}

/// MS1 Inner, MS2 Middle, MS3 Outer.
pub fn three_node() -> AnalyticGame {
    AnalyticGame::collinear(&[Ring::Inner, Ring::Middle, Ring::Outer])
}

/// The three-node chain plus MS4 Inner and MS5 Middle on a second ray.
pub fn five_node() -> AnalyticGame {
    use Ring::*;
    AnalyticGame::on_rays(&[Inner, Middle, Outer, Inner, Middle], &[vec![0, 1, 2], vec![3, 4]])
}
