use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::game::{CoalitionKind, CoalitionStructure, Ring};
use crate::physical::{evaluate, to_f64, PowerModel, UtilitySpec};

use super::config::SimConfig;
use super::formation::Scenario;

/// Groups of nodes that metrics are averaged over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeClass {
    All,
    I,
    M,
    O,
    ISc,
    ICi,
    ICiv,
    MSc,
    MCi,
    MCii,
    MCiv,
    OCii,
    OCiv,
}

impl NodeClass {
    pub const ALL: [NodeClass; 13] = [
        NodeClass::All,
        NodeClass::I,
        NodeClass::M,
        NodeClass::O,
        NodeClass::ISc,
        NodeClass::ICi,
        NodeClass::ICiv,
        NodeClass::MSc,
        NodeClass::MCi,
        NodeClass::MCii,
        NodeClass::MCiv,
        NodeClass::OCii,
        NodeClass::OCiv,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NodeClass::All => "All",
            NodeClass::I => "I",
            NodeClass::M => "M",
            NodeClass::O => "O",
            NodeClass::ISc => "I-SC",
            NodeClass::ICi => "I-CI",
            NodeClass::ICiv => "I-CIV",
            NodeClass::MSc => "M-SC",
            NodeClass::MCi => "M-CI",
            NodeClass::MCii => "M-CII",
            NodeClass::MCiv => "M-CIV",
            NodeClass::OCii => "O-CII",
            NodeClass::OCiv => "O-CIV",
        }
    }

    /// Classes a node of `ring` inside a coalition of `kind` belongs to.
    pub fn of(ring: Ring, kind: CoalitionKind) -> Vec<NodeClass> {
        use CoalitionKind as K;
        let ring_class = match ring {
            Ring::Inner => NodeClass::I,
            Ring::Middle => NodeClass::M,
            Ring::Outer => NodeClass::O,
        };
        let detail = match (ring, kind) {
            (Ring::Inner, K::Sc) => Some(NodeClass::ISc),
            (Ring::Inner, K::Ci) => Some(NodeClass::ICi),
            (Ring::Inner, K::Civ) => Some(NodeClass::ICiv),
            (Ring::Middle, K::Sc) => Some(NodeClass::MSc),
            (Ring::Middle, K::Ci) => Some(NodeClass::MCi),
            (Ring::Middle, K::Cii) => Some(NodeClass::MCii),
            (Ring::Middle, K::Civ) => Some(NodeClass::MCiv),
            (Ring::Outer, K::Cii) => Some(NodeClass::OCii),
            (Ring::Outer, K::Civ) => Some(NodeClass::OCiv),
            _ => None,
        };
        let mut v = vec![NodeClass::All, ring_class];
        v.extend(detail);
        v
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Share of nodes with a path to the base station. 0 for an empty scenario.
pub fn connectivity(scenario: &Scenario) -> f64 {
    match scenario.node_count() {
        0 => 0.0,
        n => scenario.structure.active_nodes() as f64 / n as f64,
    }
}

/// Connectivity without relaying: Inner and Middle nodes only.
pub fn connectivity_noncoop(scenario: &Scenario) -> f64 {
    match scenario.node_count() {
        0 => 0.0,
        n => (scenario.count_in(Ring::Inner) + scenario.count_in(Ring::Middle)) as f64 / n as f64,
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Payoff over energy cost per node, with class means.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEfficiency {
    /// `None` for nodes with zero cost (idle).
    pub per_node: Vec<Option<f64>>,
    pub by_class: BTreeMap<NodeClass, f64>,
    pub zero_cost: usize,
}

fn efficiency_of(scenario: &Scenario, structure: &CoalitionStructure, config: &SimConfig) -> Result<NodeEfficiency> {
    let n = scenario.node_count();
    let mut per_node = vec![None; n];
    let mut buckets: BTreeMap<NodeClass, Vec<f64>> = BTreeMap::new();
    if structure.total_weight() > 0 {
        let geometry = config.geometry()?;
        let model = PowerModel::for_geometry(&geometry);
        let spec = UtilitySpec::new(config.rho)?;
        let o = evaluate(structure, &scenario.positions, &model, &spec)?;
        for c in structure.coalitions() {
            for m in c.members() {
                let i = m.0;
                if o.cost[i] > 0.0 {
                    let e = to_f64(o.phi[i]) / o.cost[i];
                    per_node[i] = Some(e);
                    for class in NodeClass::of(scenario.rings[i], c.kind()) {
                        buckets.entry(class).or_default().push(e);
                    }
                }
            }
        }
    }
    let zero_cost = per_node.iter().filter(|e| e.is_none()).count();
    Ok(NodeEfficiency {
        per_node,
        by_class: buckets
            .into_iter()
            .filter_map(|(k, v)| mean(&v).map(|m| (k, m)))
            .collect(),
        zero_cost,
    })
}

/// Efficiency of every node under the scenario's formed structure.
pub fn node_efficiency(scenario: &Scenario, config: &SimConfig) -> Result<NodeEfficiency> {
    efficiency_of(scenario, &scenario.structure, config)
}

/// Efficiency with relaying compared with everyone transmitting directly.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeEfficiency {
    /// Mean per-node ratio, over nodes active in both modes.
    pub by_class: BTreeMap<NodeClass, f64>,
    /// Mean efficiency of active nodes with relaying over the same without.
    pub all_avg: Option<f64>,
}

pub fn relative_efficiency(mcn: &Scenario, sh: &Scenario, config: &SimConfig) -> Result<RelativeEfficiency> {
    let a = node_efficiency(mcn, config)?;
    let b = node_efficiency(sh, config)?;
    let mut buckets: BTreeMap<NodeClass, Vec<f64>> = BTreeMap::new();
    for c in mcn.structure.coalitions() {
        for m in c.members() {
            if let (Some(x), Some(y)) = (a.per_node[m.0], b.per_node[m.0]) {
                for class in NodeClass::of(mcn.rings[m.0], c.kind()) {
                    buckets.entry(class).or_default().push(x / y);
                }
            }
        }
    }
    let active = |e: &NodeEfficiency| e.per_node.iter().flatten().copied().collect::<Vec<f64>>();
    let all_avg = match (mean(&active(&a)), mean(&active(&b))) {
        (Some(x), Some(y)) => Some(x / y),
        _ => None,
    };
    Ok(RelativeEfficiency {
        by_class: buckets
            .into_iter()
            .filter_map(|(k, v)| mean(&v).map(|m| (k, m)))
            .collect(),
        all_avg,
    })
}

/// Everything measured on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub node_count: usize,
    pub active: usize,
    pub connectivity: f64,
    pub connectivity_noncoop: f64,
    pub cooperative_gain: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub efficiency: BTreeMap<NodeClass, f64>,
    pub relative: BTreeMap<NodeClass, f64>,
    pub all_avg: Option<f64>,
    pub zero_cost: usize,
    pub total_phi: f64,
}

pub fn run_metrics(formed: &Scenario, config: &SimConfig) -> Result<RunMetrics> {
    let single = Scenario {
        positions: formed.positions.clone(),
        rings: formed.rings.clone(),
        structure: CoalitionStructure::singletons(&formed.rings),
    };
    let eff = node_efficiency(formed, config)?;
    let rel = relative_efficiency(formed, &single, config)?;
    let reachable = || formed.structure.coalitions().iter().filter(|c| c.is_reachable());
    let count = |k: usize| reachable().filter(|c| c.len() == k).count();
    let n = formed.node_count();
    let matched_outer = reachable()
        .flat_map(|c| c.members())
        .filter(|m| formed.rings[m.0] == Ring::Outer)
        .count();
    let total_phi = if formed.structure.total_weight() > 0 {
        crate::allocation::payoff_vector(&formed.structure)?
            .phi
            .iter()
            .map(|x| to_f64(*x))
            .sum()
    } else {
        0.0
    };
    Ok(RunMetrics {
        node_count: n,
        active: formed.structure.active_nodes(),
        connectivity: connectivity(formed),
        connectivity_noncoop: connectivity_noncoop(formed),
        cooperative_gain: if n == 0 { 0.0 } else { matched_outer as f64 / n as f64 },
        n1: count(1),
        n2: count(2),
        n3: count(3),
        efficiency: eff.by_class,
        relative: rel.by_class,
        all_avg: rel.all_avg,
        zero_cost: eff.zero_cost,
        total_phi,
    })
}

/// Mean with standard error over realizations where the quantity exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Option<Summary> {
        let k = xs.len();
        let m = mean(xs)?;
        let se = if k > 1 {
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary {
            mean: m,
            std_err: se,
            count: k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physical::Position;
    use crate::simulator::formation::form_coalitions;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn formed(points: &[(f64, f64)]) -> Scenario {
        let cfg = SimConfig::default();
        let s = Scenario::new(
            points.iter().map(|&(r, a)| Position::new(r, a)).collect(),
            &cfg.geometry().unwrap(),
        );
        form_coalitions(&s, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap()
    }

    #[test]
    fn reference_node_has_unit_efficiency() {
        let s = formed(&[(500.0 / 3.0, 0.0)]);
        let e = node_efficiency(&s, &SimConfig::default()).unwrap();
        assert!((e.per_node[0].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn connectivity_cases() {
        let s = formed(&[(10.0, 0.0), (50.0, 1.0), (80.0, 2.0)]);
        assert_eq!(connectivity(&s), 1.0);
        let s = formed(&[(83.0, 0.0), (166.0, 0.0), (249.0, 0.0), (240.0, 3.0)]);
        assert_eq!(connectivity(&s), 0.75);
        assert_eq!(connectivity_noncoop(&s), 0.5);
        let m = run_metrics(&s, &SimConfig::default()).unwrap();
        assert_eq!((m.n1, m.n2, m.n3), (0, 0, 1));
        assert_eq!(m.cooperative_gain, 0.25);
        assert_eq!(m.zero_cost, 1);
    }

    #[test]
    fn singleton_in_both_modes_keeps_its_efficiency() {
        let s = formed(&[(60.0, 0.0), (120.0, 2.5), (100.0, 0.0), (200.0, 0.0)]);
        let single = Scenario {
            structure: CoalitionStructure::singletons(&s.rings),
            ..s.clone()
        };
        let rel = relative_efficiency(&s, &single, &SimConfig::default()).unwrap();
        assert!((rel.by_class[&NodeClass::MSc] - 1.0).abs() < 1e-12);
        assert!(rel.by_class[&NodeClass::MCi] > 1.0);
    }

    #[test]
    fn summary_stats() {
        let s = Summary::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!((s.std_err - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(Summary::of(&[]).is_none());
    }
}
