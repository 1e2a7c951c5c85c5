//! Internal/external stability of single-agreement structures and the
//! inductive core of the whole game.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::game::{enumerate_all, full_mask, Catalog, Coalition, CoalitionStructure, NodeId};
use crate::physical::{evaluate, Position, PowerModel, UtilitySpec};

/// Strict improvement margin.
pub const EPS: f64 = 1e-12;

/// Utility of every node under every feasible structure.
#[derive(Debug, Clone, Default)]
pub struct UtilityTable {
    rows: BTreeMap<CoalitionStructure, Vec<f64>>,
}

impl UtilityTable {
    /// Structures in which nobody reaches the base station score 0 everywhere.
    pub fn build(catalog: &Catalog, positions: &[Position], model: &PowerModel, spec: &UtilitySpec) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for cs in enumerate_all(catalog) {
            let u = if cs.total_weight() == 0 {
                vec![0.0; cs.node_count()]
            } else {
                evaluate(&cs, positions, model, spec)?.utility
            };
            rows.insert(cs, u);
        }
        Ok(UtilityTable { rows })
    }

    pub fn insert(&mut self, cs: CoalitionStructure, utilities: Vec<f64>) {
        self.rows.insert(cs, utilities);
    }

    pub fn get(&self, cs: &CoalitionStructure) -> Result<&[f64]> {
        self.rows
            .get(cs)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingUtilities(cs.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoalitionStructure, &Vec<f64>)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A group moving from one structure to another.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub deviators: Vec<NodeId>,
    pub target: CoalitionStructure,
    /// Deviators' utilities before and after, in `deviators` order.
    pub before: Vec<f64>,
    pub after: Vec<f64>,
}

impl Deviation {
    pub fn improves(&self) -> bool {
        self.before.iter().zip(&self.after).all(|(b, a)| *a > *b + EPS)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.before.iter().zip(&self.after).map(|(b, a)| a - b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InternalVerdict {
    pub internally_stable: bool,
    /// One unilateral exit per member of the agreement.
    pub exits: Vec<Deviation>,
}

impl InternalVerdict {
    pub fn blocking(&self) -> impl Iterator<Item = &Deviation> {
        self.exits.iter().filter(|d| d.improves())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalVerdict {
    /// One entry per outsider whose joining keeps the agreement feasible.
    pub joins: Vec<Deviation>,
    /// Every feasible joiner strictly gains (vacuous without joiners).
    pub every_outsider_gains: bool,
    /// Some outsider strictly gains by joining.
    pub outsider_wants_to_join: bool,
}

impl ExternalVerdict {
    /// No outsider gains by joining.
    pub fn externally_stable(&self) -> bool {
        !self.outsider_wants_to_join
    }
}

/// The only multi-member coalition of `cs`.
pub fn single_agreement(cs: &CoalitionStructure) -> Result<&Coalition> {
    let mut it = cs.coalitions().iter().filter(|c| !c.is_singleton());
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::NotSingleAgreement(cs.to_string())),
    }
}

fn without(cs: &CoalitionStructure, drop: u64) -> Vec<Coalition> {
    cs.coalitions()
        .iter()
        .filter(|c| c.mask() & drop == 0)
        .cloned()
        .collect()
}

fn split(mask: u64, catalog: &Catalog) -> Vec<Coalition> {
    if let Some(c) = catalog.lookup(mask) {
        return vec![c];
    }
    (0..catalog.node_count())
        .filter(|i| mask & (1u64 << i) != 0)
        .map(|i| Coalition::singleton(i, catalog.rings()[i]))
        .collect()
}

fn move_to(
    cs: &CoalitionStructure,
    target: CoalitionStructure,
    deviators: Vec<NodeId>,
    table: &UtilityTable,
) -> Result<Deviation> {
    let u0 = table.get(cs)?;
    let u1 = table.get(&target)?;
    Ok(Deviation {
        before: deviators.iter().map(|i| u0[i.0]).collect(),
        after: deviators.iter().map(|i| u1[i.0]).collect(),
        deviators,
        target,
    })
}

/// Every member of the agreement weakly prefers staying to leaving alone.
pub fn internal_stability(cs: &CoalitionStructure, catalog: &Catalog, table: &UtilityTable) -> Result<InternalVerdict> {
    let c = single_agreement(cs)?;
    let mut exits = Vec::new();
    for &i in c.members() {
        let bit = 1u64 << i.0;
        let mut parts = without(cs, c.mask());
        parts.extend(split(c.mask() & !bit, catalog));
        parts.push(Coalition::singleton(i.0, catalog.rings()[i.0]));
        let target = CoalitionStructure::new(parts, cs.node_count())?;
        exits.push(move_to(cs, target, vec![i], table)?);
    }
    Ok(InternalVerdict {
        internally_stable: exits.iter().all(|d| !d.improves()),
        exits,
    })
}

/// Whether singletons outside the agreement gain by joining it.
pub fn external_stability(cs: &CoalitionStructure, catalog: &Catalog, table: &UtilityTable) -> Result<ExternalVerdict> {
    let c = single_agreement(cs)?;
    let mut joins = Vec::new();
    for out in cs.coalitions().iter().filter(|o| o.is_singleton()) {
        let i = out.members()[0];
        let Some(bigger) = catalog.lookup(c.mask() | out.mask()) else {
            continue;
        };
        let mut parts = without(cs, bigger.mask());
        parts.push(bigger);
        let target = CoalitionStructure::new(parts, cs.node_count())?;
        joins.push(move_to(cs, target, vec![i], table)?);
    }
    Ok(ExternalVerdict {
        every_outsider_gains: joins.iter().all(Deviation::improves),
        outsider_wants_to_join: joins.iter().any(Deviation::improves),
        joins,
    })
}

/// Sub-groups of the agreement (two or more members) that all gain by
/// leaving together as a feasible coalition.
pub fn joint_exit_deviations(
    cs: &CoalitionStructure,
    catalog: &Catalog,
    table: &UtilityTable,
) -> Result<Vec<Deviation>> {
    let c = single_agreement(cs)?;
    let cm = c.mask();
    let mut found = Vec::new();
    let mut sub = (cm - 1) & cm;
    while sub != 0 {
        if sub.count_ones() >= 2 {
            if let Some(g) = catalog.lookup(sub) {
                let mut parts = without(cs, cm);
                parts.extend(split(cm & !sub, catalog));
                parts.push(g.clone());
                let target = CoalitionStructure::new(parts, cs.node_count())?;
                let d = move_to(cs, target, g.members().to_vec(), table)?;
                if d.improves() {
                    found.push(d);
                }
            }
        }
        sub = (sub - 1) & cm;
    }
    Ok(found)
}

/// Why a structure is outside the core.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub dominated: CoalitionStructure,
    pub deviators: Coalition,
    /// How the remaining players reorganise.
    pub reaction: Vec<Coalition>,
    /// The reaction came from the residual game's core rather than from the
    /// fallback of all residual structures.
    pub reaction_from_core: bool,
    pub target: CoalitionStructure,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreResult {
    pub members: Vec<(CoalitionStructure, Vec<f64>)>,
    pub certificates: Vec<Certificate>,
}

impl CoreResult {
    pub fn contains(&self, cs: &CoalitionStructure) -> bool {
        self.members.iter().any(|(m, _)| m == cs)
    }
}

type Key = (u64, Vec<u64>);

/// Recursive core computation over sub-games `(players, fixed outsiders)`.
pub struct CoreSolver<'a> {
    catalog: &'a Catalog,
    table: &'a UtilityTable,
    memo: RefCell<HashMap<Key, Vec<Vec<Coalition>>>>,
}

impl<'a> CoreSolver<'a> {
    pub fn new(catalog: &'a Catalog, table: &'a UtilityTable) -> Self {
        CoreSolver {
            catalog,
            table,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn utilities(&self, outside: &[Coalition], inside: &[Coalition]) -> Result<&'a [f64]> {
        let mut parts = outside.to_vec();
        parts.extend_from_slice(inside);
        self.table
            .get(&CoalitionStructure::new(parts, self.catalog.node_count())?)
    }

    fn key(players: u64, outside: &[Coalition]) -> Key {
        let mut o: Vec<u64> = outside.iter().map(Coalition::mask).collect();
        o.sort_unstable();
        (players, o)
    }

    /// Feasible coalitions inside `players`, by size then member set.
    fn deviating_groups(&self, players: u64) -> Vec<Coalition> {
        let mut v: Vec<Coalition> = (0..self.catalog.node_count())
            .filter(|i| players & (1u64 << i) != 0)
            .map(|i| Coalition::singleton(i, self.catalog.rings()[i]))
            .chain(
                self.catalog
                    .groups()
                    .iter()
                    .filter(|g| g.mask() & !players == 0)
                    .cloned(),
            )
            .collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(b.members())));
        v
    }

    /// Undominated arrangements of `players` given fixed `outside`.
    pub fn core(&self, players: u64, outside: &[Coalition], depth: usize) -> Result<Vec<Vec<Coalition>>> {
        if depth > self.catalog.node_count() + 1 {
            return Err(Error::RecursionDepth(depth));
        }
        if players == 0 {
            return Ok(vec![Vec::new()]);
        }
        let key = Self::key(players, outside);
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let mut undominated = Vec::new();
        for pi in self.catalog.partitions_of(players) {
            if self.dominate(players, outside, &pi, depth)?.is_none() {
                undominated.push(pi);
            }
        }
        self.memo.borrow_mut().insert(key, undominated.clone());
        Ok(undominated)
    }

    /// First deviation that dominates `pi`, with the residual reaction used.
    #[allow(clippy::type_complexity)]
    pub fn dominate(
        &self,
        players: u64,
        outside: &[Coalition],
        pi: &[Coalition],
        depth: usize,
    ) -> Result<Option<(Coalition, Vec<Coalition>, bool, Vec<f64>, Vec<f64>)>> {
        let u = self.utilities(outside, pi)?;
        for s in self.deviating_groups(players) {
            let rest = players & !s.mask();
            let mut out2 = outside.to_vec();
            out2.push(s.clone());
            let core = self.core(rest, &out2, depth + 1)?;
            let from_core = !core.is_empty();
            let reactions = if from_core {
                core
            } else {
                self.catalog.partitions_of(rest)
            };
            for r in reactions {
                let u2 = self.utilities(&out2, &r)?;
                if s.members().iter().all(|i| u2[i.0] > u[i.0] + EPS) {
                    let before = s.members().iter().map(|i| u[i.0]).collect();
                    let after = s.members().iter().map(|i| u2[i.0]).collect();
                    return Ok(Some((s, r, from_core, before, after)));
                }
            }
        }
        Ok(None)
    }
}

/// Core of the full game with a dominance certificate for every excluded structure.
pub fn inductive_core(catalog: &Catalog, table: &UtilityTable) -> Result<CoreResult> {
    let n = catalog.node_count();
    let solver = CoreSolver::new(catalog, table);
    let all = full_mask(n);
    let mut members = Vec::new();
    let mut certificates = Vec::new();
    for cs in enumerate_all(catalog) {
        match solver.dominate(all, &[], cs.coalitions(), 0)? {
            None => members.push((cs.clone(), table.get(&cs)?.to_vec())),
            Some((deviators, reaction, reaction_from_core, before, after)) => {
                let mut parts = reaction.clone();
                parts.push(deviators.clone());
                let target = CoalitionStructure::new(parts, n)?;
                certificates.push(Certificate {
                    dominated: cs,
                    deviators,
                    reaction,
                    reaction_from_core,
                    target,
                    before,
                    after,
                });
            }
        }
    }
    Ok(CoreResult { members, certificates })
}

/// Core of the players left after `deviators` commit to their coalition.
pub fn residual_core(catalog: &Catalog, table: &UtilityTable, deviators: &Coalition) -> Result<Vec<Vec<Coalition>>> {
    let solver = CoreSolver::new(catalog, table);
    let rest = full_mask(catalog.node_count()) & !deviators.mask();
    solver.core(rest, std::slice::from_ref(deviators), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, AnalyticGame};

    fn table(g: &AnalyticGame) -> UtilityTable {
        UtilityTable::build(
            &g.catalog,
            &g.positions,
            &PowerModel::for_geometry(&g.geometry),
            &UtilitySpec::default(),
        )
        .unwrap()
    }

    fn cs(g: &AnalyticGame, t: &str) -> CoalitionStructure {
        CoalitionStructure::parse(t, &g.rings).unwrap()
    }

    #[test]
    fn three_node_internal() {
        let g = analytic::three_node();
        let t = table(&g);
        let stable = |s: &str| {
            internal_stability(&cs(&g, s), &g.catalog, &t)
                .unwrap()
                .internally_stable
        };
        assert!(stable("12|3"));
        assert!(!stable("1|23"));
        assert!(!stable("13|2"));
        assert!(stable("123"));
        let v = internal_stability(&cs(&g, "13|2"), &g.catalog, &t).unwrap();
        let blocking: Vec<_> = v.blocking().collect();
        assert_eq!(blocking.len(), 1);
        assert_eq!(blocking[0].deviators, vec![NodeId(0)]);
        assert!(internal_stability(&CoalitionStructure::singletons(&g.rings), &g.catalog, &t).is_err());
    }

    #[test]
    fn grand_coalition_joint_exit() {
        let g = analytic::three_node();
        let t = table(&g);
        let devs = joint_exit_deviations(&cs(&g, "123"), &g.catalog, &t).unwrap();
        assert_eq!(devs.len(), 1);
        assert_eq!(devs[0].target.to_string(), "12|3");
    }

    #[test]
    fn three_node_external() {
        let g = analytic::three_node();
        let t = table(&g);
        let v = external_stability(&cs(&g, "12|3"), &g.catalog, &t).unwrap();
        assert_eq!(v.joins.len(), 1);
        assert_eq!(v.joins[0].before, vec![0.0]);
        assert!((v.joins[0].after[0] - 1.0 / 14.0 + 1.0 / 224.0).abs() < 1e-12);
        assert!(v.outsider_wants_to_join && v.every_outsider_gains && !v.externally_stable());
        let v = external_stability(&cs(&g, "123"), &g.catalog, &t).unwrap();
        assert!(v.joins.is_empty() && v.every_outsider_gains && v.externally_stable());
        let v = external_stability(&cs(&g, "1|23"), &g.catalog, &t).unwrap();
        assert!(v.outsider_wants_to_join);
    }

    #[test]
    fn residual_best_response() {
        let g = analytic::five_node();
        let t = table(&g);
        let dev = Coalition::new(&[0, 1, 2], &g.rings).unwrap();
        let core = residual_core(&g.catalog, &t, &dev).unwrap();
        assert_eq!(core.len(), 1);
        assert_eq!(core[0].len(), 1);
        assert_eq!(core[0][0].to_string(), "45");
    }

    #[test]
    fn five_node_core() {
        let g = analytic::five_node();
        let t = table(&g);
        let core = inductive_core(&g.catalog, &t).unwrap();
        assert!(core.contains(&cs(&g, "123|45")));
        assert_eq!(core.members.len() + core.certificates.len(), 10);
        for c in &core.certificates {
            assert!(c.before.iter().zip(&c.after).all(|(b, a)| a > b));
        }
    }

    #[test]
    fn single_node_core() {
        let g = AnalyticGame::collinear(&[crate::game::Ring::Inner]);
        let t = table(&g);
        let core = inductive_core(&g.catalog, &t).unwrap();
        assert_eq!(core.members.len(), 1);
        assert_eq!(core.members[0].1, vec![0.5 * 1.0 - 0.5 / 16.0]);
    }
}
