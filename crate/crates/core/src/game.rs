//! Nodes, rings, relaying coalitions and the inter-coalition partition function.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Rational;

/// Dense node index. Displayed one-based as `MS<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MS{}", self.0 + 1)
    }
}

/// Concentric ring a node sits in. Ordered from the base station outwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    Inner,
    Middle,
    Outer,
}

impl Ring {
    /// Whether a node in this ring can reach the base station on its own.
    pub fn covered(self) -> bool {
        self != Ring::Outer
    }

    pub fn label(self) -> &'static str {
        match self {
            Ring::Inner => "I",
            Ring::Middle => "M",
            Ring::Outer => "O",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoalitionKind {
    /// Single node.
    Sc,
    /// Inner + Middle.
    Ci,
    /// Middle + Outer.
    Cii,
    /// Inner + Outer.
    Ciii,
    /// Inner + Middle + Outer.
    Civ,
}

impl CoalitionKind {
    pub fn label(self) -> &'static str {
        match self {
            CoalitionKind::Sc => "SC",
            CoalitionKind::Ci => "CI",
            CoalitionKind::Cii => "CII",
            CoalitionKind::Ciii => "CIII",
            CoalitionKind::Civ => "CIV",
        }
    }

    fn classify(rings: &[Ring]) -> Option<Self> {
        let mut sorted = rings.to_vec();
        sorted.sort();
        use Ring::*;
        match sorted.as_slice() {
            [_] => Some(CoalitionKind::Sc),
            [Inner, Middle] => Some(CoalitionKind::Ci),
            [Middle, Outer] => Some(CoalitionKind::Cii),
            [Inner, Outer] => Some(CoalitionKind::Ciii),
            [Inner, Middle, Outer] => Some(CoalitionKind::Civ),
            _ => None,
        }
    }
}

impl fmt::Display for CoalitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A relaying group of one to three nodes.
///
/// `chain` lists members from the node nearest the base station outwards;
/// the first entry talks to the base station and every other entry talks to
/// its predecessor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    members: Vec<NodeId>,
    chain: Vec<NodeId>,
    kind: CoalitionKind,
    reachable: bool,
}

impl Coalition {
    /// Build a coalition from node indices, reading ring labels from `rings`.
    pub fn new(members: &[usize], rings: &[Ring]) -> Result<Self> {
        let n = rings.len();
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != members.len() || sorted.is_empty() {
            return Err(Error::InvalidCoalition {
                members: members.to_vec(),
            });
        }
        if let Some(&bad) = sorted.iter().find(|&&m| m >= n) {
            return Err(Error::UnknownNode { node: bad, n });
        }
        let labels: Vec<Ring> = sorted.iter().map(|&m| rings[m]).collect();
        let kind = CoalitionKind::classify(&labels).ok_or_else(|| Error::InvalidCoalition {
            members: sorted.clone(),
        })?;
        let mut chain: Vec<NodeId> = sorted.iter().map(|&m| NodeId(m)).collect();
        chain.sort_by_key(|id| (rings[id.0], id.0));
        Ok(Coalition {
            members: sorted.into_iter().map(NodeId).collect(),
            chain,
            kind,
            reachable: labels.iter().any(|r| r.covered()),
        })
    }

    pub fn singleton(node: usize, ring: Ring) -> Self {
        Coalition {
            members: vec![NodeId(node)],
            chain: vec![NodeId(node)],
            kind: CoalitionKind::Sc,
            reachable: ring.covered(),
        }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn chain(&self) -> &[NodeId] {
        &self.chain
    }

    pub fn kind(&self) -> CoalitionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    /// True when some member lies in the Inner or Middle ring.
    pub fn is_reachable(&self) -> bool {
        self.reachable
    }

    /// Bandwidth weight `2^s - 1`, or 0 for a group that cannot reach the base station.
    pub fn weight(&self) -> i64 {
        if self.reachable {
            (1i64 << self.members.len()) - 1
        } else {
            0
        }
    }

    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, id| m | (1u64 << id.0))
    }

    /// Position of `node` in the relay chain, 0 being the head.
    pub fn hop_index(&self, node: NodeId) -> Option<usize> {
        self.chain.iter().position(|&c| c == node)
    }

    /// `+1` if `i` forwards traffic for `j`, `-1` if `j` forwards for `i`, else 0.
    pub fn relay_indicator(&self, i: NodeId, j: NodeId) -> i8 {
        match (self.hop_index(i), self.hop_index(j)) {
            (Some(a), Some(b)) if a < b => 1,
            (Some(a), Some(b)) if a > b => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.members {
            write!(f, "{}", m.0 + 1)?;
        }
        Ok(())
    }
}

/// A partition of every node into coalitions, kept in canonical order
/// (coalitions sorted by their member lists).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoalitionStructure {
    coalitions: Vec<Coalition>,
}

impl CoalitionStructure {
    /// Checks that `coalitions` partition `0..n`.
    pub fn new(mut coalitions: Vec<Coalition>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for c in &coalitions {
            for &m in c.members() {
                if m.0 >= n {
                    return Err(Error::UnknownNode { node: m.0, n });
                }
                if seen[m.0] {
                    return Err(Error::OverlappingCoalitions(m));
                }
                seen[m.0] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Uncovered(NodeId(missing)));
        }
        coalitions.sort();
        Ok(CoalitionStructure { coalitions })
    }

    /// Canonicalise without validation. Callers guarantee a disjoint cover.
    pub(crate) fn from_sorted_parts(mut coalitions: Vec<Coalition>) -> Self {
        coalitions.sort();
        CoalitionStructure { coalitions }
    }

    pub fn singletons(rings: &[Ring]) -> Self {
        CoalitionStructure {
            coalitions: rings
                .iter()
                .enumerate()
                .map(|(i, &r)| Coalition::singleton(i, r))
                .collect(),
        }
    }

    /// Parse the `12|3` notation (one-based digits, blocks split by `|` or `,`).
    pub fn parse(text: &str, rings: &[Ring]) -> Result<Self> {
        let mut coalitions = Vec::new();
        for block in text.trim_matches(['[', ']']).split(['|', ',']) {
            let block = block.trim();
            let members: Vec<usize> = block
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as usize - 1)
                        .ok_or_else(|| Error::InvalidCoalition { members: vec![] })
                })
                .collect::<Result<_>>()?;
            coalitions.push(Coalition::new(&members, rings)?);
        }
        CoalitionStructure::new(coalitions, rings.len())
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn node_count(&self) -> usize {
        self.coalitions.iter().map(Coalition::len).sum()
    }

    /// The coalition containing `node`.
    pub fn coalition_of(&self, node: NodeId) -> Option<&Coalition> {
        self.coalitions.iter().find(|c| c.contains(node))
    }

    /// Sum of weights of reachable coalitions.
    pub fn total_weight(&self) -> i64 {
        self.coalitions.iter().map(Coalition::weight).sum()
    }

    /// Number of coalitions with more than one member.
    pub fn agreements(&self) -> usize {
        self.coalitions.iter().filter(|c| !c.is_singleton()).count()
    }

    /// Nodes that belong to a reachable coalition.
    pub fn active_nodes(&self) -> usize {
        self.coalitions
            .iter()
            .filter(|c| c.is_reachable())
            .map(Coalition::len)
            .sum()
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coalitions.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Coalitions that topology allows. Singletons are always allowed.
#[derive(Debug, Clone)]
pub struct Catalog {
    rings: Vec<Ring>,
    groups: Vec<Coalition>,
    by_mask: HashMap<u64, usize>,
}

impl Catalog {
    /// Every CI..CIV template among `rings`.
    pub fn templates(rings: &[Ring]) -> Self {
        Self::grouped(rings, &[(0..rings.len()).collect::<Vec<_>>()])
    }

    /// Templates restricted to lie inside one of `groups`.
    pub fn grouped(rings: &[Ring], groups: &[Vec<usize>]) -> Self {
        let mut found = Vec::new();
        for g in groups {
            for (a, &i) in g.iter().enumerate() {
                for (b, &j) in g.iter().enumerate().skip(a + 1) {
                    found.extend(Coalition::new(&[i, j], rings).ok());
                    for &k in g.iter().skip(b + 1) {
                        found.extend(Coalition::new(&[i, j, k], rings).ok());
                    }
                }
            }
        }
        Self::build(rings, found)
    }

    /// Explicit list of multi-member coalitions.
    pub fn from_coalitions(rings: &[Ring], coalitions: &[Vec<usize>]) -> Result<Self> {
        let parsed = coalitions
            .iter()
            .map(|c| Coalition::new(c, rings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(
            rings,
            parsed.into_iter().filter(|c| !c.is_singleton()).collect(),
        ))
    }

    fn build(rings: &[Ring], mut groups: Vec<Coalition>) -> Self {
        assert!(rings.len() <= 64, "catalogs hold at most 64 nodes");
        groups.sort();
        groups.dedup();
        let by_mask = groups.iter().enumerate().map(|(k, c)| (c.mask(), k)).collect();
        Catalog {
            rings: rings.to_vec(),
            groups,
            by_mask,
        }
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn node_count(&self) -> usize {
        self.rings.len()
    }

    /// Multi-member feasible coalitions.
    pub fn groups(&self) -> &[Coalition] {
        &self.groups
    }

    /// The feasible coalition with exactly the members in `mask`, if any.
    pub fn lookup(&self, mask: u64) -> Option<Coalition> {
        if mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            return (i < self.rings.len()).then(|| Coalition::singleton(i, self.rings[i]));
        }
        self.by_mask.get(&mask).map(|&k| self.groups[k].clone())
    }

    pub fn is_feasible(&self, coalition: &Coalition) -> bool {
        coalition.is_singleton() || self.by_mask.contains_key(&coalition.mask())
    }

    pub fn contains_structure(&self, cs: &CoalitionStructure) -> bool {
        cs.node_count() == self.rings.len() && cs.coalitions().iter().all(|c| self.is_feasible(c))
    }

    /// Partitions of the nodes in `mask` into feasible coalitions, unsorted.
    pub fn partitions_of(&self, mask: u64) -> Vec<Vec<Coalition>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.partition_rec(mask, &mut current, &mut out);
        out
    }

    fn partition_rec(&self, rest: u64, current: &mut Vec<Coalition>, out: &mut Vec<Vec<Coalition>>) {
        if rest == 0 {
            out.push(current.clone());
            return;
        }
        let low = rest.trailing_zeros() as usize;
        current.push(Coalition::singleton(low, self.rings[low]));
        self.partition_rec(rest & !(1u64 << low), current, out);
        current.pop();
        for g in &self.groups {
            let m = g.mask();
            if m & (1u64 << low) != 0 && m & !rest == 0 {
                current.push(g.clone());
                self.partition_rec(rest & !m, current, out);
                current.pop();
            }
        }
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// All feasible coalition structures over `nodes`, in canonical order.
///
/// With a strict subset of the catalog's nodes the result holds partial
/// structures covering only `nodes`.
pub fn enumerate_feasible_cs(catalog: &Catalog, nodes: &[NodeId]) -> Vec<CoalitionStructure> {
    let mask = nodes.iter().fold(0u64, |m, id| m | (1u64 << id.0));
    let mut all: Vec<CoalitionStructure> = catalog
        .partitions_of(mask)
        .into_iter()
        .map(CoalitionStructure::from_sorted_parts)
        .collect();
    all.sort();
    all
}

/// Every feasible structure over all of the catalog's nodes.
pub fn enumerate_all(catalog: &Catalog) -> Vec<CoalitionStructure> {
    let nodes: Vec<NodeId> = (0..catalog.node_count()).map(NodeId).collect();
    enumerate_feasible_cs(catalog, &nodes)
}

/// Inter-coalition shares, one per coalition of `cs` in its canonical order.
pub fn inter_bea_value(cs: &CoalitionStructure) -> Result<Vec<Rational>> {
    let m = cs.total_weight();
    if m == 0 {
        return Err(Error::NoReachableCoalition(cs.to_string()));
    }
    Ok(cs
        .coalitions()
        .iter()
        .map(|c| Rational::new(c.weight() as i128, m as i128))
        .collect())
}

/// Shares for every embedded coalition of a game.
#[derive(Debug, Clone, Default)]
pub struct PartitionFunction {
    values: BTreeMap<CoalitionStructure, Vec<Rational>>,
}

impl PartitionFunction {
    /// Inter-coalition shares over every feasible structure of `catalog`.
    /// A structure with no reachable coalition gives every coalition 0.
    pub fn inter_bea(catalog: &Catalog) -> Self {
        let values = enumerate_all(catalog)
            .into_iter()
            .map(|cs| {
                let v = inter_bea_value(&cs).unwrap_or_else(|_| vec![Rational::zero(); cs.coalitions().len()]);
                (cs, v)
            })
            .collect();
        PartitionFunction { values }
    }

    pub fn insert(&mut self, cs: CoalitionStructure, shares: Vec<Rational>) {
        self.values.insert(cs, shares);
    }

    pub fn structures(&self) -> impl Iterator<Item = &CoalitionStructure> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoalitionStructure, &Vec<Rational>)> {
        self.values.iter()
    }

    pub fn shares(&self, cs: &CoalitionStructure) -> Option<&[Rational]> {
        self.values.get(cs).map(Vec::as_slice)
    }

    /// `v(C, cs)`.
    pub fn value(&self, coalition: &Coalition, cs: &CoalitionStructure) -> Result<Rational> {
        let missing = || Error::MissingValue {
            coalition: coalition.to_string(),
            structure: cs.to_string(),
        };
        let shares = self.values.get(cs).ok_or_else(missing)?;
        let k = cs
            .coalitions()
            .iter()
            .position(|c| c == coalition)
            .ok_or_else(missing)?;
        Ok(shares[k])
    }

    pub fn structure_count(&self) -> usize {
        self.values.len()
    }

    pub fn embedded_count(&self) -> usize {
        self.values.keys().map(|cs| cs.coalitions().len()).sum()
    }
}

/// Singletons joining into one new coalition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mergence {
    pub kind: CoalitionKind,
    pub merged: Coalition,
    pub result: CoalitionStructure,
}

/// Every catalog coalition that can form from singletons of `cs`.
pub fn enumerate_mergences(cs: &CoalitionStructure, catalog: &Catalog) -> Vec<Mergence> {
    let free: u64 = cs
        .coalitions()
        .iter()
        .filter(|c| c.is_singleton())
        .fold(0, |m, c| m | c.mask());
    catalog
        .groups()
        .iter()
        .filter(|g| g.mask() & !free == 0)
        .map(|g| {
            let m = g.mask();
            let mut parts: Vec<Coalition> = cs.coalitions().iter().filter(|c| c.mask() & m == 0).cloned().collect();
            parts.push(g.clone());
            Mergence {
                kind: g.kind(),
                merged: g.clone(),
                result: CoalitionStructure::from_sorted_parts(parts),
            }
        })
        .collect()
}

/// Weight change a mergence of the given kind adds to the total.
pub fn expected_m_delta(kind: CoalitionKind) -> i64 {
    match kind {
        CoalitionKind::Sc => 0,
        CoalitionKind::Ci => 1,
        CoalitionKind::Cii | CoalitionKind::Ciii => 2,
        CoalitionKind::Civ => 5,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalityReport {
    pub kind: CoalitionKind,
    pub m_before: i64,
    pub m_after: i64,
    /// Sum of the merging nodes' shares before the merge.
    pub involved_before: Rational,
    /// Share of the new coalition.
    pub involved_after: Rational,
    pub merged_gain: Rational,
    /// Change of every untouched coalition's share.
    pub residual_deltas: Vec<(Coalition, Rational)>,
}

impl ExternalityReport {
    pub fn m_delta(&self) -> i64 {
        self.m_after - self.m_before
    }

    /// Some reachable coalition stays outside the merge. Without one the
    /// merging nodes already hold the whole band and gain nothing.
    pub fn has_reachable_residual(&self) -> bool {
        self.residual_deltas.iter().any(|(c, _)| c.is_reachable())
    }

    /// Merged group gains and every reachable bystander loses.
    pub fn is_strict(&self) -> bool {
        self.merged_gain > Rational::zero()
            && self
                .residual_deltas
                .iter()
                .filter(|(c, _)| c.is_reachable())
                .all(|(_, d)| *d < Rational::zero())
    }

    /// Nobody gains and no bystander gains.
    pub fn is_weakly_negative(&self) -> bool {
        self.merged_gain >= Rational::zero() && self.residual_deltas.iter().all(|(_, d)| *d <= Rational::zero())
    }
}

/// Share movements caused by `mergence` applied to `cs`.
pub fn check_negative_externality(cs: &CoalitionStructure, mergence: &Mergence) -> Result<ExternalityReport> {
    let n = cs.node_count();
    if n <= 2 {
        return Err(Error::TooFewNodes(n));
    }
    let merged_mask = mergence.merged.mask();
    let invalid = || Error::InvalidMergence {
        coalition: mergence.merged.to_string(),
        structure: cs.to_string(),
    };
    let valid_source = mergence
        .merged
        .members()
        .iter()
        .all(|&m| cs.coalition_of(m).is_some_and(Coalition::is_singleton));
    if !valid_source || !mergence.result.coalitions().contains(&mergence.merged) {
        return Err(invalid());
    }
    let before = inter_bea_value(cs)?;
    let after = inter_bea_value(&mergence.result)?;
    let mut involved_before = Rational::zero();
    let mut residual_deltas = Vec::new();
    for (c, share) in cs.coalitions().iter().zip(&before) {
        if c.mask() & merged_mask != 0 {
            involved_before += share;
        } else {
            let k = mergence
                .result
                .coalitions()
                .iter()
                .position(|r| r == c)
                .ok_or_else(invalid)?;
            residual_deltas.push((c.clone(), after[k] - share));
        }
    }
    let k = mergence
        .result
        .coalitions()
        .iter()
        .position(|r| *r == mergence.merged)
        .ok_or_else(invalid)?;
    let involved_after = after[k];
    Ok(ExternalityReport {
        kind: mergence.kind,
        m_before: cs.total_weight(),
        m_after: mergence.result.total_weight(),
        involved_before,
        involved_after,
        merged_gain: involved_after - involved_before,
        residual_deltas,
    })
}
