//! Fair-division predictions: the Myerson value and its relay-compensated form.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Catalog, Coalition, CoalitionStructure, NodeId, PartitionFunction};
use crate::physical::to_f64;
use crate::Rational;

/// Real-valued allocation, one entry per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector {
    pub values: Vec<f64>,
}

impl ValueVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn from_exact(values: &[Rational]) -> Self {
        ValueVector {
            values: values.iter().map(|v| to_f64(*v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationSpec {
    pub lambda: f64,
}

impl CompensationSpec {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda >= 0.0 {
            Ok(CompensationSpec { lambda })
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }

    /// `+1` when `i` relays for `j` inside `coalition`, `-1` for the reverse.
    pub fn indicator(coalition: &Coalition, i: NodeId, j: NodeId) -> i8 {
        coalition.relay_indicator(i, j)
    }
}

/// Best organisation of a node subset with every other node alone.
#[derive(Debug, Clone)]
pub struct Worth {
    pub value: Rational,
    pub blocks: Vec<Coalition>,
}

/// The game reduced to a worth per node subset.
///
/// A subset is worth what its members collect when they organise themselves
/// as well as the catalog allows and everyone else stays alone.
#[derive(Debug, Clone)]
pub struct RestrictedGame {
    n: usize,
    worths: Vec<Worth>,
}

impl RestrictedGame {
    pub fn new(catalog: &Catalog, v: &PartitionFunction) -> Result<Self> {
        let n = catalog.node_count();
        assert!(n <= 20, "subset enumeration is limited to 20 nodes");
        let rings = catalog.rings();
        let mut worths = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            let mut best: Option<(Rational, Vec<Coalition>, CoalitionStructure)> = None;
            for blocks in catalog.partitions_of(mask) {
                let mut parts = blocks.clone();
                parts.extend(
                    (0..n)
                        .filter(|i| mask & (1u64 << i) == 0)
                        .map(|i| Coalition::singleton(i, rings[i])),
                );
                let cs = CoalitionStructure::new(parts, n)?;
                let mut total = Rational::zero();
                for b in &blocks {
                    total += v.value(b, &cs)?;
                }
                let better = match &best {
                    None => true,
                    Some((t, bb, bcs)) => total > *t || (total == *t && (blocks.len(), &cs) < (bb.len(), bcs)),
                };
                if better {
                    best = Some((total, blocks, cs));
                }
            }
            let (value, blocks, _) = best.unwrap_or((
                Rational::zero(),
                Vec::new(),
                CoalitionStructure::from_sorted_parts(Vec::new()),
            ));
            worths.push(Worth { value, blocks });
        }
        Ok(RestrictedGame { n, worths })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn worth(&self, mask: u64) -> &Worth {
        &self.worths[mask as usize]
    }

    /// Weight `(s-1)! (n-s)! / n!` of a size-`s` subset.
    fn coefficient(&self, s: usize) -> Rational {
        let f = |k: usize| (1..=k as i128).product::<i128>();
        Rational::new(f(s - 1) * f(self.n - s), f(self.n))
    }

    pub fn myerson_value(&self) -> Vec<Rational> {
        let mut phi = vec![Rational::zero(); self.n];
        for mask in 1..(1u64 << self.n) {
            let c = self.coefficient(mask.count_ones() as usize);
            let w = self.worths[mask as usize].value;
            for (i, p) in phi.iter_mut().enumerate() {
                let bit = 1u64 << i;
                if mask & bit != 0 {
                    *p += c * (w - self.worths[(mask & !bit) as usize].value);
                }
            }
        }
        phi
    }

    /// `K` with `(I - lambda K) phi = MV` giving the compensated value.
    pub fn compensation_matrix(&self) -> Vec<Vec<Rational>> {
        let mut k = vec![vec![Rational::zero(); self.n]; self.n];
        for mask in 1..(1u64 << self.n) {
            let c = self.coefficient(mask.count_ones() as usize);
            for block in &self.worths[mask as usize].blocks {
                for &i in block.members() {
                    for &j in block.members() {
                        match block.relay_indicator(i, j) {
                            1 => k[i.0][j.0] += c,
                            -1 => k[i.0][i.0] -= c,
                            _ => {}
                        }
                    }
                }
            }
        }
        k
    }

    pub fn compensated(&self, spec: CompensationSpec) -> Result<ValueVector> {
        let spec = CompensationSpec::new(spec.lambda)?;
        let mv = self.myerson_value();
        if spec.lambda == 0.0 {
            return Ok(ValueVector::from_exact(&mv));
        }
        let k = self.compensation_matrix();
        let n = self.n;
        let a = DMatrix::from_fn(n, n, |r, c| {
            let id = if r == c { 1.0 } else { 0.0 };
            id - spec.lambda * to_f64(k[r][c])
        });
        let b = DVector::from_iterator(n, mv.iter().map(|x| to_f64(*x)));
        let x = a
            .lu()
            .solve(&b)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or(Error::Singular { lambda: spec.lambda })?;
        Ok(ValueVector {
            values: x.iter().copied().collect(),
        })
    }
}

/// Myerson value of the game, exact.
pub fn myerson_value(catalog: &Catalog, v: &PartitionFunction) -> Result<Vec<Rational>> {
    Ok(RestrictedGame::new(catalog, v)?.myerson_value())
}

/// Compensated value: solves `(I - lambda K) phi = MV` directly.
pub fn compensated_myerson_value(
    catalog: &Catalog,
    v: &PartitionFunction,
    spec: CompensationSpec,
) -> Result<ValueVector> {
    RestrictedGame::new(catalog, v)?.compensated(spec)
}

/// Closed-form compensated value of the three-node chain game.
pub fn cmv_closed_form_3(lambda: f64) -> Result<ValueVector> {
    let l = CompensationSpec::new(lambda)?.lambda;
    let p3 = 1.0 / (12.0 * (1.0 + l));
    let p2 = (11.0 + 12.0 * l) / (12.0 * (1.0 + l) * (2.0 + l));
    Ok(ValueVector {
        values: vec![1.0 - p2 - p3, p2, p3],
    })
}

fn set_partitions(n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut blocks: Vec<u64> = Vec::new();
    fn rec(i: usize, n: usize, blocks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for k in 0..blocks.len() {
            blocks[k] |= 1 << i;
            rec(i + 1, n, blocks, out);
            blocks[k] &= !(1 << i);
        }
        blocks.push(1 << i);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    rec(0, n, &mut blocks, &mut out);
    out
}

/// Myerson's partition-function value over the full partition lattice.
///
/// Blocks outside the catalog are evaluated as if their members stayed
/// alone. Kept for comparison with [`myerson_value`].
pub fn lattice_myerson_value(catalog: &Catalog, v: &PartitionFunction) -> Result<Vec<Rational>> {
    let n = catalog.node_count();
    let rings = catalog.rings();
    let mut phi = vec![Rational::zero(); n];
    let nn = Rational::from_integer(n as i128);
    for q in set_partitions(n) {
        let mut parts = Vec::new();
        for &b in &q {
            match catalog.lookup(b) {
                Some(c) => parts.push(c),
                None => parts.extend(
                    (0..n)
                        .filter(|i| b & (1u64 << i) != 0)
                        .map(|i| Coalition::singleton(i, rings[i])),
                ),
            }
        }
        let cs = CoalitionStructure::new(parts, n)?;
        let shares = v.shares(&cs).ok_or_else(|| Error::MissingValue {
            coalition: String::new(),
            structure: cs.to_string(),
        })?;
        let q_len = q.len();
        let sign = if q_len % 2 == 1 { 1 } else { -1 };
        let fact: i128 = (1..q_len as i128).product();
        let lead = Rational::from_integer(sign * fact);
        for &s in &q {
            let worth: Rational = cs
                .coalitions()
                .iter()
                .zip(shares)
                .filter(|(c, _)| c.mask() & !s == 0)
                .map(|(_, x)| *x)
                .sum();
            if worth.is_zero() {
                continue;
            }
            for (i, p) in phi.iter_mut().enumerate() {
                let mut bracket = Rational::one() / nn;
                if q_len > 1 {
                    let inv = Rational::new(1, q_len as i128 - 1);
                    for &t in q.iter().filter(|&&t| t != s && t & (1u64 << i) == 0) {
                        bracket -= inv / (nn - Rational::from_integer(t.count_ones() as i128));
                    }
                }
                *p += lead * bracket * worth;
            }
        }
    }
    Ok(phi)
}
