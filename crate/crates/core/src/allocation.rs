//! Splitting each coalition's share along its relay chain.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{inter_bea_value, Coalition, CoalitionStructure, NodeId};
use crate::Rational;

/// Per-node payoff in subchannel units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationVector {
    pub phi: Vec<Rational>,
}

/// Per-node transmit load, own traffic plus relayed traffic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficVector {
    pub t: Vec<Rational>,
}

/// Chain weights head first: 4:2:1 for three hops, 2:1 for two.
fn chain_weights(len: usize) -> &'static [i128] {
    match len {
        1 => &[1],
        2 => &[2, 1],
        _ => &[4, 2, 1],
    }
}

/// Split `group_share` among the members, returned in chain order.
pub fn intra_bea_split(coalition: &Coalition, group_share: Rational) -> Result<Vec<(NodeId, Rational)>> {
    if !coalition.is_reachable() {
        return Err(Error::UnreachableCoalition(coalition.to_string()));
    }
    if group_share <= Rational::zero() {
        return Err(Error::NonPositiveShare(group_share.to_string()));
    }
    let w = chain_weights(coalition.len());
    let total: i128 = w.iter().sum();
    Ok(coalition
        .chain()
        .iter()
        .zip(w)
        .map(|(&id, &k)| (id, group_share * Rational::new(k, total)))
        .collect())
}

fn per_node<F>(cs: &CoalitionStructure, mut f: F) -> Result<Vec<Rational>>
where
    F: FnMut(&Coalition, Rational, &mut [Rational]) -> Result<()>,
{
    let shares = inter_bea_value(cs)?;
    let mut out = vec![Rational::zero(); cs.node_count()];
    for (c, share) in cs.coalitions().iter().zip(shares) {
        if c.is_reachable() {
            f(c, share, &mut out)?;
        }
    }
    Ok(out)
}

pub fn payoff_vector(cs: &CoalitionStructure) -> Result<AllocationVector> {
    let phi = per_node(cs, |c, share, out| {
        for (id, v) in intra_bea_split(c, share)? {
            out[id.0] = v;
        }
        Ok(())
    })?;
    Ok(AllocationVector { phi })
}

pub fn traffic_vector(cs: &CoalitionStructure) -> Result<TrafficVector> {
    let t = per_node(cs, |c, share, out| {
        let split = intra_bea_split(c, share)?;
        let mut downstream = Rational::zero();
        for (id, v) in split.iter().rev() {
            downstream += v;
            out[id.0] = downstream;
        }
        Ok(())
    })?;
    Ok(TrafficVector { t })
}

/// Fraction of a coalition's share kept by the node at `hop`, head being 0.
pub fn hop_fraction(len: usize, hop: usize) -> Rational {
    let w = chain_weights(len);
    let total: i128 = w.iter().sum();
    w.get(hop).map_or_else(Rational::zero, |&k| Rational::new(k, total))
}

/// Fraction of a coalition's share transmitted by the node at `hop`.
pub fn hop_traffic_fraction(len: usize, hop: usize) -> Rational {
    (hop..len)
        .map(|h| hop_fraction(len, h))
        .fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::game::{enumerate_all, Ring};

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn cs3(text: &str) -> CoalitionStructure {
        CoalitionStructure::parse(text, &analytic::three_node().rings).unwrap()
    }

    fn cs5(text: &str) -> CoalitionStructure {
        CoalitionStructure::parse(text, &analytic::five_node().rings).unwrap()
    }

    #[test]
    fn splits() {
        let rings = analytic::three_node().rings;
        let tc = Coalition::new(&[0, 1, 2], &rings).unwrap();
        let got: Vec<Rational> = intra_bea_split(&tc, r(1, 1))
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        assert_eq!(got, vec![r(4, 7), r(2, 7), r(1, 7)]);
        let dc = Coalition::new(&[0, 1], &rings).unwrap();
        let got: Vec<Rational> = intra_bea_split(&dc, r(1, 1))
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        assert_eq!(got, vec![r(2, 3), r(1, 3)]);
        let sc = Coalition::singleton(0, Ring::Inner);
        assert_eq!(intra_bea_split(&sc, r(1, 2)).unwrap(), vec![(NodeId(0), r(1, 2))]);
        assert!(intra_bea_split(&Coalition::singleton(2, Ring::Outer), r(1, 2)).is_err());
        assert!(intra_bea_split(&sc, r(0, 1)).is_err());
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(
            payoff_vector(&cs3("1|23")).unwrap().phi,
            vec![r(1, 4), r(1, 2), r(1, 4)]
        );
        assert_eq!(
            payoff_vector(&cs5("123|45")).unwrap().phi,
            vec![r(4, 10), r(2, 10), r(1, 10), r(2, 10), r(1, 10)]
        );
        assert_eq!(
            payoff_vector(&cs5("12|3|45")).unwrap().phi,
            vec![r(1, 3), r(1, 6), r(0, 1), r(1, 3), r(1, 6)]
        );
    }

    #[test]
    fn traffic_examples() {
        assert_eq!(traffic_vector(&cs3("123")).unwrap().t, vec![r(1, 1), r(3, 7), r(1, 7)]);
        assert_eq!(traffic_vector(&cs3("12|3")).unwrap().t, vec![r(1, 1), r(1, 3), r(0, 1)]);
        assert_eq!(
            traffic_vector(&cs5("123|45")).unwrap().t,
            vec![r(7, 10), r(3, 10), r(1, 10), r(3, 10), r(1, 10)]
        );
    }

    #[test]
    fn conservation_and_relay_load() {
        for g in [analytic::three_node(), analytic::five_node()] {
            for cs in enumerate_all(&g.catalog) {
                let phi = payoff_vector(&cs).unwrap().phi;
                let t = traffic_vector(&cs).unwrap().t;
                assert_eq!(phi.iter().sum::<Rational>(), r(1, 1));
                let shares = inter_bea_value(&cs).unwrap();
                for (c, s) in cs.coalitions().iter().zip(shares) {
                    let kept: Rational = c.members().iter().map(|m| phi[m.0]).sum();
                    assert_eq!(kept, s);
                    assert_eq!(t[c.chain()[0].0], s);
                    for (k, id) in c.chain().iter().enumerate() {
                        let below: Rational = c.chain()[k + 1..].iter().map(|m| phi[m.0]).sum();
                        assert_eq!(t[id.0] - phi[id.0], below);
                    }
                }
            }
        }
    }

    #[test]
    fn hop_fractions() {
        assert_eq!(hop_fraction(3, 0), r(4, 7));
        assert_eq!(hop_traffic_fraction(3, 1), r(3, 7));
        assert_eq!(hop_traffic_fraction(2, 0), r(1, 1));
    }
}
