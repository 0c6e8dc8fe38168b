//! Second-price auctions with personalized reserve prices.
//!
//! One indivisible item is auctioned among all `n` agents. The designer
//! fixes a value vector `v` (how much each agent privately gains from the
//! item) and a target set `T` of agents who get a *low* reserve — the
//! second-highest value — while everyone else's reserve is pinned at the
//! maximum value, pricing them out of any profitable lone win. The default
//! profile is truthful bidding `b = v`.
//!
//! The point of the construction: the truthful profile is an equilibrium
//! exactly when no member of `T` shares a coalition with the unique
//! highest-value agent. If some `j ∈ T` is a teammate of the top agent
//! `i*`, the coalition can route the win through `j` at the low reserve
//! and pocket the difference; otherwise nobody can gain. Coalitions may
//! pass the item internally, so a winning coalition banks its *best*
//! member value regardless of which member won.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::AgentId;

/// An auction plus its truthful default bid profile.
#[derive(Clone, Debug, PartialEq)]
pub struct AuctionInstance {
    values: Vec<f64>,
    reserves: Vec<f64>,
}

impl AuctionInstance {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn reserves(&self) -> &[f64] {
        &self.reserves
    }

    /// Default bids: truthful, i.e. the value vector itself.
    pub fn bids(&self) -> &[f64] {
        &self.values
    }
}

/// Index (1-based) of the strictly unique maximum of `values`; an exact
/// tie for the top is a degeneracy the auction constructions forbid.
pub fn unique_argmax(values: &[f64]) -> Result<AgentId> {
    let mut best = 0usize;
    let mut ties = 1usize;
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty value vector".into()));
    }
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
            ties = 1;
        } else if v == values[best] {
            ties += 1;
        }
    }
    if ties != 1 {
        return Err(Error::DegenerateValues(format!(
            "maximum value {} is not unique ({} holders)",
            values[best], ties
        )));
    }
    Ok(best + 1)
}

/// Largest value among agents other than the maximum holder; 0 for a
/// single-agent auction (where it is never consulted).
pub fn second_max(values: &[f64]) -> f64 {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &v in values {
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    if second == f64::NEG_INFINITY {
        0.0
    } else {
        second
    }
}

/// Builds the reserve-price auction for value vector `v` and target set
/// `targets`. Requires values in `[0, 1]` with a strictly unique maximum,
/// and `targets` to exclude the maximum holder.
pub fn auction_gadget(values: &[f64], targets: &BTreeSet<AgentId>) -> Result<AuctionInstance> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty value vector".into()));
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "value {} for agent {} outside [0, 1]",
                v,
                i + 1
            )));
        }
    }
    let top = unique_argmax(values)?;
    for &j in targets {
        if j == 0 || j > n {
            return Err(Error::InvalidArgument(format!(
                "target agent {j} out of range 1..={n}"
            )));
        }
        if j == top {
            return Err(Error::InvalidArgument(format!(
                "target set must exclude the maximum-value agent {top}"
            )));
        }
    }
    let v_max = values[top - 1];
    let v_smax = second_max(values);
    let reserves = (1..=n)
        .map(|i| if targets.contains(&i) { v_smax } else { v_max })
        .collect();
    Ok(AuctionInstance { values: values.to_vec(), reserves })
}

/// The indicator value vector: 1 for agent `i`, 0 for everyone else. Used
/// by the deterministic auction learner to interrogate one agent's
/// coalition at a time.
pub fn designed_item(n: usize, i: AgentId) -> Result<Vec<f64>> {
    if n == 0 || i == 0 || i > n {
        return Err(Error::InvalidArgument(format!(
            "agent {i} out of range 1..={n}"
        )));
    }
    let mut v = vec![0.0; n];
    v[i - 1] = 1.0;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserves_follow_target_set() {
        let v = [0.9, 0.5, 0.3];
        let a = auction_gadget(&v, &BTreeSet::from([2])).unwrap();
        assert_eq!(a.reserves(), &[0.9, 0.5, 0.9]);
        assert_eq!(a.bids(), &v);

        let a = auction_gadget(&v, &BTreeSet::new()).unwrap();
        assert_eq!(a.reserves(), &[0.9, 0.9, 0.9]);

        let a = auction_gadget(&v, &BTreeSet::from([2, 3])).unwrap();
        assert_eq!(a.reserves(), &[0.9, 0.5, 0.5]);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        // Tied maximum.
        assert!(matches!(
            auction_gadget(&[0.7, 0.7, 0.1], &BTreeSet::new()),
            Err(Error::DegenerateValues(_))
        ));
        // Target set touching the top agent.
        assert!(auction_gadget(&[0.9, 0.5], &BTreeSet::from([1])).is_err());
        // Out-of-range values or agents.
        assert!(auction_gadget(&[1.5, 0.5], &BTreeSet::new()).is_err());
        assert!(auction_gadget(&[0.9, 0.5], &BTreeSet::from([3])).is_err());
        assert!(auction_gadget(&[], &BTreeSet::new()).is_err());
    }

    #[test]
    fn single_agent_auction() {
        let a = auction_gadget(&[0.5], &BTreeSet::new()).unwrap();
        assert_eq!(a.reserves(), &[0.5]);
    }

    #[test]
    fn argmax_and_second_max() {
        assert_eq!(unique_argmax(&[0.1, 0.9, 0.3]).unwrap(), 2);
        assert_eq!(unique_argmax(&[0.5]).unwrap(), 1);
        assert!(unique_argmax(&[0.4, 0.4]).is_err());
        assert_eq!(second_max(&[0.1, 0.9, 0.3]), 0.3);
        assert_eq!(second_max(&[0.5]), 0.0);
        assert_eq!(second_max(&[0.2, 0.2, 0.1]), 0.2);
    }

    #[test]
    fn designed_item_is_indicator() {
        assert_eq!(designed_item(3, 2).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(designed_item(1, 1).unwrap(), vec![1.0]);
        assert!(designed_item(3, 0).is_err());
        assert!(designed_item(3, 4).is_err());
        // The indicator always has a unique max, so it coexists with any
        // valid target set.
        let v = designed_item(5, 3).unwrap();
        assert!(auction_gadget(&v, &BTreeSet::from([1, 2, 4, 5])).is_ok());
    }
}
