//! Designed-item auction learner. Each query is a reserve-price auction
//! whose item is an indicator vector: agent `x` values it at 1, everyone
//! else at 0. Giving a low reserve to a candidate set `T` makes truthful
//! bidding an equilibrium exactly when no teammate of `x` is in `T`, so
//! auctions over items of type `x` binary-search for teammates of `x`.
//!
//! The twist against the pairwise learner: after merging `x` with a found
//! teammate `y`, the search continues *from `y`* (the chain hops along
//! the coalition), so consecutive auctions use a different item type and
//! no single type is consumed more than a logarithmic number of times.

use std::collections::BTreeSet;

use crate::gadgets::{auction_gadget, designed_item};
use crate::learners::{front_half_len, LearnResult, QueryEvent, QueryView, TraceSink};
use crate::oracle::OracleHandle;
use crate::partition::CoalitionStructure;
use crate::{AgentId, Error, Result};

/// Runs the designed-item auction learner.
pub fn daig(n: usize, oracle: &mut OracleHandle) -> Result<LearnResult> {
    daig_traced(n, oracle, &mut |_| {})
}

/// Runs the designed-item auction learner, reporting every query to `sink`.
///
/// For each starting agent `i` (ascending), set `x = i` and loop: auction
/// an item of type `x` with the low reserve on everyone outside `x`'s
/// current group. A *yes* ends the chain (no teammate of `x` remains
/// outside — asked even when the outside set is empty, since the auction
/// is a perfectly good game either way); a *no* binary-searches that set
/// with further type-`x` auctions, merges the found teammate `y`, and
/// continues the chain from `y`.
pub fn daig_traced(
    n: usize,
    oracle: &mut OracleHandle,
    sink: TraceSink<'_>,
) -> Result<LearnResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one agent".into()));
    }
    if oracle.n() != n {
        return Err(Error::InvalidArgument(format!(
            "oracle is for {} agents, learner asked for {n}",
            oracle.n()
        )));
    }
    let start = oracle.query_count();
    let mut s = CoalitionStructure::singletons(n)?;
    let mut per_type = vec![0u64; n];
    for i in 1..=n {
        let mut x = i;
        loop {
            let outsiders: BTreeSet<AgentId> = (1..=n)
                .filter(|&j| !s.same_coalition_unchecked(x, j))
                .collect();
            if observe(oracle, n, x, &outsiders, &mut per_type, &s, sink)? {
                break;
            }
            let mut t: Vec<AgentId> = outsiders.into_iter().collect();
            while t.len() > 1 {
                let half = front_half_len(t.len());
                let probe: BTreeSet<AgentId> = t[..half].iter().copied().collect();
                if observe(oracle, n, x, &probe, &mut per_type, &s, sink)? {
                    t.drain(..half);
                } else {
                    t.truncate(half);
                }
            }
            let y = t[0];
            s = s.merge(x, y)?;
            x = y;
        }
    }
    let queries = oracle.query_count() - start;
    Ok(LearnResult {
        structure: s,
        queries,
        draws: queries,
        per_type_usage: Some(per_type),
    })
}

fn observe(
    oracle: &mut OracleHandle,
    n: usize,
    item_type: AgentId,
    targets: &BTreeSet<AgentId>,
    per_type: &mut [u64],
    s: &CoalitionStructure,
    sink: TraceSink<'_>,
) -> Result<bool> {
    let values = designed_item(n, item_type)?;
    let auction = auction_gadget(&values, targets)?;
    let answer = oracle.observe_auction(&auction, targets)?;
    per_type[item_type - 1] += 1;
    sink(&QueryEvent {
        query_index: oracle.query_count(),
        query: QueryView::Auction {
            top: item_type,
            targets,
            values: auction.values(),
        },
        answer,
        structure: s,
    });
    Ok(answer)
}
