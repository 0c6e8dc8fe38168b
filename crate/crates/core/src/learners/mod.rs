//! The recovery algorithms.
//!
//! Every learner starts from singletons, may only merge (never split), and
//! talks to the world exclusively through an [`OracleHandle`] — and, for
//! the sampled auction learner, a seeded [`ValueStream`]. Replaying the
//! same seeds reproduces the identical query sequence, which is what makes
//! the benchmark sweeps byte-reproducible.
//!
//! All four share one skeleton: ask a wide "is anyone here my teammate?"
//! question, and on a *no* (the default profile broke, so a teammate is in
//! there) binary-search the candidate set with narrower questions until a
//! single teammate is isolated, then merge and repeat. They differ in the
//! gadget family carrying the question and in who pays for the search:
//!
//! * [`ig`] — products of pairwise gadgets anchored at one agent.
//! * [`graphical_ig`] — the same, but pairs drawn from a round-robin
//!   schedule so each query is a degree-1 graphical game.
//! * [`daig`] — reserve-price auctions with designed indicator items.
//! * [`auction_ig`] — reserve-price auctions over *random* items: the
//!   agent holding the highest draw advances its coalition's search.

mod auction_ig;
mod daig;
mod graphical;
mod ig;

pub use auction_ig::{
    auction_ig, auction_ig_instrumented, auction_ig_traced, potential, AuctionIgState, DrawEvent,
};
pub use daig::{daig, daig_traced};
pub use graphical::{graphical_ig, graphical_ig_traced};
pub use ig::{ig, ig_flavored, ig_traced, PairFlavor};

use std::collections::BTreeSet;

use crate::gadgets::GadgetProduct;
use crate::partition::CoalitionStructure;
use crate::AgentId;

/// What a learner hands back: the recovered structure plus its cost
/// accounting. `queries` is the oracle-call count; `draws` counts value
/// vectors consumed (auction learners; equal to `queries`, since every
/// arrived item is spent on exactly one observation). `per_type_usage`
/// is filled by the designed-item learner: entry `i - 1` counts auctions
/// run with item type `i`.
#[derive(Clone, Debug)]
pub struct LearnResult {
    pub structure: CoalitionStructure,
    pub queries: u64,
    pub draws: u64,
    pub per_type_usage: Option<Vec<u64>>,
}

/// A view of one oracle interaction, handed to trace sinks as it happens.
#[derive(Debug)]
pub struct QueryEvent<'a> {
    /// Oracle query counter after this call (1-based within a run on a
    /// fresh handle).
    pub query_index: u64,
    pub query: QueryView<'a>,
    pub answer: bool,
    /// The learner's working structure at the time of the query.
    pub structure: &'a CoalitionStructure,
}

/// The query itself, by reference.
#[derive(Debug)]
pub enum QueryView<'a> {
    Product(&'a GadgetProduct),
    Auction {
        /// Highest-value agent of the item.
        top: AgentId,
        /// Agents given the low reserve.
        targets: &'a BTreeSet<AgentId>,
        /// The item's value vector.
        values: &'a [f64],
    },
}

/// Trace sink type: learners call it once per oracle query.
pub type TraceSink<'a> = &'a mut dyn FnMut(&QueryEvent<'_>);

/// Smallest `k` with `2^k >= x` (so `ceil_log2(1) == 0`).
pub(crate) fn ceil_log2(x: usize) -> u64 {
    debug_assert!(x >= 1);
    x.next_power_of_two().trailing_zeros() as u64
}

/// Splits a candidate list for binary search: the first half, rounded up,
/// in ascending order. Shared by all learners so their search trees agree.
pub(crate) fn front_half_len(len: usize) -> usize {
    len.div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1000), 10);
        assert_eq!(ceil_log2(1024), 10);
    }

    #[test]
    fn front_half_rounds_up() {
        assert_eq!(front_half_len(2), 1);
        assert_eq!(front_half_len(3), 2);
        assert_eq!(front_half_len(7), 4);
    }
}
