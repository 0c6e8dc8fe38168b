//! Coalition-structure learning laboratory.
//!
//! A hidden partition of agents `1..=n` into coalitions is recovered by
//! designing games and observing a single bit per game: whether the game's
//! default strategy profile is a Nash equilibrium when each coalition acts
//! as one joint agent maximizing the sum of its members' utilities.
//!
//! The crate is organized around that loop:
//!
//! * [`partition`] — coalition structures, random instance generation, and
//!   the information-theoretic query floor (Bell numbers).
//! * [`gadgets`] — the games a learner can design: pairwise defect/cooperate
//!   gadgets, a congestion variant, products of gadgets, round-robin edge
//!   schedules, and reserve-price auctions.
//! * [`oracle`] — the one-bit observation channel, in two independent
//!   flavors (membership test vs. brute-force deviation search), plus the
//!   seeded value stream auction learners draw from.
//! * [`learners`] — the four recovery algorithms (IG, GraphicalIG, DAIG,
//!   AuctionIG) and the potential function used to certify AuctionIG's
//!   progress.
//! * [`bench`] — seeded sweeps, bound curves, percentiles, CSV output.
//! * [`verify`] — exhaustive small-n cross-checks wired to `csl verify`.

pub mod bench;
pub mod error;
pub mod gadgets;
pub mod learners;
pub mod oracle;
pub mod partition;
pub mod verify;

pub use error::{Error, Result};
pub use partition::CoalitionStructure;

/// Agents are numbered `1..=n` throughout.
pub type AgentId = usize;
