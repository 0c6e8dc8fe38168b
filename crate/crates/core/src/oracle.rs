//! The one-bit observation channel.
//!
//! A learner never sees the hidden structure; it hands a game to an
//! [`OracleHandle`] and gets back a single bit: is the game's default
//! profile a Nash equilibrium when coalitions best-respond jointly?
//!
//! Two independent answer routes exist on purpose. The *analytic* route
//! answers from the membership facts the gadgets were engineered to
//! expose (pair separation, target-set disjointness). The *brute-force*
//! route knows nothing about the construction: it expands the game and
//! searches every coalition's joint deviations. Exhaustive small-n
//! agreement between the two is the crate's core self-check (see
//! [`crate::verify`]); large sweeps then run the analytic route.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gadgets::{unique_argmax, AuctionInstance, GadgetProduct, GameStrategyPair, Payoff};
use crate::partition::CoalitionStructure;
use crate::AgentId;

/// Default ceiling on the expanded joint-action space a brute-force check
/// will enumerate.
pub const DEFAULT_ACTION_SPACE_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Answer from coalition-membership facts; O(query size).
    Analytic,
    /// Expand the game and search all coalition deviations; exponential,
    /// for small-n validation only.
    BruteForce,
}

/// Holds the hidden structure and answers equilibrium queries about it.
/// Learners get `observe_*` and the query counter — nothing else; the
/// ground truth stays private to this struct.
pub struct OracleHandle {
    ground_truth: CoalitionStructure,
    mode: OracleMode,
    query_count: u64,
    action_space_cap: u128,
}

impl OracleHandle {
    pub fn new(ground_truth: CoalitionStructure, mode: OracleMode) -> Self {
        OracleHandle {
            ground_truth,
            mode,
            query_count: 0,
            action_space_cap: DEFAULT_ACTION_SPACE_CAP,
        }
    }

    pub fn with_action_space_cap(mut self, cap: u128) -> Self {
        self.action_space_cap = cap;
        self
    }

    /// Number of agents in the hidden structure.
    pub fn n(&self) -> usize {
        self.ground_truth.n()
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    /// Total observations answered so far.
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    /// One bit: is the default (all-defect / all-detour) profile of the
    /// given gadget product an equilibrium under the hidden structure?
    pub fn observe_product(&mut self, query: &GadgetProduct) -> Result<bool> {
        if query.n() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "query is over {} agents, oracle holds {}",
                query.n(),
                self.n()
            )));
        }
        let answer = match self.mode {
            // The default survives iff every queried pair is separated:
            // any co-coalition pair can jointly cooperate and gain.
            OracleMode::Analytic => query
                .pairs()
                .iter()
                .all(|&(x, y)| !self.ground_truth.same_coalition_unchecked(x, y)),
            OracleMode::BruteForce => {
                brute_force_ne(&query.expand()?, &self.ground_truth, self.action_space_cap)?
            }
        };
        self.query_count += 1;
        Ok(answer)
    }

    /// One bit: is truthful bidding an equilibrium of the given
    /// reserve-price auction under the hidden structure? `targets` must be
    /// the set the instance was built with.
    pub fn observe_auction(
        &mut self,
        auction: &AuctionInstance,
        targets: &BTreeSet<AgentId>,
    ) -> Result<bool> {
        if auction.n() != self.n() {
            return Err(Error::InvalidArgument(format!(
                "auction is over {} agents, oracle holds {}",
                auction.n(),
                self.n()
            )));
        }
        let top = unique_argmax(auction.values())?;
        // Cheap consistency check that the instance really came from the
        // gadget constructor with this target set: target reserves sit at
        // the second-highest value, everyone else's at the maximum.
        let v_max = auction.values()[top - 1];
        let v_smax = crate::gadgets::second_max(auction.values());
        for (i, &r) in auction.reserves().iter().enumerate() {
            let agent = i + 1;
            if agent == top && targets.contains(&agent) {
                return Err(Error::InvalidArgument(format!(
                    "target set contains the maximum-value agent {top}"
                )));
            }
            let expect = if targets.contains(&agent) { v_smax } else { v_max };
            if r != expect {
                return Err(Error::InvalidArgument(format!(
                    "reserve {r} for agent {agent} does not match the target set"
                )));
            }
        }
        let answer = match self.mode {
            // Truthful play survives iff no target shares the top agent's
            // coalition (a teammate target could win at the low reserve).
            OracleMode::Analytic => targets
                .iter()
                .all(|&j| !self.ground_truth.same_coalition_unchecked(top, j)),
            OracleMode::BruteForce => brute_force_auction_ne(auction, &self.ground_truth)?,
        };
        self.query_count += 1;
        Ok(answer)
    }
}

/// Construction-blind equilibrium check: enumerates, for every coalition,
/// every joint pure action of its members (others pinned to the default)
/// and compares the coalition's utility sum against the default. Pure
/// deviations suffice: coalition utility is multilinear in any mixture, so
/// some pure deviation attains the maximum.
///
/// Refuses games whose expanded joint-action space exceeds `cap`.
pub fn brute_force_ne(
    game: &GameStrategyPair,
    structure: &CoalitionStructure,
    cap: u128,
) -> Result<bool> {
    if game.n() != structure.n() {
        return Err(Error::InvalidArgument(format!(
            "game is over {} agents, structure over {}",
            game.n(),
            structure.n()
        )));
    }
    let space = game.joint_space_size();
    if space > cap {
        return Err(Error::UnsupportedSize(format!(
            "joint action space has {space} cells, cap is {cap}"
        )));
    }
    let default = game.default_joint();
    let base = game.utility(&default);
    for block in structure.blocks() {
        let base_sum: Payoff = block.iter().map(|&i| base[i - 1]).sum();
        // Collect the action slots controlled by this coalition.
        let mut slots: Vec<(usize, usize, usize)> = Vec::new(); // (factor, player slot, #actions)
        for (fi, factor) in game.factors().iter().enumerate() {
            for (slot, agent) in factor.players().iter().enumerate() {
                if block.contains(agent) {
                    slots.push((fi, slot, factor.action_labels(slot).len()));
                }
            }
        }
        if slots.is_empty() {
            continue; // coalition of dummies; nothing to deviate with
        }
        let mut joint = default.clone();
        for &(fi, slot, _) in &slots {
            joint[fi][slot] = 0;
        }
        loop {
            let u = game.utility(&joint);
            let sum: Payoff = block.iter().map(|&i| u[i - 1]).sum();
            if sum > base_sum {
                return Ok(false);
            }
            // Odometer over the coalition's slots.
            let mut done = true;
            for &(fi, slot, count) in &slots {
                if joint[fi][slot] + 1 < count {
                    joint[fi][slot] += 1;
                    done = false;
                    break;
                }
                joint[fi][slot] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(true)
}

/// Construction-blind equilibrium check for reserve-price auctions. The
/// deviation space is infinite, but a coalition's best option reduces to a
/// finite scan: pick the member `j` who wins (everyone else in the
/// coalition drops to 0, outsiders stay truthful, so `j` pays
/// `max(reserve_j, best outside bid)`), hand the item to the coalition's
/// best-value member, or decline to win at all (utility 0). Float
/// comparisons are exact by design — values come from draws that forbid
/// ties at the top.
pub fn brute_force_auction_ne(
    auction: &AuctionInstance,
    structure: &CoalitionStructure,
) -> Result<bool> {
    if auction.n() != structure.n() {
        return Err(Error::InvalidArgument(format!(
            "auction is over {} agents, structure over {}",
            auction.n(),
            structure.n()
        )));
    }
    let bids = auction.bids();
    let values = auction.values();
    let reserves = auction.reserves();
    let winner = unique_argmax(bids)?;
    // Truthful clearing price: winner's reserve or the best rival bid.
    let best_rival = bids
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != winner)
        .map(|(_, &b)| b)
        .fold(0.0f64, f64::max);
    let price = reserves[winner - 1].max(best_rival);

    for block in structure.blocks() {
        let best_value = block.iter().map(|&i| values[i - 1]).fold(0.0f64, f64::max);
        let truthful = if block.contains(&winner) {
            // The item lands in this coalition and goes to its best
            // member; the coalition accepts at utility >= 0.
            (best_value - price).max(0.0)
        } else {
            0.0
        };
        let outside_bid = bids
            .iter()
            .enumerate()
            .filter(|&(i, _)| !block.contains(&(i + 1)))
            .map(|(_, &b)| b)
            .fold(0.0f64, f64::max);
        let mut best_deviation = 0.0f64;
        for &j in block {
            let pay = reserves[j - 1].max(outside_bid);
            best_deviation = best_deviation.max(best_value - pay);
        }
        if best_deviation > truthful {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Seeded stream of i.i.d. uniform `[0, 1)` value vectors for the sampled
/// auction learner. `draws` counts vectors handed out; a replay from the
/// same seed reproduces the identical sequence.
pub struct ValueStream {
    rng: ChaCha8Rng,
    n: usize,
    draws: u64,
}

impl ValueStream {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one agent".into()));
        }
        Ok(ValueStream { rng: ChaCha8Rng::seed_from_u64(seed), n, draws: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Vectors handed out so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Next value vector.
    pub fn draw_values(&mut self) -> Vec<f64> {
        self.draws += 1;
        (0..self.n).map(|_| self.rng.gen::<f64>()).collect()
    }

    /// Next value vector with a strictly unique maximum: exact top ties
    /// (measure zero, but floats) are regenerated *before* the vector is
    /// presented, so a rejected vector never counts as a draw.
    pub fn draw_values_unique_max(&mut self) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.n).map(|_| self.rng.gen::<f64>()).collect();
            if unique_argmax(&v).is_ok() {
                self.draws += 1;
                return v;
            }
        }
    }
}
