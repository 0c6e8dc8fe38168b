//! The games a learner can design and hand to the oracle.
//!
//! Everything here is a "game + default strategy profile" pair. The default
//! profile is what the oracle tests for equilibrium; the games are built so
//! that the one-bit answer reveals exactly one fact about the hidden
//! coalition structure (one pair relation, or one membership question per
//! auction).

mod auction;
mod game;
mod matching;

pub use auction::{auction_gadget, designed_item, second_max, unique_argmax, AuctionInstance};
pub use game::{
    congestion_gadget, normal_form_gadget, product, FactorGame, GameStrategyPair, JointAction,
    Payoff,
};
pub use matching::{one_factorization, MatchingSchedule};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::AgentId;

/// Which pairwise gadget a product query is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetFlavor {
    /// Two-action defect/cooperate gadget; default profile both-defect.
    NormalForm,
    /// Three-route congestion gadget on a four-node network; default
    /// profile both players on the zero-cost detour route.
    Congestion,
    /// Same payoffs as [`GadgetFlavor::NormalForm`], but the pair set must
    /// be a matching so that every agent appears in at most one factor and
    /// the game is graphical with dependency degree 1.
    Graphical,
}

/// A compact description of a product-of-pairwise-gadgets query: the pair
/// list plus the flavor. Learners build these; the oracle either answers
/// them analytically or expands them to a full [`GameStrategyPair`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetProduct {
    n: usize,
    flavor: GadgetFlavor,
    pairs: Vec<(AgentId, AgentId)>,
}

impl GadgetProduct {
    /// Validates and wraps a pair list. Pairs must be nonempty with
    /// distinct in-range endpoints; the graphical flavor additionally
    /// requires the pairs to form a matching (no shared endpoints).
    pub fn new(
        n: usize,
        flavor: GadgetFlavor,
        pairs: Vec<(AgentId, AgentId)>,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument(
                "a gadget product needs at least one pair".into(),
            ));
        }
        for &(x, y) in &pairs {
            if x == 0 || y == 0 || x > n || y > n {
                return Err(Error::InvalidArgument(format!(
                    "pair ({x},{y}) out of range 1..={n}"
                )));
            }
            if x == y {
                return Err(Error::InvalidArgument(format!(
                    "pair ({x},{y}) must have distinct endpoints"
                )));
            }
        }
        if flavor == GadgetFlavor::Graphical {
            let mut seen = std::collections::BTreeSet::new();
            for &(x, y) in &pairs {
                if !seen.insert(x) || !seen.insert(y) {
                    return Err(Error::InvalidArgument(
                        "graphical gadget pairs must form a matching".into(),
                    ));
                }
            }
        }
        Ok(GadgetProduct { n, flavor, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> GadgetFlavor {
        self.flavor
    }

    pub fn pairs(&self) -> &[(AgentId, AgentId)] {
        &self.pairs
    }

    /// Expands the description into the actual product game.
    pub fn expand(&self) -> Result<GameStrategyPair> {
        let factors: Vec<GameStrategyPair> = self
            .pairs
            .iter()
            .map(|&(x, y)| match self.flavor {
                GadgetFlavor::NormalForm | GadgetFlavor::Graphical => {
                    normal_form_gadget(self.n, x, y)
                }
                GadgetFlavor::Congestion => congestion_gadget(self.n, x, y),
            })
            .collect::<Result<_>>()?;
        product(&factors)
    }
}
