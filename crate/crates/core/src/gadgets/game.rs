//! Finite games with designated default profiles, kept in factored form.
//!
//! Every game here is a sum of small "factor" games, each touching a
//! handful of players; all other agents are dummies with a single action
//! and utility 0. A product of games concatenates factor lists: each
//! agent's action set becomes the cartesian product of its factor action
//! sets and utilities add up coordinatewise. Payoffs are exact — integers
//! and halves cover every gadget — so equilibrium checks never hinge on
//! float rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg};

use serde_json::json;

use crate::error::{Error, Result};
use crate::AgentId;

/// Exact payoff stored in half-units (`Payoff::halves(7)` is 3.5).
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Payoff(i64);

impl Payoff {
    pub const ZERO: Payoff = Payoff(0);

    pub const fn int(v: i64) -> Payoff {
        Payoff(v * 2)
    }

    pub const fn halves(h: i64) -> Payoff {
        Payoff(h)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl Add for Payoff {
    type Output = Payoff;
    fn add(self, rhs: Payoff) -> Payoff {
        Payoff(self.0 + rhs.0)
    }
}

impl AddAssign for Payoff {
    fn add_assign(&mut self, rhs: Payoff) {
        self.0 += rhs.0;
    }
}

impl Neg for Payoff {
    type Output = Payoff;
    fn neg(self) -> Payoff {
        Payoff(-self.0)
    }
}

impl Sum for Payoff {
    fn sum<I: Iterator<Item = Payoff>>(iter: I) -> Payoff {
        iter.fold(Payoff::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", if self.0 < 0 { (self.0 + 1) / 2 } else { self.0 / 2 })
        }
    }
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One additive term of a game: a handful of players, their action labels,
/// a default action each, and a dense payoff table over their joint local
/// actions (row-major in player order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGame {
    pub(crate) players: Vec<AgentId>,
    pub(crate) actions: Vec<&'static [&'static str]>,
    pub(crate) defaults: Vec<usize>,
    pub(crate) payoffs: Vec<Vec<Payoff>>,
}

impl FactorGame {
    pub(crate) fn cell_index(&self, local: &[usize]) -> usize {
        debug_assert_eq!(local.len(), self.players.len());
        let mut idx = 0;
        for (a, acts) in local.iter().zip(&self.actions) {
            debug_assert!(a < &acts.len());
            idx = idx * acts.len() + a;
        }
        idx
    }

    pub fn players(&self) -> &[AgentId] {
        &self.players
    }

    pub fn action_labels(&self, player_slot: usize) -> &'static [&'static str] {
        self.actions[player_slot]
    }
}

/// A joint pure action: one local action index per player slot of each
/// factor, outer vector parallel to the factor list. Dummy agents never
/// appear (their single action is implicit).
pub type JointAction = Vec<Vec<usize>>;

/// A game plus its default profile, in factored form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameStrategyPair {
    n: usize,
    factors: Vec<FactorGame>,
}

impl GameStrategyPair {
    fn from_factor(n: usize, factor: FactorGame) -> Self {
        GameStrategyPair { n, factors: vec![factor] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[FactorGame] {
        &self.factors
    }

    /// Number of actions available to `agent`: the product over factors it
    /// participates in, 1 if it is a dummy everywhere.
    pub fn action_count(&self, agent: AgentId) -> u128 {
        let mut count: u128 = 1;
        for f in &self.factors {
            for (slot, &p) in f.players.iter().enumerate() {
                if p == agent {
                    count = count.saturating_mul(f.actions[slot].len() as u128);
                }
            }
        }
        count
    }

    /// Size of the expanded joint action space (saturating).
    pub fn joint_space_size(&self) -> u128 {
        let mut size: u128 = 1;
        for f in &self.factors {
            for acts in &f.actions {
                size = size.saturating_mul(acts.len() as u128);
            }
        }
        size
    }

    /// The designated default profile.
    pub fn default_joint(&self) -> JointAction {
        self.factors.iter().map(|f| f.defaults.clone()).collect()
    }

    /// Per-agent utilities at a joint action (agent `i` at index `i - 1`).
    /// Dummies get 0.
    pub fn utility(&self, joint: &JointAction) -> Vec<Payoff> {
        debug_assert_eq!(joint.len(), self.factors.len());
        let mut u = vec![Payoff::ZERO; self.n];
        for (f, local) in self.factors.iter().zip(joint) {
            let cell = f.cell_index(local);
            for (slot, &agent) in f.players.iter().enumerate() {
                u[agent - 1] += f.payoffs[cell][slot];
            }
        }
        u
    }

    /// Debug view as JSON: the factor list verbatim (players, labels,
    /// defaults, payoff tables as floats). Not a stable format.
    pub fn to_debug_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "factors": self.factors.iter().map(|f| {
                json!({
                    "players": f.players,
                    "actions": f.actions,
                    "defaults": f.defaults,
                    "payoffs": f.payoffs.iter()
                        .map(|cell| cell.iter().map(|p| p.as_f64()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

fn check_pair(n: usize, x: AgentId, y: AgentId) -> Result<()> {
    if x == 0 || y == 0 || x > n || y > n {
        return Err(Error::InvalidArgument(format!(
            "agents ({x},{y}) out of range 1..={n}"
        )));
    }
    if x == y {
        return Err(Error::InvalidArgument(format!(
            "gadget needs two distinct agents, got ({x},{y})"
        )));
    }
    Ok(())
}

const CD: &[&str] = &["C", "D"];

/// The pairwise defect/cooperate gadget on agents `x` and `y` (all others
/// dummies). Payoffs, row player `x` first:
///
/// ```text
///          C          D
///   C   (3, 3)     (0, 5)
///   D   (5, 0)     (1, 1)
/// ```
///
/// Default profile: both defect. If `x` and `y` act independently, defect
/// is dominant and (D, D) is an equilibrium; if they share a coalition,
/// jointly switching to (C, C) raises their sum from 2 to 6, so (D, D) is
/// not. One oracle bit therefore answers "are x and y separated?".
pub fn normal_form_gadget(n: usize, x: AgentId, y: AgentId) -> Result<GameStrategyPair> {
    check_pair(n, x, y)?;
    let p = |a: i64, b: i64| vec![Payoff::int(a), Payoff::int(b)];
    Ok(GameStrategyPair::from_factor(
        n,
        FactorGame {
            players: vec![x, y],
            actions: vec![CD, CD],
            defaults: vec![1, 1],
            payoffs: vec![p(3, 3), p(0, 5), p(5, 0), p(1, 1)],
        },
    ))
}

const ROUTES: &[&str] = &["S-1-T", "S-2-T", "S-1-2-T"];

/// Congestion-flavor pairwise gadget: `x` and `y` each route one unit of
/// traffic from S to T over the four-node network
///
/// ```text
///   S --(load)--> 1 --(2.5)--> T
///   S --(2.5)---> 2 --(load)-> T
///              1 --(0)--> 2
/// ```
///
/// choosing among the three simple routes; payoff is minus the traveled
/// cost, where "load" edges cost the number of players using them. The
/// default routes both players via S-1-2-T (cost 4 each). A lone deviator
/// pays 4.5 either way, but a coalition holding both players can split
/// onto S-1-T and S-2-T and pay 3.5 each — the same separated/together
/// signal as the defect/cooperate gadget, realized as a congestion game.
pub fn congestion_gadget(n: usize, x: AgentId, y: AgentId) -> Result<GameStrategyPair> {
    check_pair(n, x, y)?;
    // Edges: S1, S2, 12, 1T, 2T. Routes as edge sets.
    const ROUTE_EDGES: [&[usize]; 3] = [&[0, 3], &[1, 4], &[0, 2, 4]];
    let edge_cost = |edge: usize, load: i64| -> Payoff {
        match edge {
            0 | 4 => Payoff::int(load), // load-priced edges S->1 and 2->T
            1 | 3 => Payoff::halves(5), // fixed 2.5
            2 => Payoff::ZERO,          // free shortcut 1->2
            _ => unreachable!(),
        }
    };
    let mut payoffs = Vec::with_capacity(9);
    for rx in 0..3 {
        for ry in 0..3 {
            let mut load = [0i64; 5];
            for e in ROUTE_EDGES[rx] {
                load[*e] += 1;
            }
            for e in ROUTE_EDGES[ry] {
                load[*e] += 1;
            }
            let cost = |route: usize| -> Payoff {
                ROUTE_EDGES[route].iter().map(|&e| edge_cost(e, load[e])).sum()
            };
            payoffs.push(vec![-cost(rx), -cost(ry)]);
        }
    }
    Ok(GameStrategyPair::from_factor(
        n,
        FactorGame {
            players: vec![x, y],
            actions: vec![ROUTES, ROUTES],
            defaults: vec![2, 2],
            payoffs,
        },
    ))
}

/// Product of games sharing the same agent set: action sets multiply,
/// utilities add, defaults tuple up. Factor order is preserved.
pub fn product(games: &[GameStrategyPair]) -> Result<GameStrategyPair> {
    let Some(first) = games.first() else {
        return Err(Error::InvalidArgument("product of zero games".into()));
    };
    let n = first.n;
    if games.iter().any(|g| g.n != n) {
        return Err(Error::InvalidArgument(
            "product factors must share the agent set".into(),
        ));
    }
    Ok(GameStrategyPair {
        n,
        factors: games.iter().flat_map(|g| g.factors.iter().cloned()).collect(),
    })
}
