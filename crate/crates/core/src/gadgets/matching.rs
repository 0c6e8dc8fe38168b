//! Round-robin edge schedules: every unordered pair of agents appears in
//! exactly one round, and within a round the pairs are vertex-disjoint.
//! This is what lets the graphical learner keep every query inside a
//! degree-1 interaction graph.

use crate::error::{Error, Result};
use crate::AgentId;

/// A one-factorization of the complete graph on `1..=n` (for odd `n`, of
/// the near-complete schedule with one agent idle per round): a list of
/// rounds, each a matching, jointly covering every pair exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingSchedule {
    n: usize,
    rounds: Vec<Vec<(AgentId, AgentId)>>,
}

impl MatchingSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> &[Vec<(AgentId, AgentId)>] {
        &self.rounds
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }
}

/// Builds the schedule by the circle method: one agent sits at the hub
/// while the others rotate. Even `n` gives `n - 1` rounds of `n / 2`
/// pairs; odd `n` is scheduled with a phantom agent whose pairings are
/// dropped, giving `n` rounds of `(n - 1) / 2` pairs. Pairs are stored
/// `(min, max)` and each round is sorted, so the order is deterministic.
pub fn one_factorization(n: usize) -> Result<MatchingSchedule> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two agents to schedule pairs, got {n}"
        )));
    }
    let t = if n % 2 == 0 { n } else { n + 1 }; // phantom agent = t for odd n
    let mut rounds = Vec::with_capacity(t - 1);
    for r in 0..t - 1 {
        let mut round = Vec::with_capacity(t / 2);
        let mut push = |a: usize, b: usize| {
            // 0-based circle positions -> 1-based agents; drop the phantom.
            let (a, b) = (a + 1, b + 1);
            if a <= n && b <= n {
                round.push((a.min(b), a.max(b)));
            }
        };
        push(t - 1, r);
        for k in 1..t / 2 {
            push((r + k) % (t - 1), (r + t - 1 - k) % (t - 1));
        }
        round.sort_unstable();
        rounds.push(round);
    }
    Ok(MatchingSchedule { n, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn two_agents_single_round() {
        let s = one_factorization(2).unwrap();
        assert_eq!(s.rounds(), &[vec![(1, 2)]]);
    }

    #[test]
    fn rejects_trivial_sizes() {
        assert!(one_factorization(0).is_err());
        assert!(one_factorization(1).is_err());
    }

    #[test]
    fn four_agents_three_rounds() {
        let s = one_factorization(4).unwrap();
        assert_eq!(s.num_rounds(), 3);
        for round in s.rounds() {
            assert_eq!(round.len(), 2);
        }
    }

    #[test]
    fn odd_sizes_idle_one_agent_per_round() {
        let s = one_factorization(3).unwrap();
        assert_eq!(s.num_rounds(), 3);
        for round in s.rounds() {
            assert_eq!(round.len(), 1);
        }
        let s = one_factorization(7).unwrap();
        assert_eq!(s.num_rounds(), 7);
        for round in s.rounds() {
            assert_eq!(round.len(), 3);
        }
    }

    /// Exact-cover + matching property for every size up to 64 (the full
    /// range exercised by the graphical learner's acceptance runs).
    #[test]
    fn covers_every_pair_exactly_once_up_to_64() {
        for n in 2..=64usize {
            let s = one_factorization(n).unwrap();
            let expected_rounds = if n % 2 == 0 { n - 1 } else { n };
            assert_eq!(s.num_rounds(), expected_rounds, "n={n}");
            let mut seen = BTreeSet::new();
            for round in s.rounds() {
                let mut touched = BTreeSet::new();
                for &(a, b) in round {
                    assert!(a < b && b <= n, "n={n} pair ({a},{b})");
                    assert!(touched.insert(a), "n={n}: agent {a} twice in a round");
                    assert!(touched.insert(b), "n={n}: agent {b} twice in a round");
                    assert!(seen.insert((a, b)), "n={n}: pair ({a},{b}) repeated");
                }
            }
            assert_eq!(seen.len(), n * (n - 1) / 2, "n={n}: every pair covered");
        }
    }
}
