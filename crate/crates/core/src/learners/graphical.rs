//! Round-robin pairwise learner. The pairs probed in one query are taken
//! from a single round of a round-robin schedule, so they share no agent:
//! every query is a graphical game in which each player sees at most one
//! neighbor.

use crate::gadgets::{one_factorization, GadgetFlavor, GadgetProduct};
use crate::learners::{front_half_len, LearnResult, QueryEvent, QueryView, TraceSink};
use crate::oracle::OracleHandle;
use crate::partition::CoalitionStructure;
use crate::{AgentId, Error, Result};

/// Runs the round-robin learner.
pub fn graphical_ig(n: usize, oracle: &mut OracleHandle) -> Result<LearnResult> {
    graphical_ig_traced(n, oracle, &mut |_| {})
}

/// Runs the round-robin learner, reporting every query to `sink`.
///
/// Rounds are processed in schedule order. Within a round, the pairs whose
/// endpoints are still in different groups form the candidate list; a *yes*
/// on their product closes the round, a *no* binary-searches the list for
/// one pair of true teammates to merge. Pairs already grouped are skipped
/// without queries, and a round whose candidate list empties is over.
pub fn graphical_ig_traced(
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
    if n == 1 {
        // No pairs to schedule; the lone agent is its own coalition.
        return Ok(LearnResult {
            structure: s,
            queries: 0,
            draws: 0,
            per_type_usage: None,
        });
    }
    let schedule = one_factorization(n)?;
    for round in schedule.rounds() {
        loop {
            let candidates: Vec<(AgentId, AgentId)> = round
                .iter()
                .copied()
                .filter(|&(x, y)| !s.same_coalition_unchecked(x, y))
                .collect();
            if candidates.is_empty() {
                break;
            }
            if observe(oracle, n, candidates.clone(), &s, sink)? {
                break;
            }
            let mut t = candidates;
            while t.len() > 1 {
                let half = front_half_len(t.len());
                if observe(oracle, n, t[..half].to_vec(), &s, sink)? {
                    t.drain(..half);
                } else {
                    t.truncate(half);
                }
            }
            let (x, y) = t[0];
            s = s.merge(x, y)?;
        }
    }
    Ok(LearnResult {
        structure: s,
        queries: oracle.query_count() - start,
        draws: 0,
        per_type_usage: None,
    })
}

fn observe(
    oracle: &mut OracleHandle,
    n: usize,
    pairs: Vec<(AgentId, AgentId)>,
    s: &CoalitionStructure,
    sink: TraceSink<'_>,
) -> Result<bool> {
    let query = GadgetProduct::new(n, GadgetFlavor::Graphical, pairs)?;
    let answer = oracle.observe_product(&query)?;
    sink(&QueryEvent {
        query_index: oracle.query_count(),
        query: QueryView::Product(&query),
        answer,
        structure: s,
    });
    Ok(answer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleMode;
    use crate::partition::enumerate_all;
    use std::collections::BTreeSet;

    fn recover(s_star: &CoalitionStructure, mode: OracleMode) -> LearnResult {
        let mut oracle = OracleHandle::new(s_star.clone(), mode);
        graphical_ig(s_star.n(), &mut oracle).unwrap()
    }

    #[test]
    fn single_agent_needs_no_queries() {
        let s_star = CoalitionStructure::singletons(1).unwrap();
        let result = recover(&s_star, OracleMode::Analytic);
        assert_eq!(result.structure, s_star);
        assert_eq!(result.queries, 0);
    }

    #[test]
    fn all_singletons_costs_one_query_per_round() {
        // Every round's product comes back "yes" immediately.
        for n in [2usize, 4, 6, 8] {
            let s_star = CoalitionStructure::singletons(n).unwrap();
            let result = recover(&s_star, OracleMode::Analytic);
            assert_eq!(result.structure, s_star);
            assert_eq!(result.queries as usize, n - 1);
        }
    }

    #[test]
    fn recovers_every_partition_up_to_six_agents() {
        for n in 1..=6 {
            for s_star in enumerate_all(n).unwrap() {
                let result = recover(&s_star, OracleMode::Analytic);
                assert_eq!(result.structure, s_star, "n={n} s*={s_star}");
            }
        }
    }

    #[test]
    fn brute_force_oracle_agrees_on_all_partitions_of_four() {
        for s_star in enumerate_all(4).unwrap() {
            let analytic = recover(&s_star, OracleMode::Analytic);
            let brute = recover(&s_star, OracleMode::BruteForce);
            assert_eq!(analytic.structure, brute.structure);
            assert_eq!(analytic.queries, brute.queries);
            assert_eq!(brute.structure, s_star);
        }
    }

    #[test]
    fn every_query_is_a_matching() {
        // The defining property: no agent appears twice in one query.
        let s_star = CoalitionStructure::random(9, 3, 77).unwrap();
        let mut oracle = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
        let mut ok = true;
        let result = graphical_ig_traced(9, &mut oracle, &mut |event| {
            if let QueryView::Product(p) = &event.query {
                let mut seen = BTreeSet::new();
                for &(x, y) in p.pairs() {
                    ok &= seen.insert(x) && seen.insert(y);
                }
            }
        })
        .unwrap();
        assert!(ok, "some query reused an agent");
        assert_eq!(result.structure, s_star);
    }

    #[test]
    fn odd_sizes_recover_too() {
        for n in [3usize, 5, 7, 11] {
            for seed in 0..6u64 {
                let m = 1 + (seed as usize) % n;
                let s_star = CoalitionStructure::random(n, m, 31 * n as u64 + seed).unwrap();
                let result = recover(&s_star, OracleMode::Analytic);
                assert_eq!(result.structure, s_star, "n={n} m={m} seed={seed}");
            }
        }
    }
}
