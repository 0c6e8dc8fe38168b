//! Pairwise-product learner: for each agent in turn, find all of its
//! teammates by binary search over the agents not yet known to be with it.

use crate::gadgets::{GadgetFlavor, GadgetProduct};
use crate::learners::{front_half_len, LearnResult, QueryEvent, QueryView, TraceSink};
use crate::oracle::OracleHandle;
use crate::partition::CoalitionStructure;
use crate::{AgentId, Error, Result};

/// Which pairwise gadget carries the queries. Both encode the same
/// equilibrium bit; the congestion one does it with routing games.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFlavor {
    NormalForm,
    Congestion,
}

impl PairFlavor {
    fn gadget_flavor(self) -> GadgetFlavor {
        match self {
            PairFlavor::NormalForm => GadgetFlavor::NormalForm,
            PairFlavor::Congestion => GadgetFlavor::Congestion,
        }
    }
}

/// Runs the pairwise learner with normal-form gadgets.
pub fn ig(n: usize, oracle: &mut OracleHandle) -> Result<LearnResult> {
    ig_traced(n, oracle, PairFlavor::NormalForm, &mut |_| {})
}

/// Runs the pairwise learner with a chosen gadget flavor.
pub fn ig_flavored(n: usize, oracle: &mut OracleHandle, flavor: PairFlavor) -> Result<LearnResult> {
    ig_traced(n, oracle, flavor, &mut |_| {})
}

/// Runs the pairwise learner, reporting every query to `sink`.
///
/// For each anchor agent `i` (ascending), repeatedly gather the agents not
/// currently grouped with `i`. An empty gather means everyone is already
/// with `i`: the product over no gadgets has nothing to destabilize, so
/// the answer is known locally and no query is spent. Otherwise query the
/// full product; a *yes* certifies no teammate of `i` remains outside, a
/// *no* starts a halving search (first half rounded up, kept in ascending
/// order) that pins down one teammate to merge.
pub fn ig_traced(
    n: usize,
    oracle: &mut OracleHandle,
    flavor: PairFlavor,
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
    let gadget = flavor.gadget_flavor();
    for i in 1..=n {
        loop {
            let outsiders: Vec<AgentId> = (1..=n)
                .filter(|&j| !s.same_coalition_unchecked(i, j))
                .collect();
            if outsiders.is_empty() {
                break;
            }
            if observe(oracle, gadget, n, i, &outsiders, &s, sink)? {
                break;
            }
            let mut t = outsiders;
            while t.len() > 1 {
                let half = front_half_len(t.len());
                if observe(oracle, gadget, n, i, &t[..half], &s, sink)? {
                    // Front half all clean: the teammate hides in the back.
                    t.drain(..half);
                } else {
                    t.truncate(half);
                }
            }
            s = s.merge(i, t[0])?;
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
    flavor: GadgetFlavor,
    n: usize,
    anchor: AgentId,
    others: &[AgentId],
    s: &CoalitionStructure,
    sink: TraceSink<'_>,
) -> Result<bool> {
    let pairs: Vec<(AgentId, AgentId)> = others.iter().map(|&j| (anchor, j)).collect();
    let query = GadgetProduct::new(n, flavor, pairs)?;
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

    fn recover(s_star: &CoalitionStructure, flavor: PairFlavor, mode: OracleMode) -> LearnResult {
        let mut oracle = OracleHandle::new(s_star.clone(), mode);
        ig_flavored(s_star.n(), &mut oracle, flavor).unwrap()
    }

    #[test]
    fn single_agent_needs_no_queries() {
        let s_star = CoalitionStructure::singletons(1).unwrap();
        let result = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
        assert_eq!(result.structure, s_star);
        assert_eq!(result.queries, 0);
    }

    #[test]
    fn two_agents_apart_cost_one_query_per_anchor() {
        // Nothing ever merges, so each anchor certifies its own round.
        let s_star = CoalitionStructure::singletons(2).unwrap();
        let result = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
        assert_eq!(result.structure, s_star);
        assert_eq!(result.queries, 2);
    }

    #[test]
    fn two_agents_together_costs_one_query() {
        // Anchor 1 asks about {2}, hears "no", and the candidate list is
        // already a singleton — the merge happens without a second query.
        // The follow-up gather is then empty, which is answered locally.
        let s_star = CoalitionStructure::singletons(2).unwrap().merge(1, 2).unwrap();
        let result = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
        assert_eq!(result.structure, s_star);
        assert_eq!(result.queries, 1);
    }

    #[test]
    fn trace_records_every_query_with_running_structure() {
        let s_star = CoalitionStructure::from_blocks([
            [1, 3].into_iter().collect(),
            [2].into_iter().collect(),
        ])
        .unwrap();
        let mut oracle = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
        let mut seen = Vec::new();
        let result = ig_traced(3, &mut oracle, PairFlavor::NormalForm, &mut |event| {
            let pairs = match &event.query {
                QueryView::Product(p) => p.pairs().to_vec(),
                QueryView::Auction { .. } => panic!("pairwise learner sent an auction"),
            };
            seen.push((event.query_index, pairs, event.answer, event.structure.to_string()));
        })
        .unwrap();
        assert_eq!(result.structure, s_star);
        assert_eq!(seen.len() as u64, result.queries);
        // Query indices are the oracle's own running count: 1, 2, 3, ...
        for (k, entry) in seen.iter().enumerate() {
            assert_eq!(entry.0, k as u64 + 1);
        }
        // First query: anchor 1 against everyone else.
        assert_eq!(seen[0].1, vec![(1, 2), (1, 3)]);
        assert!(!seen[0].2);
        assert_eq!(seen[0].3, "{1}|{2}|{3}");
    }

    #[test]
    fn recovers_every_partition_up_to_five_agents() {
        for n in 1..=5 {
            for s_star in enumerate_all(n).unwrap() {
                let result = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
                assert_eq!(result.structure, s_star, "n={n} s*={s_star}");
            }
        }
    }

    #[test]
    fn congestion_flavor_matches_normal_form_query_for_query() {
        for s_star in enumerate_all(4).unwrap() {
            let plain = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
            let congestion = recover(&s_star, PairFlavor::Congestion, OracleMode::Analytic);
            assert_eq!(plain.structure, congestion.structure);
            assert_eq!(plain.queries, congestion.queries, "s*={s_star}");
        }
    }

    #[test]
    fn brute_force_oracle_agrees_on_all_partitions_of_four() {
        for s_star in enumerate_all(4).unwrap() {
            let analytic = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
            let brute = recover(&s_star, PairFlavor::NormalForm, OracleMode::BruteForce);
            assert_eq!(analytic.structure, brute.structure);
            assert_eq!(analytic.queries, brute.queries);
            assert_eq!(brute.structure, s_star);
        }
    }

    #[test]
    fn query_cost_stays_under_the_pairwise_budget() {
        for n in [2usize, 7, 16, 33] {
            for seed in 0..8u64 {
                let m = 1 + (seed as usize * 7) % n;
                let s_star = CoalitionStructure::random(n, m, 1000 * n as u64 + seed).unwrap();
                let result = recover(&s_star, PairFlavor::NormalForm, OracleMode::Analytic);
                assert_eq!(result.structure, s_star);
                let budget = n as f64 * (n as f64).log2() + 3.0 * n as f64;
                assert!(
                    (result.queries as f64) <= budget,
                    "n={n} m={m}: {} queries > {budget}",
                    result.queries
                );
            }
        }
    }
}
