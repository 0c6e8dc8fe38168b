//! Exhaustive small-case and instrumented checking suites.
//!
//! Everything here cross-validates one implementation route against an
//! independent one — closed-form oracle answers against brute-force
//! deviation search, learner state against ground truth — and reports
//! structured pass/fail counts. The CLI's `verify` command runs these;
//! the acceptance tests reuse them with pinned parameters.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::run_seed;
use crate::gadgets::{auction_gadget, one_factorization, GadgetFlavor, GadgetProduct};
use crate::learners::{
    auction_ig_instrumented, ceil_log2, graphical_ig_traced, potential, QueryView,
};
use crate::oracle::{
    brute_force_auction_ne, brute_force_ne, OracleHandle, OracleMode, ValueStream,
    DEFAULT_ACTION_SPACE_CAP,
};
use crate::partition::{bell_number, enumerate_all, CoalitionStructure};
use crate::{AgentId, Error, Result};

/// Outcome of one suite: how many individual comparisons ran, how many
/// disagreed, and a note about the first disagreement (if any).
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
    /// Per-n check counts, for callers that pin exact cardinalities.
    pub breakdown: Vec<(usize, u64)>,
    /// Description of the first failure, empty when everything agreed.
    pub detail: String,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            checks: 0,
            failures: 0,
            breakdown: Vec::new(),
            detail: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, detail: String) {
        self.failures += 1;
        if self.detail.is_empty() {
            self.detail = detail;
        }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            write!(f, "PASS {}: {} checks", self.name, self.checks)
        } else {
            write!(
                f,
                "FAIL {}: {} of {} checks failed — {}",
                self.name, self.failures, self.checks, self.detail
            )
        }
    }
}

/// All unordered agent pairs (x < y) of 1..=n.
fn all_pairs(n: usize) -> Vec<(AgentId, AgentId)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for x in 1..=n {
        for y in (x + 1)..=n {
            pairs.push((x, y));
        }
    }
    pairs
}

/// All subsets of `pairs` with 1..=max_size elements, as index lists.
fn pair_subsets(count: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, from: usize, count: usize, left: usize) {
        if left == 0 {
            return;
        }
        for i in from..count {
            current.push(i);
            out.push(current.clone());
            extend(out, current, i + 1, count, left - 1);
            current.pop();
        }
    }
    extend(&mut out, &mut current, 0, count, max_size);
    out
}

fn is_matching(pairs: &[(AgentId, AgentId)]) -> bool {
    let mut seen = BTreeSet::new();
    pairs.iter().all(|&(x, y)| seen.insert(x) && seen.insert(y))
}

/// Compares the closed-form product-game answer against brute-force
/// deviation search, for every partition of up to `max_n` agents and
/// every product of at most `max_pairs` pairwise gadgets of `flavor`.
/// Graphical products are restricted to pair sets that form a matching
/// (others are not valid queries of that flavor).
///
/// Also cross-checks, per n, that the partition enumeration has exactly
/// the expected (triangle-computed) cardinality.
pub fn product_oracle_equivalence(
    max_n: usize,
    max_pairs: usize,
    flavor: GadgetFlavor,
) -> Result<CheckReport> {
    let mut report = CheckReport::new(match flavor {
        GadgetFlavor::NormalForm => "product-oracle-equivalence (normal-form)",
        GadgetFlavor::Congestion => "product-oracle-equivalence (congestion)",
        GadgetFlavor::Graphical => "product-oracle-equivalence (graphical)",
    });
    for n in 2..=max_n {
        let partitions = enumerate_all(n)?;
        let expected = bell_number(n, 64)?;
        if expected != partitions.len().into() {
            report.fail(format!(
                "partition enumeration for n={n} produced {} structures, triangle says {expected}",
                partitions.len()
            ));
        }
        let pairs = all_pairs(n);
        let mut subsets = pair_subsets(pairs.len(), max_pairs);
        if flavor == GadgetFlavor::Graphical {
            subsets.retain(|subset| {
                let chosen: Vec<_> = subset.iter().map(|&i| pairs[i]).collect();
                is_matching(&chosen)
            });
        }
        let mut n_checks = 0u64;
        for s_star in &partitions {
            let mut analytic = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
            for subset in &subsets {
                let chosen: Vec<_> = subset.iter().map(|&i| pairs[i]).collect();
                let product = GadgetProduct::new(n, flavor, chosen)?;
                let fast = analytic.observe_product(&product)?;
                let slow = brute_force_ne(&product.expand()?, s_star, DEFAULT_ACTION_SPACE_CAP)?;
                report.checks += 1;
                n_checks += 1;
                if fast != slow {
                    report.fail(format!(
                        "n={n} s*={s_star} pairs={:?}: closed-form {fast}, brute force {slow}",
                        product.pairs()
                    ));
                }
            }
        }
        report.breakdown.push((n, n_checks));
    }
    Ok(report)
}

/// Subsets of the non-top agents used as auction targets: exhaustive for
/// small n, sampled otherwise.
fn target_subsets(
    n: usize,
    top: AgentId,
    exhaustive_limit: usize,
    random_count: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<BTreeSet<AgentId>> {
    let others: Vec<AgentId> = (1..=n).filter(|&j| j != top).collect();
    if n <= exhaustive_limit {
        let mut subsets = Vec::with_capacity(1 << others.len());
        for mask in 0u32..(1 << others.len()) {
            subsets.push(
                others
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask & (1 << bit) != 0)
                    .map(|(_, &j)| j)
                    .collect(),
            );
        }
        subsets
    } else {
        (0..random_count)
            .map(|_| others.iter().copied().filter(|_| rng.gen::<bool>()).collect())
            .collect()
    }
}

/// Compares the closed-form auction answer against the exact deviation
/// formula, for every partition of up to `max_n` agents, with
/// `draws_per_partition` seeded value vectors each and target sets taken
/// exhaustively (n <= 4) or randomly (`random_subsets` per draw).
pub fn auction_oracle_equivalence(
    max_n: usize,
    draws_per_partition: u64,
    random_subsets: u64,
    master_seed: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("auction-oracle-equivalence");
    for n in 1..=max_n {
        let partitions = enumerate_all(n)?;
        let mut n_checks = 0u64;
        for (p_idx, s_star) in partitions.iter().enumerate() {
            let stream_seed = run_seed(master_seed, ((n as u64) << 32) | p_idx as u64);
            let mut stream = ValueStream::new(n, stream_seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed ^ 0x5eed);
            let mut analytic = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
            for _ in 0..draws_per_partition {
                let values = stream.draw_values_unique_max();
                let top = crate::gadgets::unique_argmax(&values)?;
                for targets in target_subsets(n, top, 4, random_subsets, &mut rng) {
                    let auction = auction_gadget(&values, &targets)?;
                    let fast = analytic.observe_auction(&auction, &targets)?;
                    let slow = brute_force_auction_ne(&auction, s_star)?;
                    report.checks += 1;
                    n_checks += 1;
                    if fast != slow {
                        report.fail(format!(
                            "n={n} s*={s_star} top={top} targets={targets:?}: closed-form {fast}, brute force {slow}"
                        ));
                    }
                }
            }
        }
        report.breakdown.push((n, n_checks));
    }
    Ok(report)
}

/// Verifies the three gadget characterizations by brute force across all
/// partitions of up to `max_n` agents:
///
/// * pairwise normal-form gadget: default profile stable iff the two
///   agents are in different coalitions;
/// * pairwise congestion gadget: same characterization;
/// * reserve auction: truthful bidding stable iff no low-reserve target
///   shares the top-valuer's coalition.
pub fn gadget_characterization_suite(max_n: usize, master_seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("gadget-characterizations");
    for n in 2..=max_n {
        let partitions = enumerate_all(n)?;
        let mut n_checks = 0u64;
        for (p_idx, s_star) in partitions.iter().enumerate() {
            // Pairwise gadgets, both flavors, every pair.
            for &(x, y) in &all_pairs(n) {
                for flavor in [GadgetFlavor::NormalForm, GadgetFlavor::Congestion] {
                    let product = GadgetProduct::new(n, flavor, vec![(x, y)])?;
                    let stable =
                        brute_force_ne(&product.expand()?, s_star, DEFAULT_ACTION_SPACE_CAP)?;
                    let apart = !s_star.same_coalition(x, y)?;
                    report.checks += 1;
                    n_checks += 1;
                    if stable != apart {
                        report.fail(format!(
                            "n={n} s*={s_star} {flavor:?} pair ({x},{y}): stable={stable}, apart={apart}"
                        ));
                    }
                }
            }
            // Auctions: seeded draws, exhaustive or sampled target sets.
            let stream_seed = run_seed(master_seed, ((n as u64) << 40) | p_idx as u64);
            let mut stream = ValueStream::new(n, stream_seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed ^ 0xa0c7);
            for _ in 0..10 {
                let values = stream.draw_values_unique_max();
                let top = crate::gadgets::unique_argmax(&values)?;
                for targets in target_subsets(n, top, 4, 100, &mut rng) {
                    let auction = auction_gadget(&values, &targets)?;
                    let stable = brute_force_auction_ne(&auction, s_star)?;
                    let clean = targets.iter().all(|&j| !s_star.same_coalition_unchecked(top, j));
                    report.checks += 1;
                    n_checks += 1;
                    if stable != clean {
                        report.fail(format!(
                            "n={n} s*={s_star} top={top} targets={targets:?}: stable={stable}, no-teammate-targeted={clean}"
                        ));
                    }
                }
            }
        }
        report.breakdown.push((n, n_checks));
    }
    Ok(report)
}

/// Checks the round-robin schedule for every n in 2..=max_n: the round
/// count, every round being a matching of the right size, and every
/// unordered pair appearing exactly once across rounds.
pub fn one_factorization_suite(max_n: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("round-robin-schedule");
    for n in 2..=max_n {
        let schedule = one_factorization(n)?;
        let expected_rounds = if n % 2 == 0 { n - 1 } else { n };
        if schedule.num_rounds() != expected_rounds {
            report.fail(format!(
                "n={n}: {} rounds, expected {expected_rounds}",
                schedule.num_rounds()
            ));
        }
        let mut seen: BTreeSet<(AgentId, AgentId)> = BTreeSet::new();
        for round in schedule.rounds() {
            report.checks += 1;
            if round.len() != n / 2 {
                report.fail(format!("n={n}: a round has {} pairs, expected {}", round.len(), n / 2));
            }
            if !is_matching(round) {
                report.fail(format!("n={n}: round {round:?} reuses an agent"));
            }
            for &(x, y) in round {
                if x >= y || x == 0 || y > n {
                    report.fail(format!("n={n}: malformed pair ({x},{y})"));
                }
                if !seen.insert((x, y)) {
                    report.fail(format!("n={n}: pair ({x},{y}) scheduled twice"));
                }
            }
        }
        report.checks += 1;
        if seen.len() != n * (n - 1) / 2 {
            report.fail(format!(
                "n={n}: {} distinct pairs scheduled, expected {}",
                seen.len(),
                n * (n - 1) / 2
            ));
        }
    }
    Ok(report)
}

/// Runs the round-robin learner on random instances and checks the shape
/// of every query it sends: the pair set must be vertex-disjoint and
/// lie inside a single round of the schedule.
pub fn graphical_query_structure_suite(
    n_values: &[usize],
    runs_per_n: u64,
    master_seed: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("graphical-query-structure");
    let mut run_index = 0u64;
    for &n in n_values {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "query-structure suite needs n >= 2, got {n}"
            )));
        }
        let schedule = one_factorization(n)?;
        // Map each pair to its round.
        let mut round_of = std::collections::BTreeMap::new();
        for (r, round) in schedule.rounds().iter().enumerate() {
            for &pair in round {
                round_of.insert(pair, r);
            }
        }
        let mut n_checks = 0u64;
        for _ in 0..runs_per_n {
            let seed = run_seed(master_seed, run_index);
            run_index += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(1..=n);
            let s_star = CoalitionStructure::random(n, m, rng.gen())?;
            let mut oracle = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
            let mut bad: Option<String> = None;
            let mut queries = 0u64;
            let result = graphical_ig_traced(n, &mut oracle, &mut |event| {
                queries += 1;
                if let QueryView::Product(product) = &event.query {
                    let pairs = product.pairs();
                    if !is_matching(pairs) {
                        bad.get_or_insert_with(|| format!("query {pairs:?} reuses an agent"));
                    }
                    let rounds: BTreeSet<_> =
                        pairs.iter().filter_map(|p| round_of.get(p)).collect();
                    if rounds.len() != 1 || pairs.iter().any(|p| !round_of.contains_key(p)) {
                        bad.get_or_insert_with(|| {
                            format!("query {pairs:?} spans rounds {rounds:?}")
                        });
                    }
                } else {
                    bad.get_or_insert_with(|| "non-product query".to_string());
                }
            })?;
            report.checks += queries;
            n_checks += queries;
            if let Some(detail) = bad {
                report.fail(format!("n={n} m={m} seed={seed}: {detail}"));
            }
            report.checks += 1;
            n_checks += 1;
            if result.structure != s_star {
                report.fail(format!("n={n} m={m} seed={seed}: wrong structure recovered"));
            }
        }
        report.breakdown.push((n, n_checks));
    }
    Ok(report)
}

/// Instrumented sampled-auction runs checked against ground truth after
/// every round:
///
/// 1. the working structure refines the true one;
/// 2. finalized agents' groups match the true ones exactly;
/// 3. agents in one working group share one candidate set;
/// 4. a non-empty candidate set contains a not-yet-merged true teammate;
///
/// plus the progress measure never rising (and strictly falling on every
/// round whose top agent's true group is still split), and termination by
/// the first round where every agent has topped at least 2*log2(n) + 4
/// draws.
pub fn auction_state_invariant_suite(
    n_values: &[usize],
    runs_per_n: u64,
    master_seed: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("auction-state-invariants");
    let mut run_index = 0u64;
    for &n in n_values {
        if n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let mut n_checks = 0u64;
        for _ in 0..runs_per_n {
            let seed = run_seed(master_seed, run_index);
            run_index += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(1..=n);
            let s_star = CoalitionStructure::random(n, m, rng.gen())?;
            let mut oracle = OracleHandle::new(s_star.clone(), OracleMode::Analytic);
            let mut stream = ValueStream::new(n, rng.gen())?;

            let log_n = ceil_log2(n);
            let reps: Vec<AgentId> = s_star
                .blocks()
                .map(|block| *block.first().expect("blocks are nonempty"))
                .collect();
            let mut prev_phi: std::collections::BTreeMap<AgentId, u64> = reps
                .iter()
                .map(|&rep| {
                    let size = s_star.members_of(rep).unwrap().len() as u64;
                    (rep, (2 * log_n + 1) * size)
                })
                .collect();
            let mut prev_split: std::collections::BTreeMap<AgentId, bool> =
                reps.iter().map(|&rep| (rep, s_star.members_of(rep).unwrap().len() > 1)).collect();

            let mut checks = 0u64;
            let mut failures: Vec<String> = Vec::new();
            let threshold = 2.0 * (n as f64).log2() + 4.0;
            let mut witness_round: Option<u64> = None;

            let result = auction_ig_instrumented(
                n,
                &mut oracle,
                &mut stream,
                &mut |_| {},
                &mut |state, event| {
                    let s = state.structure();
                    // Clause 1: refinement of the truth.
                    checks += 1;
                    if !s.refines(&s_star) {
                        failures.push(format!("round {}: working structure does not refine the truth", event.draw_index));
                    }
                    // Clause 2: finalized groups are exact.
                    for &i in state.finalized() {
                        checks += 1;
                        let got = s.members_of(i).unwrap();
                        let want = s_star.members_of(i).unwrap();
                        if got != want {
                            failures.push(format!(
                                "round {}: finalized agent {i} sits in {got:?}, truth {want:?}",
                                event.draw_index
                            ));
                        }
                    }
                    // Clause 3: one candidate set per working group.
                    for i in 1..=n {
                        checks += 1;
                        let own = state.target_set_of(i).unwrap();
                        let of_group = state.target_set_of(s.block_id(i).unwrap()).unwrap();
                        if !(std::ptr::eq(own, of_group) || own == of_group) {
                            failures.push(format!(
                                "round {}: agent {i} and its group lead disagree on candidates",
                                event.draw_index
                            ));
                        }
                    }
                    // Clause 4: open searches still hold a missing teammate.
                    for block in s.blocks() {
                        let lead = *block.first().unwrap();
                        let targets = state.target_set_of(lead).unwrap();
                        if targets.is_empty() {
                            continue;
                        }
                        checks += 1;
                        let has_missing_teammate = targets.iter().any(|&j| {
                            s_star.same_coalition_unchecked(lead, j)
                                && !s.same_coalition_unchecked(lead, j)
                        });
                        if !has_missing_teammate {
                            failures.push(format!(
                                "round {}: group of {lead} searches {targets:?} but no missing teammate is inside",
                                event.draw_index
                            ));
                        }
                    }
                    // Progress measure: never rises; strictly falls for the
                    // top agent's true group while that group is split.
                    for &rep in &reps {
                        checks += 1;
                        match potential(rep, state, &s_star) {
                            Ok(now) => {
                                let before = prev_phi[&rep];
                                if now > before {
                                    failures.push(format!(
                                        "round {}: potential of {rep} rose {before} -> {now}",
                                        event.draw_index
                                    ));
                                }
                                let qualifying = s_star.same_coalition_unchecked(event.top, rep)
                                    && prev_split[&rep];
                                if qualifying && now >= before {
                                    failures.push(format!(
                                        "round {}: top {} in split group of {rep}, potential {before} -> {now} did not fall",
                                        event.draw_index, event.top
                                    ));
                                }
                                prev_phi.insert(rep, now);
                            }
                            Err(e) => failures.push(format!("potential evaluation failed: {e}")),
                        }
                        let complete = s.members_of(rep).unwrap().len()
                            == s_star.members_of(rep).unwrap().len();
                        prev_split.insert(rep, !complete);
                    }
                    // Termination witness: note the first round at which
                    // every agent has topped enough draws.
                    if witness_round.is_none() {
                        let min_tops = (1..=n)
                            .map(|i| state.top_count(i).unwrap())
                            .min()
                            .unwrap();
                        if (min_tops as f64) >= threshold {
                            witness_round = Some(event.draw_index);
                        }
                    }
                },
            )?;

            checks += 1;
            if result.structure != s_star {
                failures.push("wrong structure recovered".to_string());
            }
            checks += 1;
            if let Some(round) = witness_round {
                if round != result.draws {
                    failures.push(format!(
                        "every agent had topped 2*log2(n)+4 draws by round {round}, but the run went on to round {}",
                        result.draws
                    ));
                }
            }

            report.checks += checks;
            n_checks += checks;
            for detail in failures {
                report.fail(format!("n={n} m={m} seed={seed}: {detail}"));
            }
        }
        report.breakdown.push((n, n_checks));
    }
    Ok(report)
}
