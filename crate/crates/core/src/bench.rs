//! Seeded experiment harness: sweeps over (algorithm, n, m), bound
//! curves, percentile statistics, and CSV emission.
//!
//! Reproducibility contract: every run's seed derives from the master
//! seed and the global run index alone, and is written to the CSV row, so
//! any single run can be replayed in isolation. Rerunning a config
//! reproduces the `samples` and `correct` columns byte-identically
//! (wall-clock time is recorded but carries no such promise).

use std::fmt;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gadgets::GadgetProduct;
use crate::learners::{
    auction_ig_traced, daig_traced, graphical_ig_traced, ig_traced, LearnResult, PairFlavor,
    QueryEvent, QueryView,
};
use crate::oracle::{OracleHandle, OracleMode, ValueStream};
use crate::partition::{bell_log2_lower_bound, CoalitionStructure};
use crate::{Error, Result};

/// The learners the harness can drive, under their CLI names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Ig,
    GraphicalIg,
    IgCongestion,
    Daig,
    AuctionIg,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ig,
        Algorithm::GraphicalIg,
        Algorithm::IgCongestion,
        Algorithm::Daig,
        Algorithm::AuctionIg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ig => "ig",
            Algorithm::GraphicalIg => "graphical-ig",
            Algorithm::IgCongestion => "ig-congestion",
            Algorithm::Daig => "daig",
            Algorithm::AuctionIg => "auction-ig",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown algorithm {s:?} (expected one of: ig, graphical-ig, ig-congestion, daig, auction-ig)"
                ))
            })
    }
}

/// How the hidden structure's coalition count is chosen per run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MSpec {
    /// The same count for every run.
    Fixed(usize),
    /// A fixed fraction of n, rounded to the nearest count in 1..=n.
    Proportional(f64),
    /// Drawn uniformly from {1, ..., n} per run.
    Uniform,
}

impl MSpec {
    fn resolve(self, n: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
        match self {
            MSpec::Fixed(m) => {
                if m == 0 || m > n {
                    return Err(Error::InvalidArgument(format!(
                        "fixed coalition count {m} out of range 1..={n}"
                    )));
                }
                Ok(m)
            }
            MSpec::Proportional(frac) => {
                let m = (frac * n as f64).round() as usize;
                Ok(m.clamp(1, n))
            }
            MSpec::Uniform => Ok(rng.gen_range(1..=n)),
        }
    }
}

impl fmt::Display for MSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MSpec::Fixed(m) => write!(f, "{m}"),
            MSpec::Proportional(frac) => write!(f, "prop:{frac}"),
            MSpec::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for MSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(MSpec::Uniform);
        }
        if let Some(frac) = s.strip_prefix("prop:") {
            let frac: f64 = frac.parse().map_err(|_| {
                Error::InvalidArgument(format!("bad fraction in m spec {s:?}"))
            })?;
            if !(frac > 0.0 && frac <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "proportional m needs a fraction in (0, 1], got {frac}"
                )));
            }
            return Ok(MSpec::Proportional(frac));
        }
        let m: usize = s.parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "bad m spec {s:?} (expected an integer, prop:<frac>, or uniform)"
            ))
        })?;
        Ok(MSpec::Fixed(m))
    }
}

/// One full sweep: `runs` independent instances at every n in `n_values`.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub algorithm: Algorithm,
    pub n_values: Vec<usize>,
    pub m_spec: MSpec,
    pub runs: u64,
    pub master_seed: u64,
    pub oracle_mode: OracleMode,
    /// Where the CSV goes, if the caller wants it written.
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::InvalidArgument("no n values given".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidArgument(format!("n must be at least 1, got {n}")));
        }
        if let MSpec::Fixed(m) = self.m_spec {
            if let Some(&n) = self.n_values.iter().find(|&&n| m == 0 || m > n) {
                return Err(Error::InvalidArgument(format!(
                    "fixed coalition count {m} out of range 1..={n}"
                )));
            }
        }
        if let MSpec::Proportional(frac) = self.m_spec {
            if !(frac > 0.0 && frac <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "proportional m needs a fraction in (0, 1], got {frac}"
                )));
            }
        }
        Ok(())
    }
}

/// One completed run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run_id: u64,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Oracle queries consumed (for the sampled-auction learner this
    /// equals the number of items drawn).
    pub samples: u64,
    /// Whether the recovered structure is value-equal to the hidden one.
    pub correct: bool,
    /// Seconds spent in the learner. No determinism promise.
    pub wall_time: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The per-run seed: a stable mix of the master seed and the global run
/// index, recorded in the CSV so any row can be replayed alone.
pub fn run_seed(master_seed: u64, run_id: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(run_id.wrapping_add(1)))
}

/// Runs a sweep without tracing.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<RunRecord>> {
    sweep_inner(cfg, None)
}

/// Runs a sweep writing one JSON line per oracle query to `trace`.
///
/// Each line carries the run id, the oracle's running query index, the
/// query itself (pair list or auction targets), the answer, and the
/// learner's working structure at the time.
pub fn run_sweep_traced(cfg: &SweepConfig, trace: &mut dyn Write) -> Result<Vec<RunRecord>> {
    sweep_inner(cfg, Some(trace))
}

fn sweep_inner(cfg: &SweepConfig, mut trace: Option<&mut dyn Write>) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.n_values.len() * cfg.runs as usize);
    let mut run_id: u64 = 0;
    for &n in &cfg.n_values {
        for _ in 0..cfg.runs {
            let record = one_run(cfg, n, run_id, &mut trace)?;
            records.push(record);
            run_id += 1;
        }
    }
    Ok(records)
}

fn one_run(
    cfg: &SweepConfig,
    n: usize,
    run_id: u64,
    trace: &mut Option<&mut dyn Write>,
) -> Result<RunRecord> {
    let seed = run_seed(cfg.master_seed, run_id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cfg.m_spec.resolve(n, &mut rng)?;
    let structure_seed = rng.next_u64();
    let stream_seed = rng.next_u64();
    let s_star = CoalitionStructure::random(n, m, structure_seed)?;
    let mut oracle = OracleHandle::new(s_star.clone(), cfg.oracle_mode);

    let mut io_error: Option<io::Error> = None;
    let mut sink = |event: &QueryEvent<'_>| {
        if let Some(w) = trace.as_deref_mut() {
            if io_error.is_none() {
                if let Err(e) = write_trace_line(w, run_id, event) {
                    io_error = Some(e);
                }
            }
        }
    };

    let started = Instant::now();
    let result: LearnResult = match cfg.algorithm {
        Algorithm::Ig => ig_traced(n, &mut oracle, PairFlavor::NormalForm, &mut sink)?,
        Algorithm::IgCongestion => ig_traced(n, &mut oracle, PairFlavor::Congestion, &mut sink)?,
        Algorithm::GraphicalIg => graphical_ig_traced(n, &mut oracle, &mut sink)?,
        Algorithm::Daig => daig_traced(n, &mut oracle, &mut sink)?,
        Algorithm::AuctionIg => {
            let mut stream = ValueStream::new(n, stream_seed)?;
            auction_ig_traced(n, &mut oracle, &mut stream, &mut sink)?
        }
    };
    let wall_time = started.elapsed().as_secs_f64();
    if let Some(e) = io_error {
        return Err(Error::io(PathBuf::from("<trace>"), e));
    }
    debug_assert_eq!(result.queries, oracle.query_count());

    Ok(RunRecord {
        run_id,
        algorithm: cfg.algorithm,
        n,
        m,
        seed,
        samples: result.queries,
        correct: result.structure == s_star,
        wall_time,
    })
}

fn write_trace_line(w: &mut dyn Write, run_id: u64, event: &QueryEvent<'_>) -> io::Result<()> {
    let line = match &event.query {
        QueryView::Product(product) => {
            let p: &GadgetProduct = product;
            serde_json::json!({
                "run_id": run_id,
                "query": event.query_index,
                "kind": "product",
                "flavor": p.flavor(),
                "pairs": p.pairs(),
                "answer": event.answer,
                "structure": event.structure.to_string(),
            })
        }
        QueryView::Auction { top, targets, values } => serde_json::json!({
            "run_id": run_id,
            "query": event.query_index,
            "kind": "auction",
            "top": top,
            "targets": targets,
            "values": values,
            "answer": event.answer,
            "structure": event.structure.to_string(),
        }),
    };
    writeln!(w, "{line}")
}

/// The reference curves runs are compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Information-theoretic floor: bits needed to name a partition.
    Lower,
    /// Pairwise learners' worst case.
    Ig,
    /// Sampled-auction learner, single hidden coalition, worst case.
    AuctionM1,
    /// Sampled-auction learner, all-singleton structure, expectation.
    AuctionMn,
    /// Sampled-auction learner, any structure, expectation.
    AuctionGeneral,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::Lower,
        BoundKind::Ig,
        BoundKind::AuctionM1,
        BoundKind::AuctionMn,
        BoundKind::AuctionGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Lower => "lower",
            BoundKind::Ig => "ig",
            BoundKind::AuctionM1 => "auction_m1",
            BoundKind::AuctionMn => "auction_mn",
            BoundKind::AuctionGeneral => "auction_general",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown bound kind {s:?} (expected one of: lower, ig, auction_m1, auction_mn, auction_general)"
                ))
            })
    }
}

/// The curves drawn next to an algorithm's samples by default.
pub fn default_bound_kinds(algorithm: Algorithm) -> &'static [BoundKind] {
    match algorithm {
        Algorithm::AuctionIg => &[
            BoundKind::Lower,
            BoundKind::AuctionM1,
            BoundKind::AuctionMn,
            BoundKind::AuctionGeneral,
        ],
        _ => &[BoundKind::Lower, BoundKind::Ig],
    }
}

/// Evaluates a reference curve at `n` (n >= 2).
pub fn bound_curve(kind: BoundKind, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "bound curves are defined for n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    Ok(match kind {
        BoundKind::Lower => bell_log2_lower_bound(n)? as f64,
        BoundKind::Ig => nf * nf.log2() + 3.0 * nf,
        BoundKind::AuctionM1 => 2.0 * nf * nf.log2() + 4.0 * nf,
        BoundKind::AuctionMn => nf * harmonic(n),
        BoundKind::AuctionGeneral => auction_general_alpha() * nf * nf.ln(),
    })
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// The constant in the general-structure expectation curve: the unique
/// root above `b = 2/ln 2` of `a - b*ln(a) = b - b*ln(b) + 1`, found by
/// bisection (the left side is increasing in `a` past `b`).
pub fn auction_general_alpha() -> f64 {
    let b = 2.0 / std::f64::consts::LN_2;
    let target = b - b * b.ln() + 1.0;
    let g = |a: f64| a - b * a.ln() - target;
    let (mut lo, mut hi) = (b, 20.0);
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The smallest sample count s such that at least a q-fraction of all
/// runs finished correctly within s. Incorrect runs count toward the
/// denominator but can never satisfy the fraction, so a q beyond the
/// correct-run share is unattainable and reported as an error.
pub fn percentile(records: &[RunRecord], q: f64) -> Result<u64> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no runs to take a percentile of".into()));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "percentile fraction must lie in (0, 1], got {q}"
        )));
    }
    let mut finished: Vec<u64> = records
        .iter()
        .filter(|r| r.correct)
        .map(|r| r.samples)
        .collect();
    finished.sort_unstable();
    // Rank needed: the least k with k/N >= q. The epsilon forgives float
    // dust in q*N (e.g. 0.5 * 100 coming out a hair above 50).
    let rank = (q * records.len() as f64 - 1e-9).ceil() as usize;
    let rank = rank.max(1);
    if rank > finished.len() {
        return Err(Error::InvalidArgument(format!(
            "only {} of {} runs finished correctly; no sample count covers a {q} fraction",
            finished.len(),
            records.len()
        )));
    }
    Ok(finished[rank - 1])
}

/// One evaluated point of a reference curve, for the companion CSV.
#[derive(Clone, Copy, Debug)]
pub struct BoundPoint {
    pub kind: BoundKind,
    pub n: usize,
    pub value: f64,
}

/// Where the companion bounds file for a given CSV path goes.
pub fn bounds_companion_path(path: &Path) -> PathBuf {
    path.with_extension("bounds.csv")
}

/// Writes the records as CSV at `path` and, if any bound points were
/// given, a `kind,n,value` companion next to it.
pub fn emit_csv(records: &[RunRecord], bounds: &[BoundPoint], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    write_records_csv(&mut w, records).map_err(|e| Error::io(path.to_path_buf(), e))?;
    w.flush().map_err(|e| Error::io(path.to_path_buf(), e))?;

    if !bounds.is_empty() {
        emit_bounds_csv(bounds, &bounds_companion_path(path))?;
    }
    Ok(())
}

/// Writes bound points alone as a `kind,n,value` CSV.
pub fn emit_bounds_csv(bounds: &[BoundPoint], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    write_bounds_csv(&mut w, bounds).map_err(|e| Error::io(path.to_path_buf(), e))?;
    w.flush().map_err(|e| Error::io(path.to_path_buf(), e))
}

fn write_records_csv(w: &mut dyn Write, records: &[RunRecord]) -> io::Result<()> {
    writeln!(w, "run_id,algorithm,n,m,seed,samples,correct,wall_time")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.6}",
            r.run_id, r.algorithm, r.n, r.m, r.seed, r.samples, r.correct, r.wall_time
        )?;
    }
    Ok(())
}

fn write_bounds_csv(w: &mut dyn Write, bounds: &[BoundPoint]) -> io::Result<()> {
    writeln!(w, "kind,n,value")?;
    for b in bounds {
        writeln!(w, "{},{},{:.6}", b.kind, b.n, b.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(algorithm: Algorithm, n: usize, m_spec: MSpec, runs: u64, seed: u64) -> SweepConfig {
        SweepConfig {
            algorithm,
            n_values: vec![n],
            m_spec,
            runs,
            master_seed: seed,
            oracle_mode: OracleMode::Analytic,
            out: None,
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("krusty".parse::<Algorithm>().is_err());
    }

    #[test]
    fn m_spec_parsing() {
        assert_eq!("12".parse::<MSpec>().unwrap(), MSpec::Fixed(12));
        assert_eq!("uniform".parse::<MSpec>().unwrap(), MSpec::Uniform);
        assert_eq!("prop:0.5".parse::<MSpec>().unwrap(), MSpec::Proportional(0.5));
        assert!("prop:1.5".parse::<MSpec>().is_err());
        assert!("prop:zilch".parse::<MSpec>().is_err());
        assert!("-3".parse::<MSpec>().is_err());
    }

    #[test]
    fn run_seed_is_stable_and_spreads() {
        assert_eq!(run_seed(7, 0), run_seed(7, 0));
        let mut seen = std::collections::BTreeSet::new();
        for run_id in 0..10_000 {
            assert!(seen.insert(run_seed(7, run_id)), "collision at {run_id}");
        }
        assert_ne!(run_seed(7, 0), run_seed(8, 0));
    }

    #[test]
    fn bound_values_at_n_1000() {
        assert!((bound_curve(BoundKind::Ig, 1000).unwrap() - 12965.78).abs() < 0.01);
        assert!((bound_curve(BoundKind::AuctionM1, 1000).unwrap() - 23931.57).abs() < 0.01);
        assert!((bound_curve(BoundKind::AuctionMn, 1000).unwrap() - 7485.47).abs() < 0.01);
    }

    #[test]
    fn general_curve_constant_is_close_to_six() {
        let alpha = auction_general_alpha();
        assert!((alpha - 6.00).abs() < 0.01, "alpha = {alpha}");
        // Sanity: it actually solves the defining equation.
        let b = 2.0 / std::f64::consts::LN_2;
        let lhs = alpha - b * alpha.ln();
        let rhs = b - b * b.ln() + 1.0;
        assert!((lhs - rhs).abs() < 1e-6);
    }

    #[test]
    fn lower_bound_curve_matches_partition_count_bits() {
        assert_eq!(bound_curve(BoundKind::Lower, 3).unwrap(), 3.0);
        assert_eq!(bound_curve(BoundKind::Lower, 5).unwrap(), 6.0);
        assert!(bound_curve(BoundKind::Lower, 1).is_err());
    }

    fn rec(samples: u64, correct: bool) -> RunRecord {
        RunRecord {
            run_id: 0,
            algorithm: Algorithm::Ig,
            n: 4,
            m: 2,
            seed: 0,
            samples,
            correct,
            wall_time: 0.0,
        }
    }

    #[test]
    fn percentile_of_three() {
        let records = vec![rec(5, true), rec(7, true), rec(9, true)];
        assert_eq!(percentile(&records, 0.5).unwrap(), 7);
        assert_eq!(percentile(&records, 0.9).unwrap(), 9);
        assert_eq!(percentile(&records, 1.0).unwrap(), 9);
        assert_eq!(percentile(&records, 0.01).unwrap(), 5);
    }

    #[test]
    fn percentile_ignores_failed_runs_but_counts_them_in_the_denominator() {
        let records = vec![rec(1, false), rec(7, true), rec(9, true)];
        // Half of all three runs must have finished: the failed run's tiny
        // sample count cannot help.
        assert_eq!(percentile(&records, 0.5).unwrap(), 9);
        assert!(percentile(&records, 0.9).is_err());
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&records, 0.0).is_err());
        assert!(percentile(&records, 1.1).is_err());
    }

    proptest! {
        #[test]
        fn percentile_is_monotone_in_q(
            samples in proptest::collection::vec(0u64..10_000, 1..60),
            q1 in 0.01f64..1.0,
            q2 in 0.01f64..1.0,
        ) {
            let records: Vec<RunRecord> = samples.iter().map(|&s| rec(s, true)).collect();
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let p_lo = percentile(&records, lo).unwrap();
            let p_hi = percentile(&records, hi).unwrap();
            prop_assert!(p_lo <= p_hi);
        }
    }

    #[test]
    fn ig_sweep_recovers_and_respects_its_budget() {
        let records = run_sweep(&cfg(Algorithm::Ig, 16, MSpec::Fixed(4), 10, 7)).unwrap();
        assert_eq!(records.len(), 10);
        for (idx, r) in records.iter().enumerate() {
            assert_eq!(r.run_id, idx as u64);
            assert_eq!(r.seed, run_seed(7, r.run_id));
            assert!(r.correct);
            assert_eq!(r.m, 4);
            assert!(r.samples <= 112, "run {idx}: {} samples", r.samples);
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        for algorithm in Algorithm::ALL {
            let config = cfg(algorithm, 12, MSpec::Uniform, 5, 99);
            let a = run_sweep(&config).unwrap();
            let b = run_sweep(&config).unwrap();
            let samples_a: Vec<u64> = a.iter().map(|r| r.samples).collect();
            let samples_b: Vec<u64> = b.iter().map(|r| r.samples).collect();
            assert_eq!(samples_a, samples_b, "{algorithm}");
            assert!(a.iter().all(|r| r.correct), "{algorithm}");
            assert!(a.iter().all(|r| (1..=12).contains(&r.m)));
        }
    }

    #[test]
    fn brute_force_mode_agrees_with_analytic_on_the_same_seeds() {
        for algorithm in Algorithm::ALL {
            let mut config = cfg(algorithm, 5, MSpec::Uniform, 6, 31);
            let analytic = run_sweep(&config).unwrap();
            config.oracle_mode = OracleMode::BruteForce;
            let brute = run_sweep(&config).unwrap();
            for (a, b) in analytic.iter().zip(&brute) {
                assert_eq!(a.samples, b.samples, "{algorithm}");
                assert_eq!(a.correct, b.correct, "{algorithm}");
                assert!(a.correct);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(run_sweep(&cfg(Algorithm::Ig, 4, MSpec::Fixed(5), 1, 0)).is_err());
        assert!(run_sweep(&cfg(Algorithm::Ig, 4, MSpec::Fixed(2), 0, 0)).is_err());
        assert!(run_sweep(&cfg(Algorithm::Ig, 0, MSpec::Fixed(1), 1, 0)).is_err());
        let empty = SweepConfig {
            n_values: vec![],
            ..cfg(Algorithm::Ig, 4, MSpec::Fixed(2), 1, 0)
        };
        assert!(run_sweep(&empty).is_err());
    }

    #[test]
    fn trace_lines_parse_and_cover_every_query() {
        let config = cfg(Algorithm::AuctionIg, 6, MSpec::Fixed(2), 3, 5);
        let mut buffer = Vec::new();
        let records = run_sweep_traced(&config, &mut buffer).unwrap();
        let total: u64 = records.iter().map(|r| r.samples).sum();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len() as u64, total);
        for line in &lines {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["kind"], "auction");
            assert!(v["answer"].is_boolean());
            assert!(v["structure"].is_string());
            assert!(v["values"].as_array().unwrap().len() == 6);
        }
        // Traced and untraced runs see identical seeds, hence identical
        // sample counts.
        let untraced = run_sweep(&config).unwrap();
        let a: Vec<u64> = records.iter().map(|r| r.samples).collect();
        let b: Vec<u64> = untraced.iter().map(|r| r.samples).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn product_trace_lines_carry_pairs() {
        let config = cfg(Algorithm::GraphicalIg, 5, MSpec::Fixed(2), 2, 11);
        let mut buffer = Vec::new();
        run_sweep_traced(&config, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["kind"], "product");
        assert_eq!(first["flavor"], "graphical");
        assert!(first["pairs"].as_array().unwrap()[0].as_array().unwrap().len() == 2);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let records = vec![rec(5, true), rec(7, true), rec(9, false)];
        let bounds = vec![
            BoundPoint { kind: BoundKind::Lower, n: 2, value: 1.0 },
            BoundPoint { kind: BoundKind::Ig, n: 2, value: 8.0 },
        ];
        emit_csv(&records, &bounds, &path).unwrap();

        let body = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "run_id,algorithm,n,m,seed,samples,correct,wall_time");
        assert!(lines[1].starts_with("0,ig,4,2,0,5,true,"));
        assert!(lines[3].contains(",9,false,"));

        let companion = std::fs::read_to_string(bounds_companion_path(&path)).unwrap();
        let lines: Vec<&str> = companion.lines().collect();
        assert_eq!(lines[0], "kind,n,value");
        assert_eq!(lines[1], "lower,2,1.000000");
        assert_eq!(lines[2], "ig,2,8.000000");
    }

    #[test]
    fn proportional_m_resolves_by_rounding() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(MSpec::Proportional(0.5).resolve(10, &mut rng).unwrap(), 5);
        assert_eq!(MSpec::Proportional(0.24).resolve(10, &mut rng).unwrap(), 2);
        assert_eq!(MSpec::Proportional(0.01).resolve(10, &mut rng).unwrap(), 1);
        assert_eq!(MSpec::Proportional(1.0).resolve(10, &mut rng).unwrap(), 10);
    }
}
