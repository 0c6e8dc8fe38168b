//! `csl` — command-line harness for the coalition-structure learning lab.
//!
//! Three subcommands:
//!
//! * `run` drives one learner over a seeded sweep and writes a CSV of
//!   per-run records (plus reference-curve points and, optionally, a
//!   line-per-query JSON trace).
//! * `bounds` evaluates a named reference curve over a list of agent
//!   counts and writes the points as CSV.
//! * `verify` runs the exhaustive small-case cross-validation suites and
//!   the instrumented state-invariant suite, exiting nonzero on any
//!   disagreement.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csl_core::bench::{
    bound_curve, default_bound_kinds, emit_bounds_csv, emit_csv, percentile, run_sweep,
    run_sweep_traced, Algorithm, BoundKind, BoundPoint, MSpec, RunRecord, SweepConfig,
};
use csl_core::oracle::OracleMode;
use csl_core::verify;
use csl_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "csl",
    version,
    about = "Coalition-structure learning lab: learners that recover a hidden partition of agents from one-bit equilibrium observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded sweep of one learner and write per-run records as CSV.
    Run(RunArgs),
    /// Evaluate a reference curve at several agent counts, write as CSV.
    Bounds(BoundsArgs),
    /// Cross-validate oracles, gadgets, schedules, and learner state
    /// invariants on exhaustive small cases; exit nonzero on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Learner: ig, graphical-ig, ig-congestion, daig, or auction-ig.
    #[arg(long)]
    algorithm: Algorithm,
    /// Agent counts, comma-separated (e.g. --n 8,16,32).
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Coalitions per instance: a fixed count, prop:<fraction of n>, or
    /// uniform (drawn from 1..=n per run).
    #[arg(long, default_value = "uniform")]
    m: MSpec,
    /// Independent runs per agent count.
    #[arg(long, default_value_t = 100)]
    runs: u64,
    /// Master seed. Each run's own seed derives from it and the run index
    /// and is recorded in the CSV.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oracle route: analytic (closed form) or brute (deviation search;
    /// small n only).
    #[arg(long, default_value = "analytic", value_parser = parse_oracle)]
    oracle: OracleMode,
    /// Output CSV path. Reference-curve points land in a .bounds.csv
    /// companion next to it.
    #[arg(long)]
    out: PathBuf,
    /// Optional trace path: one JSON line per oracle query.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Curve: lower, ig, auction_m1, auction_mn, or auction_general.
    #[arg(long)]
    kind: BoundKind,
    /// Agent counts, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Output CSV path (kind,n,value).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest agent count for the exhaustive oracle suites.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Instances per agent count in the instrumented suites.
    #[arg(long, default_value_t = 50)]
    runs: u64,
    /// Master seed for the sampled parts of the suites.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

fn parse_oracle(s: &str) -> std::result::Result<OracleMode, String> {
    match s {
        "analytic" => Ok(OracleMode::Analytic),
        "brute" => Ok(OracleMode::BruteForce),
        other => Err(format!("unknown oracle {other:?} (expected analytic or brute)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let cfg = SweepConfig {
        algorithm: args.algorithm,
        n_values: args.n.clone(),
        m_spec: args.m,
        runs: args.runs,
        master_seed: args.seed,
        oracle_mode: args.oracle,
        out: Some(args.out.clone()),
    };

    let records = match &args.trace {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path.clone(), e))?;
            let mut writer = BufWriter::new(file);
            let records = run_sweep_traced(&cfg, &mut writer)?;
            writer.flush().map_err(|e| Error::io(path.clone(), e))?;
            records
        }
        None => run_sweep(&cfg)?,
    };

    let bounds = evaluate_bounds(default_bound_kinds(args.algorithm), &args.n);
    emit_csv(&records, &bounds, &args.out)?;

    for &n in &args.n {
        print_summary(args.algorithm, n, &records);
    }
    println!("wrote {} records to {}", records.len(), args.out.display());

    let wrong = records.iter().filter(|r| !r.correct).count();
    if wrong > 0 {
        eprintln!("error: {wrong} of {} runs recovered a wrong structure", records.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

/// Evaluates the given curves at every n that supports them (curves start
/// at n=2, and the partition-count floor is capped; out-of-range points
/// are skipped with a note on stderr).
fn evaluate_bounds(kinds: &[BoundKind], n_values: &[usize]) -> Vec<BoundPoint> {
    let mut points = Vec::new();
    for &kind in kinds {
        for &n in n_values {
            match bound_curve(kind, n) {
                Ok(value) => points.push(BoundPoint { kind, n, value }),
                Err(e) => eprintln!("note: skipping {kind} at n={n}: {e}"),
            }
        }
    }
    points
}

fn print_summary(algorithm: Algorithm, n: usize, records: &[RunRecord]) {
    let slice: Vec<RunRecord> = records.iter().filter(|r| r.n == n).cloned().collect();
    if slice.is_empty() {
        return;
    }
    let correct = slice.iter().filter(|r| r.correct).count();
    let mean = slice.iter().map(|r| r.samples as f64).sum::<f64>() / slice.len() as f64;
    let max = slice.iter().map(|r| r.samples).max().unwrap_or(0);
    let mut line = format!(
        "{algorithm} n={n}: runs={} correct={correct}/{} mean={mean:.1} max={max}",
        slice.len(),
        slice.len()
    );
    for q in [0.5, 0.9, 0.99] {
        if let Ok(p) = percentile(&slice, q) {
            line.push_str(&format!(" p{}={p}", (q * 100.0).round() as u32));
        }
    }
    // Mean samples against the information floor (bits to name a
    // partition); the floor is worst-case over answer sequences, so this
    // is a report, not an asserted inequality.
    if let Ok(floor) = bound_curve(BoundKind::Lower, n) {
        if floor > 0.0 {
            line.push_str(&format!(" floor={floor} ratio={:.2}", mean / floor));
        }
    }
    println!("{line}");
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode> {
    let mut points = Vec::with_capacity(args.n.len());
    for &n in &args.n {
        points.push(BoundPoint { kind: args.kind, n, value: bound_curve(args.kind, n)? });
    }
    emit_bounds_csv(&points, &args.out)?;
    for p in &points {
        println!("{} n={}: {:.6}", p.kind, p.n, p.value);
    }
    println!("wrote {} points to {}", points.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    use csl_core::gadgets::GadgetFlavor;

    let reports = [
        verify::product_oracle_equivalence(args.max_n, 3, GadgetFlavor::NormalForm)?,
        verify::product_oracle_equivalence(args.max_n, 3, GadgetFlavor::Congestion)?,
        verify::product_oracle_equivalence(args.max_n, 3, GadgetFlavor::Graphical)?,
        verify::auction_oracle_equivalence(args.max_n, 50, 200, args.seed)?,
        verify::gadget_characterization_suite(args.max_n, args.seed)?,
        verify::one_factorization_suite(64)?,
        verify::graphical_query_structure_suite(&[2, 3, 8, 13, 16], args.runs.min(10), args.seed)?,
        verify::auction_state_invariant_suite(&[8, 32, 128], args.runs, args.seed)?,
    ];

    let mut all_passed = true;
    for report in &reports {
        println!("{report}");
        all_passed &= report.passed();
    }
    if all_passed {
        println!("all suites passed");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: at least one suite failed");
        Ok(ExitCode::FAILURE)
    }
}
