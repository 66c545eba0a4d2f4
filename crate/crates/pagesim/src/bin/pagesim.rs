//! Command-line surface for the paging simulator.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad arguments or file
//! contents), 1 on anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pagesim::cache::CacheState;
use pagesim::combine::{multiplexer_run, scs_run, EpochCostRecord};
use pagesim::error::Error;
use pagesim::experiment::{
    parse_config, parse_seed_list, result_rows_to_csv, run_experiment, summarize, Algorithm,
    ResultRow,
};
use pagesim::files::{
    bind_nat_values, fmt_g6, read_bundle, read_predictor, read_trace, write_atomic, write_bundle,
    write_trace, PredictorFile,
};
use pagesim::harness::{gen_trace, lower_bound_experiment, lru_run, TraceKind, TraceSpec};
use pagesim::metrics::compute_metrics;
use pagesim::offline::{dp_opt, fitf_run};
use pagesim::predict::{
    derive_consistent_nat, inject_errors, perfect_nat, AccessMode, ErrorInjection,
    ExplicitPredictionStream, InjectionModel, NatPredictionStream, PredictorPool,
};
use pagesim::remedy::PromotionRule;
use pagesim::rng::{derive_seed, Stream};
use pagesim::sim::sim_run_recorded;
use pagesim::trace::{build_nat_table, NatTable, Page, RequestTrace};

#[derive(Parser)]
#[command(name = "pagesim", about = "Online paging with inaccurate predictors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TraceInput {
    /// Trace file (`t,page` rows with a `# n=<int>` header).
    #[arg(long)]
    trace: PathBuf,
    /// Page-universe override when the trace file has no `# n=` header.
    #[arg(long)]
    n: Option<Page>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic trace.
    GenTrace {
        /// uniform | cyclic | zipf | phased-adversarial
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: Page,
        /// Number of rounds T.
        #[arg(long = "T", visible_alias = "horizon")]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cycle length (cyclic).
        #[arg(long)]
        cycle: Option<u32>,
        /// Power-law exponent (zipf).
        #[arg(long)]
        exponent: Option<f64>,
        /// Phase length (phased-adversarial).
        #[arg(long)]
        phase_len: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a predictor bundle for a trace.
    GenPredictors {
        #[command(flatten)]
        trace: TraceInput,
        /// Number of predictors M.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Access mode recorded in the bundle: full | bandit.
        #[arg(long, default_value = "full")]
        mode: String,
        /// 1-based index of the error-free predictor (0 = none).
        #[arg(long, default_value_t = 1)]
        good: usize,
        /// offset | uniform-resample | adversarial-swap
        #[arg(long, default_value = "uniform-resample")]
        model: String,
        /// Signed shift for the offset model.
        #[arg(long, default_value_t = 0)]
        offset: i64,
        /// Corruption rate in [0, 1].
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute accuracy metrics for predictors against a trace.
    Metrics {
        #[command(flatten)]
        trace: TraceInput,
        /// Single predictor file (NAT or explicit; explicit files are
        /// converted to their consistent NAT stream first).
        #[arg(long, conflicts_with = "bundle")]
        predictor: Option<PathBuf>,
        /// Predictor bundle directory.
        #[arg(long)]
        bundle: Option<PathBuf>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm over a trace and report cost, opt, regret.
    Run {
        #[command(flatten)]
        trace: TraceInput,
        /// fitf | dp-opt | lru | sim | scs | multiplexer
        #[arg(long)]
        algo: String,
        #[arg(long)]
        k: usize,
        /// Single predictor file for `sim` (defaults to the error-free
        /// predictor when omitted).
        #[arg(long)]
        predictor: Option<PathBuf>,
        /// Predictor bundle directory for `scs` / `multiplexer`.
        #[arg(long)]
        bundle: Option<PathBuf>,
        /// Epoch length for `scs`; defaults to floor(T^(1/3)).
        #[arg(long)]
        tau: Option<usize>,
        /// Experts parameter for `multiplexer`; defaults to
        /// min(0.2, sqrt(k ln M / T)).
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dump per-round records (`t,request,miss,evicted,argmax_remedy`).
        #[arg(long)]
        dump_rounds: Option<PathBuf>,
        /// Dump per-epoch records (`epoch,predictor,f,F,evictions`).
        #[arg(long)]
        dump_epochs: Option<PathBuf>,
        /// Write a one-row result CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coupon-collector phase experiment on uniform traces with n = k + 1.
    LowerBound {
        #[arg(long)]
        k: usize,
        #[arg(long = "T", visible_alias = "horizon")]
        horizon: usize,
        /// Seed list: `a..b` (inclusive) or `a,b,c`.
        #[arg(long, default_value = "1..10")]
        seeds: String,
        /// Write per-seed rows here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config-driven sweep and write its CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let validation = err
                .downcast_ref::<Error>()
                .is_some_and(Error::is_validation);
            if validation {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::GenTrace {
            kind,
            n,
            horizon,
            seed,
            cycle,
            exponent,
            phase_len,
            out,
        } => {
            let kind = parse_trace_kind(&kind, cycle, exponent, phase_len)?;
            let trace = gen_trace(&TraceSpec {
                kind,
                universe: n,
                horizon,
                seed,
            })?;
            write_trace(&out, &trace)?;
            println!(
                "wrote trace: n={} T={} -> {}",
                trace.universe(),
                trace.horizon(),
                out.display()
            );
            Ok(())
        }
        Command::GenPredictors {
            trace,
            m,
            mode,
            good,
            model,
            offset,
            rate,
            seed,
            out,
        } => {
            let tr = read_trace(&trace.trace, trace.n)?;
            let nat = build_nat_table(&tr);
            let mode: AccessMode = mode.parse()?;
            let model = parse_injection_model(&model, offset)?;
            if good > m {
                return Err(Error::Validation(format!(
                    "good predictor index {good} outside [0, M = {m}]"
                ))
                .into());
            }
            let clean = perfect_nat(&tr, &nat);
            let streams: Vec<NatPredictionStream> = (1..=m)
                .map(|j| {
                    if j == good {
                        Ok(clean.clone())
                    } else {
                        let cfg = ErrorInjection::new(
                            model,
                            rate,
                            derive_seed(seed, Stream::Injection(j as u32)),
                        )?;
                        inject_errors(&clean, &cfg, &tr)
                    }
                })
                .collect::<pagesim::Result<_>>()?;
            write_bundle(&out, &streams, mode)?;
            println!("wrote bundle: M={m} mode={} -> {}", mode.as_str(), out.display());
            Ok(())
        }
        Command::Metrics {
            trace,
            predictor,
            bundle,
            out,
        } => {
            let tr = read_trace(&trace.trace, trace.n)?;
            let nat = build_nat_table(&tr);
            let streams = load_streams(&tr, predictor.as_deref(), bundle.as_deref())?.0;
            let mut csv = String::from(
                "predictor,error_rounds,inverted_pairs,inverted_rounds,eta_refined,l1\n",
            );
            for (idx, stream) in streams.iter().enumerate() {
                let m = compute_metrics(&tr, &nat, stream)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    idx + 1,
                    m.error_rounds,
                    m.inverted_pairs,
                    m.inverted_rounds,
                    m.eta_refined,
                    m.l1
                );
            }
            emit(out.as_deref(), &csv)?;
            Ok(())
        }
        Command::Run {
            trace,
            algo,
            k,
            predictor,
            bundle,
            tau,
            epsilon,
            seed,
            dump_rounds,
            dump_epochs,
            out,
        } => {
            let algo: Algorithm = algo.parse()?;
            let tr = read_trace(&trace.trace, trace.n)?;
            let nat = build_nat_table(&tr);
            run_command(
                algo, &tr, &nat, k, predictor, bundle, tau, epsilon, seed, dump_rounds,
                dump_epochs, out,
            )
        }
        Command::LowerBound {
            k,
            horizon,
            seeds,
            out,
        } => {
            let seeds = parse_seed_list(&seeds)?;
            let summary = lower_bound_experiment(k, horizon, &seeds)?;
            println!(
                "n={} k={} T={} seeds={}",
                summary.universe,
                summary.k,
                summary.horizon,
                summary.rows.len()
            );
            println!(
                "mean phase length {} (coupon-collector expectation {})",
                fmt_g6(summary.mean_phase_length),
                fmt_g6(summary.expected_phase_length)
            );
            println!(
                "max fitf misses per complete phase: {}",
                summary.max_fitf_misses_per_phase
            );
            println!(
                "fitf cost {} vs lru cost {} (ratio {})",
                summary.total_fitf_cost,
                summary.total_lru_cost,
                fmt_g6(summary.total_lru_cost as f64 / summary.total_fitf_cost.max(1) as f64)
            );
            if let Some(path) = out {
                let mut csv = String::from(
                    "seed,complete_phases,mean_phase_length,max_fitf_misses_per_phase,fitf_cost,lru_cost\n",
                );
                for row in &summary.rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        row.seed,
                        row.complete_phases,
                        fmt_g6(row.mean_phase_length),
                        row.max_fitf_misses_per_phase,
                        row.fitf_cost,
                        row.lru_cost
                    );
                }
                write_atomic(&path, csv.as_bytes())?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Experiment { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Io {
                    path: config.clone(),
                    source: e,
                })?;
            let config = parse_config(&text)?;
            let rows = run_experiment(&config)?;
            println!("{}", summarize(&rows));
            println!("wrote {}", config.out.display());
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_command(
    algo: Algorithm,
    tr: &RequestTrace,
    nat: &NatTable,
    k: usize,
    predictor: Option<PathBuf>,
    bundle: Option<PathBuf>,
    tau: Option<usize>,
    epsilon: Option<f64>,
    seed: u64,
    dump_rounds: Option<PathBuf>,
    dump_epochs: Option<PathBuf>,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let initial = CacheState::first_k(k)?;
    let opt = fitf_run(tr, nat, k, &initial)?.cost;
    let mut epochs: Vec<EpochCostRecord> = Vec::new();
    let mut eta_min = 0u64;
    let mut predictor_count = 0usize;

    let cost = match algo {
        Algorithm::Fitf => opt,
        Algorithm::DpOpt => dp_opt(tr, k, &initial)?.cost,
        Algorithm::Lru => lru_run(tr, k, &initial)?.cost,
        Algorithm::Sim => {
            let stream = match predictor {
                Some(path) => load_single_stream(tr, &path)?,
                None => perfect_nat(tr, nat),
            };
            predictor_count = 1;
            eta_min = compute_metrics(tr, nat, &stream)?.eta_refined;
            let (report, rounds) = sim_run_recorded(
                tr,
                &mut (&stream),
                k,
                &initial,
                PromotionRule::ExpiredBy,
                dump_rounds.is_some(),
            )?;
            if let Some(path) = &dump_rounds {
                dump_round_records(path, &rounds)?;
            }
            report.cost
        }
        Algorithm::Scs | Algorithm::Multiplexer => {
            let (streams, _) = load_streams(tr, predictor.as_deref(), bundle.as_deref())?;
            predictor_count = streams.len();
            eta_min = streams
                .iter()
                .map(|s| compute_metrics(tr, nat, s).map(|m| m.eta_refined))
                .collect::<pagesim::Result<Vec<_>>>()?
                .into_iter()
                .min()
                .unwrap_or(0);
            if algo == Algorithm::Scs {
                let mut pool = PredictorPool::new(streams, AccessMode::Bandit)?;
                let outcome = scs_run(tr, &mut pool, k, &initial, tau, seed)?;
                epochs = outcome.epochs;
                outcome.report.cost
            } else {
                let mut pool = PredictorPool::new(streams, AccessMode::FullInformation)?;
                let outcome = multiplexer_run(tr, &mut pool, k, &initial, epsilon, seed)?;
                println!(
                    "multiplexer: serving misses {}, sync misses {}, switches {}",
                    outcome.report.cost, outcome.sync_misses, outcome.switches
                );
                outcome.total_cost()
            }
        }
    };

    if let Some(path) = &dump_epochs {
        let mut csv = String::from("epoch,predictor,f,F,evictions\n");
        for rec in &epochs {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                rec.epoch,
                rec.predictor,
                rec.f,
                fmt_g6(rec.cost),
                rec.evictions
            );
        }
        write_atomic(path, csv.as_bytes())?;
    }

    println!(
        "algo={} T={} k={} cost={} opt={} regret={}",
        algo.as_str(),
        tr.horizon(),
        k,
        cost,
        opt,
        cost as i64 - opt as i64
    );
    if let Some(path) = out {
        let row = ResultRow {
            seed,
            algorithm: algo,
            horizon: tr.horizon(),
            k,
            predictor_count,
            cost,
            opt,
            regret: cost as i64 - opt as i64,
            eta_min,
            wall_time_s: 0.0,
        };
        write_atomic(&path, result_rows_to_csv(std::slice::from_ref(&row)).as_bytes())?;
    }
    Ok(())
}

fn parse_trace_kind(
    kind: &str,
    cycle: Option<u32>,
    exponent: Option<f64>,
    phase_len: Option<usize>,
) -> anyhow::Result<TraceKind> {
    let need = |opt: Option<&str>, what: &str| {
        Error::Validation(format!(
            "trace kind `{}` requires --{what}",
            opt.unwrap_or(kind)
        ))
    };
    match kind {
        "uniform" => Ok(TraceKind::Uniform),
        "cyclic" => Ok(TraceKind::Cyclic {
            cycle: cycle.ok_or_else(|| need(None, "cycle"))?,
        }),
        "zipf" => Ok(TraceKind::Zipf {
            exponent: exponent.ok_or_else(|| need(None, "exponent"))?,
        }),
        "phased-adversarial" | "phased" => Ok(TraceKind::PhasedAdversarial {
            phase_len: phase_len.ok_or_else(|| need(None, "phase-len"))?,
        }),
        other => Err(Error::Validation(format!("unknown trace kind `{other}`")).into()),
    }
}

fn parse_injection_model(model: &str, offset: i64) -> anyhow::Result<InjectionModel> {
    match model {
        "offset" => Ok(InjectionModel::Offset(offset)),
        "uniform-resample" => Ok(InjectionModel::UniformResample),
        "adversarial-swap" => Ok(InjectionModel::AdversarialSwap),
        other => Err(Error::Validation(format!("unknown injection model `{other}`")).into()),
    }
}

/// Loads one predictor file, deriving the consistent NAT stream for explicit
/// files.
fn load_single_stream(tr: &RequestTrace, path: &Path) -> anyhow::Result<NatPredictionStream> {
    match read_predictor(path)? {
        PredictorFile::Nat(values) => Ok(bind_nat_values(values, tr)?),
        PredictorFile::Explicit(pages) => {
            let explicit = ExplicitPredictionStream::new(&pages, tr.universe())?;
            Ok(derive_consistent_nat(&explicit, tr)?)
        }
    }
}

/// Loads predictors from either a single file or a bundle directory.
fn load_streams(
    tr: &RequestTrace,
    predictor: Option<&Path>,
    bundle: Option<&Path>,
) -> anyhow::Result<(Vec<NatPredictionStream>, Option<AccessMode>)> {
    match (predictor, bundle) {
        (Some(path), None) => Ok((vec![load_single_stream(tr, path)?], None)),
        (None, Some(dir)) => {
            let (raw, mode) = read_bundle(dir)?;
            let streams = raw
                .into_iter()
                .map(|values| bind_nat_values(values, tr))
                .collect::<pagesim::Result<Vec<_>>>()?;
            Ok((streams, Some(mode)))
        }
        (None, None) => {
            Err(Error::Validation("pass --predictor <file> or --bundle <dir>".into()).into())
        }
        (Some(_), Some(_)) => {
            Err(Error::Validation("pass either --predictor or --bundle, not both".into()).into())
        }
    }
}

fn dump_round_records(path: &Path, rounds: &[pagesim::sim::RoundRecord]) -> anyhow::Result<()> {
    let mut csv = String::from("t,request,miss,evicted,argmax_remedy\n");
    for r in rounds {
        let evicted = r.evicted.map(|p| p.to_string()).unwrap_or_default();
        let remedy = r.argmax_remedy.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{evicted},{remedy}", r.t, r.request, u8::from(r.miss));
    }
    write_atomic(path, csv.as_bytes())?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
