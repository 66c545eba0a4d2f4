//! Experiment sweeps: flat-text configs, per-seed pipelines, and the pinned
//! result CSV.
//!
//! A config is one `key = value` per line with `#` comments. Two invocations
//! of the same config produce byte-identical CSV output: every random choice
//! flows from the per-seed split streams, rows are emitted in seed order, and
//! the file is written atomically. Wall-clock timings are carried on the
//! in-memory rows (and printed in summaries) but deliberately kept out of the
//! CSV, which would otherwise never be reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crate::cache::CacheState;
use crate::combine::{multiplexer_run, scs_run};
use crate::error::{Error, Result};
use crate::files::{write_atomic, fmt_g6};
use crate::harness::{gen_trace, lru_run, TraceKind, TraceSpec};
use crate::metrics::compute_metrics;
use crate::offline::{dp_opt, fitf_run};
use crate::predict::{
    inject_errors, perfect_nat, AccessMode, ErrorInjection, InjectionModel, NatPredictionStream,
    PredictorPool,
};
use crate::remedy::PromotionRule;
use crate::rng::{derive_seed, Stream};
use crate::sim::sim_run;
use crate::trace::{build_nat_table, NatTable, Page, RequestTrace};

/// Algorithms runnable by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fitf,
    DpOpt,
    Lru,
    Sim,
    Scs,
    Multiplexer,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Fitf => "fitf",
            Algorithm::DpOpt => "dp-opt",
            Algorithm::Lru => "lru",
            Algorithm::Sim => "sim",
            Algorithm::Scs => "scs",
            Algorithm::Multiplexer => "multiplexer",
        }
    }

    pub fn uses_predictors(self) -> bool {
        matches!(self, Algorithm::Sim | Algorithm::Scs | Algorithm::Multiplexer)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fitf" => Ok(Algorithm::Fitf),
            "dp-opt" => Ok(Algorithm::DpOpt),
            "lru" => Ok(Algorithm::Lru),
            "sim" => Ok(Algorithm::Sim),
            "scs" => Ok(Algorithm::Scs),
            "multiplexer" => Ok(Algorithm::Multiplexer),
            other => Err(Error::Validation(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Predictor bundle description: which predictor is clean and how the rest
/// are corrupted.
#[derive(Debug, Clone, Copy)]
pub struct PredictorSpec {
    pub count: usize,
    /// 1-based index of the error-free predictor; 0 means none.
    pub good: usize,
    pub model: InjectionModel,
    pub rate: f64,
}

/// A full experiment: trace family, cache size, algorithm, predictors,
/// seeds, output path.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: TraceKind,
    pub universe: Page,
    pub horizon: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub predictors: PredictorSpec,
    pub tau: Option<usize>,
    pub epsilon: Option<f64>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

/// One output row. `wall_time_s` stays out of the serialized CSV.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub horizon: usize,
    pub k: usize,
    pub predictor_count: usize,
    pub cost: usize,
    pub opt: usize,
    pub regret: i64,
    pub eta_min: u64,
    pub wall_time_s: f64,
}

pub const RESULT_CSV_HEADER: &str = "seed,algorithm,T,k,M,cost,opt,regret,eta_min";

/// Serializes rows in the pinned column order.
pub fn result_rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.algorithm.as_str(),
            r.horizon,
            r.k,
            r.predictor_count,
            r.cost,
            r.opt,
            r.regret,
            r.eta_min
        );
    }
    out
}

/// Parses the flat key-value config format. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Validation(format!("config line {}: expected `key = value`", line_no + 1))
        })?;
        let prev = map.insert(key.trim().to_string(), value.trim().to_string());
        if prev.is_some() {
            return Err(Error::Validation(format!(
                "config line {}: duplicate key `{}`",
                line_no + 1,
                key.trim()
            )));
        }
    }

    let mut take = |key: &str| map.remove(key);
    let required = |opt: Option<String>, key: &str| {
        opt.ok_or_else(|| Error::Validation(format!("config is missing `{key}`")))
    };

    let universe: Page = parse_value(&required(take("n"), "n")?, "n")?;
    let horizon: usize = parse_value(&required(take("T"), "T")?, "T")?;
    let k: usize = parse_value(&required(take("k"), "k")?, "k")?;
    let algorithm: Algorithm = required(take("algo"), "algo")?.parse()?;
    let trace_name = required(take("trace"), "trace")?;
    let kind = match trace_name.as_str() {
        "uniform" => TraceKind::Uniform,
        "cyclic" => TraceKind::Cyclic {
            cycle: parse_value(&required(take("cycle"), "cycle")?, "cycle")?,
        },
        "zipf" => TraceKind::Zipf {
            exponent: parse_value(&required(take("exponent"), "exponent")?, "exponent")?,
        },
        "phased-adversarial" | "phased" => TraceKind::PhasedAdversarial {
            phase_len: parse_value(&required(take("phase_len"), "phase_len")?, "phase_len")?,
        },
        other => return Err(Error::Validation(format!("unknown trace kind `{other}`"))),
    };

    let count: usize = match take("M") {
        Some(v) => parse_value(&v, "M")?,
        None => 1,
    };
    let good: usize = match take("good") {
        Some(v) => parse_value(&v, "good")?,
        None => 1,
    };
    let model = match take("model").as_deref() {
        None | Some("uniform-resample") => InjectionModel::UniformResample,
        Some("offset") => {
            InjectionModel::Offset(parse_value(&required(take("offset"), "offset")?, "offset")?)
        }
        Some("adversarial-swap") => InjectionModel::AdversarialSwap,
        Some(other) => {
            return Err(Error::Validation(format!("unknown injection model `{other}`")))
        }
    };
    let rate: f64 = match take("rate") {
        Some(v) => parse_value(&v, "rate")?,
        None => 0.0,
    };
    let tau = match take("tau") {
        None => None,
        Some(v) => match parse_value::<usize>(&v, "tau")? {
            0 => None,
            t => Some(t),
        },
    };
    let epsilon = match take("epsilon") {
        None => None,
        Some(v) => {
            let e: f64 = parse_value(&v, "epsilon")?;
            if e == 0.0 {
                None
            } else {
                Some(e)
            }
        }
    };
    let seeds = parse_seed_list(&required(take("seeds"), "seeds")?)?;
    let out = PathBuf::from(required(take("out"), "out")?);

    if let Some(key) = map.keys().next() {
        return Err(Error::Validation(format!("unknown config key `{key}`")));
    }

    let config = ExperimentConfig {
        kind,
        universe,
        horizon,
        k,
        algorithm,
        predictors: PredictorSpec {
            count,
            good,
            model,
            rate,
        },
        tau,
        epsilon,
        seeds,
        out,
    };
    validate_config(&config)?;
    Ok(config)
}

fn validate_config(config: &ExperimentConfig) -> Result<()> {
    if config.k == 0 || config.k >= config.universe as usize {
        return Err(Error::Validation(format!(
            "k = {} must satisfy 1 <= k < n = {}",
            config.k, config.universe
        )));
    }
    if config.seeds.is_empty() {
        return Err(Error::Validation("seed list is empty".into()));
    }
    let p = &config.predictors;
    if config.algorithm.uses_predictors() {
        if p.count == 0 {
            return Err(Error::Validation("predictor count M must be >= 1".into()));
        }
        if config.algorithm == Algorithm::Sim && p.count != 1 {
            return Err(Error::Validation(
                "algo sim follows a single predictor; set M = 1".into(),
            ));
        }
        if p.good > p.count {
            return Err(Error::Validation(format!(
                "good predictor index {} outside [0, M = {}]",
                p.good, p.count
            )));
        }
        if !(0.0..=1.0).contains(&p.rate) {
            return Err(Error::Validation(format!("rate {} outside [0, 1]", p.rate)));
        }
    }
    Ok(())
}

/// `a,b,c` or an inclusive range `a..b`.
pub fn parse_seed_list(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = parse_value(a, "seeds")?;
        let hi: u64 = parse_value(b, "seeds")?;
        if hi < lo {
            return Err(Error::Validation(format!("empty seed range `{s}`")));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|part| parse_value(part, "seeds"))
        .collect()
}

fn parse_value<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad value `{}` for `{key}`", s.trim())))
}

/// Builds the `M` prediction streams for one seed: the good predictor (if
/// any) is error-free, every other one is corrupted with its own derived
/// injection seed.
pub fn build_predictors(
    trace: &RequestTrace,
    nat: &NatTable,
    spec: &PredictorSpec,
    seed: u64,
) -> Result<Vec<NatPredictionStream>> {
    let clean = perfect_nat(trace, nat);
    (1..=spec.count)
        .map(|j| {
            if j == spec.good {
                Ok(clean.clone())
            } else {
                let cfg = ErrorInjection::new(
                    spec.model,
                    spec.rate,
                    derive_seed(seed, Stream::Injection(j as u32)),
                )?;
                inject_errors(&clean, &cfg, trace)
            }
        })
        .collect()
}

/// Runs one `(config, seed)` pipeline.
pub fn run_single(config: &ExperimentConfig, seed: u64) -> Result<ResultRow> {
    let started = Instant::now();
    let trace = gen_trace(&TraceSpec {
        kind: config.kind,
        universe: config.universe,
        horizon: config.horizon,
        seed,
    })?;
    let nat = build_nat_table(&trace);
    let initial = CacheState::first_k(config.k)?;
    let opt = fitf_run(&trace, &nat, config.k, &initial)?.cost;

    let (streams, eta_min) = if config.algorithm.uses_predictors() {
        let streams = build_predictors(&trace, &nat, &config.predictors, seed)?;
        let eta_min = streams
            .iter()
            .map(|s| compute_metrics(&trace, &nat, s).map(|m| m.eta_refined))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(0);
        (streams, eta_min)
    } else {
        (Vec::new(), 0)
    };

    let cost = match config.algorithm {
        Algorithm::Fitf => opt,
        Algorithm::DpOpt => dp_opt(&trace, config.k, &initial)?.cost,
        Algorithm::Lru => lru_run(&trace, config.k, &initial)?.cost,
        Algorithm::Sim => {
            let stream = &streams[0];
            sim_run(&trace, &mut (&*stream), config.k, &initial, PromotionRule::ExpiredBy)?.cost
        }
        Algorithm::Scs => {
            let mut pool = PredictorPool::new(streams.clone(), AccessMode::Bandit)?;
            scs_run(&trace, &mut pool, config.k, &initial, config.tau, seed)?
                .report
                .cost
        }
        Algorithm::Multiplexer => {
            let mut pool = PredictorPool::new(streams.clone(), AccessMode::FullInformation)?;
            multiplexer_run(&trace, &mut pool, config.k, &initial, config.epsilon, seed)?
                .total_cost()
        }
    };

    Ok(ResultRow {
        seed,
        algorithm: config.algorithm,
        horizon: config.horizon,
        k: config.k,
        predictor_count: streams.len(),
        cost,
        opt,
        regret: cost as i64 - opt as i64,
        eta_min,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Runs every seed of `config` in order and writes the CSV atomically.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let rows = config
        .seeds
        .iter()
        .map(|&seed| run_single(config, seed))
        .collect::<Result<Vec<_>>>()?;
    write_atomic(&config.out, result_rows_to_csv(&rows).as_bytes())?;
    Ok(rows)
}

/// Human-readable sweep summary (this is where timings surface).
pub fn summarize(rows: &[ResultRow]) -> String {
    if rows.is_empty() {
        return "no rows".to_string();
    }
    let n = rows.len() as f64;
    let mean_cost = rows.iter().map(|r| r.cost as f64).sum::<f64>() / n;
    let mean_regret = rows.iter().map(|r| r.regret as f64).sum::<f64>() / n;
    let total_wall = rows.iter().map(|r| r.wall_time_s).sum::<f64>();
    format!(
        "{} seeds, algo {}: mean cost {}, mean regret {}, total wall time {}s",
        rows.len(),
        rows[0].algorithm.as_str(),
        fmt_g6(mean_cost),
        fmt_g6(mean_regret),
        fmt_g6(total_wall)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(algo: &str, extra: &str) -> ExperimentConfig {
        let text = format!(
            "trace = uniform\nn = 8\nT = 300\nk = 3\nalgo = {algo}\nseeds = 1..5\nout = /tmp/unused.csv\n{extra}"
        );
        parse_config(&text).unwrap()
    }

    #[test]
    fn parse_rejects_unknown_keys_and_duplicates() {
        assert!(parse_config("trace = uniform\nbogus = 1\n").is_err());
        assert!(parse_config("n = 4\nn = 5\n").is_err());
    }

    #[test]
    fn parse_seed_forms() {
        assert_eq!(parse_seed_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seed_list("7,3,9").unwrap(), vec![7, 3, 9]);
        assert!(parse_seed_list("9..3").is_err());
    }

    #[test]
    fn fitf_rows_have_zero_regret() {
        let config = base_config("fitf", "");
        for &seed in &config.seeds {
            let row = run_single(&config, seed).unwrap();
            assert_eq!(row.regret, 0);
            assert_eq!(row.cost, row.opt);
            assert_eq!(row.predictor_count, 0);
        }
    }

    #[test]
    fn sim_with_perfect_predictor_keeps_small_regret() {
        let config = base_config("sim", "M = 1\ngood = 1\n");
        for &seed in &config.seeds {
            let row = run_single(&config, seed).unwrap();
            assert_eq!(row.eta_min, 0);
            assert!(row.regret >= 0);
            assert!(row.regret <= 5 * config.k as i64);
        }
    }

    #[test]
    fn regret_is_cost_minus_opt_and_nonnegative() {
        let config = base_config("scs", "M = 3\ngood = 2\nrate = 1\ntau = 5\n");
        for &seed in &config.seeds {
            let row = run_single(&config, seed).unwrap();
            assert_eq!(row.regret, row.cost as i64 - row.opt as i64);
            assert!(row.regret >= 0);
        }
    }

    #[test]
    fn csv_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("rows.csv");
        let mut config = base_config("multiplexer", "M = 2\ngood = 1\nrate = 1\nepsilon = 0.05\n");
        config.out = out.clone();
        run_experiment(&config).unwrap();
        let first = std::fs::read(&out).unwrap();
        run_experiment(&config).unwrap();
        let second = std::fs::read(&out).unwrap();
        assert_eq!(first, second);
        assert!(first.starts_with(RESULT_CSV_HEADER.as_bytes()));
    }

    #[test]
    fn sim_requires_single_predictor() {
        let text = "trace = uniform\nn = 8\nT = 10\nk = 3\nalgo = sim\nM = 2\nseeds = 1\nout = x.csv\n";
        assert!(parse_config(text).is_err());
    }
}
