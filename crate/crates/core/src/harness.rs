//! Decoding sweeps: corrupt codewords at a range of error weights, decode,
//! and tabulate the outcome of every (weight, trial) pair.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decode::{
    derive_params_with, main_decode_with_report, randomized_decode_with_report, DecodeReport, DecoderParams,
    ExpanderSpec, ParamOverrides, RandDecodeConfig, SearchOptions,
};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::BipartiteGraph;
use crate::inner::InnerCode;
use crate::tanner::{corrupt, Manifest, TannerCode};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "TANNER_THREADS";

pub const CSV_VERSION: &str = "sweep v1";

/// Parses an inner-code name: `parity:D`, `rep:D`, `hamming7`, `ehamming8`,
/// or a path to an `innercode v1` file.
pub fn parse_inner_spec(spec: &str) -> Result<InnerCode> {
    let named = |prefix: &str| spec.strip_prefix(prefix).map(|s| s.parse::<usize>());
    if let Some(d) = named("parity:") {
        return InnerCode::parity(d.map_err(|e| Error::InvalidParameter(e.to_string()))?);
    }
    if let Some(d) = named("rep:") {
        return InnerCode::repetition(d.map_err(|e| Error::InvalidParameter(e.to_string()))?);
    }
    match spec {
        "hamming7" => InnerCode::hamming_7_4(),
        "ehamming8" => InnerCode::extended_hamming_8_4(),
        path => InnerCode::read_file(path),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeSource {
    /// A `tanner v1` manifest.
    Bundle(PathBuf),
    /// A random `(c, d)`-biregular graph on `n` left vertices.
    Generate {
        c: usize,
        d: usize,
        n: usize,
        graph_seed: u64,
        inner: String,
    },
}

impl CodeSource {
    pub fn load(&self) -> Result<TannerCode> {
        match self {
            CodeSource::Bundle(path) => Manifest::load(path),
            CodeSource::Generate {
                c,
                d,
                n,
                graph_seed,
                inner,
            } => TannerCode::new(
                BipartiteGraph::random_biregular(*c, *d, *n, *graph_seed)?,
                parse_inner_spec(inner)?,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderChoice {
    Det,
    Rand,
}

impl std::fmt::Display for DecoderChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecoderChoice::Det => "det",
            DecoderChoice::Rand => "rand",
        })
    }
}

/// Where the intended codeword of each trial comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthMode {
    /// Encoding of a seeded random message. Needs the generator matrix.
    Random,
    /// The zero word. Both decoders commute with adding a codeword, so this
    /// measures the same thing without the elimination cost at large `n`.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub source: CodeSource,
    /// Claimed expansion of the graph.
    pub alpha: f64,
    pub delta: f64,
    /// Defaults to the inner code's distance.
    pub d0: Option<usize>,
    pub overrides: ParamOverrides,
    pub weights: Vec<usize>,
    pub trials: usize,
    pub decoder: DecoderChoice,
    pub truth: TruthMode,
    pub seed: u64,
    /// Randomized decoder overrides.
    pub eps: Option<f64>,
    pub max_iters: Option<usize>,
    pub search: Option<u64>,
    /// Records wall time per row. Off keeps reports bitwise reproducible.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(source: CodeSource, alpha: f64, delta: f64) -> Self {
        ExperimentConfig {
            source,
            alpha,
            delta,
            d0: None,
            overrides: ParamOverrides::default(),
            weights: vec![0],
            trials: 1,
            decoder: DecoderChoice::Det,
            truth: TruthMode::Random,
            seed: 0,
            eps: None,
            max_iters: None,
            search: Some(crate::decode::DEFAULT_BUDGET_FACTOR),
            timing: false,
            output: None,
        }
    }

    pub fn params_for(&self, code: &TannerCode) -> Result<DecoderParams> {
        let g = code.graph();
        derive_params_with(
            ExpanderSpec {
                c: g.c(),
                d: g.d(),
                alpha: self.alpha,
                delta: self.delta,
                d0: self.d0.unwrap_or_else(|| code.inner().distance()),
                n: code.len(),
            },
            self.overrides,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub weight: usize,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    /// Distance from the decoder output to the intended codeword.
    pub output_distance: Option<usize>,
    pub outcome: String,
    pub input_unsat: usize,
    pub rounds: u64,
    pub iterations: usize,
    pub ops_total: u64,
    pub hard_search_ops_max: u64,
    pub checks: u64,
    pub inner_decodes: u64,
    pub flips: u64,
    pub vote_updates: u64,
    pub branch_steps: u64,
    pub wall_ns: u64,
}

const CSV_COLUMNS: [&str; 17] = [
    "weight",
    "trial",
    "seed",
    "success",
    "output_distance",
    "outcome",
    "input_unsat",
    "rounds",
    "iterations",
    "ops_total",
    "hard_search_ops_max",
    "checks",
    "inner_decodes",
    "flips",
    "vote_updates",
    "branch_steps",
    "wall_ns",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub version: &'static str,
    pub n: usize,
    pub gamma_n: f64,
    pub decoder: DecoderChoice,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn successes(&self, weight: usize) -> (usize, usize) {
        let rows = self.rows.iter().filter(|r| r.weight == weight);
        rows.fold((0, 0), |(s, t), r| (s + r.success as usize, t + 1))
    }

    pub fn success_rate(&self) -> f64 {
        let ok = self.rows.iter().filter(|r| r.success).count();
        ok as f64 / self.rows.len().max(1) as f64
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![CSV_VERSION];
        header.extend(CSV_COLUMNS);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(&header).map_err(io)?;
        for r in &self.rows {
            let dist = r.output_distance.map(|d| d.to_string()).unwrap_or_default();
            let fields = [
                r.weight.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.success.to_string(),
                dist,
                r.outcome.clone(),
                r.input_unsat.to_string(),
                r.rounds.to_string(),
                r.iterations.to_string(),
                r.ops_total.to_string(),
                r.hard_search_ops_max.to_string(),
                r.checks.to_string(),
                r.inner_decodes.to_string(),
                r.flips.to_string(),
                r.vote_updates.to_string(),
                r.branch_steps.to_string(),
                r.wall_ns.to_string(),
            ];
            // the version column is blank on data rows
            w.write_field("").map_err(io)?;
            w.write_record(&fields).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Generation(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<path>.csv` and `<path>.json`.
    pub fn write(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = path.with_extension("csv");
        let json_path = path.with_extension("json");
        std::fs::write(&csv_path, self.to_csv()?)?;
        std::fs::write(&json_path, self.to_json())?;
        Ok((csv_path, json_path))
    }
}

/// Seed of trial `trial` at weight index `wi`, derived from the root seed.
pub fn trial_seed(root: u64, wi: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(wi as u64);
    rng.set_word_pos(2 * trial as u128);
    rng.next_u64()
}

/// Thread pool sized by [`THREADS_ENV`] when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV} must be a number, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Generation(e.to_string()))
}

/// Runs the sweep on a freshly loaded code.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    let code = config.source.load()?;
    run_sweep_on(&code, config)
}

/// Runs `trials` decodes per weight on `code`. Decoder failures are recorded
/// in the rows; only invalid configuration is an error.
pub fn run_sweep_on(code: &TannerCode, config: &ExperimentConfig) -> Result<SweepReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if let Some(&w) = config.weights.iter().find(|&&w| w > code.len()) {
        return Err(Error::InvalidParameter(format!("weight {w} exceeds n = {}", code.len())));
    }
    let params = config.params_for(code)?;
    let rand_base = match config.decoder {
        DecoderChoice::Det => None,
        DecoderChoice::Rand => {
            let mut cfg = match config.eps {
                Some(eps) => RandDecodeConfig::with_eps(&params, eps, 0)?,
                None => RandDecodeConfig::from_params(&params, 0)?,
            };
            if let Some(m) = config.max_iters {
                cfg.max_iters = m;
            }
            Some(cfg)
        }
    };
    if config.truth == TruthMode::Random {
        code.generator();
    }
    let options = SearchOptions {
        budget_factor: config.search,
    };

    let jobs: Vec<(usize, usize)> = (0..config.weights.len())
        .flat_map(|wi| (0..config.trials).map(move |t| (wi, t)))
        .collect();
    let run = |&(wi, trial): &(usize, usize)| -> Result<SweepRow> {
        let weight = config.weights[wi];
        let seed = trial_seed(config.seed, wi, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = match config.truth {
            TruthMode::Random => code.random_codeword(rng.next_u64()),
            TruthMode::Zero => {
                rng.next_u64();
                BitVector::zeros(code.len())
            }
        };
        let x = corrupt(&truth, weight, rng.next_u64())?;
        let start = Instant::now();
        let (out, report) = match rand_base {
            None => main_decode_with_report(code, &params, &x, &options),
            Some(mut cfg) => {
                cfg.seed = rng.next_u64();
                randomized_decode_with_report(code, &params, &cfg, &x, None, &options)
            }
        };
        let wall_ns = if config.timing { start.elapsed().as_nanos() as u64 } else { 0 };
        Ok(row(weight, trial, seed, &truth, out.ok(), &report, wall_ns))
    };
    let rows = thread_pool()?.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    Ok(SweepReport {
        version: CSV_VERSION,
        n: code.len(),
        gamma_n: params.gamma * code.len() as f64,
        decoder: config.decoder,
        rows,
    })
}

fn row(
    weight: usize,
    trial: usize,
    seed: u64,
    truth: &BitVector,
    out: Option<BitVector>,
    report: &DecodeReport,
    wall_ns: u64,
) -> SweepRow {
    let output_distance = out.map(|y| y.hamming_distance(truth).expect("equal lengths"));
    let outcome = serde_json::to_value(report.outcome)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    SweepRow {
        weight,
        trial,
        seed,
        success: output_distance == Some(0),
        output_distance,
        outcome,
        input_unsat: report.input_unsat,
        rounds: report.rounds,
        iterations: report.iterations.len(),
        ops_total: report.ops_total,
        hard_search_ops_max: report.hard_search_ops.iter().copied().max().unwrap_or(0),
        checks: report.ops.checks,
        inner_decodes: report.ops.inner_decodes,
        flips: report.ops.flips,
        vote_updates: report.ops.vote_updates,
        branch_steps: report.ops.branch_steps,
        wall_ns,
    }
}
