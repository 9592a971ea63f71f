use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use expander_codes::decode::{
    derive_params_with, main_decode_with_report, randomized_decode_with_report, ExpanderSpec, ParamOverrides,
    RandDecodeConfig, SearchOptions,
};
use expander_codes::graph::{build_lowerbound_graph, build_lowerbound_graph_at, sample_expansion, verify_expansion};
use expander_codes::harness::{parse_inner_spec, run_sweep, CodeSource, DecoderChoice, ExperimentConfig, TruthMode};
use expander_codes::tanner::{corrupt, Manifest};
use expander_codes::{BipartiteGraph, BitVector, Error, TannerCode};

const EXIT_VALIDATION: u8 = 3;
const EXIT_DECODE: u8 = 4;

#[derive(Parser)]
#[command(name = "tanner", version, about = "Expander codes: construction, verification and decoding")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random (c, d)-biregular bipartite graph.
    GenGraph {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check (alpha, delta) expansion, exhaustively or by sampling.
    VerifyExpansion {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        /// Sample this many subsets instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build an expander whose Tanner code has a weight-d0 codeword.
    LowerboundGraph {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        d0: usize,
        #[arg(long)]
        n: usize,
        /// Fixes alpha instead of trying the default ladder.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a code bundle: graph, inner code and manifest.
    BuildCode {
        #[arg(long)]
        graph: PathBuf,
        /// parity:D, rep:D, hamming7, ehamming8, or an inner-code file.
        #[arg(long)]
        inner: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "code")]
        stem: String,
    },
    /// Exact minimum distance by enumeration.
    Mindist {
        #[arg(long)]
        code: PathBuf,
    },
    /// Encode a message with the code's generator.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        msg: String,
    },
    /// Flip `weight` random coordinates of a word.
    Corrupt {
        #[arg(long)]
        word: String,
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Deterministic decoding.
    Decode {
        #[command(flatten)]
        common: DecodeArgs,
    },
    /// Randomized decoding.
    DecodeRand {
        #[command(flatten)]
        common: DecodeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Print the derived decoder constants.
    Params {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        d0: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps0: Option<f64>,
        #[arg(long)]
        eps1: Option<f64>,
    },
    /// Decode many corrupted codewords and tabulate the results.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// The received word as a 0/1 string, or @FILE to read it from a file.
    #[arg(long)]
    word: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: f64,
    /// Defaults to the inner code's distance.
    #[arg(long)]
    d0: Option<usize>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    /// HardSearch budget per unit of n + (right vertices) * d; 0 disables it.
    #[arg(long, default_value_t = expander_codes::decode::DEFAULT_BUDGET_FACTOR)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
enum TruthArg {
    Random,
    Zero,
}

#[derive(Args)]
struct SweepArgs {
    /// A code manifest.
    #[arg(long, conflicts_with = "generate")]
    code: Option<PathBuf>,
    /// Generate the code instead: C,D,N,GRAPH_SEED,INNER.
    #[arg(long)]
    generate: Option<String>,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    d0: Option<usize>,
    /// Comma-separated list, or LO..HI or LO..HI:STEP (inclusive).
    #[arg(long)]
    weights: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = DecoderArg::Det)]
    decoder: DecoderArg,
    #[arg(long, value_enum, default_value_t = TruthArg::Random)]
    truth: TruthArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Record wall time per trial (makes the report non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output path stem; writes STEM.csv and STEM.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Decode(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DecodeFailure | Error::NoAcceptableBranch | Error::SearchBudgetExhausted(_) | Error::Abort(_) => {
                Failure::Decode(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd, cli.json) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Decode(msg)) => {
            eprintln!("decode failed: {msg}");
            ExitCode::from(EXIT_DECODE)
        }
    }
}

/// Prints a line, ignoring a closed stdout.
fn say(line: impl Display) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn emit(json: bool, value: serde_json::Value, text: impl FnOnce() -> String) {
    if json {
        say(value);
    } else {
        say(text());
    }
}

fn read_word(arg: &str) -> Result<BitVector, Error> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    text.trim().parse()
}

fn parse_weights(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidParameter(format!("bad weight list {s:?}"));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(|w| w.trim().parse().map_err(|_| bad())).collect()
}

fn parse_generate(s: &str) -> Result<CodeSource, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::InvalidParameter(format!("expected C,D,N,GRAPH_SEED,INNER, got {s:?}"));
    let [c, d, n, seed, inner] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(CodeSource::Generate {
        c: c.parse().map_err(|_| bad())?,
        d: d.parse().map_err(|_| bad())?,
        n: n.parse().map_err(|_| bad())?,
        graph_seed: seed.parse().map_err(|_| bad())?,
        inner: inner.to_string(),
    })
}

fn params_for(code: &TannerCode, a: &DecodeArgs) -> Result<expander_codes::decode::DecoderParams, Error> {
    let g = code.graph();
    derive_params_with(
        ExpanderSpec {
            c: g.c(),
            d: g.d(),
            alpha: a.alpha,
            delta: a.delta,
            d0: a.d0.unwrap_or_else(|| code.inner().distance()),
            n: code.len(),
        },
        ParamOverrides {
            eps0: a.eps0,
            eps1: a.eps1,
        },
    )
}

fn write_parent(path: &Path) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn run(cmd: Cmd, json: bool) -> CmdResult {
    match cmd {
        Cmd::GenGraph { c, d, n, seed, out } => {
            let g = BipartiteGraph::random_biregular(c, d, n, seed)?;
            write_parent(&out)?;
            g.write_file(&out)?;
            emit(json, json!({"path": out, "c": c, "d": d, "n_left": n, "n_right": g.n_right()}), || {
                format!("wrote {} ({n} left, {} right)", out.display(), g.n_right())
            });
        }
        Cmd::VerifyExpansion {
            graph,
            alpha,
            delta,
            samples,
            seed,
        } => {
            let g = BipartiteGraph::read_file(&graph)?;
            let rep = match samples {
                Some(s) => sample_expansion(&g, alpha, delta, s, seed)?,
                None => verify_expansion(&g, alpha, delta)?,
            };
            let violated = rep.witness.is_some();
            emit(json, serde_json::to_value(&rep).expect("serializes"), || match &rep.witness {
                Some(w) => format!("verified=false witness={w:?}"),
                None if rep.verified => format!("verified=true subsets={}", rep.subsets_checked),
                None => format!("verified=false (sampled, no violation in {} subsets)", rep.subsets_checked),
            });
            if violated {
                return Err(Failure::Validation("expansion violated".into()));
            }
        }
        Cmd::LowerboundGraph {
            d,
            d0,
            n,
            alpha,
            seed,
            out,
        } => {
            let lb = match alpha {
                Some(a) => build_lowerbound_graph_at(d, d0, n, a, seed)?,
                None => build_lowerbound_graph(d, d0, n, seed)?,
            };
            write_parent(&out)?;
            lb.graph.write_file(&out)?;
            let summary = lb.summary();
            emit(json, serde_json::to_value(&summary).expect("serializes"), || {
                format!(
                    "wrote {} (c={}, alpha={}, heavy tail {})",
                    out.display(),
                    lb.c,
                    lb.alpha,
                    lb.heavy_tail_word()
                )
            });
        }
        Cmd::BuildCode {
            graph,
            inner,
            out_dir,
            stem,
        } => {
            let code = TannerCode::new(BipartiteGraph::read_file(&graph)?, parse_inner_spec(&inner)?)?;
            std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
            let path = Manifest::save(&code, &out_dir, &stem)?;
            emit(json, json!({"manifest": path, "n": code.len()}), || {
                format!("wrote {}", path.display())
            });
        }
        Cmd::Mindist { code } => {
            let code = Manifest::load(&code)?;
            let k = code.dimension();
            let dist = code.min_distance_bruteforce()?;
            emit(json, json!({"n": code.len(), "dimension": k, "min_distance": dist}), || {
                format!("n={} k={k} d={dist}", code.len())
            });
        }
        Cmd::Encode { code, msg } => {
            let code = Manifest::load(&code)?;
            let x = code.encode(&read_word(&msg)?)?;
            emit(json, json!({"codeword": x.to_string()}), || x.to_string());
        }
        Cmd::Corrupt { word, weight, seed } => {
            let y = corrupt(&read_word(&word)?, weight, seed)?;
            emit(json, json!({"word": y.to_string()}), || y.to_string());
        }
        Cmd::Decode { common } => {
            let code = Manifest::load(&common.code)?;
            let params = params_for(&code, &common)?;
            let x = read_word(&common.word)?;
            let opts = search_options(common.budget);
            let (out, report) = main_decode_with_report(&code, &params, &x, &opts);
            return finish(json, out, report);
        }
        Cmd::DecodeRand {
            common,
            seed,
            eps,
            max_iters,
        } => {
            let code = Manifest::load(&common.code)?;
            let params = params_for(&code, &common)?;
            let mut cfg = match eps {
                Some(e) => RandDecodeConfig::with_eps(&params, e, seed)?,
                None => RandDecodeConfig::from_params(&params, seed)?,
            };
            if let Some(m) = max_iters {
                if m == 0 {
                    return Err(Failure::Validation("--max-iters must be at least 1".into()));
                }
                cfg.max_iters = m;
            }
            let x = read_word(&common.word)?;
            let opts = search_options(common.budget);
            let (out, report) = randomized_decode_with_report(&code, &params, &cfg, &x, None, &opts);
            return finish(json, out, report);
        }
        Cmd::Params {
            c,
            d,
            alpha,
            delta,
            d0,
            n,
            eps0,
            eps1,
        } => {
            let p = derive_params_with(
                ExpanderSpec {
                    c,
                    d,
                    alpha,
                    delta,
                    d0,
                    n,
                },
                ParamOverrides { eps0, eps1 },
            )?;
            if p.outside_guarantee {
                eprintln!("warning: delta * d0 <= 3, outside the decoding guarantee");
            }
            emit(json, serde_json::to_value(&p).expect("serializes"), || {
                format!(
                    "t={} eps0={} eps1={} eps2={:e} eps3={:e} eps4={} gamma={} gamma_n={} s0={} ell={}",
                    p.t,
                    p.eps0,
                    p.eps1,
                    p.eps2,
                    p.eps3,
                    p.eps4,
                    p.gamma,
                    p.gamma * n as f64,
                    p.s0,
                    p.ell
                )
            });
        }
        Cmd::Sweep(a) => {
            let source = match (&a.code, &a.generate) {
                (Some(p), None) => CodeSource::Bundle(p.clone()),
                (None, Some(g)) => parse_generate(g)?,
                _ => return Err(Failure::Validation("give exactly one of --code and --generate".into())),
            };
            let mut cfg = ExperimentConfig::new(source, a.alpha, a.delta);
            cfg.d0 = a.d0;
            cfg.weights = parse_weights(&a.weights)?;
            cfg.trials = a.trials;
            cfg.decoder = match a.decoder {
                DecoderArg::Det => DecoderChoice::Det,
                DecoderArg::Rand => DecoderChoice::Rand,
            };
            cfg.truth = match a.truth {
                TruthArg::Random => TruthMode::Random,
                TruthArg::Zero => TruthMode::Zero,
            };
            cfg.seed = a.seed;
            cfg.eps = a.eps;
            cfg.max_iters = a.max_iters;
            cfg.timing = a.timing;
            cfg.output = a.out.clone();
            let rep = run_sweep(&cfg)?;
            if let Some(out) = &cfg.output {
                write_parent(out)?;
                rep.write(out)?;
            }
            if json {
                say(rep.to_json());
            } else {
                say(format_args!("n={} gamma_n={:.3} decoder={}", rep.n, rep.gamma_n, rep.decoder));
                for &w in &cfg.weights {
                    let (ok, total) = rep.successes(w);
                    say(format_args!("weight {w}: {ok}/{total}"));
                }
            }
        }
    }
    Ok(())
}

fn search_options(budget: u64) -> SearchOptions {
    SearchOptions {
        budget_factor: (budget > 0).then_some(budget),
    }
}

fn finish(
    json: bool,
    out: Result<BitVector, Error>,
    report: expander_codes::decode::DecodeReport,
) -> CmdResult {
    match out {
        Ok(y) => {
            if json {
                let mut v = serde_json::to_value(&report).expect("serializes");
                v["word"] = json!(y.to_string());
                say(v);
            } else {
                say(y);
            }
            Ok(())
        }
        Err(e) => {
            if json {
                say(report.to_json_line());
            }
            Err(e.into())
        }
    }
}
