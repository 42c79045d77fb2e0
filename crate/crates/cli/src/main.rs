use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qaff::bootstrap::{run_bootstrap, BootstrapError, BootstrapOptions, ConventionLedger};
use qaff::corpus::{generate, CorpusSpec, DEFAULT_SEED};
use qaff::eval::evaluate;
use qaff::kmodel::{Convention, Model, ModelConfig};
use qaff::reduce::{reduce_to_a, span_membership, verify_exact_steps, ReduceError};
use qaff::relations::RelationId;
use qaff::script::{replay, ProofScript};
use qaff::suite::{run_suite, SuiteConfig};
use qaff::word::{parse_for, weight_flow, Flow};
use qaff::{Side, Weight};

/// Exit codes. Stable: scripts and tests depend on them.
mod code {
    pub const FAILURE: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const ZERO_OBJECT: u8 = 3;
    pub const NOT_ETA_ENDO: u8 = 4;
    pub const NO_CONVENTION: u8 = 5;
    pub const AMBIGUOUS: u8 = 6;
}

#[derive(Parser)]
#[command(name = "qaff", version, about = "Exact K-theoretic models of the level-zero quantum affine gl_n action")]
#[command(after_help = "Exit codes: 0 ok, 1 failure, 2 bad input or config, 3 zero object, \
4 not an endomorphism of the highest weight, 5 no convention found, 6 ambiguous convention")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a word as a matrix and print its dump.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// Source weight; defaults to the word's idempotent.
        #[arg(short = 'k', allow_hyphen_values = true)]
        source: Option<String>,
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce an endomorphism of the highest weight to products of loop-arounds.
    Reduce {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'N')]
        level: i64,
        /// Columns of the model used by `--verify`.
        #[arg(short = 'm', default_value_t = 2)]
        m: usize,
        /// Side used by `--verify`; both sides when omitted.
        #[arg(long)]
        side: Option<Side>,
        #[arg(long)]
        q1: bool,
        /// Check exact steps and span membership in the matrix model.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        ledger: Option<PathBuf>,
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a relation sweep and write a JSON-lines report.
    Suite {
        /// JSON suite configuration; the acceptance sweep when omitted.
        config: Option<PathBuf>,
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long)]
        q1: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select the exponent convention and write the ledger.
    Bootstrap {
        #[arg(long)]
        q1: bool,
        /// Extra relation every surviving convention must pass (repeatable).
        #[arg(long)]
        require: Vec<RelationId>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the basis of one weight space.
    DumpBasis {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short = 'k', allow_hyphen_values = true)]
        weight: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce and verify a seeded corpus of random highest-weight endomorphisms.
    Corpus {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest rank; levels run below it.
        #[arg(short = 'n', default_value_t = 3)]
        max_n: usize,
        #[arg(short = 'm', default_value_t = 2)]
        m: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a proof script.
    Replay {
        script: PathBuf,
        /// Start word, overriding the script's `start:` line.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "symmetric")]
    side: Side,
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'm', default_value_t = 2)]
    m: usize,
    #[arg(short = 'N')]
    level: i64,
    /// Specialize to the classical point.
    #[arg(long)]
    q1: bool,
    /// Convention ledger written by `bootstrap`.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

struct Fail(u8, String);

impl Fail {
    fn input(e: impl ToString) -> Self {
        Fail(code::INPUT, e.to_string())
    }
    fn other(e: impl ToString) -> Self {
        Fail(code::FAILURE, e.to_string())
    }
}

type Res = Result<u8, Fail>;

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(Fail::other)?;
            }
            fs::write(p, text).map_err(|e| Fail::other(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn convention(ledger: Option<&Path>) -> Result<Convention, Fail> {
    match ledger {
        None => Ok(Convention::DEFAULT),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Fail::input(format!("{}: {e}", p.display())))?;
            Ok(ConventionLedger::from_json(&text).map_err(Fail::input)?.selected)
        }
    }
}

fn build_model(side: Side, n: usize, m: usize, level: i64, q1: bool, ledger: Option<&Path>) -> Result<Model, Fail> {
    let cfg = ModelConfig::new(side, n, m, level).map_err(Fail::input)?;
    Ok(if q1 { Model::classical(cfg) } else { Model::new(cfg, convention(ledger)?) })
}

impl ModelArgs {
    fn model(&self) -> Result<Model, Fail> {
        build_model(self.side, self.n, self.m, self.level, self.q1, self.ledger.as_deref())
    }
}

fn cmd_eval(args: &ModelArgs, source: Option<&str>, text: &str, out: Option<&Path>) -> Res {
    let word = parse_for(text, args.n).map_err(|e| Fail::input(format!("cannot parse `{text}`: {e}")))?;
    let source: Weight = match source {
        Some(s) => s.parse().map_err(|e| Fail::input(format!("bad weight `{s}`: {e}")))?,
        None => word.source().cloned().ok_or_else(|| Fail::input("word has no idempotent; pass -k"))?,
    };
    if source.n() != args.n {
        return Err(Fail::input(format!("weight {source} has length {}, expected {}", source.n(), args.n)));
    }
    let model = args.model()?;
    match weight_flow(&word, &source, args.level).map_err(Fail::input)? {
        Flow::Zero => {
            println!("zero object");
            return Ok(code::ZERO_OBJECT);
        }
        Flow::Weights(_) => {}
    }
    let op = evaluate(&model, &word, &source).map_err(Fail::other)?;
    emit(out, &op.dump(&model))?;
    Ok(0)
}

#[derive(Serialize)]
struct SideCheck {
    side: Side,
    m: usize,
    mode: &'static str,
    exact_step_failures: Vec<String>,
    span_membership: bool,
}

#[derive(Serialize)]
struct Verification {
    exact_steps: usize,
    checks: Vec<SideCheck>,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_reduce(n: usize, level: i64, m: usize, side: Option<Side>, q1: bool, verify: bool, ledger: Option<&Path>, text: &str, out: Option<&Path>) -> Res {
    let word = parse_for(text, n).map_err(|e| Fail::input(format!("cannot parse `{text}`: {e}")))?;
    let trace = match reduce_to_a(&word, n, level) {
        Ok(t) => t,
        Err(e @ ReduceError::NotEndomorphismOfEta { .. }) => {
            eprintln!("{e}");
            return Ok(code::NOT_ETA_ENDO);
        }
        Err(e) => return Err(Fail::other(e)),
    };
    if !verify {
        emit(out, &trace.to_json())?;
        return Ok(if trace.within_budget { 0 } else { code::FAILURE });
    }
    let sides = side.map(|s| vec![s]).unwrap_or_else(|| vec![Side::Symmetric, Side::Skew]);
    let mut checks = Vec::new();
    for s in sides {
        let model = build_model(s, n, m, level, q1, ledger)?;
        let failures = verify_exact_steps(&model, &trace).map_err(Fail::other)?;
        let span = span_membership(&model, &word, trace.weight_budget).map_err(Fail::other)?;
        checks.push(SideCheck {
            side: s,
            m,
            mode: if q1 { "q1" } else { "generic" },
            exact_step_failures: failures
                .iter()
                .map(|f| format!("step {}: {}: {}", f.path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("."), f.rule, f.detail))
                .collect(),
            span_membership: span,
        });
    }
    let exact_steps = trace.all_steps().iter().filter(|s| s.exact).count();
    let pass = trace.within_budget && checks.iter().all(|c| c.exact_step_failures.is_empty() && c.span_membership);
    let mut doc = serde_json::to_value(&trace).map_err(Fail::other)?;
    doc["verification"] = serde_json::to_value(Verification { exact_steps, checks, pass }).map_err(Fail::other)?;
    let mut text = serde_json::to_string_pretty(&doc).map_err(Fail::other)?;
    text.push('\n');
    emit(out, &text)?;
    Ok(if pass { 0 } else { code::FAILURE })
}

#[derive(Serialize)]
struct CorpusLine {
    n: usize,
    #[serde(rename = "N")]
    level: i64,
    word: String,
    steps: usize,
    finals: Vec<Vec<i64>>,
    within_budget: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

fn cmd_corpus(seed: u64, count: usize, max_n: usize, m: usize, verify: bool, out: Option<&Path>) -> Res {
    let spec = CorpusSpec { count, max_n, ..CorpusSpec::default() };
    if max_n < 2 {
        return Err(Fail::input("corpus needs n >= 2"));
    }
    let mut text = String::new();
    let mut bad = 0;
    for c in generate(seed, &spec) {
        let trace = reduce_to_a(&c.word, c.n, c.level).map_err(|e| Fail::other(format!("{}: {e}", c.word)))?;
        let verified = if verify {
            let mut ok = true;
            for side in [Side::Symmetric, Side::Skew] {
                let model = build_model(side, c.n, m, c.level, false, None)?;
                ok &= verify_exact_steps(&model, &trace).map_err(Fail::other)?.is_empty();
                ok &= span_membership(&model, &c.word, trace.weight_budget).map_err(Fail::other)?;
            }
            Some(ok)
        } else {
            None
        };
        if !trace.within_budget || verified == Some(false) {
            bad += 1;
        }
        let line = CorpusLine {
            n: c.n,
            level: c.level,
            word: c.word.to_string(),
            steps: trace.all_steps().len(),
            finals: trace.final_summands.iter().map(|f| f.a_product.clone()).collect(),
            within_budget: trace.within_budget,
            verified,
        };
        text.push_str(&serde_json::to_string(&line).map_err(Fail::other)?);
        text.push('\n');
    }
    emit(out, &text)?;
    eprintln!("{count} words, {bad} failed");
    Ok(if bad == 0 { 0 } else { code::FAILURE })
}

fn cmd_suite(config: Option<&Path>, ledger: Option<&Path>, q1: bool, workers: Option<usize>, out: Option<&Path>) -> Res {
    let mut cfg = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Fail::input(format!("{}: {e}", p.display())))?;
            SuiteConfig::from_json(&text).map_err(Fail::input)?
        }
        None => SuiteConfig::default(),
    };
    cfg.q1 |= q1;
    if let Some(w) = workers {
        cfg.workers = w;
    }
    let conv = convention(ledger)?;
    let report = run_suite(&cfg, conv).map_err(Fail::input)?;
    let out = out.map(Path::to_path_buf).or_else(|| cfg.output.clone());
    emit(out.as_deref(), &report.to_json_lines())?;
    let failed = report.failures().count();
    eprintln!("{} cells, {} failed", report.cells.len(), failed);
    for f in report.failures().take(20) {
        eprintln!("FAIL {} {} {}: {}", f.relation, f.config, f.params, f.detail);
    }
    Ok(if failed == 0 { 0 } else { code::FAILURE })
}

fn cmd_bootstrap(q1: bool, require: &[RelationId], out: Option<&Path>) -> Res {
    let opts = BootstrapOptions { q1, require: require.to_vec(), ..BootstrapOptions::default() };
    let run = run_bootstrap(&opts).map_err(Fail::other)?;
    match run.select() {
        Ok(ledger) => {
            emit(out, &ledger.to_json())?;
            eprintln!("selected {} ({} equivalent)", ledger.label, ledger.equivalent.len());
            Ok(0)
        }
        Err(e @ BootstrapError::NoConventionFound) => {
            eprintln!("{e}");
            Ok(code::NO_CONVENTION)
        }
        Err(e @ BootstrapError::AmbiguousConvention(_)) => {
            eprintln!("{e}");
            Ok(code::AMBIGUOUS)
        }
        Err(e) => Err(Fail::other(e)),
    }
}

fn cmd_dump_basis(args: &ModelArgs, weight: &str, out: Option<&Path>) -> Res {
    let k: Weight = weight.parse().map_err(|e| Fail::input(format!("bad weight `{weight}`: {e}")))?;
    let model = args.model()?;
    let basis = model.basis(&k).map_err(Fail::input)?;
    let cfg = model.config();
    let mut text = format!("side: {}\nn: {}\nm: {}\nN: {}\nweight: {k}\nbasis: {}\ndim: {}\n", cfg.side.name(), cfg.n, cfg.m, cfg.level, qaff::kmodel::BASIS_ORDERING, basis.len());
    for i in 0..basis.len() {
        let slots: Vec<String> = basis
            .describe(i, cfg.m)
            .iter()
            .map(|cols| format!("{{{}}}", cols.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        text.push_str(&format!("{i}: {}\n", slots.join(" ")));
    }
    emit(out, &text)?;
    Ok(0)
}

fn cmd_replay(path: &Path, start: Option<&str>, json: bool, out: Option<&Path>) -> Res {
    let script = ProofScript::load(path).map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
    let start = match start {
        Some(t) => Some(parse_for(t, script.n).map_err(|e| Fail::input(format!("cannot parse `{t}`: {e}")))?),
        None => None,
    };
    let report = replay(&script, start.as_ref());
    let text = if json {
        let mut s = serde_json::to_string_pretty(&report).map_err(Fail::other)?;
        s.push('\n');
        s
    } else {
        format!("{report}\n")
    };
    emit(out, &text)?;
    Ok(if report.success { 0 } else { code::FAILURE })
}

fn run(cli: Cli) -> Res {
    match &cli.cmd {
        Cmd::Eval { model, source, word, out } => cmd_eval(model, source.as_deref(), word, out.as_deref()),
        Cmd::Reduce { n, level, m, side, q1, verify, ledger, word, out } => {
            cmd_reduce(*n, *level, *m, *side, *q1, *verify, ledger.as_deref(), word, out.as_deref())
        }
        Cmd::Suite { config, ledger, q1, workers, out } => cmd_suite(config.as_deref(), ledger.as_deref(), *q1, *workers, out.as_deref()),
        Cmd::Bootstrap { q1, require, out } => cmd_bootstrap(*q1, require, out.as_deref()),
        Cmd::DumpBasis { model, weight, out } => cmd_dump_basis(model, weight, out.as_deref()),
        Cmd::Corpus { seed, count, max_n, m, verify, out } => cmd_corpus(*seed, *count, *max_n, *m, *verify, out.as_deref()),
        Cmd::Replay { script, start, json, out } => cmd_replay(script, start.as_deref(), *json, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { code::INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(Fail(c, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(c)
        }
    }
}
