//! Acceptance run: one line per criterion, nonzero exit if any criterion fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qaff::bootstrap::{run_bootstrap, BootstrapOptions};
use qaff::corpus::{generate, CorpusSpec, DEFAULT_SEED};
use qaff::kmodel::{Convention, Model, ModelConfig};
use qaff::reduce::{reduce_to_a, span_membership, verify_exact_steps};
use qaff::relations::{CheckResult, RelationId};
use qaff::script::{replay, ProofScript};
use qaff::suite::{run_suite, SuiteConfig};
use qaff::tree::{associativity_cases, check_associativity, conservativity_check};
use qaff::Side;

struct Outcome {
    pass: bool,
    note: String,
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sweep(relations: &[RelationId], q1: bool) -> Vec<CheckResult> {
    let cfg = SuiteConfig { relations: relations.to_vec(), q1, ..SuiteConfig::default() };
    run_suite(&cfg, Convention::DEFAULT).expect("sweep config is valid").cells
}

fn summarize(cells: &[CheckResult]) -> Outcome {
    let failed: Vec<_> = cells.iter().filter(|c| !c.pass).collect();
    let mut note = format!("{} cells, {} failed", cells.len(), failed.len());
    if let Some(f) = failed.first() {
        note.push_str(&format!("; first: {} {} {}: {}", f.relation, f.config, f.params, f.detail));
    }
    Outcome { pass: failed.is_empty() && !cells.is_empty(), note }
}

const RELATIONS: [RelationId; 4] = [RelationId::Sl2, RelationId::EiFjCommute, RelationId::Serre, RelationId::DividedPower];
const BRAIDS: [RelationId; 5] =
    [RelationId::Braid, RelationId::TiTjEi, RelationId::TeFt, RelationId::Canonical, RelationId::Rotation];

fn relation_suite() -> Outcome {
    let start = Instant::now();
    let mut o = summarize(&sweep(&RELATIONS, false));
    let t = start.elapsed();
    o.pass &= t < Duration::from_secs(300);
    o.note.push_str(&format!(", {:.1}s", t.as_secs_f64()));
    o
}

fn braid_suite() -> Outcome {
    summarize(&sweep(&BRAIDS, false))
}

fn a_inverse() -> Outcome {
    summarize(&sweep(&[RelationId::AInverse], false))
}

fn conjugation_checks() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;

    let conj = sweep(&[RelationId::E0Def, RelationId::App1], false);
    let units: std::collections::BTreeSet<&str> = conj.iter().map(|c| c.detail.as_str()).collect();
    let o = summarize(&conj);
    pass &= o.pass;
    parts.push(format!("conjugation {} (units {:?})", o.note, units));

    let diag = summarize(&sweep(&[RelationId::T0DefDiagonal], false));
    pass &= diag.pass;
    parts.push(format!("T0 composite diagonal: {}", diag.note));

    let affine: Vec<CheckResult> = sweep(&[RelationId::Sl2, RelationId::EiFjCommute, RelationId::Serre], false)
        .into_iter()
        .filter(|c| c.params.contains("i=0") || c.params.contains("j=0"))
        .collect();
    let o = summarize(&affine);
    pass &= o.pass;
    parts.push(format!("affine relation set {}", o.note));

    let mut replays = 0;
    for n in [3, 4] {
        for stem in ["app1-lhs", "app1-rhs", "cor-app1-ef", "cor-app1-e0f1", "cor-app1-f1e0"] {
            let path = root().join("scripts").join(format!("{stem}-n{n}.txt"));
            let ok = ProofScript::load(&path).map(|s| replay(&s, None).success).unwrap_or(false);
            pass &= ok;
            replays += ok as usize;
        }
    }
    parts.push(format!("{replays}/10 script replays"));
    Outcome { pass, note: parts.join("; ") }
}

fn reduction_engine() -> Outcome {
    let start = Instant::now();
    let corpus = generate(DEFAULT_SEED, &CorpusSpec::default());
    let mut bad = Vec::new();
    let mut steps = 0;
    for c in &corpus {
        let t = match reduce_to_a(&c.word, c.n, c.level) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("{}: {e}", c.word));
                continue;
            }
        };
        steps += t.all_steps().len();
        if !t.within_budget || t.final_summands.is_empty() {
            bad.push(format!("{}: budget or empty result", c.word));
        }
        for side in [Side::Symmetric, Side::Skew] {
            for m in [2, 3] {
                let model = Model::new(ModelConfig::new(side, c.n, m, c.level).unwrap(), Convention::DEFAULT);
                match verify_exact_steps(&model, &t) {
                    Ok(f) if f.is_empty() => {}
                    Ok(f) => bad.push(format!("{} {side:?} m={m}: step {:?} {}", c.word, f[0].path, f[0].rule)),
                    Err(e) => bad.push(format!("{}: {e}", c.word)),
                }
                if !span_membership(&model, &c.word, t.weight_budget).unwrap_or(false) {
                    bad.push(format!("{} {side:?} m={m}: not in the span", c.word));
                }
            }
        }
    }
    let t = start.elapsed();
    let mut note = format!("{} words, {steps} steps, {} problems, {:.1}s", corpus.len(), bad.len(), t.as_secs_f64());
    if let Some(b) = bad.first() {
        note.push_str(&format!("; first: {b}"));
    }
    Outcome { pass: bad.is_empty() && corpus.len() >= 200 && t < Duration::from_secs(600), note }
}

fn classical() -> Outcome {
    let mut all = RELATIONS.to_vec();
    all.extend(BRAIDS);
    all.push(RelationId::AInverse);
    summarize(&sweep(&all, true))
}

fn bootstrap_determinism() -> Outcome {
    let run = run_bootstrap(&BootstrapOptions::default()).expect("bootstrap runs");
    let ledger = match run.select() {
        Ok(l) => l,
        Err(e) => return Outcome { pass: false, note: e.to_string() },
    };
    let again = run_bootstrap(&BootstrapOptions::default()).unwrap().select().unwrap();
    let frozen = fs::read_to_string(root().join("conventions/ledger.json")).unwrap_or_default();
    let same_ledger = ledger.to_json() == again.to_json() && ledger.to_json() == frozen;
    let report = |workers| {
        let cfg = SuiteConfig { workers, ..SuiteConfig::default() };
        run_suite(&cfg, ledger.selected).unwrap().to_json_lines()
    };
    let (a, b, c) = (report(1), report(4), report(0));
    let same_report = a == b && b == c;
    Outcome {
        pass: same_ledger && same_report && run.classes.len() == 1,
        note: format!(
            "selected {} ({} equivalent), ledger {}, reports {}",
            ledger.label,
            ledger.equivalent.len(),
            if same_ledger { "reproduced" } else { "differs" },
            if same_report { "identical across worker counts" } else { "differ" }
        ),
    }
}

fn tree_checks() -> Outcome {
    let (mut ranks, mut cases, mut bad) = (0, 0, Vec::new());
    for side in [Side::Symmetric, Side::Skew] {
        for n in 2..=4 {
            for m in 2..=3 {
                for level in 1..=3i64 {
                    let model = Model::new(ModelConfig::new(side, n, m, level).unwrap(), Convention::DEFAULT);
                    if n as i64 > level {
                        for k in model.config().weights() {
                            match conservativity_check(&model, &k) {
                                Ok(c) if c.full_column_rank => ranks += 1,
                                Ok(c) => bad.push(format!("{} {k}: rank {} of {}", model.config(), c.rank, c.dim)),
                                Err(e) => bad.push(format!("{} {k}: {e}", model.config())),
                            }
                        }
                    }
                    for case in associativity_cases(n, level) {
                        cases += 1;
                        if !check_associativity(&model, &case).unwrap_or(false) {
                            bad.push(format!("{} {}", model.config(), case.left));
                        }
                    }
                }
            }
        }
    }
    let mut note = format!("{ranks} weights of full column rank, {cases} associativity cases, {} failures", bad.len());
    if let Some(b) = bad.first() {
        note.push_str(&format!("; first: {b}"));
    }
    Outcome { pass: bad.is_empty(), note }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("relation suite", relation_suite),
        ("braid suite", braid_suite),
        ("loop-around inverse", a_inverse),
        ("conjugation cross-checks", conjugation_checks),
        ("reduction engine", reduction_engine),
        ("classical q=1 floor", classical),
        ("bootstrap determinism", bootstrap_determinism),
        ("tree checks", tree_checks),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.pass as usize;
        println!("criterion {}: {} {name}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.note);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
