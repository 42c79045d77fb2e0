//! Convention selection: run the relation suite for every candidate exponent
//! convention, keep the survivors, and identify survivors that give isomorphic actions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kmodel::{Convention, Dir, Model, ModelConfig, ModelError};
use crate::laurent::{LaurentPoly, Side};
use crate::relations::{check_relation, RelationId};

pub const LEDGER_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error("no candidate convention passes the selection suite")]
    NoConventionFound,
    #[error("ambiguous convention, surviving classes: {}", .0.iter().map(|c| c.join(" = ")).collect::<Vec<_>>().join("; "))]
    AmbiguousConvention(Vec<Vec<String>>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed ledger: {0}")]
    Ledger(String),
}

#[derive(Clone, Debug)]
pub struct BootstrapOptions {
    /// `(n, m, N)` triples of the selection suite, run on both sides.
    pub configs: Vec<(usize, usize, i64)>,
    pub relations: Vec<RelationId>,
    /// Extra relations every survivor must also pass.
    pub require: Vec<RelationId>,
    /// Evaluate the selection suite at the classical point.
    pub q1: bool,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            configs: vec![(2, 2, 2), (3, 2, 2)],
            relations: RelationId::ALL.into_iter().filter(|&r| r != RelationId::T0DefDiagonal).collect(),
            require: Vec::new(),
            q1: false,
        }
    }
}

/// Passed and total cell counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEvidence {
    pub label: String,
    pub convention: Convention,
    pub relations: BTreeMap<String, Tally>,
    pub survives: bool,
    /// Index of the action class among survivors.
    pub class: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionLedger {
    pub version: u32,
    pub selected: Convention,
    pub label: String,
    /// Survivors giving the same action as the selected one.
    pub equivalent: Vec<String>,
    pub configs: Vec<String>,
    pub mode: String,
    /// Rotation weight `e(B)`; the constant zero function passes.
    pub rotation_weight: String,
    pub candidates: Vec<CandidateEvidence>,
}

impl ConventionLedger {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ledger serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, BootstrapError> {
        let ledger: ConventionLedger = serde_json::from_str(text).map_err(|e| BootstrapError::Ledger(e.to_string()))?;
        if ledger.version != LEDGER_VERSION {
            return Err(BootstrapError::Ledger(format!("unsupported version {}", ledger.version)));
        }
        Ok(ledger)
    }
}

#[derive(Clone, Debug)]
pub struct BootstrapRun {
    pub options: BootstrapOptions,
    pub candidates: Vec<CandidateEvidence>,
    /// Survivor indices grouped by action class, classes ordered by first member.
    pub classes: Vec<Vec<usize>>,
}

fn selection_models(opts: &BootstrapOptions) -> Result<Vec<ModelConfig>, ModelError> {
    let mut out = Vec::new();
    for side in [Side::Symmetric, Side::Skew] {
        for &(n, m, level) in &opts.configs {
            out.push(ModelConfig::new(side, n, m, level)?);
        }
    }
    Ok(out)
}

/// Endomorphism words of length 2 and 4 in the generators, as `(dir, i)` letters.
fn balanced_words(n: usize) -> Vec<Vec<(Dir, usize)>> {
    let letters: Vec<(Dir, usize)> = (0..n).flat_map(|i| [(Dir::E, i), (Dir::F, i)]).collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<(Dir, usize)>> = vec![vec![]];
    while let Some(w) = stack.pop() {
        if !w.is_empty() && w.len() % 2 == 0 {
            let mut net = vec![0i64; n];
            for &(d, i) in &w {
                net[i] += if d == Dir::E { 1 } else { -1 };
            }
            if net.iter().all(|&x| x == 0) {
                out.push(w.clone());
            }
        }
        if w.len() < 4 {
            for &l in &letters {
                let mut v = w.clone();
                v.push(l);
                stack.push(v);
            }
        }
    }
    out.sort();
    out
}

/// Traces of every balanced word at every weight, at generic `q`. Isomorphic
/// actions have equal signatures.
fn trace_signature(cfgs: &[ModelConfig], conv: Convention) -> Result<Vec<LaurentPoly>, ModelError> {
    let mut sig = Vec::new();
    for &cfg in cfgs {
        let model = Model::new(cfg, conv);
        let words = balanced_words(cfg.n);
        for k in cfg.weights() {
            for w in &words {
                let mut op = model.identity(&k)?;
                for &(d, i) in w.iter().rev() {
                    if !op.target.is_nonzero_object(cfg.level) {
                        break;
                    }
                    op = model.generator(d, i, 1, &op.target)?.compose(&op)?;
                }
                let tr = if op.target == k {
                    (0..op.matrix.rows()).fold(LaurentPoly::zero(), |acc, j| acc + op.matrix[(j, j)].clone())
                } else {
                    LaurentPoly::zero()
                };
                sig.push(tr);
            }
        }
    }
    Ok(sig)
}

pub fn run_bootstrap(opts: &BootstrapOptions) -> Result<BootstrapRun, BootstrapError> {
    use rayon::prelude::*;
    let cfgs = selection_models(opts)?;
    let mut relations = opts.relations.clone();
    for r in &opts.require {
        if !relations.contains(r) {
            relations.push(*r);
        }
    }
    let candidates: Vec<CandidateEvidence> = Convention::candidates()
        .into_par_iter()
        .map(|conv| {
            let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
            for &cfg in &cfgs {
                let model = if opts.q1 { Model::classical(cfg) } else { Model::new(cfg, conv) };
                for &r in &relations {
                    let t = tallies.entry(r.name().to_string()).or_default();
                    for cell in check_relation(&model, r) {
                        t.total += 1;
                        t.passed += cell.pass as usize;
                    }
                }
            }
            let survives = tallies.values().all(|t| t.passed == t.total);
            CandidateEvidence { label: conv.label(), convention: conv, relations: tallies, survives, class: None }
        })
        .collect();

    let mut candidates = candidates;
    let mut classes: Vec<(Vec<LaurentPoly>, Vec<usize>)> = Vec::new();
    for (idx, c) in candidates.iter_mut().enumerate() {
        if !c.survives {
            continue;
        }
        let sig = trace_signature(&cfgs, c.convention)?;
        let pos = match classes.iter().position(|(s, _)| *s == sig) {
            Some(p) => p,
            None => {
                classes.push((sig, Vec::new()));
                classes.len() - 1
            }
        };
        classes[pos].1.push(idx);
        c.class = Some(pos);
    }
    Ok(BootstrapRun { options: opts.clone(), candidates, classes: classes.into_iter().map(|(_, v)| v).collect() })
}

impl BootstrapRun {
    pub fn survivors(&self) -> Vec<&CandidateEvidence> {
        self.candidates.iter().filter(|c| c.survives).collect()
    }

    /// Exactly one action class must survive; its first member is selected.
    pub fn select(&self) -> Result<ConventionLedger, BootstrapError> {
        match self.classes.as_slice() {
            [] => Err(BootstrapError::NoConventionFound),
            [only] => {
                let chosen = &self.candidates[only[0]];
                Ok(ConventionLedger {
                    version: LEDGER_VERSION,
                    selected: chosen.convention,
                    label: chosen.label.clone(),
                    equivalent: only.iter().map(|&i| self.candidates[i].label.clone()).collect(),
                    configs: self.options.configs.iter().map(|(n, m, l)| format!("n={n} m={m} N={l}")).collect(),
                    mode: if self.options.q1 { "q1".into() } else { "generic".into() },
                    rotation_weight: "zero".into(),
                    candidates: self.candidates.clone(),
                })
            }
            many => Err(BootstrapError::AmbiguousConvention(
                many.iter().map(|cls| cls.iter().map(|&i| self.candidates[i].label.clone()).collect()).collect(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_words_at_rank_two() {
        let words = balanced_words(2);
        // length 2: EiFi, FiEi for i in {0,1}; length 4: arrangements of two balanced pairs
        assert!(words.iter().filter(|w| w.len() == 2).count() == 4);
        assert!(words.iter().all(|w| w.len() == 2 || w.len() == 4));
    }
}
