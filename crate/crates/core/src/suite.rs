//! Suite configuration, sweep execution and the JSON-lines report.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kmodel::{Convention, Model, ModelConfig};
use crate::laurent::Side;
use crate::weight::validate_rank;
use crate::relations::{check_relation, CheckResult, RelationId};

pub const MAX_N: usize = 6;
pub const MAX_M: usize = 4;
pub const MAX_LEVEL: i64 = 5;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid suite configuration: {0}")]
    Config(String),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub lo: i64,
    pub hi: i64,
}

impl Range {
    pub fn new(lo: i64, hi: i64) -> Self {
        Range { lo, hi }
    }

    fn values(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub sides: Vec<Side>,
    pub n: Range,
    pub m: Range,
    #[serde(rename = "N")]
    pub level: Range,
    pub relations: Vec<RelationId>,
    /// Integer specialization at the classical point, convention-free.
    #[serde(default)]
    pub q1: bool,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for SuiteConfig {
    /// The acceptance sweep: every relation that is asserted to hold.
    fn default() -> Self {
        SuiteConfig {
            sides: vec![Side::Symmetric, Side::Skew],
            n: Range::new(2, 4),
            m: Range::new(2, 3),
            level: Range::new(1, 3),
            relations: RelationId::ALL.into_iter().filter(|&r| r != RelationId::T0DefDiagonal).collect(),
            q1: false,
            workers: 0,
            output: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let check = |name: &str, r: Range, lo: i64, hi: i64| {
            if r.lo > r.hi {
                return Err(SuiteError::Config(format!("{name} range {}..{} is empty", r.lo, r.hi)));
            }
            if r.lo < lo || r.hi > hi {
                return Err(SuiteError::Config(format!("{name} range {}..{} outside {lo}..{hi}", r.lo, r.hi)));
            }
            Ok(())
        };
        check("n", self.n, 2, MAX_N as i64)?;
        check("m", self.m, 1, MAX_M as i64)?;
        check("N", self.level, 1, MAX_LEVEL)?;
        if self.sides.is_empty() {
            return Err(SuiteError::Config("no side selected".into()));
        }
        if self.configs().is_empty() {
            return Err(SuiteError::Config("no (n, N) pair in range satisfies n > N".into()));
        }
        Ok(())
    }

    /// Every model configuration of the sweep; pairs with `n <= N` are left out.
    pub fn configs(&self) -> Vec<ModelConfig> {
        let mut sides = self.sides.clone();
        sides.sort_by_key(|s| s.name());
        sides.dedup();
        let mut out = Vec::new();
        for side in sides {
            for n in self.n.values() {
                for m in self.m.values() {
                    for level in self.level.values() {
                        if validate_rank(n as usize, level).is_err() {
                            continue;
                        }
                        if let Ok(cfg) = ModelConfig::new(side, n as usize, m as usize, level) {
                            out.push(cfg);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self, SuiteError> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| SuiteError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub cells: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.cells.iter().filter(|c| !c.pass)
    }

    /// One JSON object per line, cells sorted by key.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&serde_json::to_string(c).expect("cells serialize"));
            out.push('\n');
        }
        out
    }
}

fn model_for(cfg: ModelConfig, conv: Convention, q1: bool) -> Model {
    if q1 {
        Model::classical(cfg)
    } else {
        Model::new(cfg, conv)
    }
}

/// Run the sweep under `conv`. Cells are independent; the report is sorted by cell key,
/// so its content does not depend on the worker count.
pub fn run_suite(config: &SuiteConfig, conv: Convention) -> Result<SuiteReport, SuiteError> {
    config.validate()?;
    let models: Vec<Model> = config.configs().into_iter().map(|c| model_for(c, conv, config.q1)).collect();
    let jobs: Vec<(usize, RelationId)> =
        (0..models.len()).flat_map(|mi| config.relations.iter().map(move |&r| (mi, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build().map_err(|e| SuiteError::Pool(e.to_string()))?;
    let mut cells: Vec<CheckResult> =
        pool.install(|| jobs.par_iter().flat_map_iter(|&(mi, r)| check_relation(&models[mi], r)).collect());
    cells.sort_by_key(CheckResult::key);
    Ok(SuiteReport { cells })
}
