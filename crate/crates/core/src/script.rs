//! Proof scripts: line-oriented lists of rule applications replayed against a word.
//!
//! ```text
//! # comment
//! n: 3
//! start: E0 F0 1_(2,0,0)
//! expect: F0 E0 1_(2,0,0) + (q + q^-1) 1_(2,0,0)
//! step 1: E0-def @ 0
//! step 2: sl2 @ 0.2
//! ```
//!
//! A position is a factor index into the only summand, or `summand.index` once a step has
//! produced several summands. Summands are listed in order, and a rule's outputs replace
//! the summand it was applied to.

use std::fmt;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::rules::{apply_rule, RuleSpec};
use crate::word::{parse_for, Word};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read script: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub index: usize,
    pub spec: RuleSpec,
    pub summand: Option<usize>,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub n: usize,
    pub start: Option<Word>,
    pub expect: Option<String>,
    pub steps: Vec<ScriptStep>,
}

fn parse_position(text: &str) -> Option<(Option<usize>, usize)> {
    match text.split_once('.') {
        Some((s, p)) => Some((Some(s.trim().parse().ok()?), p.trim().parse().ok()?)),
        None => Some((None, text.trim().parse().ok()?)),
    }
}

impl ProofScript {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut n = None;
        let mut start_text = None;
        let mut expect = None;
        let mut steps = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let err = |message: String| ScriptError::Parse { line, message };
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once(':').ok_or_else(|| err(format!("expected `key: value`, got `{body}`")))?;
            let value = value.trim();
            match key.trim() {
                "n" => n = Some(value.parse::<usize>().map_err(|_| err(format!("bad rank `{value}`")))?),
                "start" => start_text = Some((line, value.to_string())),
                "expect" => expect = Some(value.to_string()),
                k if k.starts_with("step") => {
                    let index: usize = k["step".len()..].trim().parse().map_err(|_| err(format!("bad step number in `{k}`")))?;
                    if index != steps.len() + 1 {
                        return Err(err(format!("step {index} out of order, expected {}", steps.len() + 1)));
                    }
                    // rule names may contain ':' (`split:2`), so split on '@' first
                    let rest = body.split_once(':').unwrap().1;
                    let (rule, pos) = rest.split_once('@').ok_or_else(|| err("expected `rule @ position`".into()))?;
                    let spec: RuleSpec = rule.trim().parse().map_err(|e| err(format!("{e}")))?;
                    let (summand, position) = parse_position(pos).ok_or_else(|| err(format!("bad position `{}`", pos.trim())))?;
                    steps.push(ScriptStep { index, spec, summand, position });
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let n = n.ok_or(ScriptError::Parse { line: 0, message: "missing `n:` header".into() })?;
        let start = match start_text {
            Some((line, t)) => Some(parse_for(&t, n).map_err(|e| ScriptError::Parse { line, message: e.to_string() })?),
            None => None,
        };
        Ok(ProofScript { n, start, expect, steps })
    }

    pub fn load(path: &Path) -> Result<Self, ScriptError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Summand list in script notation.
pub fn show_summands(s: &[(LaurentPoly, Word)]) -> String {
    if s.is_empty() {
        return "0".into();
    }
    s.iter()
        .map(|(m, w)| if m.is_one() { w.to_string() } else { format!("({m}) {w}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub rule: String,
    pub position: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exact: bool,
    pub result: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub start: String,
    pub steps: Vec<StepReport>,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    #[serde(rename = "final")]
    pub final_summands: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    pub matches_expect: bool,
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        for s in &self.steps {
            match &s.error {
                None => writeln!(f, "step {}: {} @ {} -> {}", s.index, s.rule, s.position, s.result)?,
                Some(e) => writeln!(f, "step {}: {} @ {} FAILED: {e}", s.index, s.rule, s.position)?,
            }
        }
        writeln!(f, "final: {}", self.final_summands)?;
        if let Some(e) = &self.expected {
            writeln!(f, "expect: {e} ({})", if self.matches_expect { "match" } else { "MISMATCH" })?;
        }
        write!(f, "{}", if self.success { "ok" } else { "FAILED" })
    }
}

/// Replay `script` from `start` (or the script's own start word). Failure is reported,
/// never raised: the first failing step halts the replay.
pub fn replay(script: &ProofScript, start: Option<&Word>) -> ReplayReport {
    let start = start.cloned().or_else(|| script.start.clone()).unwrap_or_else(|| Word::new(vec![]));
    let mut state: Vec<(LaurentPoly, Word)> = vec![(LaurentPoly::one(), start.clone())];
    let mut steps = Vec::new();
    let mut failed_step = None;
    for st in &script.steps {
        let position = match st.summand {
            Some(s) => format!("{s}.{}", st.position),
            None => st.position.to_string(),
        };
        let target = match st.summand {
            Some(s) => Ok(s),
            None if state.len() == 1 => Ok(0),
            None => Err(format!("{} summands; give the position as summand.index", state.len())),
        };
        let outcome = target.and_then(|s| {
            let (m, w) = state.get(s).cloned().ok_or_else(|| format!("no summand {s}"))?;
            let out = apply_rule(&w, &st.spec, st.position, script.n).map_err(|e| e.to_string())?;
            Ok((s, m, out))
        });
        match outcome {
            Ok((s, m, out)) => {
                let repl: Vec<_> = out.summands.into_iter().map(|(c, w)| (&m * &c, w)).collect();
                state.splice(s..s + 1, repl);
                steps.push(StepReport {
                    index: st.index,
                    rule: st.spec.to_string(),
                    position,
                    ok: true,
                    error: None,
                    exact: out.exact,
                    result: show_summands(&state),
                });
            }
            Err(e) => {
                steps.push(StepReport {
                    index: st.index,
                    rule: st.spec.to_string(),
                    position,
                    ok: false,
                    error: Some(e),
                    exact: false,
                    result: show_summands(&state),
                });
                failed_step = Some(st.index);
                break;
            }
        }
    }
    let final_summands = show_summands(&state);
    let matches_expect = script.expect.as_ref().is_none_or(|e| *e == final_summands);
    ReplayReport {
        start: start.to_string(),
        steps,
        success: failed_step.is_none() && matches_expect,
        failed_step,
        final_summands,
        expected: script.expect.clone(),
        matches_expect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_script_keeps_word() {
        let s = ProofScript::parse("n: 3\n").unwrap();
        let w = parse_for("F1 F2 1_(0,0,2)", 3).unwrap();
        let r = replay(&s, Some(&w));
        assert!(r.success && r.steps.is_empty());
        assert_eq!(r.final_summands, "F1 F2 1_(0,0,2)");
    }

    #[test]
    fn failure_stops_replay() {
        let s = ProofScript::parse("n: 3\nstart: F1 F2\nstep 1: merge @ 0\nstep 2: commute @ 0\n").unwrap();
        let r = replay(&s, None);
        assert!(!r.success);
        assert_eq!(r.failed_step, Some(1));
        assert_eq!(r.steps.len(), 1);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(ProofScript::parse("start: E0\n"), Err(ScriptError::Parse { line: 0, .. })));
        assert!(matches!(ProofScript::parse("n: 3\nstep 2: cancel @ 0\n"), Err(ScriptError::Parse { line: 2, .. })));
        assert!(matches!(ProofScript::parse("n: 3\nstep 1: bogus @ 0\n"), Err(ScriptError::Parse { line: 2, .. })));
        let s = ProofScript::parse("n: 3 # rank\nstep 1: split:2 @ 1.0\n").unwrap();
        assert_eq!(s.steps[0].summand, Some(1));
    }
}
