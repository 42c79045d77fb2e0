//! Planar trees and forests: words in E/F divided powers (never index 0) that spread the
//! boxes of a weight onto the middle weight `mu = (0,...,0,1,...,1)`.

use thiserror::Error;

use crate::eval::evaluate;
use crate::kmodel::{Model, ModelError};
use crate::laurent::qint;
use crate::weight::{validate_rank, Weight};
use crate::word::{weight_flow, Factor, Flow, Word};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("trees need n > N, got n = {n}, N = {level}")]
    ConfigMismatch { n: usize, level: i64 },
    #[error("cannot spread {level} boxes over {n} slots")]
    InfeasibleFlow { n: usize, level: i64 },
    #[error("{0} is not a nonzero object")]
    ZeroObject(Weight),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `mu = (0^(n-N), 1^N)`.
pub fn mu(n: usize, level: i64) -> Weight {
    let ones = level.clamp(0, n as i64) as usize;
    let mut e = vec![0; n - ones];
    e.extend(std::iter::repeat_n(1, ones));
    Weight::new(e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestWord {
    pub source: Weight,
    pub target: Weight,
    pub word: Word,
}

impl ForestWord {
    pub fn is_planar(&self) -> bool {
        self.word.factors.iter().all(|f| f.index() != Some(0))
    }
}

/// Moves, in application order, spreading the pile at 1-based slot `s` onto `a..=b`.
fn tree_moves(s: usize, a: usize, b: usize) -> Vec<Factor> {
    let mut ops = Vec::new();
    // right part first: E_t carries the boxes bound for slots beyond t
    for t in s..b {
        let c = (t + 1).max(a)..=b;
        ops.push(Factor::e(t, c.count() as u32));
    }
    for t in (a..s).rev() {
        let c = a..=t.min(b);
        ops.push(Factor::f(t, c.count() as u32));
    }
    ops
}

/// Side-by-side trees from `k` to `mu`, target slots handed out left to right.
pub fn forest_word(k: &Weight) -> Result<ForestWord, TreeError> {
    let n = k.n();
    let level = k.total();
    if !k.is_nonzero_object(level) {
        return Err(TreeError::ZeroObject(k.clone()));
    }
    if level > n as i64 {
        return Err(TreeError::InfeasibleFlow { n, level });
    }
    let target = mu(n, level);
    let mut next = n - level as usize + 1;
    let mut trees = Vec::new();
    for s in 1..=n {
        let c = k.slot(s) as usize;
        if c == 0 {
            continue;
        }
        trees.push(tree_moves(s, next, next + c - 1));
        next += c;
    }
    // the rightmost tree acts first
    let mut factors: Vec<Factor> = trees.into_iter().flat_map(|ops| ops.into_iter().rev()).collect();
    factors.push(Factor::Idem(k.clone()));
    let word = Word::new(factors);
    debug_assert_eq!(word.target(k).as_ref(), Some(&target));
    debug_assert!(matches!(weight_flow(&word, k, level), Ok(Flow::Weights(_))));
    Ok(ForestWord { source: k.clone(), target, word })
}

/// The canonical tree `... F_{n-2}^(N-2) F_{n-1}^(N-1) 1_eta`.
pub fn tree_word(n: usize, level: i64) -> Result<ForestWord, TreeError> {
    validate_rank(n, level).map_err(|_| TreeError::ConfigMismatch { n, level })?;
    forest_word(&Weight::eta(n, level))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conservativity {
    pub rank: usize,
    pub dim: usize,
    pub full_column_rank: bool,
    /// The source weight space is zero.
    pub degenerate: bool,
}

/// Exact rank of the forest map out of `k`.
pub fn conservativity_check(model: &Model, k: &Weight) -> Result<Conservativity, TreeError> {
    let level = model.config().level;
    if !k.is_nonzero_object(level) || model.dim(k)? == 0 {
        return Ok(Conservativity { rank: 0, dim: 0, full_column_rank: true, degenerate: true });
    }
    let f = forest_word(k)?;
    let op = evaluate(model, &f.word, k)?;
    let dim = op.matrix.cols();
    let rank = op.matrix.rank();
    Ok(Conservativity { rank, dim, full_column_rank: rank == dim, degenerate: false })
}

/// One instance of the three-strand associativity: both bracketings of the merge
/// `(1,1,1) -> (3)` at slots `s, s+1, s+2`, and of the split `(3) -> (1,1,1)`.
#[derive(Clone, Debug)]
pub struct AssociativityCase {
    pub source: Weight,
    pub left: Word,
    pub right: Word,
    /// Unnormalized form with multiplicity: `right_raw = mult * left`.
    pub raw: Word,
}

/// Weights of the model carrying `(1,1,1)` or `(0,0,3)` at consecutive slots (1-based `s`).
pub fn associativity_cases(n: usize, level: i64) -> Vec<AssociativityCase> {
    let mut out = Vec::new();
    for k in Weight::all_objects(n, level) {
        for s in 1..n.saturating_sub(1) {
            let (x, y, z) = (k.slot(s), k.slot(s + 1), k.slot(s + 2));
            let idem = Factor::Idem(k.clone());
            if (x, y, z) == (1, 1, 1) {
                // ((12)3): E_s then E_{s+1}^(2); (1(23)): E_{s+1}, E_s, E_{s+1}
                out.push(AssociativityCase {
                    source: k.clone(),
                    left: Word::new(vec![Factor::e(s + 1, 2), Factor::e(s, 1), idem.clone()]),
                    right: Word::new(vec![Factor::e(s + 1, 1), Factor::e(s, 1), Factor::e(s + 1, 1), idem.clone()]),
                    raw: Word::new(vec![Factor::e(s + 1, 1), Factor::e(s + 1, 1), Factor::e(s, 1), idem]),
                });
            } else if (x, y, z) == (0, 0, 3) {
                out.push(AssociativityCase {
                    source: k.clone(),
                    left: Word::new(vec![Factor::f(s, 1), Factor::f(s + 1, 2), idem.clone()]),
                    right: Word::new(vec![Factor::f(s + 1, 1), Factor::f(s, 1), Factor::f(s + 1, 1), idem.clone()]),
                    raw: Word::new(vec![Factor::f(s, 1), Factor::f(s + 1, 1), Factor::f(s + 1, 1), idem]),
                });
            }
        }
    }
    out
}

/// Both bracketings agree, and the unmerged word is `[2]` times the merged one.
pub fn check_associativity(model: &Model, case: &AssociativityCase) -> Result<bool, TreeError> {
    let l = evaluate(model, &case.left, &case.source)?;
    let r = evaluate(model, &case.right, &case.source)?;
    let raw = evaluate(model, &case.raw, &case.source)?;
    let two = model.from_v(&qint(2));
    Ok(l.matrix == r.matrix && raw.matrix == l.matrix.scale(&two))
}
