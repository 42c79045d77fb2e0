//! Exact matrix models of the level-zero action on `⊗ Λ^{k_i}(C^m)` (skew side) and
//! `⊗ Sym^{k_i}(C^m)` (symmetric side).
//!
//! A basis vector is an `n × m` table of occupation counts: row `r` records the subset
//! (skew) or multiset (symmetric) of columns placed in slot `r`. Within a slot, options
//! are listed in lexicographic order of their sorted column lists, and a full basis is
//! the product of the slot orders with slot 1 most significant.
//!
//! `E_i` moves one unit from slot `i` to slot `i+1` (`E_0`: from slot `n` to slot 1);
//! `F_i` is the reverse move. A move of column `c` carries the factor
//! `base · v^(sign · Σ_{c' on one side of c} (x[dst][c'] - x[src][c']))` where `base` is 1
//! on the skew side and `[x[src][c]]_v` on the symmetric side. The side and sign are the
//! [`Convention`]. Matrices are built in `v` and then `v` is sent to the class of `<1>`:
//! `q` on the symmetric side, `-q^-1` on the skew side, or `1` in classical mode.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{qfactorial, qint, LaurentError, LaurentPoly, Side};
use crate::linalg::{LinalgError, Matrix};
use crate::weight::{Weight, WeightError};

pub const BASIS_ORDERING: &str = "slot-major-lex-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Arithmetic(#[from] LaurentError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0} has no matrix realization")]
    UnsupportedFactor(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelConfig {
    pub side: Side,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub level: i64,
}

impl ModelConfig {
    pub fn new(side: Side, n: usize, m: usize, level: i64) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(WeightError::RankTooSmall(n).into());
        }
        if level < 1 {
            return Err(ModelError::ConfigMismatch("N must be positive".into()));
        }
        if m == 0 {
            return Err(ModelError::ConfigMismatch("m must be positive".into()));
        }
        Ok(Self { side, n, m, level })
    }

    pub fn eta(&self) -> Weight {
        Weight::eta(self.n, self.level)
    }

    /// Every weight with a nonzero object.
    pub fn weights(&self) -> Vec<Weight> {
        Weight::all_objects(self.n, self.level)
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} m={} N={}", self.side.name(), self.n, self.m, self.level)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hand {
    #[serde(rename = "left")]
    Left,
    #[serde(rename = "right")]
    Right,
}

/// Which columns count towards the exponent of a move, and with which sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRule {
    pub hand: Hand,
    pub sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Convention {
    pub e: MoveRule,
    pub f: MoveRule,
}

impl Convention {
    pub const DEFAULT: Convention = Convention {
        e: MoveRule { hand: Hand::Left, sign: 1 },
        f: MoveRule { hand: Hand::Right, sign: 1 },
    };

    /// All sixteen (hand, sign) choices for `E` and `F`, in a fixed order.
    pub fn candidates() -> Vec<Convention> {
        let rules: Vec<MoveRule> = [Hand::Left, Hand::Right]
            .into_iter()
            .flat_map(|hand| [1i8, -1].into_iter().map(move |sign| MoveRule { hand, sign }))
            .collect();
        let mut out = Vec::new();
        for &e in &rules {
            for &f in &rules {
                out.push(Convention { e, f });
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let r = |m: MoveRule| {
            format!("{}{}", if m.hand == Hand::Left { "L" } else { "R" }, if m.sign > 0 { "+" } else { "-" })
        };
        format!("E:{} F:{}", r(self.e), r(self.f))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    E,
    F,
}

/// A linear map `K(source) -> K(target)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Operator {
    pub source: Weight,
    pub target: Weight,
    pub matrix: Matrix,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {:?}", self.source, self.target, self.matrix)
    }
}

impl Operator {
    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0 || self.matrix.cols() == 0
    }

    pub fn compose(&self, right: &Operator) -> Result<Operator, ModelError> {
        if right.target != self.source {
            return Err(ModelError::ConfigMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, right.source, right.target
            )));
        }
        Ok(Operator {
            source: right.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.try_mul(&right.matrix)?,
        })
    }

    pub fn scale(&self, c: &LaurentPoly) -> Operator {
        Operator { source: self.source.clone(), target: self.target.clone(), matrix: self.matrix.scale(c) }
    }

    pub fn inverse(&self) -> Result<Operator, ModelError> {
        Ok(Operator { source: self.target.clone(), target: self.source.clone(), matrix: self.matrix.inverse()? })
    }

    /// Plain-text dump: a header followed by the matrix rows in canonical polynomial form.
    pub fn dump(&self, model: &Model) -> String {
        let cfg = model.config();
        let mut out = String::new();
        out.push_str(&format!("side: {}\n", cfg.side.name()));
        out.push_str(&format!("n: {}\nm: {}\nN: {}\n", cfg.n, cfg.m, cfg.level));
        out.push_str(&format!("source: {}\ntarget: {}\n", self.source, self.target));
        out.push_str(&format!("basis: {BASIS_ORDERING}\n"));
        out.push_str(&format!("mode: {}\n", if model.is_classical() { "q1" } else { "generic" }));
        out.push_str(&format!("shape: {}x{}\n", self.matrix.rows(), self.matrix.cols()));
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&format!("[{}]\n", row.join(", ")));
        }
        out
    }
}

/// Basis of one weight space: occupation tables, flattened row-major.
#[derive(Debug, Clone)]
pub struct Basis {
    pub weight: Weight,
    vectors: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    pub fn position(&self, v: &[u8]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Column lists (1-based) of each slot of basis vector `idx`.
    pub fn describe(&self, idx: usize, m: usize) -> Vec<Vec<usize>> {
        self.vectors[idx]
            .chunks(m)
            .map(|row| row.iter().enumerate().flat_map(|(c, &x)| std::iter::repeat(c + 1).take(x as usize)).collect())
            .collect()
    }
}

/// Sorted column lists of size `k` over `m` columns, in lexicographic order, as counts.
fn slot_options(side: Side, m: usize, k: usize) -> Vec<Vec<u8>> {
    fn go(side: Side, m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            let mut counts = vec![0u8; m];
            for &c in cur.iter() {
                counts[c] += 1;
            }
            out.push(counts);
            return;
        }
        for c in start..m {
            cur.push(c);
            let next = if side == Side::Skew { c + 1 } else { c };
            go(side, m, k, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(side, m, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn enumerate_basis(cfg: &ModelConfig, k: &Weight) -> Result<Basis, ModelError> {
    if k.n() != cfg.n {
        return Err(ModelError::ConfigMismatch(format!("weight {k} has length {}, expected {}", k.n(), cfg.n)));
    }
    let mut vectors: Vec<Vec<u8>> = vec![Vec::new()];
    if !k.is_nonzero_object(cfg.level) {
        vectors.clear();
    }
    for &ki in k.entries() {
        if vectors.is_empty() {
            break;
        }
        let opts = slot_options(cfg.side, cfg.m, ki.max(0) as usize);
        let mut next = Vec::with_capacity(vectors.len() * opts.len());
        for v in &vectors {
            for o in &opts {
                let mut w = v.clone();
                w.extend_from_slice(o);
                next.push(w);
            }
        }
        vectors = next;
    }
    let index = vectors.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    Ok(Basis { weight: k.clone(), vectors, index })
}

type GenKey = (Dir, usize, u32, Weight);

/// A matrix model for one configuration and convention.
pub struct Model {
    cfg: ModelConfig,
    conv: Convention,
    classical: bool,
    bases: RwLock<HashMap<Weight, Arc<Basis>>>,
    gens: RwLock<HashMap<GenKey, Arc<Operator>>>,
    braids: RwLock<HashMap<(usize, Weight), Arc<Operator>>>,
}

impl Model {
    pub fn new(cfg: ModelConfig, conv: Convention) -> Self {
        Self {
            cfg,
            conv,
            classical: false,
            bases: RwLock::default(),
            gens: RwLock::default(),
            braids: RwLock::default(),
        }
    }

    /// The `q = 1` specialization: every exponent vanishes and `<1>` has class 1.
    pub fn classical(cfg: ModelConfig) -> Self {
        Self { classical: true, ..Self::new(cfg, Convention::DEFAULT) }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn convention(&self) -> Convention {
        self.conv
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    pub fn side(&self) -> Side {
        self.cfg.side
    }

    /// Class of `<a>`.
    pub fn angle(&self, a: i64) -> LaurentPoly {
        if self.classical {
            LaurentPoly::one()
        } else {
            self.cfg.side.angle(a)
        }
    }

    /// Class of `{d}` (internal grading shift).
    pub fn internal(&self, d: i64) -> LaurentPoly {
        if self.classical {
            let x = self.cfg.side.classical_point();
            LaurentPoly::constant(x.pow(d.unsigned_abs() as u32))
        } else {
            LaurentPoly::q_pow(d)
        }
    }

    /// Class of `[c]` (cohomological shift).
    pub fn cohom(&self, c: i64) -> LaurentPoly {
        LaurentPoly::constant(if c.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    /// `[a]` evaluated at the class of `<1>`.
    pub fn qint(&self, a: i64) -> LaurentPoly {
        self.from_v(&qint(a))
    }

    /// Send a polynomial in `v` to the ring the matrices live in.
    pub fn from_v(&self, p: &LaurentPoly) -> LaurentPoly {
        if self.classical {
            LaurentPoly::constant(p.eval_int(1).expect("evaluation at 1"))
        } else {
            match self.cfg.side {
                Side::Symmetric => p.clone(),
                Side::Skew => p.substitute(-1, -1),
            }
        }
    }

    pub fn basis(&self, k: &Weight) -> Result<Arc<Basis>, ModelError> {
        if let Some(b) = self.bases.read().unwrap().get(k) {
            return Ok(b.clone());
        }
        let b = Arc::new(enumerate_basis(&self.cfg, k)?);
        self.bases.write().unwrap().insert(k.clone(), b.clone());
        Ok(b)
    }

    pub fn dim(&self, k: &Weight) -> Result<usize, ModelError> {
        Ok(self.basis(k)?.len())
    }

    pub fn identity(&self, k: &Weight) -> Result<Operator, ModelError> {
        let d = self.dim(k)?;
        Ok(Operator { source: k.clone(), target: k.clone(), matrix: Matrix::identity(d) })
    }

    pub fn zero_op(&self, source: &Weight, target: &Weight) -> Result<Operator, ModelError> {
        Ok(Operator {
            source: source.clone(),
            target: target.clone(),
            matrix: Matrix::zeros(self.dim(target)?, self.dim(source)?),
        })
    }

    fn check_index(&self, i: usize) -> Result<(), ModelError> {
        if i >= self.cfg.n {
            return Err(WeightError::IndexOutOfRange { index: i, n: self.cfg.n }.into());
        }
        Ok(())
    }

    /// Divided power `E_i^(a) 1_k` or `F_i^(a) 1_k`, for any `i` in `0..n`.
    pub fn generator(&self, dir: Dir, i: usize, a: u32, k: &Weight) -> Result<Arc<Operator>, ModelError> {
        self.check_index(i)?;
        if k.n() != self.cfg.n {
            return Err(ModelError::ConfigMismatch(format!("weight {k} does not match n = {}", self.cfg.n)));
        }
        let key = (dir, i, a, k.clone());
        if let Some(op) = self.gens.read().unwrap().get(&key) {
            return Ok(op.clone());
        }
        let op = Arc::new(self.build_generator(dir, i, a, k)?);
        self.gens.write().unwrap().insert(key, op.clone());
        Ok(op)
    }

    fn build_generator(&self, dir: Dir, i: usize, a: u32, k: &Weight) -> Result<Operator, ModelError> {
        let n = self.cfg.n;
        let m = self.cfg.m;
        let times = a as i64;
        let target = match dir {
            Dir::E => k.add_root(i, times),
            Dir::F => k.add_root(i, -times),
        };
        let src_basis = self.basis(k)?;
        let dst_basis = self.basis(&target)?;
        let mut matrix = Matrix::zeros(dst_basis.len(), src_basis.len());
        if src_basis.is_empty() || dst_basis.is_empty() {
            return Ok(Operator { source: k.clone(), target, matrix });
        }
        // slots are 0-based here; E_i for i > 0 moves slot i-1 -> i, E_0 moves n-1 -> 0
        let (e_src, e_dst) = if i == 0 { (n - 1, 0) } else { (i - 1, i) };
        let (src, dst, rule) = match dir {
            Dir::E => (e_src, e_dst, self.conv.e),
            Dir::F => (e_dst, e_src, self.conv.f),
        };
        let norm = qfactorial(a);
        for (col, v) in src_basis.vectors().iter().enumerate() {
            let mut layer: HashMap<Vec<u8>, LaurentPoly> = HashMap::from([(v.clone(), LaurentPoly::one())]);
            for _ in 0..a {
                let mut next: HashMap<Vec<u8>, LaurentPoly> = HashMap::new();
                for (x, coeff) in &layer {
                    for c in 0..m {
                        let from = x[src * m + c];
                        if from == 0 {
                            continue;
                        }
                        if self.cfg.side == Side::Skew && x[dst * m + c] != 0 {
                            continue;
                        }
                        let range: Vec<usize> = match rule.hand {
                            Hand::Left => (0..c).collect(),
                            Hand::Right => (c + 1..m).collect(),
                        };
                        let h: i64 = range.iter().map(|&c2| x[dst * m + c2] as i64 - x[src * m + c2] as i64).sum();
                        let mut w = if self.classical {
                            LaurentPoly::one()
                        } else {
                            LaurentPoly::q_pow(rule.sign as i64 * h)
                        };
                        if self.cfg.side == Side::Symmetric {
                            w = &w * &qint(from as i64);
                        }
                        let mut y = x.clone();
                        y[src * m + c] -= 1;
                        y[dst * m + c] += 1;
                        let slot = next.entry(y).or_default();
                        *slot += &(coeff * &w);
                    }
                }
                next.retain(|_, c| !c.is_zero());
                layer = next;
            }
            for (y, coeff) in layer {
                let row = dst_basis
                    .position(&y)
                    .ok_or_else(|| ModelError::ConfigMismatch("move left the target basis".into()))?;
                let val = if self.classical {
                    let c = coeff.eval_int(1).expect("evaluation at 1");
                    let d = norm.eval_int(1).expect("evaluation at 1");
                    if &c % &d != num_bigint::BigInt::from(0) {
                        return Err(LaurentError::InexactDivision.into());
                    }
                    LaurentPoly::constant(c / d)
                } else {
                    self.from_v(&coeff.div_exact(&norm)?)
                };
                matrix[(row, col)] = val;
            }
        }
        Ok(Operator { source: k.clone(), target, matrix })
    }

    pub(crate) fn cached_braid(&self, key: &(usize, Weight)) -> Option<Arc<Operator>> {
        self.braids.read().unwrap().get(key).cloned()
    }

    pub(crate) fn store_braid(&self, key: (usize, Weight), op: Arc<Operator>) {
        self.braids.write().unwrap().insert(key, op);
    }
}

/// Sum of scaled operators with a common source and target.
pub fn combine(terms: &[(LaurentPoly, Operator)], source: &Weight, target: &Weight, model: &Model) -> Result<Operator, ModelError> {
    let mut acc = model.zero_op(source, target)?;
    for (c, op) in terms {
        if op.source != *source || op.target != *target {
            return Err(ModelError::ConfigMismatch(format!(
                "term {} -> {} in a sum over {} -> {}",
                op.source, op.target, source, target
            )));
        }
        acc.matrix.add_assign_scaled(&op.matrix, c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn basis_enumeration() {
        let cfg = ModelConfig::new(Side::Skew, 2, 2, 1).unwrap();
        let cfg2 = ModelConfig { level: 2, ..cfg };
        let b = enumerate_basis(&cfg2, &w("(1,1)")).unwrap();
        let listed: Vec<_> = (0..b.len()).map(|i| b.describe(i, 2)).collect();
        assert_eq!(listed, vec![vec![vec![1], vec![1]], vec![vec![1], vec![2]], vec![vec![2], vec![1]], vec![vec![2], vec![2]]]);
        let cfg3 = ModelConfig { level: 3, ..cfg };
        assert!(enumerate_basis(&cfg3, &w("(3,0)")).unwrap().is_empty());
        let sym = ModelConfig { side: Side::Symmetric, level: 2, ..cfg };
        assert_eq!(enumerate_basis(&sym, &w("(0,2)")).unwrap().len(), 3);
        assert!(enumerate_basis(&cfg, &w("(1,1,0)")).is_err());
    }

    #[test]
    fn single_column_sl2() {
        let cfg = ModelConfig::new(Side::Skew, 2, 1, 1).unwrap();
        let model = Model::new(cfg, Convention::DEFAULT);
        let k = w("(1,0)");
        let e = model.generator(Dir::E, 1, 1, &k).unwrap();
        let f = model.generator(Dir::F, 1, 1, &e.target).unwrap();
        assert!(f.compose(&e).unwrap().matrix.is_identity());
        let f0 = model.generator(Dir::F, 1, 1, &k).unwrap();
        assert!(f0.is_empty());
    }

    #[test]
    fn divided_powers_vanish_past_m() {
        let cfg = ModelConfig { side: Side::Skew, n: 4, m: 2, level: 3 };
        let model = Model::new(cfg, Convention::DEFAULT);
        let op = model.generator(Dir::E, 1, 3, &w("(3,0,0,0)")).unwrap();
        assert!(op.matrix.is_zero());
    }
}
