//! Exact matrix checks of the decategorified relations, one cell per
//! (relation, configuration, parameters).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::braid::{
    a_operator, rickard_t, rickard_t_inv, rotation_r_prime, shifted_t,
};
use crate::kmodel::{Dir, Model, ModelError, Operator};
use crate::laurent::{qbinom, qfactorial, LaurentPoly};
use crate::linalg::Matrix;
use crate::weight::{cartan, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationId {
    /// `E_i F_i - F_i E_i = [<k, alpha_i>]` on `1_k`, every `i` including 0.
    #[serde(rename = "sl2")]
    Sl2,
    /// `E_i F_j = F_j E_i` for `i != j`.
    #[serde(rename = "EiFj-commute")]
    EiFjCommute,
    /// Quantum Serre relations for `<i,j> = -1`, commutation for `<i,j> = 0`.
    #[serde(rename = "serre")]
    Serre,
    /// `X^a = [a]! X^(a)` and `X^(a) X^(b) = [a+b choose a] X^(a+b)`.
    #[serde(rename = "divided-power")]
    DividedPower,
    #[serde(rename = "braid")]
    Braid,
    /// `T_i T_j E_i = E_j T_i T_j` and the `F` version, for `<i,j> = -1`.
    #[serde(rename = "TiTjEi")]
    TiTjEi,
    /// `F_i^(p) T'_i = T'_i E_i^(p) <p(<k,alpha_i> + p)>` for `p <= 2`.
    #[serde(rename = "TE=FT")]
    TeFt,
    /// `(T'_i)^2 = 1` on `1_k` when `k_i = 0` or `k_{i+1} = 0`.
    #[serde(rename = "canonical")]
    Canonical,
    /// `E_i R' = R' E_{i+1}` and `F_i R' = R' F_{i+1}`.
    #[serde(rename = "rotation")]
    Rotation,
    /// `A^(N) A^(-N) = 1 = A^(-N) A^(N)` at the highest weight.
    #[serde(rename = "A-inverse")]
    AInverse,
    /// `T_1^-1 T_0^-1 E_1 T_0 T_1 = E_0` up to one global unit (and for `F`).
    #[serde(rename = "E0def")]
    E0Def,
    /// `T_{n-1}^-1 T_0^-1 E_{n-1} T_0 T_{n-1} = E_0` up to one global unit (and for `F`).
    #[serde(rename = "app1")]
    App1,
    /// `T_0 (T_1 ... T_{n-1} ... T_1)` is diagonal and invertible.
    #[serde(rename = "T0def-diagonal")]
    T0DefDiagonal,
}

impl RelationId {
    pub const ALL: [RelationId; 13] = [
        RelationId::Sl2,
        RelationId::EiFjCommute,
        RelationId::Serre,
        RelationId::DividedPower,
        RelationId::Braid,
        RelationId::TiTjEi,
        RelationId::TeFt,
        RelationId::Canonical,
        RelationId::Rotation,
        RelationId::AInverse,
        RelationId::E0Def,
        RelationId::App1,
        RelationId::T0DefDiagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationId::Sl2 => "sl2",
            RelationId::EiFjCommute => "EiFj-commute",
            RelationId::Serre => "serre",
            RelationId::DividedPower => "divided-power",
            RelationId::Braid => "braid",
            RelationId::TiTjEi => "TiTjEi",
            RelationId::TeFt => "TE=FT",
            RelationId::Canonical => "canonical",
            RelationId::Rotation => "rotation",
            RelationId::AInverse => "A-inverse",
            RelationId::E0Def => "E0def",
            RelationId::App1 => "app1",
            RelationId::T0DefDiagonal => "T0def-diagonal",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        RelationId::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

/// Outcome of one cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub relation: String,
    pub config: String,
    pub params: String,
    pub pass: bool,
    /// Witness on failure, or a recorded unit / note on success.
    pub detail: String,
}

impl CheckResult {
    pub fn key(&self) -> (String, String, String) {
        (self.relation.clone(), self.config.clone(), self.params.clone())
    }
}

struct Cells<'a> {
    model: &'a Model,
    relation: RelationId,
    out: Vec<CheckResult>,
}

impl<'a> Cells<'a> {
    fn push(&mut self, params: String, pass: bool, detail: String) {
        let cfg = self.model.config();
        let mode = if self.model.is_classical() { " q1" } else { "" };
        self.out.push(CheckResult {
            relation: self.relation.name().to_string(),
            config: format!("{cfg}{mode}"),
            params,
            pass,
            detail,
        });
    }

    fn equal(&mut self, params: String, lhs: Result<Operator, ModelError>, rhs: Result<Operator, ModelError>) {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                if l.source != r.source || l.target != r.target {
                    let d = format!("weights differ: {} -> {} vs {} -> {}", l.source, l.target, r.source, r.target);
                    self.push(params, false, d);
                    return;
                }
                match l.matrix.first_difference(&r.matrix) {
                    None => self.push(params, true, String::new()),
                    Some((i, j, d)) => self.push(params, false, format!("entry ({i},{j}) differs by {d}")),
                }
            }
            (Err(e), _) | (_, Err(e)) => self.push(params, false, format!("error: {e}")),
        }
    }
}

fn gen(model: &Model, dir: Dir, i: usize, a: u32, k: &Weight) -> Result<Operator, ModelError> {
    Ok((*model.generator(dir, i, a, k)?).clone())
}

/// Compose a word of operator builders, rightmost first.
fn chain(k: &Weight, steps: &[&dyn Fn(&Weight) -> Result<Operator, ModelError>]) -> Result<Operator, ModelError> {
    let mut it = steps.iter().rev();
    let first = it.next().expect("non-empty chain");
    let mut op = first(k)?;
    for step in it {
        let next = step(&op.target)?;
        op = next.compose(&op)?;
    }
    Ok(op)
}

fn sum(model: &Model, terms: Vec<(LaurentPoly, Operator)>, source: &Weight, target: &Weight) -> Result<Operator, ModelError> {
    crate::kmodel::combine(&terms, source, target, model)
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

fn unordered_pairs(n: usize) -> Vec<(usize, usize)> {
    pairs(n).into_iter().filter(|(i, j)| i < j).collect()
}

/// Run one relation over every weight of the model's configuration.
pub fn check_relation(model: &Model, relation: RelationId) -> Vec<CheckResult> {
    let mut cells = Cells { model, relation, out: Vec::new() };
    let cfg = *model.config();
    let n = cfg.n;
    let weights = cfg.weights();
    match relation {
        RelationId::Sl2 => {
            for k in &weights {
                for i in 0..n {
                    let lhs = chain(k, &[&|w| gen(model, Dir::E, i, 1, w), &|w| gen(model, Dir::F, i, 1, w)]).and_then(|ef| {
                        let fe = chain(k, &[&|w| gen(model, Dir::F, i, 1, w), &|w| gen(model, Dir::E, i, 1, w)])?;
                        Ok(Operator { source: k.clone(), target: k.clone(), matrix: ef.matrix.try_sub(&fe.matrix)? })
                    });
                    let lam = k.pair_root(i);
                    let rhs = model.identity(k).map(|id| id.scale(&model.qint(lam)));
                    cells.equal(format!("i={i} k={k}"), lhs, rhs);
                }
            }
        }
        RelationId::EiFjCommute => {
            for k in &weights {
                for (i, j) in pairs(n) {
                    let lhs = chain(k, &[&|w| gen(model, Dir::E, i, 1, w), &|w| gen(model, Dir::F, j, 1, w)]);
                    let rhs = chain(k, &[&|w| gen(model, Dir::F, j, 1, w), &|w| gen(model, Dir::E, i, 1, w)]);
                    cells.equal(format!("i={i} j={j} k={k}"), lhs, rhs);
                }
            }
        }
        RelationId::Serre => {
            for k in &weights {
                for dir in [Dir::E, Dir::F] {
                    for (i, j) in pairs(n) {
                        let c = cartan(n, i, j);
                        let params = format!("{dir:?} i={i} j={j} k={k}");
                        if c == 0 {
                            if i < j {
                                let lhs = chain(k, &[&|w| gen(model, dir, i, 1, w), &|w| gen(model, dir, j, 1, w)]);
                                let rhs = chain(k, &[&|w| gen(model, dir, j, 1, w), &|w| gen(model, dir, i, 1, w)]);
                                cells.equal(params, lhs, rhs);
                            }
                        } else if c == -1 {
                            let lhs = chain(k, &[&|w| gen(model, dir, i, 1, w), &|w| gen(model, dir, j, 1, w), &|w| gen(model, dir, i, 1, w)]);
                            let rhs = (|| {
                                let a = chain(k, &[&|w| gen(model, dir, i, 2, w), &|w| gen(model, dir, j, 1, w)])?;
                                let b = chain(k, &[&|w| gen(model, dir, j, 1, w), &|w| gen(model, dir, i, 2, w)])?;
                                let (s, t) = (a.source.clone(), a.target.clone());
                                sum(model, vec![(LaurentPoly::one(), a), (LaurentPoly::one(), b)], &s, &t)
                            })();
                            cells.equal(params, lhs, rhs);
                        }
                    }
                }
            }
        }
        RelationId::DividedPower => {
            for k in &weights {
                for dir in [Dir::E, Dir::F] {
                    for i in 0..n {
                        for a in 2..=3u32 {
                            let ones: Vec<Box<dyn Fn(&Weight) -> Result<Operator, ModelError>>> =
                                (0..a).map(|_| Box::new(move |w: &Weight| gen(model, dir, i, 1, w)) as Box<_>).collect();
                            let refs: Vec<&dyn Fn(&Weight) -> Result<Operator, ModelError>> = ones.iter().map(|b| b.as_ref()).collect();
                            let lhs = chain(k, &refs);
                            let rhs = gen(model, dir, i, a, k).map(|op| op.scale(&model.from_v(&qfactorial(a))));
                            cells.equal(format!("{dir:?} i={i} a={a} k={k}"), lhs, rhs);
                        }
                        for (a, b) in [(1u32, 2u32), (2, 1), (2, 2)] {
                            let lhs = chain(k, &[&|w| gen(model, dir, i, a, w), &|w| gen(model, dir, i, b, w)]);
                            let c = model.from_v(&qbinom((a + b) as i64, a as i64).expect("exact binomial"));
                            let rhs = gen(model, dir, i, a + b, k).map(|op| op.scale(&c));
                            cells.equal(format!("{dir:?} i={i} a={a} b={b} k={k}"), lhs, rhs);
                        }
                    }
                }
            }
        }
        RelationId::Braid => {
            for k in &weights {
                for (i, j) in unordered_pairs(n) {
                    let c = cartan(n, i, j);
                    let t = |x: usize| move |w: &Weight| rickard_t(model, x, w).map(|op| (*op).clone());
                    let params = format!("i={i} j={j} k={k}");
                    if c == -1 {
                        let lhs = chain(k, &[&t(i), &t(j), &t(i)]);
                        let rhs = chain(k, &[&t(j), &t(i), &t(j)]);
                        cells.equal(params, lhs, rhs);
                    } else if c == 0 {
                        let lhs = chain(k, &[&t(i), &t(j)]);
                        let rhs = chain(k, &[&t(j), &t(i)]);
                        cells.equal(params, lhs, rhs);
                    }
                }
            }
        }
        RelationId::TiTjEi => {
            for k in &weights {
                for (i, j) in pairs(n) {
                    if cartan(n, i, j) != -1 {
                        continue;
                    }
                    let t = |x: usize| move |w: &Weight| rickard_t(model, x, w).map(|op| (*op).clone());
                    for dir in [Dir::E, Dir::F] {
                        let lhs = chain(k, &[&t(i), &t(j), &|w| gen(model, dir, i, 1, w)]);
                        let rhs = chain(k, &[&|w| gen(model, dir, j, 1, w), &t(i), &t(j)]);
                        cells.equal(format!("{dir:?} i={i} j={j} k={k}"), lhs, rhs);
                    }
                }
            }
        }
        RelationId::TeFt => {
            for k in &weights {
                for i in 0..n {
                    for p in 1..=2u32 {
                        let lhs = chain(k, &[&|w| gen(model, Dir::F, i, p, w), &|w| shifted_t(model, i, w)]);
                        let lam = k.pair_root(i);
                        let unit = model.angle(p as i64 * (lam + p as i64));
                        let rhs = chain(k, &[&|w| shifted_t(model, i, w), &|w| gen(model, Dir::E, i, p, w)]).map(|op| op.scale(&unit));
                        cells.equal(format!("i={i} p={p} k={k}"), lhs, rhs);
                    }
                }
            }
        }
        RelationId::Canonical => {
            for k in &weights {
                for i in 0..n {
                    let (a, b) = if i == 0 { (n, 1) } else { (i, i + 1) };
                    if k.slot(a) != 0 && k.slot(b) != 0 {
                        continue;
                    }
                    let lhs = chain(k, &[&|w| shifted_t(model, i, w), &|w| shifted_t(model, i, w)]);
                    cells.equal(format!("i={i} k={k}"), lhs, model.identity(k));
                }
            }
        }
        RelationId::Rotation => {
            for k in &weights {
                if k.slot(n) != 0 {
                    continue;
                }
                for i in 0..n {
                    let next = (i + 1) % n;
                    for dir in [Dir::E, Dir::F] {
                        let shifted = match dir {
                            Dir::E => k.add_root(next, 1),
                            Dir::F => k.add_root(next, -1),
                        };
                        let zero = !shifted.is_nonzero_object(cfg.level);
                        if !zero && shifted.slot(n) != 0 {
                            continue;
                        }
                        let lhs = chain(k, &[&|w| gen(model, dir, i, 1, w), &|w| rotation_r_prime(model, w)]);
                        let rhs = if zero {
                            lhs.as_ref().map_err(Clone::clone).and_then(|l| model.zero_op(&l.source, &l.target))
                        } else {
                            chain(k, &[&|w| rotation_r_prime(model, w), &|w| gen(model, dir, next, 1, w)])
                        };
                        cells.equal(format!("{dir:?} i={i} k={k}"), lhs, rhs);
                    }
                }
            }
        }
        RelationId::AInverse => {
            let top = cfg.level;
            let a = a_operator(model, top);
            let b = a_operator(model, -top);
            let eta = cfg.eta();
            let (ab, ba) = match (&a, &b) {
                (Ok(a), Ok(b)) => (a.compose(b), b.compose(a)),
                (Err(e), _) | (_, Err(e)) => (Err(e.clone()), Err(e.clone())),
            };
            cells.equal(format!("A({top})A(-{top})"), ab, model.identity(&eta));
            cells.equal(format!("A(-{top})A({top})"), ba, model.identity(&eta));
        }
        RelationId::E0Def | RelationId::App1 => {
            // at n = 2, s_0 and s_1 act alike on weights and the conjugate lands elsewhere
            if n < 3 {
                return cells.out;
            }
            let via = if relation == RelationId::E0Def { 1 } else { n - 1 };
            for dir in [Dir::E, Dir::F] {
                let mut units: Vec<(String, LaurentPoly)> = Vec::new();
                let mut failed = false;
                for k in &weights {
                    let params = format!("{dir:?} via={via} k={k}");
                    let lhs = chain(k, &[
                        &|w| rickard_t_inv(model, via, w),
                        &|w| rickard_t_inv(model, 0, w),
                        &|w| gen(model, dir, via, 1, w),
                        &|w| rickard_t(model, 0, w).map(|op| (*op).clone()),
                        &|w| rickard_t(model, via, w).map(|op| (*op).clone()),
                    ]);
                    let rhs = gen(model, dir, 0, 1, k);
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) => match unit_ratio(&l.matrix, &r.matrix) {
                            Ok(Some(u)) => units.push((params, u)),
                            Ok(None) => {}
                            Err(why) => {
                                failed = true;
                                cells.push(params, false, why);
                            }
                        },
                        (Err(e), _) | (_, Err(e)) => {
                            failed = true;
                            cells.push(params, false, format!("error: {e}"));
                        }
                    }
                }
                let params = format!("{dir:?} via={via} global");
                match units.first() {
                    _ if failed => cells.push(params, false, "per-weight failure".into()),
                    None => cells.push(params, true, "unit: n/a (all zero)".into()),
                    Some((_, u0)) => match units.iter().find(|(_, u)| u != u0) {
                        None => cells.push(params, true, format!("unit: {u0}")),
                        Some((p, u)) => cells.push(params, false, format!("unit {u0} differs from {u} at {p}")),
                    },
                }
            }
        }
        RelationId::T0DefDiagonal => {
            for k in &weights {
                let params = format!("k={k}");
                match t0_composite(model, k) {
                    Ok(op) => {
                        let off = op.matrix.off_diagonal();
                        let invertible = op.matrix.det().ok().and_then(|d| d.as_unit()).is_some();
                        if off.is_empty() && invertible {
                            cells.push(params, true, String::new());
                        } else {
                            let mut why = Vec::new();
                            if let Some(&(i, j)) = off.first() {
                                why.push(format!("{} off-diagonal entries, first ({i},{j}) = {}", off.len(), op.matrix[(i, j)]));
                            }
                            if !invertible {
                                why.push("not invertible".into());
                            }
                            cells.push(params, false, why.join("; "));
                        }
                    }
                    Err(e) => cells.push(params, false, format!("error: {e}")),
                }
            }
        }
    }
    cells.out
}

/// `T_0 (T_1 T_2 ... T_{n-1} ... T_2 T_1) 1_k`
pub fn t0_composite(model: &Model, k: &Weight) -> Result<Operator, ModelError> {
    let n = model.config().n;
    let mut idx: Vec<usize> = vec![0];
    idx.extend(1..n);
    idx.extend((1..n - 1).rev());
    let mut op = model.identity(k)?;
    for &i in idx.iter().rev() {
        let t = rickard_t(model, i, &op.target)?;
        op = t.compose(&op)?;
    }
    Ok(op)
}

/// `u` with `lhs = u * rhs`, required to be a unit. `None` when both sides vanish.
fn unit_ratio(lhs: &Matrix, rhs: &Matrix) -> Result<Option<LaurentPoly>, String> {
    if lhs.shape() != rhs.shape() {
        return Err(format!("shapes differ: {:?} vs {:?}", lhs.shape(), rhs.shape()));
    }
    let Some(pos) = rhs.entries().iter().position(|x| !x.is_zero()) else {
        return if lhs.is_zero() { Ok(None) } else { Err("right side vanishes, left side does not".into()) };
    };
    let u = lhs.entries()[pos].div_exact(&rhs.entries()[pos]).map_err(|_| "ratio is not a polynomial".to_string())?;
    if u.as_unit().is_none() {
        return Err(format!("ratio {u} is not a unit"));
    }
    match lhs.first_difference(&rhs.scale(&u)) {
        None => Ok(Some(u)),
        Some((i, j, d)) => Err(format!("not proportional: entry ({i},{j}) differs by {d} after scaling by {u}")),
    }
}

/// Run a list of relations, cells in a deterministic order.
pub fn run_relations(model: &Model, relations: &[RelationId]) -> Vec<CheckResult> {
    use rayon::prelude::*;
    let mut out: Vec<CheckResult> = relations.par_iter().flat_map_iter(|&r| check_relation(model, r)).collect();
    out.sort_by_key(CheckResult::key);
    out
}
