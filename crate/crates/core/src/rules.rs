//! Named rewrite rules on words. Applying a rule at a position yields a set of
//! summands with multiplicities in `N[q, q^-1]`; the input word is a direct summand of
//! their sum, and an isomorphism when the outcome is flagged exact.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::kmodel::Dir;
use crate::laurent::{qbinom, qint, LaurentPoly};
use crate::weight::{cartan, Weight};
use crate::word::{Factor, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("{rule} does not match at position {position}: {reason}")]
    PatternMismatch { rule: String, position: usize, reason: String },
    #[error("{rule} at position {position}: weight flow reaches a zero object")]
    WeightFlowZero { rule: String, position: usize },
    #[error("{rule} needs a word ending in an idempotent")]
    MissingSource { rule: String },
}

macro_rules! rules {
    ($($variant:ident => $name:literal, $cite:literal;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum RuleId { $($variant),* }

        impl RuleId {
            pub const ALL: &'static [RuleId] = &[$(RuleId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(RuleId::$variant => $name),* }
            }

            /// Short description of the identity the rule instantiates.
            pub fn cite(self) -> &'static str {
                match self { $(RuleId::$variant => $cite),* }
            }
        }
    };
}

rules! {
    Sl2 => "sl2", "sl2 commutator: E_i F_i 1_k = F_i E_i 1_k + [<k,alpha_i>] 1_k";
    EfCommute => "ef-commute", "E/F commutation of divided powers of one index";
    Commute => "commute", "E_i F_j = F_j E_i for i != j; X_i X_j = X_j X_i for <i,j> = 0";
    Merge => "merge", "divided powers: X^(a) X^(b) = [a+b choose a] X^(a+b)";
    Split => "split", "divided powers: X^(a+b) is a summand of X^(a) X^(b)";
    Sl3 => "sl3", "sl3 web relation: X_i^(a) X_j^(b) X_i^(c) in {X_j^(l) X_i^(a+c) X_j^(b-l)}";
    Absorb => "absorb", "E_{n-1}^(l) X 1_eta = A^(-N) F_0^(N) ... F_{n-2}^(N) F_{n-1}^(N-l) X 1_eta";
    AInverse => "A-inverse", "A^(-N) A^(N) 1_eta = 1_eta";
    UnitFe => "unit-FE", "1_k is a summand of F_j E_j 1_k when <k,alpha_j> < 0";
    HwRegroup => "hw-regroup", "highest weight regrouping of F_{n-1}^(a_{n-1}) against F_{n-2}^(a_{n-2})";
    E0Def => "E0-def", "E_0 = T_1^-1 T_0^-1 E_1 T_0 T_1";
    F0Def => "F0-def", "F_0 = T_1^-1 T_0^-1 F_1 T_0 T_1";
    FoldE0 => "fold-E0", "T_1^-1 T_0^-1 E_1 T_0 T_1 = E_0";
    FoldF0 => "fold-F0", "T_1^-1 T_0^-1 F_1 T_0 T_1 = F_0";
    T0Expand => "T0-expand", "T_0 = phi_0^-1 T_1^-1 ... T_{n-1}^-1 ... T_1^-1";
    T0InvExpand => "T0inv-expand", "T_0^-1 = T_1 ... T_{n-1} ... T_1 phi_0";
    Palindrome => "palindrome", "T_1 ... T_{n-1} ... T_1 = T_{n-1} ... T_1 ... T_{n-1}";
    PhiConj => "phi-conj", "phi_0 X_i phi_0^-1 = X_{i,1} for i in {1, n-1}";
    TCommute => "T-commute", "T_i commutes with generators of index j when <i,j> = 0";
    LoopCommute => "loop-commute", "E_{i,1} commutes with F_j and F_{i,-1} with E_j for j != i";
    Braid => "braid", "T_i T_j T_i = T_j T_i T_j for <i,j> = -1";
    BraidConj => "braid-conj", "T_i^-1 T_j T_i = T_j T_i T_j^-1 and its mirror images";
    Cancel => "cancel", "X X^-1 = 1";
    LoopShift => "loop-shift", "T_i T_{i+1}^-1 E_{i,1} T_{i+1} T_i^-1 = E_{i+1,1}";
    LoopUnshift => "loop-unshift", "E_{i+1,1} = T_i T_{i+1}^-1 E_{i,1} T_{i+1} T_i^-1";
    TiTjEi => "TiTjEi", "T_i T_j X_i = X_j T_i T_j for <i,j> = -1";
    TiTjEiRev => "TiTjEi-rev", "X_j T_i T_j = T_i T_j X_i for <i,j> = -1";
    TiTjEiInv => "TiTjEi-inv", "X_i T_j^-1 T_i^-1 = T_j^-1 T_i^-1 X_j for <i,j> = -1";
    TiTjEiInvRev => "TiTjEi-inv-rev", "T_j^-1 T_i^-1 X_j = X_i T_j^-1 T_i^-1 for <i,j> = -1";
    LoopSwap => "loop-swap", "T_i^-1 E_{j,1} T_i = T_j^-1 E_{i,1} T_j for <i,j> = -1";
    ConjDistribute => "conj-distribute", "P A B P^-1 = P A P^-1 P B P^-1";
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule with an optional integer argument, written `name` or `name:arg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    pub rule: RuleId,
    pub arg: Option<u32>,
}

impl RuleSpec {
    pub fn new(rule: RuleId) -> Self {
        RuleSpec { rule, arg: None }
    }

    pub fn with(rule: RuleId, arg: u32) -> Self {
        RuleSpec { rule, arg: Some(arg) }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.arg {
            None => write!(f, "{}", self.rule),
            Some(a) => write!(f, "{}:{a}", self.rule),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = RuleError;
    fn from_str(s: &str) -> Result<Self, RuleError> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<u32>().map_err(|_| RuleError::UnknownRule(s.to_string()))?)),
            None => (s, None),
        };
        let rule = RuleId::ALL.iter().copied().find(|r| r.name() == name).ok_or_else(|| RuleError::UnknownRule(s.to_string()))?;
        Ok(RuleSpec { rule, arg })
    }
}

/// Summands produced by one rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub summands: Vec<(LaurentPoly, Word)>,
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// kernels shared with the reduction engine

/// `E^(a) F^(b) 1_k` (when `first` is `E`) or `F^(b) E^(a) 1_k` (when `first` is `F`), with
/// `lam = <k, alpha_i>`. Returns `(mult, a', b')` for the commuted words
/// `F^(b') E^(a')` resp. `E^(a') F^(b')`, and whether the expansion is an isomorphism.
pub fn ef_commute_terms(first: Dir, a: u32, b: u32, lam: i64) -> (Vec<(LaurentPoly, u32, u32)>, bool) {
    let top = match first {
        Dir::E => a as i64 - b as i64 + lam,
        Dir::F => b as i64 - a as i64 - lam,
    };
    if top < 0 {
        // the opposite expansion has positive coefficients and contains this word once
        return (vec![(LaurentPoly::one(), a, b)], false);
    }
    let terms = (0..=a.min(b))
        .filter_map(|t| {
            let c = qbinom(top, t as i64).expect("binomial");
            (!c.is_zero()).then(|| (c, a - t, b - t))
        })
        .collect();
    (terms, true)
}

/// `X_i^(a) X_j^(b) X_i^(c)` with `<i,j> = -1` as `(mult, l)` for `X_j^(l) X_i^(a+c) X_j^(b-l)`.
pub fn sl3_terms(a: u32, b: u32, c: u32) -> (Vec<(LaurentPoly, u32)>, bool) {
    if b == 1 {
        let s = (a + c - 1) as i64;
        let t0 = qbinom(s, c as i64).expect("binomial");
        let t1 = qbinom(s, a as i64).expect("binomial");
        (vec![(t0, 0), (t1, 1)], true)
    } else {
        ((0..=b).map(|l| (LaurentPoly::one(), l)).collect(), false)
    }
}

pub fn merge_coefficient(a: u32, b: u32) -> LaurentPoly {
    qbinom((a + b) as i64, a as i64).expect("binomial")
}

// ---------------------------------------------------------------------------

struct Ctx<'a> {
    rule: RuleId,
    pos: usize,
    word: &'a Word,
}

impl Ctx<'_> {
    fn mismatch(&self, reason: impl Into<String>) -> RuleError {
        RuleError::PatternMismatch { rule: self.rule.name().into(), position: self.pos, reason: reason.into() }
    }

    fn get(&self, off: usize) -> Result<&Factor, RuleError> {
        self.word.factors.get(self.pos + off).ok_or_else(|| self.mismatch("word too short"))
    }

    /// Weights to the left of each factor position (index `p` sees `at[p + 1]` on its right).
    fn weights(&self) -> Result<Vec<Weight>, RuleError> {
        let source = self.word.source().ok_or(RuleError::MissingSource { rule: self.rule.name().into() })?;
        let at = self.word.weights_from(source).ok_or_else(|| self.mismatch("idempotent mismatch"))?;
        let level = source.total();
        if at.iter().any(|w| !w.is_nonzero_object(level)) {
            return Err(RuleError::WeightFlowZero { rule: self.rule.name().into(), position: self.pos });
        }
        Ok(at)
    }

    fn replace(&self, len: usize, with: Vec<Factor>) -> Word {
        let mut f = self.word.factors[..self.pos].to_vec();
        f.extend(with);
        f.extend_from_slice(&self.word.factors[self.pos + len..]);
        Word { factors: f }
    }

    fn single(&self, len: usize, with: Vec<Factor>) -> Outcome {
        Outcome { summands: vec![(LaurentPoly::one(), self.replace(len, with))], exact: true }
    }
}

fn gen_of(f: &Factor) -> Option<(Dir, usize, u32)> {
    match *f {
        Factor::E { i, power } => Some((Dir::E, i, power)),
        Factor::F { i, power } => Some((Dir::F, i, power)),
        _ => None,
    }
}

fn make(dir: Dir, i: usize, power: u32) -> Option<Factor> {
    (power > 0).then(|| match dir {
        Dir::E => Factor::E { i, power },
        Dir::F => Factor::F { i, power },
    })
}

fn t_of(f: &Factor) -> Option<(usize, bool)> {
    match *f {
        Factor::T { i, prime: false, inverse } => Some((i, inverse)),
        _ => None,
    }
}

fn tt(i: usize, inverse: bool) -> Factor {
    Factor::T { i, prime: false, inverse }
}

fn phi0(inverse: bool) -> Factor {
    Factor::Phi { i: 0, prime: false, inverse }
}

/// `T_1 T_2 ... T_{n-1} ... T_2 T_1` indices.
fn palindrome_low(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..n).collect();
    v.extend((1..n - 1).rev());
    v
}

/// `T_{n-1} ... T_1 ... T_{n-1}` indices.
fn palindrome_high(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..n).rev().collect();
    v.extend(2..n);
    v
}

/// Index pair commutation for the generators the engine can swap.
fn commuting(n: usize, x: &Factor, y: &Factor) -> Option<bool> {
    let (dx, i, _) = gen_of(x)?;
    let (dy, j, _) = gen_of(y)?;
    Some(if dx != dy { i != j } else { i != j && cartan(n, i, j) == 0 })
}

fn loop_letter(f: &Factor) -> Option<(Dir, usize)> {
    match *f {
        Factor::ELoop { i } => Some((Dir::E, i)),
        Factor::FLoop { i } => Some((Dir::F, i)),
        _ => None,
    }
}

fn loop_factor(dir: Dir, i: usize) -> Factor {
    match dir {
        Dir::E => Factor::ELoop { i },
        Dir::F => Factor::FLoop { i },
    }
}

/// Apply `spec` to `w` at factor position `pos` (0 is the leftmost factor), for rank `n`.
pub fn apply_rule(w: &Word, spec: &RuleSpec, pos: usize, n: usize) -> Result<Outcome, RuleError> {
    let cx = Ctx { rule: spec.rule, pos, word: w };
    if pos >= w.len() && spec.rule != RuleId::UnitFe {
        return Err(cx.mismatch("position past the end of the word"));
    }
    match spec.rule {
        RuleId::Sl2 | RuleId::EfCommute => {
            let (d1, i, a1) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            let (d2, j, a2) = gen_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            if d1 == d2 || i != j {
                return Err(cx.mismatch("expected E_i F_i or F_i E_i"));
            }
            if spec.rule == RuleId::Sl2 && (a1 != 1 || a2 != 1) {
                return Err(cx.mismatch("sl2 needs single powers"));
            }
            let at = cx.weights()?;
            let lam = at[pos + 2].pair_root(i);
            let (a, b) = if d1 == Dir::E { (a1, a2) } else { (a2, a1) };
            let (terms, exact) = ef_commute_terms(d1, a, b, lam);
            let summands = terms
                .into_iter()
                .map(|(c, a2, b2)| {
                    let pair = if d1 == Dir::E { [make(Dir::F, i, b2), make(Dir::E, i, a2)] } else { [make(Dir::E, i, a2), make(Dir::F, i, b2)] };
                    (c, cx.replace(2, pair.into_iter().flatten().collect()))
                })
                .collect();
            Ok(Outcome { summands, exact })
        }
        RuleId::Commute => {
            let (x, y) = (cx.get(0)?, cx.get(1)?);
            match commuting(n, x, y) {
                Some(true) => Ok(cx.single(2, vec![y.clone(), x.clone()])),
                _ => Err(cx.mismatch("factors do not commute")),
            }
        }
        RuleId::Merge => {
            let (d1, i, a) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            let (d2, j, b) = gen_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            if d1 != d2 || i != j {
                return Err(cx.mismatch("expected two powers of one generator"));
            }
            Ok(Outcome {
                summands: vec![(merge_coefficient(a, b), cx.replace(2, vec![make(d1, i, a + b).unwrap()]))],
                exact: true,
            })
        }
        RuleId::Split => {
            let (d, i, p) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            let a = spec.arg.ok_or_else(|| cx.mismatch("split needs an argument"))?;
            if a == 0 || a >= p {
                return Err(cx.mismatch(format!("cannot split power {p} at {a}")));
            }
            let out = cx.replace(1, vec![make(d, i, a).unwrap(), make(d, i, p - a).unwrap()]);
            Ok(Outcome { summands: vec![(LaurentPoly::one(), out)], exact: false })
        }
        RuleId::Sl3 => {
            let (d1, i, a) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            let (d2, j, b) = gen_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            let (d3, i2, c) = gen_of(cx.get(2)?).ok_or_else(|| cx.mismatch("expected E or F"))?;
            if d1 != d2 || d2 != d3 || i != i2 || cartan(n, i, j) != -1 {
                return Err(cx.mismatch("expected X_i X_j X_i with <i,j> = -1"));
            }
            let (terms, exact) = sl3_terms(a, b, c);
            let summands = terms
                .into_iter()
                .map(|(m, l)| {
                    let f = [make(d1, j, l), make(d1, i, a + c), make(d1, j, b - l)];
                    (m, cx.replace(3, f.into_iter().flatten().collect()))
                })
                .collect();
            Ok(Outcome { summands, exact })
        }
        RuleId::Absorb => {
            let (d, i, l) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected E"))?;
            if d != Dir::E || i != n - 1 {
                return Err(cx.mismatch(format!("expected E_{}", n - 1)));
            }
            let at = cx.weights()?;
            let level = at.last().unwrap().total();
            if at[pos] != Weight::eta(n, level) {
                return Err(cx.mismatch("E_{n-1} must land on the highest weight"));
            }
            let big = level as u32;
            let mut f: Vec<Factor> = (0..n).rev().map(|t| Factor::e(t, big)).collect();
            f.extend((0..n - 1).map(|t| Factor::f(t, big)));
            f.extend(make(Dir::F, n - 1, big - l));
            Ok(cx.single(1, f))
        }
        RuleId::AInverse => {
            let at = cx.weights()?;
            let level = at.last().unwrap().total();
            let big = level as u32;
            let mut pat: Vec<Factor> = (0..n).rev().map(|t| Factor::e(t, big)).collect();
            pat.extend((0..n).map(|t| Factor::f(t, big)));
            for (k, p) in pat.iter().enumerate() {
                if cx.get(k)? != p {
                    return Err(cx.mismatch("expected A^(-N) A^(N)"));
                }
            }
            let eta = Weight::eta(n, level);
            if at[pos] != eta || at[pos + 2 * n] != eta {
                return Err(cx.mismatch("A^(-N) A^(N) must sit at the highest weight"));
            }
            Ok(cx.single(2 * n, vec![]))
        }
        RuleId::UnitFe => {
            let j = spec.arg.ok_or_else(|| cx.mismatch("unit-FE needs the index"))? as usize;
            if j >= n || pos > w.len() {
                return Err(cx.mismatch("bad index or position"));
            }
            let at = cx.weights()?;
            if at[pos].pair_root(j) >= 0 {
                return Err(cx.mismatch(format!("<{},alpha_{j}> is not negative", at[pos])));
            }
            let mut f = w.factors[..pos].to_vec();
            f.extend([Factor::f(j, 1), Factor::e(j, 1)]);
            f.extend_from_slice(&w.factors[pos..]);
            Ok(Outcome { summands: vec![(LaurentPoly::one(), Word { factors: f })], exact: false })
        }
        RuleId::HwRegroup => {
            if n < 3 {
                return Err(cx.mismatch("needs n >= 3"));
            }
            let mut a = Vec::new();
            for (t, want) in (1..n).enumerate() {
                match gen_of(cx.get(t)?) {
                    Some((Dir::F, i, p)) if i == want => a.push(p),
                    _ => return Err(cx.mismatch("expected F_1 ... F_{n-1}")),
                }
            }
            let at = cx.weights()?;
            let level = at.last().unwrap().total();
            if at[pos + n - 1] != Weight::eta(n, level) {
                return Err(cx.mismatch("pattern must act on the highest weight"));
            }
            let (hi, lo) = (a[n - 2], a[n - 3]);
            if hi <= lo {
                return Err(cx.mismatch("needs a_{n-1} > a_{n-2}"));
            }
            let mut f = vec![Factor::f(n - 1, hi - lo)];
            f.extend((1..n - 1).map(|t| Factor::f(t, a[t - 1])));
            f.push(Factor::f(n - 1, lo));
            Ok(cx.single(n - 1, f))
        }
        // at n = 2, s_0 = s_1 and the conjugate does not move weights like X_0
        RuleId::E0Def | RuleId::F0Def | RuleId::FoldE0 | RuleId::FoldF0 if n < 3 => Err(cx.mismatch("needs n >= 3")),
        RuleId::E0Def | RuleId::F0Def => {
            let (want, x) = if spec.rule == RuleId::E0Def {
                (Factor::e(0, 1), Factor::e(1, 1))
            } else {
                (Factor::f(0, 1), Factor::f(1, 1))
            };
            if *cx.get(0)? != want {
                return Err(cx.mismatch(format!("expected {want}")));
            }
            Ok(cx.single(1, vec![tt(1, true), tt(0, true), x, tt(0, false), tt(1, false)]))
        }
        RuleId::FoldE0 | RuleId::FoldF0 => {
            let (x, out) = if spec.rule == RuleId::FoldE0 {
                (Factor::e(1, 1), Factor::e(0, 1))
            } else {
                (Factor::f(1, 1), Factor::f(0, 1))
            };
            let pat = [tt(1, true), tt(0, true), x, tt(0, false), tt(1, false)];
            for (k, p) in pat.iter().enumerate() {
                if cx.get(k)? != p {
                    return Err(cx.mismatch(format!("expected {}", Word::new(pat.to_vec()))));
                }
            }
            Ok(cx.single(5, vec![out]))
        }
        RuleId::T0Expand | RuleId::T0InvExpand => {
            let inverse = spec.rule == RuleId::T0InvExpand;
            if *cx.get(0)? != tt(0, inverse) {
                return Err(cx.mismatch(format!("expected {}", tt(0, inverse))));
            }
            let body: Vec<Factor> = palindrome_low(n).into_iter().map(|i| tt(i, !inverse)).collect();
            let f = if inverse {
                body.into_iter().chain([phi0(false)]).collect()
            } else {
                [phi0(true)].into_iter().chain(body).collect()
            };
            Ok(cx.single(1, f))
        }
        RuleId::Palindrome => {
            let (lo, hi) = (palindrome_low(n), palindrome_high(n));
            let len = lo.len();
            let mut idx = Vec::new();
            let mut inv = None;
            for k in 0..len {
                let (i, v) = t_of(cx.get(k)?).ok_or_else(|| cx.mismatch("expected T factors"))?;
                if *inv.get_or_insert(v) != v {
                    return Err(cx.mismatch("mixed inverses"));
                }
                idx.push(i);
            }
            let to = if idx == lo {
                hi
            } else if idx == hi {
                lo
            } else {
                return Err(cx.mismatch("not a palindrome of simple braids"));
            };
            Ok(cx.single(len, to.into_iter().map(|i| tt(i, inv.unwrap())).collect()))
        }
        RuleId::PhiConj => {
            if *cx.get(0)? != phi0(false) || *cx.get(2)? != phi0(true) {
                return Err(cx.mismatch("expected phi0 X phi0^-1"));
            }
            match gen_of(cx.get(1)?) {
                Some((d, i, 1)) if n >= 3 && (i == 1 || i == n - 1) => Ok(cx.single(3, vec![loop_factor(d, i)])),
                _ => Err(cx.mismatch("expected E_i or F_i with i in {1, n-1}")),
            }
        }
        RuleId::TCommute => {
            let (x, y) = (cx.get(0)?, cx.get(1)?);
            let ok = |t: &Factor, o: &Factor| -> bool {
                let Some((i, _)) = t_of(t) else { return false };
                if let Some((j, _)) = t_of(o) {
                    return i != j && cartan(n, i, j) == 0;
                }
                if let Some((_, j, _)) = gen_of(o) {
                    return i != j && cartan(n, i, j) == 0;
                }
                if let Some((_, j)) = loop_letter(o) {
                    return i != 0 && i.abs_diff(j) >= 2;
                }
                false
            };
            if ok(x, y) || ok(y, x) {
                Ok(cx.single(2, vec![y.clone(), x.clone()]))
            } else {
                Err(cx.mismatch("no commuting T pair"))
            }
        }
        RuleId::LoopCommute => {
            let (x, y) = (cx.get(0)?, cx.get(1)?);
            let ok = |l: &Factor, o: &Factor| match (loop_letter(l), gen_of(o)) {
                (Some((dl, i)), Some((dg, j, _))) => dl != dg && i != j && j != 0,
                _ => false,
            };
            if ok(x, y) || ok(y, x) {
                Ok(cx.single(2, vec![y.clone(), x.clone()]))
            } else {
                Err(cx.mismatch("expected a loop generator next to an opposite generator of another index"))
            }
        }
        RuleId::Braid => {
            let (i, v1) = t_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected T"))?;
            let (j, v2) = t_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected T"))?;
            let (k, v3) = t_of(cx.get(2)?).ok_or_else(|| cx.mismatch("expected T"))?;
            if i != k || v1 != v2 || v2 != v3 || cartan(n, i, j) != -1 {
                return Err(cx.mismatch("expected T_i T_j T_i with <i,j> = -1"));
            }
            Ok(cx.single(3, vec![tt(j, v1), tt(i, v1), tt(j, v1)]))
        }
        RuleId::BraidConj => {
            let (i, v1) = t_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected T"))?;
            let (j, e) = t_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected T"))?;
            let (k, v3) = t_of(cx.get(2)?).ok_or_else(|| cx.mismatch("expected T"))?;
            if i != k || v1 == v3 || cartan(n, i, j) != -1 {
                return Err(cx.mismatch("expected T_i^-e T_j T_i^e with <i,j> = -1"));
            }
            // T_i^-1 T_j^e T_i = T_j T_i^e T_j^-1 and T_i T_j^e T_i^-1 = T_j^-1 T_i^e T_j
            Ok(cx.single(3, vec![tt(j, !v1), tt(i, e), tt(j, v1)]))
        }
        RuleId::Cancel => {
            let (x, y) = (cx.get(0)?, cx.get(1)?);
            if x.is_shift() || x.inverse().as_ref() != Some(y) {
                return Err(cx.mismatch("expected X X^-1"));
            }
            Ok(cx.single(2, vec![]))
        }
        RuleId::LoopShift => {
            let (d, i1) = loop_letter(cx.get(2)?).ok_or_else(|| cx.mismatch("expected a loop generator in the middle"))?;
            let i = i1;
            let pat = [tt(i, false), tt(i + 1, true), loop_factor(d, i), tt(i + 1, false), tt(i, true)];
            for (k, p) in pat.iter().enumerate() {
                if cx.get(k)? != p {
                    return Err(cx.mismatch(format!("expected {}", Word::new(pat.to_vec()))));
                }
            }
            if i + 1 >= n {
                return Err(cx.mismatch("index out of range"));
            }
            Ok(cx.single(5, vec![loop_factor(d, i + 1)]))
        }
        RuleId::LoopUnshift => {
            let (d, i1) = loop_letter(cx.get(0)?).ok_or_else(|| cx.mismatch("expected a loop generator"))?;
            if i1 < 2 {
                return Err(cx.mismatch("needs index at least 2"));
            }
            let i = i1 - 1;
            Ok(cx.single(1, vec![tt(i, false), tt(i + 1, true), loop_factor(d, i), tt(i + 1, false), tt(i, true)]))
        }
        RuleId::TiTjEi => {
            let (i, false) = t_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected T_i"))? else {
                return Err(cx.mismatch("expected T_i"));
            };
            let (j, false) = t_of(cx.get(1)?).ok_or_else(|| cx.mismatch("expected T_j"))? else {
                return Err(cx.mismatch("expected T_j"));
            };
            match gen_of(cx.get(2)?) {
                Some((d, x, 1)) if x == i && cartan(n, i, j) == -1 => Ok(cx.single(3, vec![make(d, j, 1).unwrap(), tt(i, false), tt(j, false)])),
                _ => Err(cx.mismatch("expected T_i T_j X_i with <i,j> = -1")),
            }
        }
        RuleId::TiTjEiRev => {
            let (d, j, p) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected X_j"))?;
            match (t_of(cx.get(1)?), t_of(cx.get(2)?)) {
                (Some((i, false)), Some((j2, false))) if j2 == j && p == 1 && cartan(n, i, j) == -1 => {
                    Ok(cx.single(3, vec![tt(i, false), tt(j, false), make(d, i, 1).unwrap()]))
                }
                _ => Err(cx.mismatch("expected X_j T_i T_j with <i,j> = -1")),
            }
        }
        RuleId::TiTjEiInv => {
            let (d, i, p) = gen_of(cx.get(0)?).ok_or_else(|| cx.mismatch("expected X_i"))?;
            match (t_of(cx.get(1)?), t_of(cx.get(2)?)) {
                (Some((j, true)), Some((i2, true))) if i2 == i && p == 1 && cartan(n, i, j) == -1 => {
                    Ok(cx.single(3, vec![tt(j, true), tt(i, true), make(d, j, 1).unwrap()]))
                }
                _ => Err(cx.mismatch("expected X_i T_j^-1 T_i^-1 with <i,j> = -1")),
            }
        }
        RuleId::TiTjEiInvRev => {
            match (t_of(cx.get(0)?), t_of(cx.get(1)?), gen_of(cx.get(2)?)) {
                (Some((j, true)), Some((i, true)), Some((d, x, 1))) if x == j && cartan(n, i, j) == -1 => {
                    Ok(cx.single(3, vec![make(d, i, 1).unwrap(), tt(j, true), tt(i, true)]))
                }
                _ => Err(cx.mismatch("expected T_j^-1 T_i^-1 X_j with <i,j> = -1")),
            }
        }
        RuleId::LoopSwap => {
            match (t_of(cx.get(0)?), loop_letter(cx.get(1)?), t_of(cx.get(2)?)) {
                (Some((i, true)), Some((d, j)), Some((i2, false))) if i2 == i && i != 0 && cartan(n, i, j) == -1 => {
                    Ok(cx.single(3, vec![tt(j, true), loop_factor(d, i), tt(j, false)]))
                }
                _ => Err(cx.mismatch("expected T_i^-1 X_{j,1} T_i with <i,j> = -1")),
            }
        }
        RuleId::ConjDistribute => {
            let l = spec.arg.ok_or_else(|| cx.mismatch("conj-distribute needs the conjugator length"))? as usize;
            if l == 0 {
                return Err(cx.mismatch("empty conjugator"));
            }
            let p: Vec<Factor> = (0..l).map(|k| cx.get(k).cloned()).collect::<Result<_, _>>()?;
            let a = cx.get(l)?.clone();
            let b = cx.get(l + 1)?.clone();
            let pinv: Vec<Factor> = p.iter().rev().map(|f| f.inverse().ok_or_else(|| cx.mismatch("conjugator not invertible"))).collect::<Result<_, _>>()?;
            for (k, want) in pinv.iter().enumerate() {
                if cx.get(l + 2 + k)? != want {
                    return Err(cx.mismatch("expected P A B P^-1"));
                }
            }
            let mut f = p.clone();
            f.push(a);
            f.extend(pinv.iter().cloned());
            f.extend(p);
            f.push(b);
            f.extend(pinv);
            Ok(cx.single(2 * l + 2, f))
        }
    }
}

/// `[lam]` as a multiplicity: used when a rule produces `lam` copies of the identity.
pub fn unit_multiplicity(lam: i64) -> LaurentPoly {
    qint(lam)
}
