//! Formal words in the generating 1-morphisms: AST, parser, canonical printer,
//! weight flow and formal adjoints.
//!
//! A word is read the usual way: the rightmost factor acts first, and a trailing
//! `1_(k)` fixes the source weight.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::weight::Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("index {index} out of range for n = {n} at byte {offset}")]
    IndexOutOfRange { index: usize, n: usize, offset: usize },
    #[error("weight of length {found} where n = {n}")]
    DimensionMismatch { n: usize, found: usize },
    #[error("word has no source weight")]
    MissingSource,
    #[error("{0} has no formal adjoint here")]
    UnsupportedFactor(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftKind {
    /// `<a>`, the combined shift `[a]{-a}`.
    Angle,
    /// `[c]`
    Cohom,
    /// `{d}`
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// `E_i^(a)`
    E { i: usize, power: u32 },
    /// `F_i^(a)`
    F { i: usize, power: u32 },
    /// Loop generator `E_{i,1}`; symbolic only.
    ELoop { i: usize },
    /// Loop generator `F_{i,-1}`; symbolic only.
    FLoop { i: usize },
    T { i: usize, prime: bool, inverse: bool },
    /// `phi_i`; symbolic only.
    Phi { i: usize, prime: bool, inverse: bool },
    RPrime { inverse: bool },
    Idem(Weight),
    Shift { kind: ShiftKind, amount: i64 },
}

impl Factor {
    pub fn e(i: usize, power: u32) -> Self {
        Factor::E { i, power }
    }

    pub fn f(i: usize, power: u32) -> Self {
        Factor::F { i, power }
    }

    pub fn t(i: usize) -> Self {
        Factor::T { i, prime: false, inverse: false }
    }

    pub fn t_inv(i: usize) -> Self {
        Factor::T { i, prime: false, inverse: true }
    }

    pub fn angle(a: i64) -> Self {
        Factor::Shift { kind: ShiftKind::Angle, amount: a }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            Factor::E { i, .. }
            | Factor::F { i, .. }
            | Factor::ELoop { i }
            | Factor::FLoop { i }
            | Factor::T { i, .. }
            | Factor::Phi { i, .. } => Some(i),
            _ => None,
        }
    }

    /// Group inverse of an invertible factor.
    pub fn inverse(&self) -> Option<Factor> {
        match self.clone() {
            Factor::T { i, prime, inverse } => Some(Factor::T { i, prime, inverse: !inverse }),
            Factor::Phi { i, prime, inverse } => Some(Factor::Phi { i, prime, inverse: !inverse }),
            Factor::RPrime { inverse } => Some(Factor::RPrime { inverse: !inverse }),
            Factor::Shift { kind, amount } => Some(Factor::Shift { kind, amount: -amount }),
            _ => None,
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, Factor::Shift { .. })
    }

    /// Weight after the factor, given the weight before it. `None` only for an
    /// idempotent that does not match.
    pub fn act(&self, k: &Weight) -> Option<Weight> {
        Some(match self {
            Factor::E { i, power } => k.add_root(*i, *power as i64),
            Factor::F { i, power } => k.add_root(*i, -(*power as i64)),
            Factor::ELoop { i } => k.add_root(*i, 1),
            Factor::FLoop { i } => k.add_root(*i, -1),
            Factor::T { i, .. } => k.reflect(*i),
            Factor::Phi { .. } | Factor::Shift { .. } => k.clone(),
            Factor::RPrime { inverse: false } => k.rotate(),
            Factor::RPrime { inverse: true } => k.rotate_inv(),
            Factor::Idem(w) => {
                if w != k {
                    return None;
                }
                k.clone()
            }
        })
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marks = |prime: bool, inverse: bool| format!("{}{}", if prime { "'" } else { "" }, if inverse { "^-1" } else { "" });
        match self {
            Factor::E { i, power } | Factor::F { i, power } => {
                let letter = if matches!(self, Factor::E { .. }) { 'E' } else { 'F' };
                if *power == 1 {
                    write!(f, "{letter}{i}")
                } else {
                    write!(f, "{letter}{i}^({power})")
                }
            }
            Factor::ELoop { i } => write!(f, "E{i},1"),
            Factor::FLoop { i } => write!(f, "F{i},-1"),
            Factor::T { i, prime, inverse } => write!(f, "T{i}{}", marks(*prime, *inverse)),
            Factor::Phi { i, prime, inverse } => write!(f, "phi{i}{}", marks(*prime, *inverse)),
            Factor::RPrime { inverse } => write!(f, "R'{}", if *inverse { "^-1" } else { "" }),
            Factor::Idem(w) => write!(f, "1_{w}"),
            Factor::Shift { kind, amount } => match kind {
                ShiftKind::Angle => write!(f, "<{amount}>"),
                ShiftKind::Cohom => write!(f, "[{amount}]"),
                ShiftKind::Internal => write!(f, "{{{amount}}}"),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub factors: Vec<Factor>,
}

impl Word {
    pub fn new(factors: Vec<Factor>) -> Self {
        Word { factors }
    }

    pub fn identity(k: &Weight) -> Self {
        Word { factors: vec![Factor::Idem(k.clone())] }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Weight of the rightmost idempotent, if the word ends with one.
    pub fn source(&self) -> Option<&Weight> {
        match self.factors.last() {
            Some(Factor::Idem(w)) => Some(w),
            _ => None,
        }
    }

    /// Factors other than idempotents and shifts.
    pub fn generators(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(|f| !matches!(f, Factor::Idem(_) | Factor::Shift { .. }))
    }

    /// `self other`; a trailing idempotent of `self` is dropped.
    pub fn then(&self, other: &Word) -> Word {
        let mut factors = self.factors.clone();
        if let Some(Factor::Idem(_)) = factors.last() {
            factors.pop();
        }
        factors.extend(other.factors.iter().cloned());
        Word { factors }
    }

    /// Check every index against `n`: generators in `0..n`, loop generators in `1..n`.
    pub fn check_rank(&self, n: usize) -> Result<(), WordError> {
        for f in &self.factors {
            match f {
                Factor::Idem(w) if w.n() != n => return Err(WordError::DimensionMismatch { n, found: w.n() }),
                Factor::ELoop { i } | Factor::FLoop { i } if *i == 0 || *i >= n => {
                    return Err(WordError::IndexOutOfRange { index: *i, n, offset: 0 })
                }
                _ => {}
            }
            if let Some(i) = f.index() {
                if i >= n {
                    return Err(WordError::IndexOutOfRange { index: i, n, offset: 0 });
                }
            }
        }
        Ok(())
    }

    /// Weight to the right of each factor, i.e. the source weight each factor sees,
    /// followed by the final target. Idempotent mismatches give `None`; negative
    /// entries are allowed here.
    pub fn weights_from(&self, source: &Weight) -> Option<Vec<Weight>> {
        let mut at = vec![source.clone(); self.factors.len() + 1];
        let mut cur = source.clone();
        for (pos, f) in self.factors.iter().enumerate().rev() {
            at[pos + 1] = cur.clone();
            cur = f.act(&cur)?;
        }
        at[0] = cur;
        // at[p] is the weight to the left of factor p, at[p + 1] the one to its right
        Some(at)
    }

    pub fn target(&self, source: &Weight) -> Option<Weight> {
        self.weights_from(source).map(|w| w[0].clone())
    }

    /// Sum of the divided powers of all `E`/`F` factors.
    pub fn total_power(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::E { power, .. } | Factor::F { power, .. } => *power as u64,
                _ => 0,
            })
            .sum()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Result of [`weight_flow`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flow {
    /// Source, then the weight after every generator, rightmost generator first.
    Weights(Vec<Weight>),
    Zero,
}

/// Follow the weight through the word, from `source`, stopping at the first weight with a
/// negative entry or entry sum different from `level`, or at a mismatching idempotent.
pub fn weight_flow(w: &Word, source: &Weight, level: i64) -> Result<Flow, WordError> {
    let n = source.n();
    let mut out = vec![source.clone()];
    let mut cur = source.clone();
    if !cur.is_nonzero_object(level) {
        return Ok(Flow::Zero);
    }
    for f in w.factors.iter().rev() {
        if let Factor::Idem(k) = f {
            if k.n() != n {
                return Err(WordError::DimensionMismatch { n, found: k.n() });
            }
        }
        let Some(next) = f.act(&cur) else {
            return Ok(Flow::Zero);
        };
        if !next.is_nonzero_object(level) {
            return Ok(Flow::Zero);
        }
        if !matches!(f, Factor::Idem(_) | Factor::Shift { .. }) {
            out.push(next.clone());
        }
        cur = next;
    }
    Ok(Flow::Weights(out))
}

fn adjoint(w: &Word, source: &Weight, right: bool) -> Result<Word, WordError> {
    let weights = w.weights_from(source).ok_or(WordError::MissingSource)?;
    let mut body = Vec::new();
    let mut net = [0i64; 3];
    for (pos, f) in w.factors.iter().enumerate() {
        let k = &weights[pos + 1];
        match f {
            Factor::E { i, power } => {
                let (a, lam) = (*power as i64, k.pair_root(*i));
                net[0] += if right { a * (lam + a) } else { -a * lam - a * a };
                body.push(Factor::F { i: *i, power: *power });
            }
            Factor::F { i, power } => {
                let (a, lam) = (*power as i64, k.pair_root(*i));
                net[0] += if right { a * (a - lam) } else { a * lam - a * a };
                body.push(Factor::E { i: *i, power: *power });
            }
            Factor::Shift { kind, amount } => net[*kind as usize] -= amount,
            Factor::Idem(_) => {}
            other => return Err(WordError::UnsupportedFactor(other.to_string())),
        }
    }
    body.reverse();
    let mut factors = Vec::new();
    for (kind, amount) in [ShiftKind::Angle, ShiftKind::Cohom, ShiftKind::Internal].into_iter().zip(net) {
        if amount != 0 {
            factors.push(Factor::Shift { kind, amount });
        }
    }
    factors.extend(body);
    if w.source().is_some() {
        factors.push(Factor::Idem(weights[0].clone()));
    }
    Ok(Word { factors })
}

/// Formal right adjoint: reverse the word, swap `E` and `F`, collect the adjunction shift
/// of every factor at its local weight and negate existing shifts. The net shift is
/// written leftmost; the new source idempotent is the old target.
pub fn right_adjoint(w: &Word, source: &Weight) -> Result<Word, WordError> {
    adjoint(w, source, true)
}

pub fn left_adjoint(w: &Word, source: &Weight) -> Result<Word, WordError> {
    adjoint(w, source, false)
}

/// Parse a word. Index ranges are not checked; see [`parse_for`].
pub fn parse(text: &str) -> Result<Word, WordError> {
    Parser { s: text.as_bytes(), pos: 0 }.word()
}

/// Parse and check indices and weight lengths against `n`.
pub fn parse_for(text: &str, n: usize) -> Result<Word, WordError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let mut factors = Vec::new();
    p.skip_ws();
    while p.pos < p.s.len() {
        let start = p.pos;
        let f = p.factor()?;
        let single = Word { factors: vec![f.clone()] };
        single.check_rank(n).map_err(|e| match e {
            WordError::IndexOutOfRange { index, n, .. } => WordError::IndexOutOfRange { index, n, offset: start },
            other => other,
        })?;
        factors.push(f);
        p.separator()?;
    }
    if factors.is_empty() {
        return Err(p.expected(&["factor"]));
    }
    Ok(Word { factors })
}

impl FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        parse(s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn expected(&self, what: &[&str]) -> WordError {
        WordError::Syntax { offset: self.pos, expected: what.iter().map(|s| s.to_string()).collect() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    /// Factors are separated by whitespace.
    fn separator(&mut self) -> Result<(), WordError> {
        let before = self.pos;
        self.skip_ws();
        if self.pos == before && self.pos < self.s.len() {
            return Err(self.expected(&["whitespace"]));
        }
        Ok(())
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut factors = Vec::new();
        self.skip_ws();
        while self.pos < self.s.len() {
            factors.push(self.factor()?);
            self.separator()?;
        }
        if factors.is_empty() {
            return Err(self.expected(&["factor"]));
        }
        Ok(Word { factors })
    }

    fn uint(&mut self) -> Result<u64, WordError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.expected(&["digit"]));
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| {
            self.pos = start;
            self.expected(&["integer"])
        })
    }

    fn int(&mut self) -> Result<i64, WordError> {
        let neg = self.eat("-");
        let v = self.uint()? as i64;
        Ok(if neg { -v } else { v })
    }

    fn marks(&mut self) -> (bool, bool) {
        let prime = self.eat("'");
        let inverse = self.eat("^-1");
        (prime, inverse)
    }

    fn factor(&mut self) -> Result<Factor, WordError> {
        if self.eat("1_(") {
            let mut entries = vec![self.int()?];
            while self.eat(",") {
                entries.push(self.int()?);
            }
            if !self.eat(")") {
                return Err(self.expected(&["','", "')'"]));
            }
            return Ok(Factor::Idem(Weight::new(entries)));
        }
        if self.eat("phi") {
            let i = self.uint()? as usize;
            let (prime, inverse) = self.marks();
            return Ok(Factor::Phi { i, prime, inverse });
        }
        if self.eat("R'") {
            return Ok(Factor::RPrime { inverse: self.eat("^-1") });
        }
        for (open, close, kind) in [("<", ">", ShiftKind::Angle), ("[", "]", ShiftKind::Cohom), ("{", "}", ShiftKind::Internal)] {
            if self.eat(open) {
                let amount = self.int()?;
                if !self.eat(close) {
                    return Err(self.expected(&[&format!("'{close}'")]));
                }
                return Ok(Factor::Shift { kind, amount });
            }
        }
        match self.peek() {
            Some(b'T') => {
                self.pos += 1;
                let i = self.uint()? as usize;
                let (prime, inverse) = self.marks();
                Ok(Factor::T { i, prime, inverse })
            }
            Some(c @ (b'E' | b'F')) => {
                self.pos += 1;
                let i = self.uint()? as usize;
                if c == b'E' && self.eat(",1") {
                    return Ok(Factor::ELoop { i });
                }
                if c == b'F' && self.eat(",-1") {
                    return Ok(Factor::FLoop { i });
                }
                let mut power = 1u32;
                if self.eat("^(") {
                    let at = self.pos;
                    let p = self.uint()?;
                    if p == 0 || p > u32::MAX as u64 {
                        self.pos = at;
                        return Err(self.expected(&["positive power"]));
                    }
                    power = p as u32;
                    if !self.eat(")") {
                        return Err(self.expected(&["')'"]));
                    }
                }
                Ok(if c == b'E' { Factor::E { i, power } } else { Factor::F { i, power } })
            }
            _ => Err(self.expected(&["'E'", "'F'", "'T'", "'phi'", "\"R'\"", "'1_('", "shift"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn parses_examples() {
        let x = parse("F0^(2) F1^(2) 1_(0,2)").unwrap();
        assert_eq!(x.factors, vec![Factor::f(0, 2), Factor::f(1, 2), Factor::Idem(w("(0,2)"))]);
        let y = parse("T1' T0' 1_(1,0,1)").unwrap();
        assert_eq!(y.to_string(), "T1' T0' 1_(1,0,1)");
        assert!(matches!(parse_for("E9", 3), Err(WordError::IndexOutOfRange { index: 9, n: 3, offset: 0 })));
        assert_eq!(parse("E1,1 F2,-1 phi0^-1 R'^-1 <-2> [1] {3}").unwrap().to_string(), "E1,1 F2,-1 phi0^-1 R'^-1 <-2> [1] {3}");
        assert_eq!(parse("  E1^(1)   F1 ").unwrap().to_string(), "E1 F1");
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse("E1 X2") {
            Err(WordError::Syntax { offset, expected }) => {
                assert_eq!(offset, 3);
                assert!(expected.contains(&"'E'".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("E1F1"), Err(WordError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("E1^(0)"), Err(WordError::Syntax { offset: 4, .. })));
        assert!(matches!(parse(""), Err(WordError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn flows() {
        let e1 = parse("E1 1_(1,1)").unwrap();
        assert_eq!(weight_flow(&e1, &w("(1,1)"), 2).unwrap(), Flow::Weights(vec![w("(1,1)"), w("(0,2)")]));
        let e1z = parse("E1 1_(0,2)").unwrap();
        assert_eq!(weight_flow(&e1z, &w("(0,2)"), 2).unwrap(), Flow::Zero);
        let a1 = parse("F0 F1").unwrap();
        assert_eq!(weight_flow(&a1, &w("(0,1)"), 1).unwrap(), Flow::Weights(vec![w("(0,1)"), w("(1,0)"), w("(0,1)")]));
        assert!(weight_flow(&a1, &w("(0,1,0)"), 1).is_ok());
        assert!(weight_flow(&parse("1_(1,0)").unwrap(), &w("(1,0,0)"), 1).is_err());
    }

    #[test]
    fn adjoints() {
        let e1 = parse("E1 1_(1,1)").unwrap();
        assert_eq!(right_adjoint(&e1, &w("(1,1)")).unwrap().to_string(), "<1> F1 1_(0,2)");
        let id = parse("1_(1,1)").unwrap();
        assert_eq!(right_adjoint(&id, &w("(1,1)")).unwrap(), id);
        let fe = parse("F1 E1 1_(2,0)").unwrap();
        assert_eq!(right_adjoint(&fe, &w("(2,0)")).unwrap().to_string(), "F1 E1 1_(2,0)");
        let r = right_adjoint(&e1, &w("(1,1)")).unwrap();
        assert_eq!(left_adjoint(&r, &w("(0,2)")).unwrap(), e1);
        assert!(right_adjoint(&parse("T1 1_(1,1)").unwrap(), &w("(1,1)")).is_err());
    }
}
