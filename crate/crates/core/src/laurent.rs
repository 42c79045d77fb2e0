//! Sparse Laurent polynomials in one variable `q` with big-integer coefficients,
//! together with quantum integers, Gaussian binomials and shift classes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("inexact division")]
    InexactDivision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse polynomial at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },
}

/// An element of `Z[q, q^-1]`. Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

/// The two families of models; they differ in what the grading shift `<1>` means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Symmetric,
    Skew,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Symmetric => "symmetric",
            Side::Skew => "skew",
        }
    }

    /// Class of `<a>`: `q^a` on the symmetric side, `(-q^-1)^a` on the skew side.
    pub fn angle(self, a: i64) -> LaurentPoly {
        match self {
            Side::Symmetric => shift_class(self, 0, a),
            Side::Skew => shift_class(self, a, -a),
        }
    }

    /// The integer that `q` is sent to when `<1>` is sent to 1.
    pub fn classical_point(self) -> i64 {
        match self {
            Side::Symmetric => 1,
            Side::Skew => -1,
        }
    }
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "symmetric" | "sym" => Ok(Side::Symmetric),
            "skew" => Ok(Side::Skew),
            _ => Err(format!("unknown side `{s}` (expected skew or symmetric)")),
        }
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial<T: Into<BigInt>>(c: T, e: i64) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `q^e`
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// True iff every coefficient is nonnegative, i.e. the polynomial lies in `N[q, q^-1]`.
    pub fn is_positive(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// `±q^a` with the sign and exponent, if this is a unit of the ring.
    pub fn as_unit(&self) -> Option<(i8, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((1, *e))
        } else if (-c).is_one() {
            Some((-1, *e))
        } else {
            None
        }
    }

    /// Bar involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Coefficient-wise absolute value.
    pub fn abs_coeffs(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c.abs())).collect(),
        }
    }

    /// Multiply by `q^s`.
    pub fn shift(&self, s: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect(),
        }
    }

    pub fn scale<T: Into<BigInt>>(&self, k: T) -> Self {
        let k = k.into();
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c * &k)))
    }

    /// Evaluate at an integer point. Negative powers require `x = ±1`.
    pub fn eval_int(&self, x: i64) -> Option<BigInt> {
        let xb = BigInt::from(x);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let term = if *e >= 0 {
                c * num_traits::pow(xb.clone(), *e as usize)
            } else {
                if x.abs() != 1 {
                    return None;
                }
                c * num_traits::pow(xb.clone(), e.unsigned_abs() as usize)
            };
            acc += term;
        }
        Some(acc)
    }

    /// Substitute `q -> sign * q^e`.
    pub fn substitute(&self, sign: i8, e: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| {
            let flip = sign < 0 && k.rem_euclid(2) == 1;
            (k * e, if flip { -c } else { c.clone() })
        }))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / d`; fails unless `d` divides `self` in `Z[q, q^-1]`.
    pub fn div_exact(&self, d: &Self) -> Result<Self, LaurentError> {
        if d.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (dmax, dlead) = d.terms.iter().next_back().map(|(e, c)| (*e, c.clone())).unwrap();
        let dmin = d.min_exp().unwrap();
        let floor = self.min_exp().unwrap() - dmin;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((rmax, rlead)) = rem.terms.iter().next_back().map(|(e, c)| (*e, c.clone())) {
            let qe = rmax - dmax;
            if qe < floor {
                return Err(LaurentError::InexactDivision);
            }
            let (qc, r) = rlead.div_rem(&dlead);
            if !r.is_zero() {
                return Err(LaurentError::InexactDivision);
            }
            for (e, c) in &d.terms {
                rem.add_term(e + qe, -(c * &qc));
            }
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }
}

/// Quantum integer `[n] = q^(n-1) + q^(n-3) + ... + q^(1-n)`, with `[-n] = -[n]`.
pub fn qint(n: i64) -> LaurentPoly {
    if n < 0 {
        return -qint(-n);
    }
    LaurentPoly::from_terms((0..n).map(|j| (n - 1 - 2 * j, BigInt::one())))
}

/// `[n]! = [1][2]...[n]`; `[0]! = 1`.
pub fn qfactorial(n: u32) -> LaurentPoly {
    (1..=n as i64).fold(LaurentPoly::one(), |acc, j| &acc * &qint(j))
}

/// Gaussian binomial for `n >= 0`; zero when `k` is outside `0..=n`.
pub fn qbinom(n: i64, k: i64) -> Result<LaurentPoly, LaurentError> {
    if n < 0 || k < 0 || k > n {
        return Ok(LaurentPoly::zero());
    }
    qbinom_general(n, k)
}

/// `prod_{j=1..k} [n-j+1]/[j]` for arbitrary integer `n` and `k >= 0`.
pub fn qbinom_general(n: i64, k: i64) -> Result<LaurentPoly, LaurentError> {
    if k < 0 {
        return Ok(LaurentPoly::zero());
    }
    let mut acc = LaurentPoly::one();
    for j in 1..=k {
        acc = (&acc * &qint(n - j + 1)).div_exact(&qint(j))?;
    }
    Ok(acc)
}

/// Class of the shift `[cohom]{internal}`: `(-1)^cohom q^internal`.
pub fn shift_class(_side: Side, cohom: i64, internal: i64) -> LaurentPoly {
    let sign = if cohom.rem_euclid(2) == 0 { 1 } else { -1 };
    LaurentPoly::monomial(sign, internal)
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        Self {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if *e == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            if *e == 1 {
                f.write_str("q")?;
            } else {
                write!(f, "q^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;

    /// Parses the canonical form produced by `Display`, and nothing looser.
    fn from_str(s: &str) -> Result<Self, LaurentError> {
        let parsed = TermParser { src: s.as_bytes(), pos: 0 }.run()?;
        if parsed.to_string() != s {
            return Err(LaurentError::Parse {
                offset: 0,
                reason: format!("not in canonical form (expected `{parsed}`)"),
            });
        }
        Ok(parsed)
    }
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TermParser<'_> {
    fn err(&self, reason: &str) -> LaurentError {
        LaurentError::Parse { offset: self.pos, reason: reason.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn run(mut self) -> Result<LaurentPoly, LaurentError> {
        if self.src == b"0" {
            return Ok(LaurentPoly::zero());
        }
        let mut out = LaurentPoly::zero();
        let mut neg = self.eat("-");
        loop {
            let (e, c) = self.term()?;
            out.add_term(e, if neg { -c } else { c });
            if self.pos == self.src.len() {
                return Ok(out);
            }
            if self.eat(" + ") {
                neg = false;
            } else if self.eat(" - ") {
                neg = true;
            } else {
                return Err(self.err("expected ` + ` or ` - `"));
            }
        }
    }

    fn term(&mut self) -> Result<(i64, BigInt), LaurentError> {
        let coeff = match self.digits() {
            Some(d) => {
                let c: BigInt = d.parse().map_err(|_| self.err("bad coefficient"))?;
                if !self.eat("*") {
                    return Ok((0, c));
                }
                c
            }
            None => BigInt::one(),
        };
        if !self.eat("q") {
            return Err(self.err("expected `q`"));
        }
        if !self.eat("^") {
            return Ok((1, coeff));
        }
        let neg = self.eat("-");
        let d = self.digits().ok_or_else(|| self.err("expected exponent"))?;
        let e: i64 = d.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok((if neg { -e } else { e }, coeff))
    }
}
