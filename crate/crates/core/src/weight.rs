//! The level-zero `gl_n` weight lattice `Z^n` with its affine simple roots.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("root index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("malformed weight `{0}`")]
    Malformed(String),
    #[error("need n > N (got n = {n}, N = {level})")]
    LevelTooLarge { n: usize, level: i64 },
    #[error("need n >= 2 (got {0})")]
    RankTooSmall(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(entries: Vec<i64>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `eta = (0, ..., 0, N)`
    pub fn eta(n: usize, level: i64) -> Self {
        let mut v = vec![0; n];
        v[n - 1] = level;
        Self(v)
    }

    /// `mu = (0^(n-N), 1^N)`
    pub fn mu(n: usize, level: usize) -> Self {
        Self((0..n).map(|i| i64::from(i >= n - level)).collect())
    }

    /// Simple root `alpha_i` for `i` in `0..n`; `alpha_0 = (1, 0, ..., 0, -1)`.
    pub fn root(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        if i == 0 {
            v[0] = 1;
            v[n - 1] = -1;
        } else {
            v[i - 1] = -1;
            v[i] = 1;
        }
        Self(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// 1-based slot access, matching the usual `k_1, ..., k_n` labels.
    pub fn slot(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// False exactly when the object `1_k` vanishes at level `N`.
    pub fn is_nonzero_object(&self, level: i64) -> bool {
        self.0.iter().all(|&k| k >= 0) && self.total() == level
    }

    pub fn pairing(&self, other: &Weight) -> Result<i64, WeightError> {
        if self.n() != other.n() {
            return Err(WeightError::DimensionMismatch(self.n(), other.n()));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// `<k, alpha_i>`
    pub fn pair_root(&self, i: usize) -> i64 {
        let n = self.n();
        if i == 0 {
            self.0[0] - self.0[n - 1]
        } else {
            self.0[i] - self.0[i - 1]
        }
    }

    pub fn add_root(&self, i: usize, times: i64) -> Weight {
        let mut v = self.0.clone();
        let n = v.len();
        if i == 0 {
            v[0] += times;
            v[n - 1] -= times;
        } else {
            v[i - 1] -= times;
            v[i] += times;
        }
        Weight(v)
    }

    /// Weyl reflection `s_i`; `s_0` swaps the first and last entries.
    pub fn reflect(&self, i: usize) -> Weight {
        let mut v = self.0.clone();
        let n = v.len();
        if i == 0 {
            v.swap(0, n - 1);
        } else {
            v.swap(i - 1, i);
        }
        Weight(v)
    }

    /// `(k_1, ..., k_n) -> (k_2, ..., k_n, k_1)`
    pub fn rotate(&self) -> Weight {
        let mut v = self.0.clone();
        v.rotate_left(1);
        Weight(v)
    }

    pub fn rotate_inv(&self) -> Weight {
        let mut v = self.0.clone();
        v.rotate_right(1);
        Weight(v)
    }

    /// All weights of `n` nonnegative entries summing to `level`, in lexicographic order.
    pub fn all_objects(n: usize, level: i64) -> Vec<Weight> {
        fn go(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
            if cur.len() + 1 == n {
                cur.push(left);
                out.push(Weight(cur.clone()));
                cur.pop();
                return;
            }
            for x in 0..=left {
                cur.push(x);
                go(n, left - x, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 && level >= 0 {
            go(n, level, &mut Vec::new(), &mut out);
        }
        out
    }
}

/// Cartan pairing `<alpha_i, alpha_j>` of the affine type `A_{n-1}^{(1)}`.
pub fn cartan(n: usize, i: usize, j: usize) -> i64 {
    Weight::root(n, i).pairing(&Weight::root(n, j)).unwrap()
}

/// Checks `n >= 2` and `n > N`.
pub fn validate_rank(n: usize, level: i64) -> Result<(), WeightError> {
    if n < 2 {
        return Err(WeightError::RankTooSmall(n));
    }
    if level < 0 || n as i64 <= level {
        return Err(WeightError::LevelTooLarge { n, level });
    }
    Ok(())
}

/// I-coordinates of `sum_i c_i p(alpha_i)`, where `p(alpha_0) = -sum_{j>0} alpha_j`.
pub fn p_map(coeffs: &[i64]) -> Vec<i64> {
    coeffs[1..].iter().map(|c| c - coeffs[0]).collect()
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Weight {
    type Err = WeightError;
    fn from_str(s: &str) -> Result<Self, WeightError> {
        let bad = || WeightError::Malformed(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let entries = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        Ok(Weight(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Weight {
        s.parse().unwrap()
    }

    #[test]
    fn pairings() {
        assert_eq!(cartan(3, 1, 1), 2);
        assert_eq!(cartan(3, 1, 2), -1);
        assert_eq!(cartan(2, 0, 1), -2);
        assert_eq!(w("(0,2)").pairing(&Weight::root(2, 1)).unwrap(), 2);
        assert_eq!(w("(0,2)").pair_root(1), 2);
        assert!(w("(1,2)").pairing(&w("(1,2,3)")).is_err());
    }

    #[test]
    fn reflections_and_rotation() {
        assert_eq!(w("(3,0,2)").reflect(1), w("(0,3,2)"));
        assert_eq!(w("(3,0,2)").reflect(0), w("(2,0,3)"));
        assert_eq!(w("(1,1)").reflect(1), w("(1,1)"));
        assert_eq!(w("(0,0,3)").rotate(), w("(0,3,0)"));
        assert_eq!(Weight::eta(4, 2).rotate(), w("(0,0,2,0)"));
        assert_eq!(Weight::mu(4, 2), w("(0,0,1,1)"));
    }

    #[test]
    fn projection() {
        assert_eq!(p_map(&[1, 0, 0]), vec![-1, -1]);
        assert_eq!(p_map(&[0, 1, 0]), vec![1, 0]);
        assert_eq!(p_map(&[1, 1, 1]), vec![0, 0]);
    }

    #[test]
    fn objects() {
        assert!(!w("(-1,3)").is_nonzero_object(2));
        assert!(w("(0,2)").is_nonzero_object(2));
        assert_eq!(Weight::all_objects(3, 2).len(), 6);
        assert!(validate_rank(2, 2).is_err());
        assert!(validate_rank(3, 2).is_ok());
    }
}
