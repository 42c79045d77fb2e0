//! Dense matrices over `Z[q, q^-1]`: products, fraction-free elimination, rank and
//! inverses of unimodular matrices.

use std::fmt;

use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("determinant {0} is not a unit")]
    NotUnimodular(LaurentPoly),
    #[error(transparent)]
    Arithmetic(#[from] LaurentError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<LaurentPoly>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![LaurentPoly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &LaurentPoly::one())
    }

    pub fn scalar(n: usize, c: &LaurentPoly) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(LaurentPoly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Positions of nonzero entries off the diagonal.
    pub fn off_diagonal(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && !self[(i, j)].is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &LaurentPoly) -> Result<(), LinalgError> {
        self.same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += &(b * c);
            }
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// First entry where the two matrices differ, with the difference `self - other`.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, LaurentPoly)> {
        if self.shape() != other.shape() {
            return Some((usize::MAX, usize::MAX, LaurentPoly::zero()));
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = &self[(i, j)] - &other[(i, j)];
                if !d.is_zero() {
                    return Some((i, j, d));
                }
            }
        }
        None
    }

    /// Rank over the fraction field `Q(q)`, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = LaurentPoly::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
                continue;
            };
            if p != rank {
                for j in 0..cols {
                    m.swap(p * cols + j, rank * cols + j);
                }
            }
            let pivot = m[rank * cols + col].clone();
            for r in rank + 1..rows {
                let f = m[r * cols + col].clone();
                for j in col..cols {
                    let v = &(&pivot * &m[r * cols + j]) - &(&f * &m[rank * cols + j]);
                    m[r * cols + j] = v.div_exact(&prev).expect("fraction-free elimination is exact");
                }
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }

    /// Fraction-free elimination of `[A | I]` followed by exact back substitution.
    /// Returns `(d, Y)` with `A * Y = d * I`, where `d = +-det(A)`.
    fn scaled_inverse(&self) -> Result<(LaurentPoly, Matrix), LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let w = 2 * n;
        let mut m = vec![LaurentPoly::zero(); n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = self[(i, j)].clone();
            }
            m[i * w + n + i] = LaurentPoly::one();
        }
        let mut prev = LaurentPoly::one();
        for k in 0..n {
            let p = (k..n).find(|&r| !m[r * w + k].is_zero()).ok_or(LinalgError::Singular)?;
            if p != k {
                for j in 0..w {
                    m.swap(p * w + j, k * w + j);
                }
            }
            let pivot = m[k * w + k].clone();
            for r in k + 1..n {
                let f = m[r * w + k].clone();
                for j in k..w {
                    let v = &(&pivot * &m[r * w + j]) - &(&f * &m[k * w + j]);
                    m[r * w + j] = v.div_exact(&prev)?;
                }
            }
            prev = pivot;
        }
        let d = prev;
        let mut y = Matrix::zeros(n, n);
        for col in 0..n {
            for i in (0..n).rev() {
                let mut acc = &d * &m[i * w + n + col];
                for j in i + 1..n {
                    acc -= &(&m[i * w + j] * &y[(j, col)]);
                }
                y[(i, col)] = acc.div_exact(&m[i * w + i])?;
            }
        }
        Ok((d, y))
    }

    pub fn det(&self) -> Result<LaurentPoly, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        if self.rows == 0 {
            return Ok(LaurentPoly::one());
        }
        let mut m = self.data.clone();
        let n = self.rows;
        let mut prev = LaurentPoly::one();
        let mut sign = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[r * n + k].is_zero()) else {
                return Ok(LaurentPoly::zero());
            };
            if p != k {
                for j in 0..n {
                    m.swap(p * n + j, k * n + j);
                }
                sign = !sign;
            }
            let pivot = m[k * n + k].clone();
            for r in k + 1..n {
                let f = m[r * n + k].clone();
                for j in k..n {
                    let v = &(&pivot * &m[r * n + j]) - &(&f * &m[k * n + j]);
                    m[r * n + j] = v.div_exact(&prev)?;
                }
            }
            prev = pivot;
        }
        Ok(if sign { -prev } else { prev })
    }

    /// Inverse of a matrix whose determinant is a unit `+-q^a`.
    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if self.rows == 0 && self.cols == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let (d, b) = self.scaled_inverse()?;
        if d.as_unit().is_none() {
            return Err(LinalgError::NotUnimodular(d));
        }
        let mut inv = Matrix::zeros(self.rows, self.rows);
        for (slot, x) in inv.data.iter_mut().zip(&b.data) {
            *slot = x.div_exact(&d)?;
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = LaurentPoly;
    fn index(&self, (i, j): (usize, usize)) -> &LaurentPoly {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut LaurentPoly {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
