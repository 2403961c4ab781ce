//! Small dense complex vectors and matrices.
//!
//! The several-variable layer never needs anything larger than N x N with
//! single-digit N, so a row-major `Vec` with Gaussian elimination is plenty.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use num_complex::Complex;

pub type CVector<T> = Vec<C<T>>;

/// Hermitian inner product (v, w) = sum v_j conj(w_j).
pub fn herm_inner<T: Real>(v: &[C<T>], w: &[C<T>]) -> C<T> {
    debug_assert_eq!(v.len(), w.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (a, b) in v.iter().zip(w) {
        acc = acc + a * b.conj();
    }
    acc
}

pub fn norm_sq<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    norm_sq(v).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Descriptor("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> CVector<T> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (j, vj) in v.iter().enumerate() {
                    acc = acc + self.get(i, j) * vj;
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &CMatrix<T>) -> CMatrix<T> {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix<T>) -> CMatrix<T> {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn conj_transpose(&self) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// max |(U* U - I)_{ij}|; zero iff unitary.
    pub fn unitarity_defect(&self) -> T {
        if self.rows != self.cols {
            return T::infinity();
        }
        let p = self.conj_transpose().mul(self);
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { T::one() } else { T::zero() };
                let d = (p.get(i, j) - Complex::new(expected, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Solves A x = b by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[C<T>]) -> Result<CVector<T>> {
        let n = self.rows;
        if self.cols != n || b.len() != n {
            return Err(Error::Singular("non-square system".into()));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut a = self.data.clone();
        let mut rhs = b.to_vec();
        let scale = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
            .max(T::one());
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= T::of(1e-14) * scale {
                return Err(Error::Singular(format!("pivot {best:?} in column {col}")));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                rhs.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == T::zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] = a[r * n + j] - f * v;
                }
                let v = rhs[col];
                rhs[r] = rhs[r] - f * v;
            }
        }
        let mut x = vec![Complex::new(T::zero(), T::zero()); n];
        for row in (0..n).rev() {
            let mut acc = rhs[row];
            for j in row + 1..n {
                acc = acc - a[row * n + j] * x[j];
            }
            x[row] = acc / a[row * n + row];
        }
        Ok(x)
    }
}
