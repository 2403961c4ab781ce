//! Symbolic expression trees for analytic self-maps.
//!
//! Maps are trees, not opaque callables, so iterates, derivatives and affine
//! decompositions stay exact and serializable. Evaluation acts on points of
//! C^n; on vector domains the scalar primitives (square root, Moebius) act on
//! the distinguished first coordinate and zero the rest, which is exactly
//! what the Siegel test maps `w -> (A w1 + sqrt(w1), sqrt(A) w')` need. For
//! n = 1 everything collapses to ordinary complex arithmetic.

use crate::error::{Error, Result};
use crate::linalg::{herm_inner, norm_sq, CMatrix, CVector};
use crate::scalar::{Real, C};
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T: Real> {
    /// The point itself.
    Var,
    /// A constant point (length must match the ambient dimension).
    Const(CVector<T>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    /// Componentwise integer power.
    Powi(Box<Expr<T>>, i32),
    /// Principal square root of the first coordinate (cut on the negative
    /// real axis); remaining coordinates are zeroed.
    Sqrt(Box<Expr<T>>),
    /// First-coordinate Moebius map (a x + b)/(c x + d).
    Mobius {
        a: C<T>,
        b: C<T>,
        c: C<T>,
        d: C<T>,
        arg: Box<Expr<T>>,
    },
    /// `outer` evaluated at the value of `inner`.
    Compose {
        outer: Box<Expr<T>>,
        inner: Box<Expr<T>>,
    },
    /// Heisenberg translation h_b(w) = (w1 + b1 + 2i <w', b'>, w' + b').
    SiegelTranslate {
        b: CVector<T>,
        arg: Box<Expr<T>>,
    },
    /// Non-isotropic dilation (A w1, sqrt(A) w').
    SiegelDilate {
        factor: T,
        arg: Box<Expr<T>>,
    },
    /// Linear unitary action; the stored matrix is full-dimensional (for a
    /// Siegel domain it is block-diag(1, U)).
    Unitary {
        matrix: CMatrix<T>,
        arg: Box<Expr<T>>,
    },
    /// Hyperbolic Siegel automorphism
    /// Psi(z) = (A z1 + Re a1 + i||a'||^2 + 2i sqrt(A) <U z', a'>,
    ///           sqrt(A) U z' + a')
    /// with A = height(a).
    PsiAut {
        scale: T,
        anchor: CVector<T>,
        unitary: CMatrix<T>,
        arg: Box<Expr<T>>,
    },
}

// Constructor names mirror the wire-format ops, not operator traits.
#[allow(clippy::should_implement_trait)]
impl<T: Real> Expr<T> {
    pub fn var() -> Self {
        Expr::Var
    }

    pub fn constant(v: C<T>) -> Self {
        Expr::Const(vec![v])
    }

    pub fn add(a: Expr<T>, b: Expr<T>) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr<T>, b: Expr<T>) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr<T>, b: Expr<T>) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn powi(a: Expr<T>, k: i32) -> Self {
        Expr::Powi(Box::new(a), k)
    }

    pub fn sqrt(a: Expr<T>) -> Self {
        Expr::Sqrt(Box::new(a))
    }

    pub fn mobius(a: C<T>, b: C<T>, c: C<T>, d: C<T>, arg: Expr<T>) -> Self {
        Expr::Mobius {
            a,
            b,
            c,
            d,
            arg: Box::new(arg),
        }
    }

    pub fn compose(outer: Expr<T>, inner: Expr<T>) -> Self {
        Expr::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn contains_sqrt(&self) -> bool {
        match self {
            Expr::Var | Expr::Const(_) => false,
            Expr::Sqrt(_) => true,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.contains_sqrt() || b.contains_sqrt()
            }
            Expr::Powi(a, _) => a.contains_sqrt(),
            Expr::Mobius { arg, .. }
            | Expr::SiegelTranslate { arg, .. }
            | Expr::SiegelDilate { arg, .. }
            | Expr::Unitary { arg, .. }
            | Expr::PsiAut { arg, .. } => arg.contains_sqrt(),
            Expr::Compose { outer, inner } => outer.contains_sqrt() || inner.contains_sqrt(),
        }
    }

    /// Evaluates the tree at a point of C^n.
    pub fn eval(&self, w: &[C<T>]) -> Result<CVector<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            Expr::Var => Ok(w.to_vec()),
            Expr::Const(v) => Ok(v.clone()),
            Expr::Add(a, b) => {
                let (x, y) = (a.eval(w)?, b.eval(w)?);
                Ok(x.iter().zip(&y).map(|(p, q)| p + q).collect())
            }
            Expr::Mul(a, b) => {
                let (x, y) = (a.eval(w)?, b.eval(w)?);
                Ok(x.iter().zip(&y).map(|(p, q)| p * q).collect())
            }
            Expr::Div(a, b) => {
                let (x, y) = (a.eval(w)?, b.eval(w)?);
                Ok(x.iter().zip(&y).map(|(p, q)| p / q).collect())
            }
            Expr::Powi(a, k) => {
                let x = a.eval(w)?;
                Ok(x.iter().map(|p| pow_int(*p, *k)).collect())
            }
            Expr::Sqrt(a) => {
                let x = a.eval(w)?;
                let mut out = vec![zero; x.len()];
                out[0] = x[0].sqrt();
                Ok(out)
            }
            Expr::Mobius { a, b, c, d, arg } => {
                let x = arg.eval(w)?;
                let mut out = vec![zero; x.len()];
                out[0] = (a * x[0] + b) / (c * x[0] + d);
                Ok(out)
            }
            Expr::Compose { outer, inner } => {
                let mid = inner.eval(w)?;
                outer.eval(&mid)
            }
            Expr::SiegelTranslate { b, arg } => {
                let x = arg.eval(w)?;
                Ok(siegel_translate_raw(b, &x))
            }
            Expr::SiegelDilate { factor, arg } => {
                let x = arg.eval(w)?;
                Ok(siegel_dilate_raw(*factor, &x))
            }
            Expr::Unitary { matrix, arg } => {
                let x = arg.eval(w)?;
                Ok(matrix.mul_vec(&x))
            }
            Expr::PsiAut {
                scale,
                anchor,
                unitary,
                arg,
            } => {
                let x = arg.eval(w)?;
                Ok(psi_apply_raw(*scale, anchor, unitary, &x))
            }
        }
    }

    /// Scalar fast path for one-dimensional domains.
    pub fn eval_scalar(&self, z: C<T>) -> Result<C<T>> {
        match self {
            Expr::Var => Ok(z),
            Expr::Const(v) => Ok(v[0]),
            Expr::Add(a, b) => Ok(a.eval_scalar(z)? + b.eval_scalar(z)?),
            Expr::Mul(a, b) => Ok(a.eval_scalar(z)? * b.eval_scalar(z)?),
            Expr::Div(a, b) => Ok(a.eval_scalar(z)? / b.eval_scalar(z)?),
            Expr::Powi(a, k) => Ok(pow_int(a.eval_scalar(z)?, *k)),
            Expr::Sqrt(a) => Ok(a.eval_scalar(z)?.sqrt()),
            Expr::Mobius { a, b, c, d, arg } => {
                let x = arg.eval_scalar(z)?;
                Ok((a * x + b) / (c * x + d))
            }
            Expr::Compose { outer, inner } => outer.eval_scalar(inner.eval_scalar(z)?),
            _ => {
                let out = self.eval(&[z])?;
                Ok(out[0])
            }
        }
    }

    /// Value and Jacobian at a point; n x n for an n-dimensional domain.
    pub fn eval_jacobian(&self, w: &[C<T>]) -> Result<(CVector<T>, CMatrix<T>)> {
        let n = w.len();
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            Expr::Var => Ok((w.to_vec(), CMatrix::identity(n))),
            Expr::Const(v) => Ok((v.clone(), CMatrix::zeros(v.len(), n))),
            Expr::Add(a, b) => {
                let (va, ja) = a.eval_jacobian(w)?;
                let (vb, jb) = b.eval_jacobian(w)?;
                let v = va.iter().zip(&vb).map(|(p, q)| p + q).collect();
                Ok((v, ja.add(&jb)))
            }
            Expr::Mul(a, b) => {
                let (va, ja) = a.eval_jacobian(w)?;
                let (vb, jb) = b.eval_jacobian(w)?;
                let m = va.len();
                let mut jac = CMatrix::zeros(m, n);
                for i in 0..m {
                    for j in 0..n {
                        jac.set(i, j, ja.get(i, j) * vb[i] + va[i] * jb.get(i, j));
                    }
                }
                let v = va.iter().zip(&vb).map(|(p, q)| p * q).collect();
                Ok((v, jac))
            }
            Expr::Div(a, b) => {
                let (va, ja) = a.eval_jacobian(w)?;
                let (vb, jb) = b.eval_jacobian(w)?;
                let m = va.len();
                let mut jac = CMatrix::zeros(m, n);
                for i in 0..m {
                    let den = vb[i] * vb[i];
                    for j in 0..n {
                        jac.set(i, j, (ja.get(i, j) * vb[i] - va[i] * jb.get(i, j)) / den);
                    }
                }
                let v = va.iter().zip(&vb).map(|(p, q)| p / q).collect();
                Ok((v, jac))
            }
            Expr::Powi(a, k) => {
                let (va, ja) = a.eval_jacobian(w)?;
                let m = va.len();
                let kk = Complex::new(T::of(*k as f64), T::zero());
                let mut jac = CMatrix::zeros(m, n);
                for (i, vi) in va.iter().enumerate() {
                    let f = kk * pow_int(*vi, *k - 1);
                    for j in 0..n {
                        jac.set(i, j, f * ja.get(i, j));
                    }
                }
                let v = va.iter().map(|p| pow_int(*p, *k)).collect();
                Ok((v, jac))
            }
            Expr::Sqrt(a) => {
                let (va, ja) = a.eval_jacobian(w)?;
                let x = va[0];
                if x.norm() < T::of(1e-300)
                    || (x.re <= T::zero() && x.im.abs() <= T::of(1e-14) * x.re.abs())
                {
                    return Err(Error::Branch {
                        at: format!("{x:?}"),
                    });
                }
                let s = x.sqrt();
                let half = Complex::new(T::of(0.5), T::zero());
                let m = va.len();
                let mut jac = CMatrix::zeros(m, n);
                for j in 0..n {
                    jac.set(0, j, half / s * ja.get(0, j));
                }
                let mut v = vec![zero; m];
                v[0] = s;
                Ok((v, jac))
            }
            Expr::Mobius { a, b, c, d, arg } => {
                let (va, ja) = arg.eval_jacobian(w)?;
                let x = va[0];
                let den = c * x + d;
                let det = a * d - b * c;
                let m = va.len();
                let mut jac = CMatrix::zeros(m, n);
                for j in 0..n {
                    jac.set(0, j, det / (den * den) * ja.get(0, j));
                }
                let mut v = vec![zero; m];
                v[0] = (a * x + b) / den;
                Ok((v, jac))
            }
            Expr::Compose { outer, inner } => {
                let (vi, ji) = inner.eval_jacobian(w)?;
                let (vo, jo) = outer.eval_jacobian(&vi)?;
                Ok((vo, jo.mul(&ji)))
            }
            Expr::SiegelTranslate { b, arg } => {
                let (va, ja) = arg.eval_jacobian(w)?;
                let m = va.len();
                let two_i = Complex::new(T::zero(), T::of(2.0));
                let mut lin = CMatrix::identity(m);
                for (j, bj) in b.iter().enumerate().skip(1) {
                    lin.set(0, j, two_i * bj.conj());
                }
                Ok((siegel_translate_raw(b, &va), lin.mul(&ja)))
            }
            Expr::SiegelDilate { factor, arg } => {
                let (va, ja) = arg.eval_jacobian(w)?;
                let m = va.len();
                let mut lin = CMatrix::zeros(m, m);
                lin.set(0, 0, Complex::new(*factor, T::zero()));
                let root = Complex::new(factor.sqrt(), T::zero());
                for j in 1..m {
                    lin.set(j, j, root);
                }
                Ok((siegel_dilate_raw(*factor, &va), lin.mul(&ja)))
            }
            Expr::Unitary { matrix, arg } => {
                let (va, ja) = arg.eval_jacobian(w)?;
                Ok((matrix.mul_vec(&va), matrix.mul(&ja)))
            }
            Expr::PsiAut {
                scale,
                anchor,
                unitary,
                arg,
            } => {
                let (va, ja) = arg.eval_jacobian(w)?;
                let m = va.len();
                let root = scale.sqrt();
                let two_i_root = Complex::new(T::zero(), T::of(2.0) * root);
                let mut lin = CMatrix::zeros(m, m);
                lin.set(0, 0, Complex::new(*scale, T::zero()));
                for j in 1..m {
                    // d/dz'_j of <U z', a'> = sum_k U_{kj} conj(a'_k)
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (k, ak) in anchor.iter().enumerate().skip(1) {
                        acc = acc + unitary.get(k - 1, j - 1) * ak.conj();
                    }
                    lin.set(0, j, two_i_root * acc);
                    for i in 1..m {
                        lin.set(i, j, unitary.get(i - 1, j - 1) * root);
                    }
                }
                Ok((psi_apply_raw(*scale, anchor, unitary, &va), lin.mul(&ja)))
            }
        }
    }
}

/// Integer power by repeated multiplication; negative exponents invert.
fn pow_int<T: Real>(z: C<T>, k: i32) -> C<T> {
    let one = Complex::new(T::one(), T::zero());
    if k == 0 {
        return one;
    }
    let mut acc = one;
    for _ in 0..k.unsigned_abs() {
        acc = acc * z;
    }
    if k < 0 {
        one / acc
    } else {
        acc
    }
}

pub(crate) fn siegel_translate_raw<T: Real>(b: &[C<T>], w: &[C<T>]) -> CVector<T> {
    let two_i = Complex::new(T::zero(), T::of(2.0));
    let mut out = Vec::with_capacity(w.len());
    out.push(w[0] + b[0] + two_i * herm_inner(&w[1..], &b[1..]));
    for j in 1..w.len() {
        out.push(w[j] + b[j]);
    }
    out
}

pub(crate) fn siegel_dilate_raw<T: Real>(factor: T, w: &[C<T>]) -> CVector<T> {
    let root = Complex::new(factor.sqrt(), T::zero());
    let mut out = Vec::with_capacity(w.len());
    out.push(w[0] * Complex::new(factor, T::zero()));
    for wj in &w[1..] {
        out.push(wj * root);
    }
    out
}

pub(crate) fn psi_apply_raw<T: Real>(
    scale: T,
    anchor: &[C<T>],
    unitary: &CMatrix<T>,
    z: &[C<T>],
) -> CVector<T> {
    let n = z.len();
    let root = scale.sqrt();
    let u_zp = unitary.mul_vec(&z[1..]);
    let cross = herm_inner(&u_zp, &anchor[1..]);
    let two_i_root = Complex::new(T::zero(), T::of(2.0) * root);
    let first = z[0] * Complex::new(scale, T::zero())
        + Complex::new(anchor[0].re, norm_sq(&anchor[1..]))
        + two_i_root * cross;
    let mut out = Vec::with_capacity(n);
    out.push(first);
    for j in 1..n {
        out.push(u_zp[j - 1] * Complex::new(root, T::zero()) + anchor[j]);
    }
    out
}
