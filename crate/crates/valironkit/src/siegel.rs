//! The automorphism algebra of the Siegel domain: Heisenberg translations,
//! non-isotropic dilations and the hyperbolic automorphisms Psi built from an
//! anchor point and a unitary rotation of the w' slots.

use crate::ball::{height_raw, SiegelPoint};
use crate::error::{Error, Result};
use crate::linalg::{herm_inner, norm_sq, CMatrix, CVector};
use crate::maps::expr::{psi_apply_raw, siegel_dilate_raw, siegel_translate_raw, Expr};
use crate::maps::{Domain, MapDescriptor};
use crate::scalar::{Real, C};
use num_complex::Complex;

/// Boundary datum for a Heisenberg translation: Im b1 = ||b'||^2.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelBoundary<T: Real> {
    coords: CVector<T>,
}

impl<T: Real> SiegelBoundary<T> {
    pub fn new(coords: CVector<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Descriptor("empty boundary datum".into()));
        }
        let defect = (coords[0].im - norm_sq(&coords[1..])).abs();
        if defect > T::of(1e-12) {
            return Err(Error::Descriptor(format!(
                "translation datum off the boundary (defect {defect:?})"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[C<T>] {
        &self.coords
    }

    /// The datum of the inverse translation: (-conj(b1), -b').
    pub fn inverse(&self) -> SiegelBoundary<T> {
        let mut coords = Vec::with_capacity(self.coords.len());
        coords.push(-self.coords[0].conj());
        for b in &self.coords[1..] {
            coords.push(-b);
        }
        SiegelBoundary { coords }
    }
}

/// h_b(w) = (w1 + b1 + 2i <w', b'>, w' + b'); preserves height exactly.
pub fn siegel_translation<T: Real>(b: &SiegelBoundary<T>, w: &SiegelPoint<T>) -> SiegelPoint<T> {
    SiegelPoint::new(siegel_translate_raw(b.coords(), w.coords()))
        .expect("translation preserves height")
}

/// delta_A(w) = (A w1, sqrt(A) w'); multiplies height by A.
pub fn siegel_dilation<T: Real>(a: T, w: &SiegelPoint<T>) -> Result<SiegelPoint<T>> {
    if a <= T::zero() || a.is_nan() {
        return Err(Error::Descriptor("dilation factor must be positive".into()));
    }
    SiegelPoint::new(siegel_dilate_raw(a, w.coords()))
}

/// Parameters of a hyperbolic automorphism Psi: an anchor a with
/// height(a) = A > 1 and a unitary U acting on the w' slots. Psi sends iota
/// to a and multiplies height by A; its two fixed points are infinity and a
/// boundary point c.
#[derive(Debug, Clone)]
pub struct PsiParams<T: Real> {
    scale: T,
    anchor: CVector<T>,
    unitary: CMatrix<T>,
}

impl<T: Real> PsiParams<T> {
    pub fn new(anchor: CVector<T>, unitary: CMatrix<T>) -> Result<Self> {
        if anchor.is_empty() {
            return Err(Error::Descriptor("empty anchor".into()));
        }
        let n = anchor.len();
        let scale = height_raw(&anchor);
        if scale <= T::one() || scale.is_nan() {
            return Err(Error::Descriptor(format!(
                "anchor height {scale:?} must exceed 1"
            )));
        }
        if unitary.rows() != n - 1 || unitary.cols() != n - 1 {
            return Err(Error::Descriptor("unitary of wrong shape".into()));
        }
        if unitary.unitarity_defect() > T::of(1e-10) {
            return Err(Error::Descriptor("matrix is not unitary".into()));
        }
        Ok(Self {
            scale,
            anchor,
            unitary,
        })
    }

    /// Validates an explicitly declared scale against the anchor height.
    pub fn with_declared_scale(scale: T, anchor: CVector<T>, unitary: CMatrix<T>) -> Result<Self> {
        let p = Self::new(anchor, unitary)?;
        if (p.scale - scale).abs() > T::of(1e-10) {
            return Err(Error::Descriptor(format!(
                "declared scale {scale:?} does not match anchor height {:?}",
                p.scale
            )));
        }
        Ok(p)
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn anchor(&self) -> &[C<T>] {
        &self.anchor
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    pub fn apply(&self, z: &SiegelPoint<T>) -> SiegelPoint<T> {
        SiegelPoint::new(psi_apply_raw(
            self.scale,
            &self.anchor,
            &self.unitary,
            z.coords(),
        ))
        .expect("psi multiplies height by A > 1")
    }

    pub fn apply_raw(&self, z: &[C<T>]) -> CVector<T> {
        psi_apply_raw(self.scale, &self.anchor, &self.unitary, z)
    }

    /// As a map descriptor on the Siegel domain.
    pub fn descriptor(&self) -> MapDescriptor<T> {
        let n = self.anchor.len();
        let e = Expr::PsiAut {
            scale: self.scale,
            anchor: self.anchor.clone(),
            unitary: self.unitary.clone(),
            arg: Box::new(Expr::Var),
        };
        MapDescriptor::new(Domain::Siegel(n), e).expect("validated psi parameters")
    }

    /// The finite boundary fixed point c of Psi: solve
    /// (I - sqrt(A) U) c' = a', then the linear first-slot equation
    /// (1 - A) c1 = Re a1 + i ||a'||^2 + 2i sqrt(A) <U c', a'>.
    pub fn boundary_fixed_point(&self) -> Result<CVector<T>> {
        let n = self.anchor.len();
        let root = self.scale.sqrt();
        let mut sys = CMatrix::identity(n - 1);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let u = self.unitary.get(i, j) * Complex::new(root, T::zero());
                sys.set(i, j, sys.get(i, j) - u);
            }
        }
        let cp = sys.solve(&self.anchor[1..])?;
        let u_cp = self.unitary.mul_vec(&cp);
        let cross = herm_inner(&u_cp, &self.anchor[1..]);
        let two_i_root = Complex::new(T::zero(), T::of(2.0) * root);
        let rhs = Complex::new(self.anchor[0].re, norm_sq(&self.anchor[1..])) + two_i_root * cross;
        let c1 = rhs / Complex::new(T::one() - self.scale, T::zero());
        let mut c = Vec::with_capacity(n);
        c.push(c1);
        c.extend(cp);
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64 as c;

    fn sp(v: Vec<C<f64>>) -> SiegelPoint<f64> {
        SiegelPoint::new(v).unwrap()
    }

    #[test]
    fn translation_examples() {
        // b = (1, 0'): pure real shift.
        let b = SiegelBoundary::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let w = sp(vec![c(0.5, 2.0), c(0.3, -0.1)]);
        let out = siegel_translation(&b, &w);
        assert!((out.coords()[0] - c(1.5, 2.0)).norm() < 1e-15);
        assert!((out.height() - w.height()).abs() < 1e-12);

        // b = (i, 1) on iota: (2i, 1), height 1.
        let b2 = SiegelBoundary::new(vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let out2 = siegel_translation(&b2, &SiegelPoint::iota(2));
        assert!((out2.coords()[0] - c(0.0, 2.0)).norm() < 1e-15);
        assert!((out2.coords()[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((out2.height() - 1.0).abs() < 1e-12);

        // group inverse: h_{b^{-1}} undoes h_b, heights unchanged.
        let out3 = siegel_translation(&b2.inverse(), &out2);
        for (u, v) in out3.coords().iter().zip(SiegelPoint::iota(2).coords()) {
            assert!((u - v).norm() < 1e-14);
        }

        assert!(SiegelBoundary::new(vec![c(0.0, 0.5), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn dilation_examples() {
        let w = sp(vec![c(0.0, 2.0), c(1.0, 0.0)]);
        let d1 = siegel_dilation(1.0, &w).unwrap();
        for (u, v) in d1.coords().iter().zip(w.coords()) {
            assert!((u - v).norm() < 1e-15);
        }
        let iota = SiegelPoint::iota(2);
        let d4 = siegel_dilation(4.0, &iota).unwrap();
        assert!((d4.coords()[0] - c(0.0, 4.0)).norm() < 1e-15);
        assert!((d4.height() - 4.0).abs() < 1e-14);

        let dw = siegel_dilation(4.0, &w).unwrap();
        assert!((dw.coords()[0] - c(0.0, 8.0)).norm() < 1e-15);
        assert!((dw.coords()[1] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((dw.height() - 4.0 * w.height()).abs() < 1e-12);
    }

    #[test]
    fn psi_sends_iota_to_anchor() {
        let anchor = vec![c(0.7, 5.3), c(0.4, -0.6)];
        let u = CMatrix::from_rows(vec![vec![c(0.6, 0.8)]]).unwrap();
        let psi = PsiParams::new(anchor.clone(), u).unwrap();
        let out = psi.apply(&SiegelPoint::iota(2));
        for (x, y) in out.coords().iter().zip(&anchor) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_reduces_to_dilation_for_central_anchor() {
        let a = 4.0;
        let anchor = vec![c(0.0, a), c(0.0, 0.0)];
        let u = CMatrix::identity(1);
        let psi = PsiParams::new(anchor, u).unwrap();
        let w = sp(vec![c(0.5, 2.0), c(0.3, -0.1)]);
        let out = psi.apply(&w);
        let direct = siegel_dilation(a, &w).unwrap();
        for (x, y) in out.coords().iter().zip(direct.coords()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn psi_height_scaling() {
        let anchor = vec![c(0.7, 5.3), c(0.4, -0.6)];
        let u = CMatrix::from_rows(vec![vec![c(0.6, 0.8)]]).unwrap();
        let psi = PsiParams::new(anchor, u).unwrap();
        let w = sp(vec![c(-0.4, 3.0), c(0.5, 0.2)]);
        let out = psi.apply(&w);
        assert!(((out.height() - psi.scale() * w.height()) / out.height()).abs() < 1e-12);
    }

    #[test]
    fn boundary_fixed_point_example() {
        // A = 4, U = I, a = (5i, 1): c = (i, -1).
        let anchor = vec![c(0.0, 5.0), c(1.0, 0.0)];
        let psi = PsiParams::new(anchor, CMatrix::identity(1)).unwrap();
        assert!((psi.scale() - 4.0).abs() < 1e-14);
        let cpt = psi.boundary_fixed_point().unwrap();
        assert!((cpt[0] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((cpt[1] - c(-1.0, 0.0)).norm() < 1e-12);
        // Psi(c) = c and c is on the boundary.
        let img = psi.apply_raw(&cpt);
        for (x, y) in img.iter().zip(&cpt) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!((cpt[0].im - norm_sq(&cpt[1..])).abs() < 1e-10);
    }

    #[test]
    fn central_anchor_fixes_origin() {
        let anchor = vec![c(0.0, 4.0), c(0.0, 0.0)];
        let psi = PsiParams::new(anchor, CMatrix::identity(1)).unwrap();
        let cpt = psi.boundary_fixed_point().unwrap();
        assert!(cpt[0].norm() < 1e-13);
        assert!(cpt[1].norm() < 1e-13);
    }

    #[test]
    fn conjugation_by_translation_reaches_psi0_form() {
        // Moving the finite fixed point to the origin turns Psi into the
        // form (A z1, sqrt(A) U z') on samples.
        let anchor = vec![c(0.0, 5.0), c(1.0, 0.0)];
        let psi = PsiParams::new(anchor, CMatrix::identity(1)).unwrap();
        let cpt = psi.boundary_fixed_point().unwrap();
        let b = SiegelBoundary::new(cpt.clone()).unwrap();
        let b_inv = b.inverse();
        let a = psi.scale();
        let root = a.sqrt();
        let mut pts = crate::sample::siegel_points::<f64>(2, 17);
        for _ in 0..50 {
            let w = pts.next().unwrap();
            // h_{b^{-1}} . Psi . h_b (w)
            let step = siegel_translate_raw(b.coords(), &w);
            let step = psi.apply_raw(&step);
            let step = siegel_translate_raw(b_inv.coords(), &step);
            let psi0_first = w[0] * c(a, 0.0);
            let psi0_rest = w[1] * c(root, 0.0);
            assert!(
                (step[0] - psi0_first).norm() < 1e-10 * (1.0 + psi0_first.norm()),
                "first slot mismatch {} vs {}",
                step[0],
                psi0_first
            );
            assert!((step[1] - psi0_rest).norm() < 1e-10 * (1.0 + psi0_rest.norm()));
        }
    }

    #[test]
    fn declared_scale_must_match() {
        let anchor = vec![c(0.0, 5.0), c(1.0, 0.0)];
        assert!(PsiParams::with_declared_scale(4.0, anchor.clone(), CMatrix::identity(1)).is_ok());
        assert!(PsiParams::with_declared_scale(5.0, anchor, CMatrix::identity(1)).is_err());
    }
}
