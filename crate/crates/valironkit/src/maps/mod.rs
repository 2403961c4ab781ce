//! Map descriptors: representation, validation, evaluation, differentiation
//! and iteration of analytic self-maps of the disk, the half-plane, the unit
//! ball and the Siegel domain.

pub mod expr;
pub mod schema;

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg::{norm_sq, CMatrix, CVector};
use crate::sample;
use crate::scalar::{Real, C};
use expr::Expr;

/// Ambient domain of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Disk,
    HalfPlane,
    Ball(usize),
    Siegel(usize),
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Disk | Domain::HalfPlane => 1,
            Domain::Ball(n) | Domain::Siegel(n) => n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Disk => "disk",
            Domain::HalfPlane => "halfplane",
            Domain::Ball(_) => "ball",
            Domain::Siegel(_) => "siegel",
        }
    }

    pub fn is_scalar(self) -> bool {
        self.dim() == 1
    }
}

/// Sampling certificate produced by [`MapDescriptor::validate_self_map`].
///
/// A pass certifies tested behavior on the sampled points, not a proof.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport<T: Real> {
    pub samples_tested: usize,
    pub max_boundary_violation: T,
    pub schwarz_violation: T,
    pub verdict: bool,
}

const VALIDATION_TOL: f64 = 1e-10;

/// A validated symbolic self-map descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDescriptor<T: Real> {
    domain: Domain,
    expr: Expr<T>,
}

impl<T: Real> MapDescriptor<T> {
    /// Builds a descriptor, checking structural well-formedness: constant
    /// arities against the ambient dimension, primitive/domain compatibility
    /// (square roots only where the branch cut is outside the domain,
    /// Siegel primitives only on Siegel domains) and parameter invariants
    /// (unitarity, boundary translation data, anchor heights).
    pub fn new(domain: Domain, expr: Expr<T>) -> Result<Self> {
        check_shape(&expr, domain)?;
        if expr.contains_sqrt() && !matches!(domain, Domain::HalfPlane | Domain::Siegel(_)) {
            return Err(Error::Descriptor(
                "square root is only accepted on halfplane/siegel domains".into(),
            ));
        }
        Ok(Self { domain, expr })
    }

    pub fn identity(domain: Domain) -> Self {
        Self {
            domain,
            expr: Expr::Var,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn expr(&self) -> &Expr<T> {
        &self.expr
    }

    /// Raw evaluation with no containment check.
    pub fn eval_raw(&self, w: &[C<T>]) -> Result<CVector<T>> {
        if w.len() != self.domain.dim() {
            return Err(Error::Descriptor(format!(
                "point dimension {} does not match domain dimension {}",
                w.len(),
                self.domain.dim()
            )));
        }
        let out = self.expr.eval(w)?;
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain {
                domain: self.domain.name(),
                detail: "non-finite value during evaluation".into(),
            });
        }
        Ok(out)
    }

    pub fn eval_scalar_raw(&self, z: C<T>) -> Result<C<T>> {
        debug_assert!(self.domain.is_scalar());
        let out = self.expr.eval_scalar(z)?;
        if !out.re.is_finite() || !out.im.is_finite() {
            return Err(Error::Domain {
                domain: self.domain.name(),
                detail: format!("non-finite value at {z:?}"),
            });
        }
        Ok(out)
    }

    /// Evaluation with the closed-domain containment check: the image may
    /// not leave the domain by more than 1e-10 (relative for the unbounded
    /// models), which would signal a non-self-map or numeric blowup.
    pub fn eval_checked(&self, w: &[C<T>]) -> Result<CVector<T>> {
        let out = self.eval_raw(w)?;
        let v = containment_violation(self.domain, &out);
        if v > T::of(VALIDATION_TOL) {
            return Err(Error::Domain {
                domain: self.domain.name(),
                detail: format!("image leaves domain by {v:?}"),
            });
        }
        Ok(out)
    }

    pub fn eval_scalar_checked(&self, z: C<T>) -> Result<C<T>> {
        let out = self.eval_scalar_raw(z)?;
        let v = containment_violation(self.domain, &[out]);
        if v > T::of(VALIDATION_TOL) {
            return Err(Error::Domain {
                domain: self.domain.name(),
                detail: format!("image {out:?} leaves domain by {v:?}"),
            });
        }
        Ok(out)
    }

    /// Complex derivative at an interior point of a one-dimensional domain.
    pub fn derivative(&self, z: C<T>) -> Result<C<T>> {
        if !self.domain.is_scalar() {
            return Err(Error::Descriptor(
                "derivative: use jacobian for vector domains".into(),
            ));
        }
        let (_, j) = self.expr.eval_jacobian(&[z])?;
        Ok(j.get(0, 0))
    }

    /// Jacobian matrix at an interior point.
    pub fn jacobian(&self, w: &[C<T>]) -> Result<CMatrix<T>> {
        let (_, j) = self.expr.eval_jacobian(w)?;
        Ok(j)
    }

    /// n-fold composition as a descriptor; n = 0 is the identity.
    pub fn iterate(&self, n: usize) -> MapDescriptor<T> {
        if n == 0 {
            return Self::identity(self.domain);
        }
        let mut e = self.expr.clone();
        for _ in 1..n {
            e = Expr::compose(self.expr.clone(), e);
        }
        MapDescriptor {
            domain: self.domain,
            expr: e,
        }
    }

    /// Samples quasi-random pairs and checks closed-domain containment and
    /// pseudo-distance contraction d(f(a), f(b)) <= d(a, b). Deterministic
    /// for a fixed seed.
    pub fn validate_self_map(&self, n_samples: usize, seed: u64) -> ValidationReport<T> {
        let mut boundary = T::zero();
        let mut schwarz = T::zero();
        let mut tested = 0usize;
        let mut fail = false;

        let mut push_pair = |a: CVector<T>, b: CVector<T>| -> bool {
            let fa = match self.eval_raw(&a) {
                Ok(v) => v,
                Err(_) => {
                    fail = true;
                    return false;
                }
            };
            let fb = match self.eval_raw(&b) {
                Ok(v) => v,
                Err(_) => {
                    fail = true;
                    return false;
                }
            };
            let bv = containment_violation(self.domain, &fa)
                .max(containment_violation(self.domain, &fb));
            if bv > boundary {
                boundary = bv;
            }
            let da = domain_pseudo_distance(self.domain, &a, &b);
            let db = domain_pseudo_distance(self.domain, &fa, &fb);
            let sv = db - da;
            if sv > schwarz {
                schwarz = sv;
            }
            true
        };

        match self.domain {
            Domain::Disk => {
                let mut pts = sample::disk_points::<T>(seed, 0.99);
                for _ in 0..n_samples {
                    let a = vec![pts.next().unwrap()];
                    let b = vec![pts.next().unwrap()];
                    tested += 1;
                    if !push_pair(a, b) {
                        break;
                    }
                }
            }
            Domain::HalfPlane => {
                let mut pts = sample::halfplane_points::<T>(seed);
                for _ in 0..n_samples {
                    let a = vec![pts.next().unwrap()];
                    let b = vec![pts.next().unwrap()];
                    tested += 1;
                    if !push_pair(a, b) {
                        break;
                    }
                }
            }
            Domain::Ball(n) => {
                let mut pts = sample::ball_points::<T>(n, seed, 0.99);
                for _ in 0..n_samples {
                    let a = pts.next().unwrap();
                    let b = pts.next().unwrap();
                    tested += 1;
                    if !push_pair(a, b) {
                        break;
                    }
                }
            }
            Domain::Siegel(n) => {
                let mut pts = sample::siegel_points::<T>(n, seed);
                for _ in 0..n_samples {
                    let a = pts.next().unwrap();
                    let b = pts.next().unwrap();
                    tested += 1;
                    if !push_pair(a, b) {
                        break;
                    }
                }
            }
        }

        if fail {
            boundary = T::infinity();
        }
        let tol = T::of(VALIDATION_TOL);
        ValidationReport {
            samples_tested: tested,
            max_boundary_violation: boundary,
            schwarz_violation: schwarz,
            verdict: !fail && boundary <= tol && schwarz <= tol,
        }
    }

    pub fn to_json(&self) -> String {
        schema::to_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        schema::from_json(s)
    }
}

/// How far a computed image lies outside the closed domain, normalized so
/// the unbounded models use a relative scale.
pub fn containment_violation<T: Real>(domain: Domain, w: &[C<T>]) -> T {
    match domain {
        Domain::Disk => (w[0].norm() - T::one()).max(T::zero()),
        Domain::HalfPlane => {
            let scale = w[0].norm().max(T::one());
            (-w[0].im).max(T::zero()) / scale
        }
        Domain::Ball(_) => (norm_sq(w).sqrt() - T::one()).max(T::zero()),
        Domain::Siegel(_) => {
            let h = w[0].im - norm_sq(&w[1..]);
            let scale = w[0].norm().max(T::one());
            (-h).max(T::zero()) / scale
        }
    }
}

/// Invariant pseudo-distance of the ambient domain on raw coordinates.
pub fn domain_pseudo_distance<T: Real>(domain: Domain, a: &[C<T>], b: &[C<T>]) -> T {
    match domain {
        Domain::Disk => geometry::pseudo_distance_raw(a[0], b[0]),
        Domain::HalfPlane => geometry::halfplane_pseudo_distance_raw(a[0], b[0]),
        Domain::Ball(_) => crate::ball::pseudo_distance_raw(a, b),
        Domain::Siegel(_) => crate::ball::siegel_pseudo_distance_raw(a, b),
    }
}

fn check_shape<T: Real>(expr: &Expr<T>, domain: Domain) -> Result<()> {
    let n = domain.dim();
    match expr {
        Expr::Var => Ok(()),
        Expr::Const(v) => {
            if v.len() != n {
                return Err(Error::Descriptor(format!(
                    "constant of length {} in a {}-dimensional domain",
                    v.len(),
                    n
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Descriptor("non-finite constant".into()));
            }
            Ok(())
        }
        Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            check_shape(a, domain)?;
            check_shape(b, domain)
        }
        Expr::Powi(a, _) | Expr::Sqrt(a) => check_shape(a, domain),
        Expr::Mobius { a, b, c, d, arg } => {
            let det = a * d - b * c;
            if det.norm() <= T::of(1e-15) {
                return Err(Error::Descriptor("degenerate Moebius parameters".into()));
            }
            check_shape(arg, domain)
        }
        Expr::Compose { outer, inner } => {
            check_shape(outer, domain)?;
            check_shape(inner, domain)
        }
        Expr::SiegelTranslate { b, arg } => {
            if !matches!(domain, Domain::Siegel(_)) {
                return Err(Error::Descriptor(
                    "siegel translation outside a siegel domain".into(),
                ));
            }
            if b.len() != n {
                return Err(Error::Descriptor(
                    "translation datum of wrong length".into(),
                ));
            }
            let defect = (b[0].im - norm_sq(&b[1..])).abs();
            if defect > T::of(1e-12) {
                return Err(Error::Descriptor(format!(
                    "translation datum off the boundary: Im b1 - ||b'||^2 = {defect:?}"
                )));
            }
            check_shape(arg, domain)
        }
        Expr::SiegelDilate { factor, arg } => {
            if !matches!(domain, Domain::Siegel(_)) {
                return Err(Error::Descriptor(
                    "siegel dilation outside a siegel domain".into(),
                ));
            }
            if *factor <= T::zero() || factor.is_nan() {
                return Err(Error::Descriptor("dilation factor must be positive".into()));
            }
            check_shape(arg, domain)
        }
        Expr::Unitary { matrix, arg } => {
            if matches!(domain, Domain::Disk | Domain::HalfPlane) {
                return Err(Error::Descriptor(
                    "unitary primitive needs a vector domain".into(),
                ));
            }
            if matrix.rows() != n || matrix.cols() != n {
                return Err(Error::Descriptor(format!(
                    "unitary of shape {}x{} in dimension {}",
                    matrix.rows(),
                    matrix.cols(),
                    n
                )));
            }
            let defect = matrix.unitarity_defect();
            if defect > T::of(1e-10) {
                return Err(Error::Descriptor(format!(
                    "matrix is not unitary (defect {defect:?})"
                )));
            }
            check_shape(arg, domain)
        }
        Expr::PsiAut {
            scale,
            anchor,
            unitary,
            arg,
        } => {
            if !matches!(domain, Domain::Siegel(_)) {
                return Err(Error::Descriptor(
                    "psi automorphism outside a siegel domain".into(),
                ));
            }
            if anchor.len() != n {
                return Err(Error::Descriptor("anchor of wrong length".into()));
            }
            let h = anchor[0].im - norm_sq(&anchor[1..]);
            if (h - *scale).abs() > T::of(1e-10) {
                return Err(Error::Descriptor(format!(
                    "anchor height {h:?} does not match scale {scale:?}"
                )));
            }
            if *scale <= T::one() || scale.is_nan() {
                return Err(Error::Descriptor("psi scale must exceed 1".into()));
            }
            if unitary.rows() != n - 1 || unitary.cols() != n - 1 {
                return Err(Error::Descriptor("psi unitary of wrong shape".into()));
            }
            if unitary.unitarity_defect() > T::of(1e-10) {
                return Err(Error::Descriptor("psi matrix is not unitary".into()));
            }
            check_shape(arg, domain)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::scalar::c64 as c;

    #[test]
    fn evaluate_examples() {
        let m = corpus::hp_affine::<f64>(2.0, 0.0, 1.0);
        assert!((m.eval_scalar_checked(c(0.0, 1.0)).unwrap() - c(0.0, 3.0)).norm() < 1e-15);

        let phi = corpus::disk_mobius_a_half::<f64>();
        assert!((phi.eval_scalar_checked(c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);

        let s = corpus::hp_two_z_plus_sqrt::<f64>();
        let v = s.eval_scalar_checked(c(0.0, 1.0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - c(r, 2.0 + r)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let phi = corpus::disk_mobius_a_half::<f64>();
        // phi'(z) = (1 - a^2)/(1 + a z)^2 with a = 0.5; at z -> 1: 1/3.
        let d = phi.derivative(c(1.0 - 1e-12, 0.0)).unwrap();
        assert!((d - c(1.0 / 3.0, 0.0)).norm() < 1e-11);
        let idm = MapDescriptor::<f64>::identity(Domain::Disk);
        assert!((idm.derivative(c(0.2, 0.4)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let aff = corpus::hp_affine::<f64>(2.0, 0.0, 1.0);
        assert!((aff.derivative(c(5.0, 2.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn validation_examples() {
        let phi = corpus::disk_mobius_a_half::<f64>();
        assert!(phi.validate_self_map(400, 11).verdict);

        let double = corpus::disk_scale::<f64>(2.0);
        let rep = double.validate_self_map(400, 11);
        assert!(!rep.verdict);
        assert!(rep.max_boundary_violation > 1e-10);

        let s = corpus::hp_two_z_plus_sqrt::<f64>();
        assert!(s.validate_self_map(400, 11).verdict);
    }

    #[test]
    fn iterate_descriptor_examples() {
        let m = corpus::hp_affine::<f64>(2.0, 0.0, 1.0);
        let id = m.iterate(0);
        assert!((id.eval_scalar_raw(c(3.0, 4.0)).unwrap() - c(3.0, 4.0)).norm() < 1e-15);

        // (2z + i)^(3) at i: 2^3 i + (2^3 - 1) i = 15 i.
        let m3 = m.iterate(3);
        assert!((m3.eval_scalar_raw(c(0.0, 1.0)).unwrap() - c(0.0, 15.0)).norm() < 1e-12);

        // phi(z) = z/(2 - z): phi_n(z) = z/(2^n - (2^n - 1) z).
        let phi = corpus::disk_elliptic_half::<f64>();
        let phi2 = phi.iterate(2);
        for &(re, im) in &[(0.5, 0.0), (0.2, 0.3), (-0.4, 0.1)] {
            let z = c(re, im);
            let expect = z / (c(4.0, 0.0) - c(3.0, 0.0) * z);
            assert!((phi2.eval_scalar_raw(z).unwrap() - expect).norm() < 1e-13);
        }

        // iterate/evaluate consistency for small n.
        let s = corpus::hp_two_z_plus_sqrt::<f64>();
        let z0 = c(0.3, 1.2);
        let mut w = z0;
        for n in 1..=4 {
            w = s.eval_scalar_raw(w).unwrap();
            let via_iter = s.iterate(n).eval_scalar_raw(z0).unwrap();
            assert!((via_iter - w).norm() < 1e-10 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn sqrt_rejected_on_disk() {
        let e = Expr::sqrt(Expr::<f64>::var());
        assert!(MapDescriptor::new(Domain::Disk, e.clone()).is_err());
        assert!(MapDescriptor::new(Domain::HalfPlane, e).is_ok());
    }

    #[test]
    fn checked_evaluation_rejects_domain_escape() {
        // 2z at 0.6 lands outside the closed disk.
        let double = corpus::disk_scale::<f64>(2.0);
        assert!(double.eval_scalar_checked(c(0.6, 0.0)).is_err());
        assert!(double.eval_scalar_checked(c(0.2, 0.1)).is_ok());
    }

    #[test]
    fn schwarz_at_origin_property() {
        // Maps fixing 0: |phi(z)| <= |z| on samples.
        for m in [
            corpus::disk_elliptic_half::<f64>(),
            corpus::disk_rotation_i::<f64>(),
            corpus::disk_koenigs_quadratic(),
        ] {
            let mut pts = sample::disk_points::<f64>(23, 0.995);
            for _ in 0..1000 {
                let z = pts.next().unwrap();
                let w = m.eval_scalar_raw(z).unwrap();
                assert!(w.norm() <= z.norm() + 1e-12, "{z} -> {w}");
            }
        }
    }

    #[test]
    fn pseudo_disk_contraction_property() {
        // phi(Delta(z, r)) inside Delta(phi(z), r + 1e-10) on sampled
        // pseudo-disk boundary points.
        let maps = [
            corpus::disk_mobius_a_half::<f64>(),
            corpus::disk_elliptic_half::<f64>(),
            corpus::disk_affine_half::<f64>(),
        ];
        let mut centers = sample::disk_points::<f64>(37, 0.9);
        for m in &maps {
            for _ in 0..40 {
                let z = centers.next().unwrap();
                let fz = m.eval_scalar_raw(z).unwrap();
                for k in 0..16 {
                    let r = 0.1 + 0.05 * k as f64 % 0.85;
                    let th = 2.0 * std::f64::consts::PI * (k as f64) / 16.0;
                    // boundary point of Delta(z, r): gamma_z^{-1}(r e^{i th})
                    let u = c(r * th.cos(), r * th.sin());
                    let w = (u + z) / (c(1.0, 0.0) + z.conj() * u);
                    let fw = m.eval_scalar_raw(w).unwrap();
                    assert!(
                        geometry::pseudo_distance_raw(fw, fz) <= r + 1e-10,
                        "contraction failed at z={z} r={r}"
                    );
                }
            }
        }
    }
}
