//! The renormalized-iteration construction of the intertwining map.
//!
//! Given a hyperbolic self-map Phi of the half-plane and a base orbit
//! z_n = x_n + i y_n, the renormalizers tau_n(z) = (z - x_n)/y_n send z_n
//! back to i, and sigma_n = tau_n . Phi_n converges to a map sigma with
//! `sigma . Phi = A sigma + b_inf` (so sigma intertwines Phi with the
//! automorphism T(z) = A z + b_inf),
//! where A is the limit of y_{n+1}/y_n and b_inf the limit of
//! (x_{n+1} - x_n)/y_n. The angle theta(z0) = lim Arg z_n satisfies
//! b_inf = (A - 1) cot(theta). This module builds the model, evaluates
//! sigma on demand (per-query depth recorded), certifies the functional
//! equation residual, checks semi-conformality at infinity, decides whether
//! z_n / A^n converges (the angular derivative), runs the Heins curve
//! t -> H(t sigma), and solves the Koenigs equation in the elliptic case.

use crate::accel::{accelerate, accelerate_real};
use crate::dynamics::{iterate_orbit, OrbitTrace, Termination};
use crate::error::{Error, Result};
use crate::maps::expr::Expr;
use crate::maps::{Domain, MapDescriptor};
use crate::scalar::{Real, C};
use num_complex::Complex;

#[derive(Debug, Clone, Copy)]
pub struct ValironOptions<T: Real> {
    pub max_orbit: usize,
    pub escape_cap: T,
    /// Certificate tolerance for sigma queries.
    pub sigma_tol: T,
    /// Certificate tolerance for the (A, b_inf) limits.
    pub accel_tol: T,
}

impl<T: Real> Default for ValironOptions<T> {
    fn default() -> Self {
        Self {
            max_orbit: 4000,
            escape_cap: T::of(1e12),
            sigma_tol: T::of(1e-9),
            accel_tol: T::of(1e-6),
        }
    }
}

/// The limit data (A, b_inf, theta) extracted from a hyperbolic orbit.
#[derive(Debug, Clone, Copy)]
pub struct LimitData<T: Real> {
    pub a: T,
    pub b_inf: T,
    /// theta from the cot relation applied to (A, b_inf).
    pub theta: T,
    /// theta from directly accelerated Arg z_n (cross-check).
    pub theta_direct: T,
    /// Largest Aitken residual among the A and b_inf limits.
    pub accel_residual: T,
}

/// Affine renormalizer tau_n(z) = (z - x_n)/y_n with inverse x_n + z y_n.
#[derive(Debug, Clone, Copy)]
pub struct Renormalizer<T: Real> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Renormalizer<T> {
    pub fn apply(&self, z: C<T>) -> C<T> {
        (z - Complex::new(self.x, T::zero())) / Complex::new(self.y, T::zero())
    }

    pub fn inverse(&self, z: C<T>) -> C<T> {
        Complex::new(self.x, T::zero()) + z * Complex::new(self.y, T::zero())
    }
}

/// The renormalizers of every recorded orbit point.
pub fn renormalizers<T: Real>(trace: &OrbitTrace<T>) -> Result<Vec<Renormalizer<T>>> {
    if trace.domain != Domain::HalfPlane {
        return Err(Error::Descriptor(
            "renormalizers need a half-plane orbit".into(),
        ));
    }
    Ok(trace
        .points
        .iter()
        .map(|z| Renormalizer { x: z.re, y: z.im })
        .collect())
}

/// Extracts (A, b_inf, theta) from a hyperbolic half-plane orbit of length
/// at least 20, with Aitken certificates at 1e-6 and a 1e-4 cross-check of
/// theta against the accelerated argument sequence (disagreement flags the
/// model rather than failing it; see [`ValironModel::flagged`]).
pub fn limit_data<T: Real>(trace: &OrbitTrace<T>) -> Result<LimitData<T>> {
    if trace.domain != Domain::HalfPlane {
        return Err(Error::Descriptor(
            "limit data needs a half-plane orbit".into(),
        ));
    }
    if trace.len() < 20 {
        return Err(Error::Inconclusive(format!(
            "orbit of length {} is too short (need 20)",
            trace.len()
        )));
    }
    let pts = &trace.points;
    let y_ratios: Vec<T> = pts.windows(2).map(|p| p[1].im / p[0].im).collect();
    let b_seq: Vec<T> = pts
        .windows(2)
        .map(|p| (p[1].re - p[0].re) / p[0].im)
        .collect();

    let tol = T::of(1e-6);
    let a_acc = accelerate_real(&y_ratios, tol);
    let b_acc = accelerate_real(&b_seq, tol);
    if !a_acc.converged || !b_acc.converged {
        return Err(Error::Convergence {
            context: "limit data (A, b_inf)".into(),
            prev: format!("{:?}", y_ratios[y_ratios.len() - 2]),
            last: format!("{:?}", y_ratios[y_ratios.len() - 1]),
            residual: a_acc.residual.max(b_acc.residual).as_f64(),
        });
    }
    let a = a_acc.value;
    let b_inf = b_acc.value;
    // Mirror the classification band: A below 1 + 1e-4 is parabolic
    // territory, where the renormalized limits degenerate.
    if a <= T::one() + T::of(1e-4) {
        return Err(Error::Inconclusive(format!(
            "orbit is not hyperbolic (estimated A = {a:?})"
        )));
    }
    // theta = Arg(q_inf - i) with q_inf = b_inf + iA.
    let theta = (a - T::one()).atan2(b_inf);
    let th_acc = accelerate_real(&trace.args, T::of(1e-6));
    Ok(LimitData {
        a,
        b_inf,
        theta,
        theta_direct: th_acc.value,
        accel_residual: a_acc.residual.max(b_acc.residual),
    })
}

/// A sigma query: the value, the iteration depth consumed, and the Aitken
/// certificate of the renormalized sequence.
#[derive(Debug, Clone, Copy)]
pub struct Sigma<T: Real> {
    pub value: C<T>,
    pub n_used: usize,
    pub residual: T,
}

/// The constructed model around one base orbit.
#[derive(Debug, Clone)]
pub struct ValironModel<T: Real> {
    map: MapDescriptor<T>,
    z0: C<T>,
    trace: OrbitTrace<T>,
    limits: LimitData<T>,
    flagged: bool,
    opts: ValironOptions<T>,
}

impl<T: Real> ValironModel<T> {
    pub fn build(
        map: &MapDescriptor<T>,
        z0: C<T>,
        opts: ValironOptions<T>,
    ) -> Result<ValironModel<T>> {
        if map.domain() != Domain::HalfPlane {
            return Err(Error::Descriptor(
                "the intertwining construction runs in the half-plane model".into(),
            ));
        }
        let trace = iterate_orbit(map, z0, opts.max_orbit, Some(opts.escape_cap))?;
        if trace.termination == Termination::Converged {
            return Err(Error::Inconclusive(
                "orbit converged to an interior point; the map is not hyperbolic".into(),
            ));
        }
        let limits = limit_data(&trace)?;
        let flagged = (limits.theta - limits.theta_direct).abs() > T::of(1e-4);
        Ok(ValironModel {
            map: map.clone(),
            z0,
            trace,
            limits,
            flagged,
            opts,
        })
    }

    pub fn map(&self) -> &MapDescriptor<T> {
        &self.map
    }

    pub fn base_point(&self) -> C<T> {
        self.z0
    }

    pub fn trace(&self) -> &OrbitTrace<T> {
        &self.trace
    }

    pub fn a(&self) -> T {
        self.limits.a
    }

    pub fn b_inf(&self) -> T {
        self.limits.b_inf
    }

    pub fn theta(&self) -> T {
        self.limits.theta
    }

    pub fn theta_direct(&self) -> T {
        self.limits.theta_direct
    }

    pub fn limits(&self) -> LimitData<T> {
        self.limits
    }

    /// True when the cot-relation theta and the direct Arg z_n limit
    /// disagree beyond 1e-4 (insufficient orbit depth).
    pub fn flagged(&self) -> bool {
        self.flagged
    }

    pub fn renormalizer(&self, n: usize) -> Renormalizer<T> {
        let z = self.trace.points[n];
        Renormalizer { x: z.re, y: z.im }
    }

    /// sigma(z) as the accelerated limit of tau_n(Phi_n(z)); depth grows
    /// until the certificate reaches `sigma_tol` or the base orbit is
    /// exhausted.
    pub fn sigma(&self, z: C<T>) -> Result<Sigma<T>> {
        let mut vals: Vec<C<T>> = Vec::with_capacity(self.trace.len());
        let mut w = z;
        let early = self.opts.sigma_tol * T::of(1e-2);
        for n in 0..self.trace.len() {
            let r = self.renormalizer(n);
            vals.push(r.apply(w));
            let k = vals.len();
            if k >= 3 && (vals[k - 1] - vals[k - 2]).norm() < early {
                break;
            }
            if n + 1 < self.trace.len() {
                w = self.map.eval_scalar_raw(w)?;
            }
        }
        // The certificate scales with |sigma|: far from the base point the
        // values grow like |z| and the extrapolation bottoms out at the
        // rounding floor of that magnitude.
        let acc = accelerate(&vals, self.opts.sigma_tol);
        if acc.residual > self.opts.sigma_tol * acc.value.norm().max(T::one()) {
            return Err(Error::Convergence {
                context: format!("sigma at {z:?}"),
                prev: format!("{:?}", vals[vals.len() - 2]),
                last: format!("{:?}", vals[vals.len() - 1]),
                residual: acc.residual.as_f64(),
            });
        }
        Ok(Sigma {
            value: acc.value,
            n_used: vals.len(),
            residual: acc.residual,
        })
    }

    /// sigma_hat = sigma + b_inf/(A - 1), the solution of
    /// sigma_hat . Phi = A sigma_hat.
    pub fn sigma_hat(&self, z: C<T>) -> Result<Sigma<T>> {
        let mut s = self.sigma(z)?;
        s.value = s.value + Complex::new(self.limits.b_inf / (self.limits.a - T::one()), T::zero());
        Ok(s)
    }

    /// A 5x5 polar grid inside the hyperbolic ball of the given radius
    /// around the base point.
    pub fn hyperbolic_grid(&self, radius: T, nr: usize, ntheta: usize) -> Vec<C<T>> {
        let mut out = Vec::with_capacity(nr * ntheta);
        let x0 = Complex::new(self.z0.re, T::zero());
        let y0 = Complex::new(self.z0.im, T::zero());
        let i = Complex::new(T::zero(), T::one());
        let one = Complex::new(T::one(), T::zero());
        for a in 1..=nr {
            let rho = radius * T::of(a as f64) / T::of(nr as f64);
            let d = (rho / T::of(2.0)).tanh();
            for b in 0..ntheta {
                let th = T::of(2.0) * T::PI() * T::of(b as f64) / T::of(ntheta as f64);
                let u = Complex::new(d * th.cos(), d * th.sin());
                // unit disk -> half-plane isometry centered at z0
                let z = x0 + y0 * i * (one + u) / (one - u);
                out.push(z);
            }
        }
        out
    }

    /// Max and mean of |sigma(Phi(z)) - A sigma(z) - b_inf| over a grid.
    pub fn functional_residual(&self, grid: &[C<T>]) -> Result<(T, T)> {
        let a = Complex::new(self.limits.a, T::zero());
        let b = Complex::new(self.limits.b_inf, T::zero());
        let mut max = T::zero();
        let mut sum = T::zero();
        for &z in grid {
            let fz = self.map.eval_scalar_raw(z)?;
            let lhs = self.sigma(fz)?.value;
            let rhs = a * self.sigma(z)?.value + b;
            let r = (lhs - rhs).norm();
            sum = sum + r;
            if r > max {
                max = r;
            }
        }
        Ok((max, sum / T::of(grid.len() as f64)))
    }

    /// Semi-conformality at infinity: extrapolated Arg(sigma_hat(z)/z)
    /// along the rays Arg z in {pi/4, pi/2, 3pi/4}, |z| = 2^k for k = 3..20.
    /// Returns the per-ray limits; all must be within 1e-3 of zero to pass.
    pub fn semiconformality(&self) -> Result<Vec<T>> {
        let angles = [T::FRAC_PI_4(), T::FRAC_PI_2(), T::of(3.0) * T::FRAC_PI_4()];
        let mut limits = Vec::with_capacity(3);
        for th in angles {
            let dir = Complex::new(th.cos(), th.sin());
            let mut vals = Vec::with_capacity(18);
            for k in 3..=20 {
                let z = dir * Complex::new(T::of(2.0).powi(k), T::zero());
                let s = self.sigma_hat(z)?.value;
                vals.push((s / z).arg());
            }
            let acc = accelerate_real(&vals, T::of(1e-4));
            limits.push(acc.value);
        }
        Ok(limits)
    }

    /// Whether z_n / A^n converges (equivalently: sigma has a finite angular
    /// derivative at infinity). Present returns the limit L of z_n/A^n and
    /// the derivative value sigma_hat(z0)/L.
    pub fn angular_derivative(&self) -> Result<AngularDerivative<T>> {
        let a = self.limits.a;
        let mut seq = Vec::with_capacity(self.trace.len());
        let mut scale = T::one();
        for z in &self.trace.points {
            seq.push(*z / Complex::new(scale, T::zero()));
            scale = scale * a;
        }
        let acc = accelerate(&seq, T::of(1e-8));
        if !acc.converged || acc.value.norm() < T::of(1e-8) {
            return Ok(AngularDerivative::Absent {
                residual: acc.residual,
                last: *seq.last().unwrap(),
            });
        }
        let l = acc.value;
        let sigma_hat_z0 = Complex::new(T::zero(), T::one())
            + Complex::new(self.limits.b_inf / (a - T::one()), T::zero());
        let val = sigma_hat_z0 / l;
        if val.im.abs() > T::of(1e-6) * val.norm() || val.re <= T::zero() {
            return Ok(AngularDerivative::Absent {
                residual: acc.residual,
                last: val,
            });
        }
        Ok(AngularDerivative::Present {
            ratio_limit: l,
            value: val.re,
        })
    }

    /// The Heins curve t -> H(t sigma): for each t, iterate z -> t sigma(z)
    /// from i and classify the outcome.
    pub fn heins_curve(&self, ts: &[T], budget: usize) -> Result<Vec<HeinsSample<T>>> {
        // t sigma is a self-map of the half-plane for every t > 0; spot-check.
        for &z in &[
            Complex::new(T::zero(), T::one()),
            Complex::new(T::of(2.0), T::of(3.0)),
        ] {
            let s = self.sigma(z)?.value;
            if s.im <= T::zero() || s.im.is_nan() {
                return Err(Error::Domain {
                    domain: "halfplane",
                    detail: format!("sigma({z:?}) = {s:?} left the half-plane"),
                });
            }
        }
        let mut out = Vec::with_capacity(ts.len());
        for &t in ts {
            if t <= T::zero() || t.is_nan() {
                return Err(Error::Descriptor("Heins parameter must be positive".into()));
            }
            let tc = Complex::new(t, T::zero());
            let mut z = Complex::new(T::zero(), T::one());
            let mut sample = None;
            for _ in 0..budget {
                let w = tc * self.sigma(z)?.value;
                if w.norm() > T::of(1e10) {
                    sample = Some(HeinsSample {
                        t,
                        kind: HeinsKind::InfinityDw,
                        value: None,
                    });
                    break;
                }
                if w.im < T::of(1e-9) && w.re.abs() < T::of(1e6) {
                    sample = Some(HeinsSample {
                        t,
                        kind: HeinsKind::BoundaryDw,
                        value: Some(Complex::new(w.re, T::zero())),
                    });
                    break;
                }
                if (w - z).norm() < T::of(1e-10) * w.norm().max(T::one()) {
                    sample = Some(HeinsSample {
                        t,
                        kind: HeinsKind::InteriorFixed,
                        value: Some(w),
                    });
                    break;
                }
                z = w;
            }
            match sample {
                Some(s) => out.push(s),
                None => {
                    return Err(Error::Inconclusive(format!(
                        "Heins iteration budget exhausted at t = {t:?}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum AngularDerivative<T: Real> {
    Present { ratio_limit: C<T>, value: T },
    Absent { residual: T, last: C<T> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeinsKind {
    InteriorFixed,
    BoundaryDw,
    InfinityDw,
}

impl HeinsKind {
    pub fn name(self) -> &'static str {
        match self {
            HeinsKind::InteriorFixed => "interior-fixed",
            HeinsKind::BoundaryDw => "boundary-dw",
            HeinsKind::InfinityDw => "infinity-dw",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HeinsSample<T: Real> {
    pub t: T,
    pub kind: HeinsKind,
    pub value: Option<C<T>>,
}

/// Growth-bound check: |Phi(z) - A z| <= M |z|^(1 - eps) on a log-spaced
/// grid |z| in [1, 1e10] spread over 10 rays. Pass if no violation exceeds
/// 1e-9 relative.
#[derive(Debug, Clone, Copy)]
pub struct GrowthBoundReport<T: Real> {
    pub max_rel_violation: T,
    pub pass: bool,
}

pub fn bourdon_shapiro_check<T: Real>(
    m: &MapDescriptor<T>,
    a: T,
    m_const: T,
    eps: T,
    n_samples: usize,
) -> Result<GrowthBoundReport<T>> {
    if m.domain() != Domain::HalfPlane {
        return Err(Error::Descriptor(
            "growth bound needs a half-plane map".into(),
        ));
    }
    let rays = 10usize;
    let per_ray = (n_samples / rays).max(2);
    let ac = Complex::new(a, T::zero());
    let mut worst = T::zero();
    for j in 0..rays {
        let th = T::PI() * T::of((j as f64 + 0.5) / rays as f64);
        let dir = Complex::new(th.cos(), th.sin());
        for k in 0..per_ray {
            let e = T::of(10.0 * k as f64 / (per_ray - 1) as f64);
            let r = T::of(10.0).powf(e);
            let z = dir * Complex::new(r, T::zero());
            let gamma = (m.eval_scalar_raw(z)? - ac * z).norm();
            let bound = m_const * r.powf(T::one() - eps);
            let rel = (gamma - bound) / bound.max(T::of(1e-300));
            if rel > worst {
                worst = rel;
            }
        }
    }
    Ok(GrowthBoundReport {
        max_rel_violation: worst.max(T::zero()),
        pass: worst <= T::of(1e-9),
    })
}

/// Numerical Koenigs linearization sigma = lim lambda^{-n} phi_n for an
/// elliptic map with attracting interior fixed point (0 < |lambda| < 1).
/// Work happens in coordinates where the fixed point sits at the origin;
/// superattracting maps (lambda = 0) are rejected.
pub struct KoenigsMap<T: Real> {
    conjugated: MapDescriptor<T>,
    lambda: C<T>,
}

pub fn koenigs_map<T: Real>(
    m: &MapDescriptor<T>,
    fixed: C<T>,
    lambda: C<T>,
) -> Result<KoenigsMap<T>> {
    if m.domain() != Domain::Disk {
        return Err(Error::Descriptor("Koenigs map needs a disk map".into()));
    }
    if lambda.norm() < T::of(1e-12) {
        return Err(Error::Descriptor(
            "superattracting fixed point (lambda = 0) is out of scope".into(),
        ));
    }
    if lambda.norm() >= T::one() - T::of(1e-6) {
        return Err(Error::Descriptor(format!(
            "|lambda| = {:?} too close to 1 for linearization",
            lambda.norm()
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    let conjugated = if fixed.norm() < T::of(1e-14) {
        m.clone()
    } else {
        // gamma_p . phi . gamma_p^{-1} with gamma_p(z) = (z - p)/(1 - conj(p) z)
        let gp = Expr::mobius(one, -fixed, -fixed.conj(), one, Expr::var());
        let gp_inv = Expr::mobius(one, fixed, fixed.conj(), one, Expr::var());
        let e = Expr::compose(gp, Expr::compose(m.expr().clone(), gp_inv));
        MapDescriptor::new(Domain::Disk, e)?
    };
    Ok(KoenigsMap { conjugated, lambda })
}

impl<T: Real> KoenigsMap<T> {
    pub fn lambda(&self) -> C<T> {
        self.lambda
    }

    /// sigma(z) in the conjugated coordinates (fixed point at 0).
    pub fn sigma(&self, z: C<T>) -> Result<C<T>> {
        let mut vals = Vec::with_capacity(120);
        let mut w = z;
        let mut coef = Complex::new(T::one(), T::zero());
        for _ in 0..240 {
            vals.push(w * coef);
            let k = vals.len();
            if k >= 3 && (vals[k - 1] - vals[k - 2]).norm() < T::of(1e-15) {
                break;
            }
            w = self.conjugated.eval_scalar_raw(w)?;
            coef = coef / self.lambda;
        }
        let acc = accelerate(&vals, T::of(1e-12));
        if !acc.converged {
            return Err(Error::Convergence {
                context: format!("Koenigs limit at {z:?}"),
                prev: format!("{:?}", vals[vals.len() - 2]),
                last: format!("{:?}", vals[vals.len() - 1]),
                residual: acc.residual.as_f64(),
            });
        }
        Ok(acc.value)
    }

    /// Largest |sigma(phi(z)) - lambda sigma(z)| over a polar grid in
    /// |z| <= r.
    pub fn residual_on_disk(&self, r: T, n: usize) -> Result<T> {
        let mut worst = T::zero();
        for a in 1..=n {
            let rad = r * T::of(a as f64) / T::of(n as f64);
            for b in 0..8 {
                let th = T::of(2.0) * T::PI() * T::of(b as f64 / 8.0);
                let z = Complex::new(rad * th.cos(), rad * th.sin());
                let lhs = self.sigma(self.conjugated.eval_scalar_raw(z)?)?;
                let rhs = self.lambda * self.sigma(z)?;
                worst = worst.max((lhs - rhs).norm());
            }
        }
        Ok(worst)
    }

    /// sigma'(0) by a five-point stencil; the normalization forces 1.
    pub fn derivative_at_zero(&self) -> Result<C<T>> {
        let h = T::of(1e-3);
        let f = |x: T| self.sigma(Complex::new(x, T::zero()));
        let num =
            -f(T::of(2.0) * h)? + f(h)? * T::of(8.0) - f(-h)? * T::of(8.0) + f(T::of(-2.0) * h)?;
        Ok(num / Complex::new(T::of(12.0) * h, T::zero()))
    }
}

/// Compares the normalized intertwiners built from two base points: they
/// must agree up to a positive real factor mu. Returns (mu, max deviation
/// |sigma_hat_alt - mu sigma_hat|) over a grid.
#[derive(Debug, Clone, Copy)]
pub struct UniquenessReport<T: Real> {
    pub mu: C<T>,
    pub deviation: T,
}

pub fn uniqueness_cross_check<T: Real>(
    m: &MapDescriptor<T>,
    z0: C<T>,
    z0_alt: C<T>,
    opts: ValironOptions<T>,
) -> Result<UniquenessReport<T>> {
    let base = ValironModel::build(m, z0, opts)?;
    let alt = ValironModel::build(m, z0_alt, opts)?;
    let grid = base.hyperbolic_grid(T::of(2.0), 5, 5);
    let mut ratios = Vec::with_capacity(grid.len());
    let mut pairs = Vec::with_capacity(grid.len());
    for &z in &grid {
        let s = base.sigma_hat(z)?.value;
        let s_alt = alt.sigma_hat(z)?.value;
        ratios.push(s_alt / s);
        pairs.push((s, s_alt));
    }
    let mut mu = Complex::new(T::zero(), T::zero());
    for r in &ratios {
        mu = mu + r;
    }
    mu = mu / Complex::new(T::of(ratios.len() as f64), T::zero());
    let mut deviation = T::zero();
    for (s, s_alt) in pairs {
        deviation = deviation.max((s_alt - mu * s).norm());
    }
    if mu.im.abs() > T::of(1e-8) * mu.norm().max(T::one()) || mu.re <= T::zero() {
        return Err(Error::Inconclusive(format!(
            "intertwiner ratio {mu:?} is not a positive real"
        )));
    }
    Ok(UniquenessReport { mu, deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::geometry::halfplane_pseudo_distance_raw;
    use crate::scalar::c64 as c;

    fn model_2z_plus_i() -> ValironModel<f64> {
        ValironModel::build(
            &corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            c(0.0, 1.0),
            ValironOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn renormalizers_send_base_orbit_to_i() {
        let m = model_2z_plus_i();
        for n in 0..m.trace().len() {
            let r = m.renormalizer(n);
            let img = r.apply(m.trace().points[n]);
            assert!((img - c(0.0, 1.0)).norm() < 1e-15);
            let back = r.inverse(img);
            assert!((back - m.trace().points[n]).norm() < 1e-9 * back.norm().max(1.0));
        }
        // tau_n(z) = (z - 1)/2 when z_n = 1 + 2i.
        let r = Renormalizer { x: 1.0, y: 2.0 };
        assert!((r.apply(c(1.0, 2.0)) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((r.apply(c(3.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tau_composition_tends_to_affine_limit() {
        // tau_n . tau_{n+1}^{-1}(z) -> b_inf + A z pointwise.
        let m = model_2z_plus_i();
        let n = m.trace().len() - 2;
        let rn = m.renormalizer(n);
        let rn1 = m.renormalizer(n + 1);
        for &z in &[c(0.0, 1.0), c(1.0, 2.0), c(-2.0, 0.5)] {
            let v = rn.apply(rn1.inverse(z));
            let expect = c(m.b_inf(), 0.0) + c(m.a(), 0.0) * z;
            assert!((v - expect).norm() < 1e-9 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn limit_data_for_affine_map() {
        let m = model_2z_plus_i();
        assert!((m.a() - 2.0).abs() < 1e-10);
        assert!(m.b_inf().abs() < 1e-10);
        assert!((m.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((m.theta_direct() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(!m.flagged());
    }

    #[test]
    fn limit_data_for_automorphism_matches_fixed_point_angle() {
        // tau = 3z + 1 has finite fixed point p = -1/2; theta(z0) is the
        // argument of z0 - p.
        let map = corpus::hp_affine::<f64>(3.0, 1.0, 0.0);
        for &z0 in &[c(0.0, 1.0), c(1.0, 0.5), c(-2.0, 2.0)] {
            let m = ValironModel::build(&map, z0, ValironOptions::default()).unwrap();
            let expect = (z0 - c(-0.5, 0.0)).arg();
            assert!((m.theta() - expect).abs() < 1e-9, "theta {}", m.theta());
            assert!((m.a() - 3.0).abs() < 1e-10);
            assert!((m.b_inf() - 2.0 * (z0.re + 0.5) / z0.im).abs() < 1e-9);
        }
    }

    #[test]
    fn limit_data_satisfies_cot_relation_for_sqrt_map() {
        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
        assert!((m.a() - 2.0).abs() < 1e-8, "A = {}", m.a());
        let resid = (m.b_inf() - (m.a() - 1.0) * (1.0 / m.theta_direct().tan())).abs();
        assert!(resid < 1e-3, "cot relation residual {resid}");
        assert!(!m.flagged());
    }

    #[test]
    fn sigma_normalization_and_closed_form() {
        let m = model_2z_plus_i();
        // sigma(z0) = i.
        let s0 = m.sigma(c(0.0, 1.0)).unwrap();
        assert!((s0.value - c(0.0, 1.0)).norm() < 1e-10);
        // sigma(z1) = b_inf + iA = 2i.
        let s1 = m.sigma(c(0.0, 3.0)).unwrap();
        assert!((s1.value - c(0.0, 2.0)).norm() < 1e-10);
        // sigma(z) = (z + i)/2 everywhere.
        for &z in &[c(1.0, 1.0), c(-3.0, 0.25), c(10.0, 5.0)] {
            let s = m.sigma(z).unwrap();
            let expect = (z + c(0.0, 1.0)) / c(2.0, 0.0);
            assert!((s.value - expect).norm() < 1e-9, "sigma({z}) = {}", s.value);
        }
    }

    #[test]
    fn sigma_respects_schwarz_normalization_bound() {
        let m = model_2z_plus_i();
        for &z in &[c(0.5, 0.7), c(-1.0, 2.0), c(4.0, 0.1)] {
            let s = m.sigma(z).unwrap().value;
            let lhs = halfplane_pseudo_distance_raw(c(0.0, 1.0), s);
            let rhs = halfplane_pseudo_distance_raw(c(0.0, 1.0), z);
            assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn functional_residual_closed_forms() {
        let m = model_2z_plus_i();
        let grid = m.hyperbolic_grid(3.0, 5, 5);
        let (max, mean) = m.functional_residual(&grid).unwrap();
        assert!(max <= 1e-9, "max residual {max}");
        assert!(mean <= max);

        // Hyperbolic automorphism 3z: sigma is exactly affine from any orbit.
        let map = corpus::hp_affine::<f64>(3.0, 0.0, 0.0);
        let ma = ValironModel::build(&map, c(0.0, 2.0), ValironOptions::default()).unwrap();
        let s = ma.sigma(c(0.0, 2.0)).unwrap().value;
        assert!((s - c(0.0, 1.0)).norm() < 1e-10);
        // sigma(z) = z/|z0| here.
        let sv = ma.sigma(c(1.0, 3.0)).unwrap().value;
        assert!((sv - c(0.5, 1.5)).norm() < 1e-9);
        let grid = ma.hyperbolic_grid(3.0, 5, 5);
        let (max, _) = ma.functional_residual(&grid).unwrap();
        assert!(max <= 1e-9, "automorphism residual {max}");
    }

    #[test]
    fn functional_residual_sqrt_map() {
        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
        let grid = m.hyperbolic_grid(3.0, 5, 5);
        let (max, _) = m.functional_residual(&grid).unwrap();
        assert!(max <= 1e-4, "max residual {max}");
    }

    #[test]
    fn psi_n_converges_to_identity() {
        // psi_n = tau_{n+1} . Phi . tau_n^{-1} -> id uniformly on a compact
        // grid, and the deviation is below 1e-3 by the final recorded n.
        for map in [
            corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            corpus::hp_two_z_plus_sqrt::<f64>(),
        ] {
            let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
            let grid = [c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 0.5), c(2.0, 3.0)];
            let mut prev = f64::INFINITY;
            let mut last = f64::INFINITY;
            for n in 0..m.trace().len() - 1 {
                let rn = m.renormalizer(n);
                let rn1 = m.renormalizer(n + 1);
                let mut worst = 0.0f64;
                for &z in &grid {
                    let v = rn1.apply(map.eval_scalar_raw(rn.inverse(z)).unwrap());
                    worst = worst.max((v - z).norm());
                }
                // monotone decay with a sliver of slack
                assert!(worst <= prev * 1.5 + 1e-12, "psi_n deviation grew at n={n}");
                prev = worst;
                last = worst;
            }
            assert!(last < 1e-3, "final psi_n deviation {last}");
        }
    }

    #[test]
    fn distance_transport_is_non_increasing() {
        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
        let i = c(0.0, 1.0);
        for &z in &[c(1.0, 2.0), c(-0.5, 0.7)] {
            let mut w = z;
            let mut prev = f64::INFINITY;
            for n in 0..m.trace().len() {
                let d = halfplane_pseudo_distance_raw(i, m.renormalizer(n).apply(w));
                assert!(d <= prev + 1e-12);
                prev = d;
                if n + 1 < m.trace().len() {
                    w = map.eval_scalar_raw(w).unwrap();
                }
            }
        }
    }

    #[test]
    fn q_n_imaginary_parts_approach_a() {
        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
        let pts = &m.trace().points;
        let q: Vec<f64> = pts.windows(2).map(|p| (p[1].im - 0.0) / p[0].im).collect();
        let acc = accelerate_real(&q, 1e-6);
        assert!((acc.value - m.a()).abs() < 1e-4);
    }

    #[test]
    fn iterated_functional_equation_hits_orbit() {
        // sigma(z_n) = T_n(i) with T(z) = A z + b_inf.
        for map in [
            corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            corpus::hp_two_z_plus_sqrt::<f64>(),
        ] {
            let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
            let mut t_n = c(0.0, 1.0);
            for n in 1..=20 {
                t_n = c(m.a(), 0.0) * t_n + c(m.b_inf(), 0.0);
                let s = m.sigma(m.trace().points[n]).unwrap().value;
                assert!(
                    (s - t_n).norm() <= 1e-6 * t_n.norm().max(1.0),
                    "n = {n}: sigma(z_n) = {s}, T_n(i) = {t_n}"
                );
            }
        }
    }

    #[test]
    fn semiconformality_of_test_maps() {
        for map in [
            corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            corpus::hp_affine::<f64>(3.0, 1.0, 0.0),
            corpus::hp_two_z_plus_sqrt::<f64>(),
        ] {
            let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
            for lim in m.semiconformality().unwrap() {
                assert!(lim.abs() <= 1e-3, "ray limit {lim}");
            }
        }
    }

    #[test]
    fn angular_derivative_cases() {
        let m = model_2z_plus_i();
        match m.angular_derivative().unwrap() {
            AngularDerivative::Present { ratio_limit, value } => {
                assert!((ratio_limit - c(0.0, 2.0)).norm() < 1e-8);
                assert!((value - 0.5).abs() < 1e-8);
            }
            _ => panic!("expected a finite angular derivative"),
        }

        // Automorphism A z: z_n / A^n = z0 exactly.
        let map = corpus::hp_affine::<f64>(3.0, 0.0, 0.0);
        let ma = ValironModel::build(&map, c(1.0, 2.0), ValironOptions::default()).unwrap();
        match ma.angular_derivative().unwrap() {
            AngularDerivative::Present { ratio_limit, .. } => {
                assert!((ratio_limit - c(1.0, 2.0)).norm() < 1e-9);
            }
            _ => panic!("expected a finite angular derivative"),
        }

        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let ms = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
        assert!(matches!(
            ms.angular_derivative().unwrap(),
            AngularDerivative::Present { .. }
        ));
    }

    #[test]
    fn growth_bound_examples() {
        let r = bourdon_shapiro_check(&corpus::hp_two_z_plus_sqrt::<f64>(), 2.0, 1.0, 0.5, 1000)
            .unwrap();
        assert!(r.pass, "violation {}", r.max_rel_violation);

        let r = bourdon_shapiro_check(
            &corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            2.0,
            1.0,
            1.0,
            1000,
        )
        .unwrap();
        assert!(r.pass);

        // Gamma ~ |z|^(3/4) breaks the eps = 1/2 bound at large |z|.
        let r = bourdon_shapiro_check(&corpus::hp_slow_perturbation::<f64>(), 2.0, 1.0, 0.5, 1000)
            .unwrap();
        assert!(!r.pass);
        assert!(r.max_rel_violation > 1.0);
    }

    #[test]
    fn heins_curve_for_affine_map() {
        let m = model_2z_plus_i();
        // sigma = (z + i)/2: T(t) = t i/(2 - t) for t < 2, infinity past 2.
        let ts = [0.5, 1.0, 1.5, 2.5];
        let samples = m.heins_curve(&ts, 10_000).unwrap();
        for s in &samples[..3] {
            let expect = c(0.0, s.t / (2.0 - s.t));
            assert_eq!(s.kind, HeinsKind::InteriorFixed);
            let v = s.value.unwrap();
            assert!(
                (v - expect).norm() < 1e-6,
                "T({}) = {v}, expected {expect}",
                s.t
            );
            // interior samples really are fixed points of t sigma
            let back = c(s.t, 0.0) * m.sigma(v).unwrap().value;
            assert!((back - v).norm() < 1e-8);
        }
        assert_eq!(samples[3].kind, HeinsKind::InfinityDw);

        // T(t) -> 0 as t -> 0+.
        let tiny = m.heins_curve(&[1e-3], 10_000).unwrap();
        assert_eq!(tiny[0].kind, HeinsKind::InteriorFixed);
        assert!(tiny[0].value.unwrap().norm() < 1e-2);

        // t = 1 fixes the normalization point i.
        let one = m.heins_curve(&[1.0], 10_000).unwrap();
        assert!((one[0].value.unwrap() - c(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn koenigs_examples() {
        // phi = z/(2 - z), lambda = 1/2, sigma = z/(1 - z).
        let k = koenigs_map(
            &corpus::disk_elliptic_half::<f64>(),
            c(0.0, 0.0),
            c(0.5, 0.0),
        )
        .unwrap();
        for &z in &[c(0.25, 0.0), c(-0.3, 0.2), c(0.0, 0.45)] {
            let s = k.sigma(z).unwrap();
            let expect = z / (c(1.0, 0.0) - z);
            assert!((s - expect).norm() < 1e-10, "sigma({z}) = {s}");
        }
        assert!(k.residual_on_disk(0.5, 5).unwrap() < 1e-10);
        assert!((k.derivative_at_zero().unwrap() - c(1.0, 0.0)).norm() < 1e-8);

        // phi = lambda z: sigma = identity.
        let k = koenigs_map(&corpus::disk_scale::<f64>(0.5), c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        let z = c(0.3, -0.2);
        assert!((k.sigma(z).unwrap() - z).norm() < 1e-12);

        // quadratic perturbation: residual certified below 1e-8.
        let k = koenigs_map(&corpus::disk_koenigs_quadratic(), c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(k.residual_on_disk(0.5, 5).unwrap() < 1e-8);
        assert!((k.derivative_at_zero().unwrap() - c(1.0, 0.0)).norm() < 1e-8);

        // superattracting case is out of scope.
        assert!(koenigs_map(&corpus::disk_koenigs_quadratic(), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn uniqueness_examples() {
        let map = corpus::hp_affine::<f64>(2.0, 0.0, 1.0);
        // bases i and 2i: sigma_hat are (z + i)/2 and (z + i)/3; mu = 2/3.
        let r = uniqueness_cross_check(&map, c(0.0, 1.0), c(0.0, 2.0), ValironOptions::default())
            .unwrap();
        assert!((r.mu - c(2.0 / 3.0, 0.0)).norm() < 1e-6, "mu = {}", r.mu);
        assert!(r.deviation <= 1e-8, "deviation {}", r.deviation);

        // Same base twice: mu = 1, deviation 0.
        let r = uniqueness_cross_check(&map, c(0.0, 1.0), c(0.0, 1.0), ValironOptions::default())
            .unwrap();
        assert!((r.mu - c(1.0, 0.0)).norm() < 1e-12);
        assert!(r.deviation < 1e-12);

        let r = uniqueness_cross_check(
            &corpus::hp_two_z_plus_sqrt::<f64>(),
            c(0.0, 1.0),
            c(0.5, 2.0),
            ValironOptions::default(),
        )
        .unwrap();
        assert!(r.deviation <= 1e-4, "deviation {}", r.deviation);
    }

    #[test]
    fn sigma_injectivity_spot_check() {
        // Injectivity of sigma on a sampled non-tangential sector is
        // reported as evidence only (no fundamental set is constructed).
        for map in [
            corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
            corpus::hp_two_z_plus_sqrt::<f64>(),
        ] {
            let m = ValironModel::build(&map, c(0.0, 1.0), ValironOptions::default()).unwrap();
            let mut pts = Vec::new();
            for k in 0..8 {
                for j in 0..6 {
                    let r = 2f64.powi(k);
                    let th =
                        std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * j as f64 / 5.0;
                    pts.push(c(r * th.cos(), r * th.sin()));
                }
            }
            let vals: Vec<_> = pts.iter().map(|&z| m.sigma(z).unwrap().value).collect();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let sep_in = (pts[i] - pts[j]).norm();
                    let sep_out = (vals[i] - vals[j]).norm();
                    assert!(
                        sep_out > 1e-8 * sep_in,
                        "sigma collision: {} and {} both map near {}",
                        pts[i],
                        pts[j],
                        vals[i]
                    );
                }
            }
        }
    }

    #[test]
    fn theta_surjectivity_for_automorphisms() {
        // z0 = p + e^{i theta*} reaches every target angle.
        let map = corpus::hp_affine::<f64>(3.0, 1.0, 0.0);
        let p = c(-0.5, 0.0);
        for k in 1..8 {
            let target = std::f64::consts::PI * k as f64 / 8.0;
            let z0 = p + c(target.cos(), target.sin());
            let m = ValironModel::build(&map, z0, ValironOptions::default()).unwrap();
            assert!(
                (m.theta() - target).abs() < 1e-6,
                "theta({z0}) = {}, want {target}",
                m.theta()
            );
        }
    }

    #[test]
    fn theta_is_harmonic_for_sqrt_map() {
        // Mean-value property over a small circle.
        let map = corpus::hp_two_z_plus_sqrt::<f64>();
        let opts = ValironOptions::default();
        let center = c(0.3, 1.4);
        let theta_center = ValironModel::build(&map, center, opts).unwrap().theta();
        let mut mean = 0.0;
        let samples = 64;
        for k in 0..samples {
            let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let z0 = center + c(0.1 * th.cos(), 0.1 * th.sin());
            mean += ValironModel::build(&map, z0, opts).unwrap().theta();
        }
        mean /= samples as f64;
        assert!(
            (theta_center - mean).abs() <= 1e-3,
            "center {theta_center}, mean {mean}"
        );
    }
}
