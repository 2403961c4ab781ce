//! One-variable dynamics: orbits, interior fixed points, the Denjoy-Wolff
//! point, the coefficient of dilatation and the type classification, plus
//! the Julia and Julia-Caratheodory numerical checks.
//!
//! Orbits in the half-plane are capped at |z| = 1e12; limits past the cap
//! come from Aitken extrapolation of the recorded sequences, never from
//! iterating further (double precision runs out shortly after).

use crate::accel::{accelerate, accelerate_real};
use crate::error::{Error, Result};
use crate::geometry::{
    cayley_inv_raw, cayley_raw, halfplane_pseudo_distance_raw, poisson_ratio, pseudo_distance_raw,
};
use crate::maps::{Domain, MapDescriptor};
use crate::sample;
use crate::scalar::{Real, C};
use num_complex::Complex;

pub const HALFPLANE_ESCAPE_CAP: f64 = 1e12;
pub const DISK_ESCAPE_MARGIN: f64 = 1e-12;
pub const CONVERGE_TOL: f64 = 1e-14;
/// Numerical hyperbolic/parabolic threshold: alpha <= 1 - 1e-4 is
/// hyperbolic, anything up to 1 + 1e-6 parabolic.
pub const PARABOLIC_BAND: (f64, f64) = (1e-4, 1e-6);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Successive points within 1e-14: converged to an interior point.
    Converged,
    /// Hit the escape cap (|z| >= 1e12 in the half-plane, |z| >= 1 - 1e-12
    /// in the disk).
    Escaped,
    /// Step budget exhausted.
    Cap,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::Escaped => "escaped",
            Termination::Cap => "cap",
        }
    }
}

/// A finite orbit with per-step derived quantities.
///
/// `steps` holds the pseudo-hyperbolic steps d_n = d(z_n, z_{n+1}) (always
/// non-increasing for a self-map); `ratios` holds z_{n+1}/z_n in the
/// half-plane and (1 - z_{n+1})/(1 - z_n) in the disk; `args` holds
/// Arg z_n (half-plane) or Arg(1 - z_n) (disk).
#[derive(Debug, Clone)]
pub struct OrbitTrace<T: Real> {
    pub domain: Domain,
    pub points: Vec<C<T>>,
    pub steps: Vec<T>,
    pub ratios: Vec<C<T>>,
    pub args: Vec<T>,
    pub termination: Termination,
}

impl<T: Real> OrbitTrace<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> C<T> {
        *self.points.last().unwrap()
    }
}

/// Iterates a one-dimensional map, recording the trace.
pub fn iterate_orbit<T: Real>(
    m: &MapDescriptor<T>,
    z0: C<T>,
    max_n: usize,
    escape_cap: Option<T>,
) -> Result<OrbitTrace<T>> {
    let domain = m.domain();
    if !domain.is_scalar() {
        return Err(Error::Descriptor("iterate_orbit needs a 1-d domain".into()));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut points = vec![z0];
    let mut termination = Termination::Cap;
    let mut z = z0;
    for _ in 0..max_n {
        let w = m.eval_checked(&[z]).map(|v| v[0])?;
        points.push(w);
        let escaped = match domain {
            Domain::HalfPlane => {
                w.norm() >= escape_cap.unwrap_or_else(|| T::of(HALFPLANE_ESCAPE_CAP))
            }
            Domain::Disk => {
                w.norm() >= T::one() - escape_cap.unwrap_or_else(|| T::of(DISK_ESCAPE_MARGIN))
            }
            _ => unreachable!(),
        };
        if escaped {
            termination = Termination::Escaped;
            break;
        }
        if (w - z).norm() < T::of(CONVERGE_TOL) {
            termination = Termination::Converged;
            break;
        }
        z = w;
    }

    let steps = points
        .windows(2)
        .map(|p| match domain {
            Domain::HalfPlane => halfplane_pseudo_distance_raw(p[0], p[1]),
            _ => pseudo_distance_raw(p[0], p[1]),
        })
        .collect();
    let ratios = points
        .windows(2)
        .map(|p| match domain {
            Domain::HalfPlane => p[1] / p[0],
            _ => (one - p[1]) / (one - p[0]),
        })
        .collect();
    let args = points
        .iter()
        .map(|z| match domain {
            Domain::HalfPlane => z.arg(),
            _ => (one - z).arg(),
        })
        .collect();
    Ok(OrbitTrace {
        domain,
        points,
        steps,
        ratios,
        args,
        termination,
    })
}

/// Newton search for an interior fixed point from a 5x5 grid of starts
/// (100 iterations each, step damping 0.5 on domain exit). On success the
/// fixed point and the multiplier phi'(p) are returned; absence is declared
/// only when every start fails and the orbit of the domain barycenter
/// escapes.
pub fn find_interior_fixed_point<T: Real>(m: &MapDescriptor<T>) -> Result<Option<(C<T>, C<T>)>> {
    let domain = m.domain();
    let starts: Vec<C<T>> = match domain {
        Domain::Disk => {
            let vals = [-0.6, -0.3, 0.0, 0.3, 0.6];
            let mut v = Vec::new();
            for &x in &vals {
                for &y in &vals {
                    let z = Complex::new(T::of(x), T::of(y));
                    if z.norm() < T::of(0.95) {
                        v.push(z);
                    }
                }
            }
            v
        }
        Domain::HalfPlane => {
            let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
            let ys = [0.25, 0.5, 1.0, 2.0, 4.0];
            let mut v = Vec::new();
            for &x in &xs {
                for &y in &ys {
                    v.push(Complex::new(T::of(x), T::of(y)));
                }
            }
            v
        }
        _ => {
            return Err(Error::Descriptor(
                "fixed-point search needs a 1-d domain".into(),
            ))
        }
    };

    let interior = |z: C<T>| -> bool {
        match domain {
            Domain::Disk => z.norm() < T::one() - T::of(1e-12),
            _ => z.im > T::of(1e-12),
        }
    };
    // A parabolic boundary fixed point is a double root of phi(z) - z, so
    // Newton stalls around 1e-7 from the boundary while |phi(z) - z| is
    // already below tolerance; candidates that close to the boundary are
    // boundary points, not interior ones.
    let safely_interior = |z: C<T>| -> bool {
        match domain {
            Domain::Disk => z.norm() < T::one() - T::of(1e-4),
            _ => z.im > T::of(1e-4) * z.norm().max(T::one()),
        }
    };

    for start in starts {
        let mut z = start;
        let mut ok = false;
        for _ in 0..100 {
            let f = match m.eval_scalar_raw(z) {
                Ok(v) => v - z,
                Err(_) => break,
            };
            if f.norm() < T::of(1e-13) * z.norm().max(T::one()) {
                ok = true;
                break;
            }
            let d = match m.derivative(z) {
                Ok(v) => v - Complex::new(T::one(), T::zero()),
                Err(_) => break,
            };
            if d.norm() < T::of(1e-14) {
                break;
            }
            let mut step = -f / d;
            let mut halved = 0;
            while !interior(z + step) && halved < 60 {
                step = step * Complex::new(T::of(0.5), T::zero());
                halved += 1;
            }
            if halved == 60 {
                break;
            }
            z = z + step;
        }
        if ok && safely_interior(z) {
            let lambda = m.derivative(z)?;
            return Ok(Some((z, lambda)));
        }
    }

    // No start succeeded: confirm absence by watching the barycenter orbit
    // leave every compact set.
    let bary = match domain {
        Domain::Disk => Complex::new(T::zero(), T::zero()),
        _ => Complex::new(T::zero(), T::one()),
    };
    // Translation-like maps drift to infinity only linearly, so "left every
    // compact set" is read off the capped orbit with a generous margin.
    let trace = iterate_orbit(m, bary, 200_000, None)?;
    let escaped_to_boundary = match trace.termination {
        Termination::Escaped => true,
        Termination::Converged => false,
        Termination::Cap => {
            let zf = trace.last();
            match domain {
                Domain::Disk => zf.norm() > T::one() - T::of(1e-3),
                _ => zf.im < T::of(1e-3) || zf.norm() > T::of(1e4),
            }
        }
    };
    if escaped_to_boundary {
        Ok(None)
    } else {
        Err(Error::Inconclusive(
            "no Newton start converged, yet the barycenter orbit does not escape".into(),
        ))
    }
}

/// Boundary location of the Denjoy-Wolff point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint<T: Real> {
    /// A finite boundary point (unit modulus in the disk model, real in the
    /// half-plane model).
    Finite(C<T>),
    /// The point at infinity of the half-plane model.
    Infinity,
}

#[derive(Debug, Clone, Copy)]
pub struct DenjoyWolff<T: Real> {
    pub point: BoundaryPoint<T>,
    /// Maximum angular spread of the estimated boundary directions over the
    /// five starting points.
    pub spread: T,
}

/// Locates the Denjoy-Wolff point of a fixed-point-free map by running five
/// orbits in the disk model and requiring their limit directions to agree
/// within 1e-6.
pub fn denjoy_wolff<T: Real>(m: &MapDescriptor<T>) -> Result<DenjoyWolff<T>> {
    let view = DiskView::of(m)?;
    let starts = [
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::of(0.3), T::zero()),
        Complex::new(T::of(-0.3), T::zero()),
        Complex::new(T::zero(), T::of(0.3)),
        Complex::new(T::zero(), T::of(-0.3)),
    ];
    let mut dirs: Vec<C<T>> = Vec::with_capacity(starts.len());
    for z0 in starts {
        let mut z = z0;
        let mut reached = false;
        for _ in 0..200_000 {
            let w = view.eval(z)?;
            if w.norm() >= T::one() - T::of(DISK_ESCAPE_MARGIN) {
                z = w;
                reached = true;
                break;
            }
            if (w - z).norm() < T::of(CONVERGE_TOL) {
                return Err(Error::Inconclusive(
                    "orbit converged to an interior point; no Denjoy-Wolff point".into(),
                ));
            }
            z = w;
        }
        if !reached && z.norm() <= T::of(0.99) {
            return Err(Error::Inconclusive(format!(
                "orbit stayed away from the boundary (|z| = {:?})",
                z.norm()
            )));
        }
        dirs.push(z / Complex::new(z.norm(), T::zero()));
    }
    let mut spread = T::zero();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let a = (dirs[i] / dirs[j]).arg().abs();
            if a > spread {
                spread = a;
            }
        }
    }
    if spread > T::of(1e-6) {
        return Err(Error::Inconclusive(format!(
            "orbit limit directions disagree (spread {spread:?})"
        )));
    }
    let mean = dirs
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |s, d| s + d);
    let zeta = mean / Complex::new(mean.norm(), T::zero());
    let point = match m.domain() {
        Domain::Disk => BoundaryPoint::Finite(zeta),
        Domain::HalfPlane => {
            let one = Complex::new(T::one(), T::zero());
            if (zeta - one).norm() < T::of(1e-6) {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite(Complex::new(cayley_raw(zeta)?.re, T::zero()))
            }
        }
        _ => unreachable!(),
    };
    Ok(DenjoyWolff { point, spread })
}

/// A one-dimensional map seen in the disk model: either a native disk
/// descriptor or a half-plane descriptor conjugated through the Cayley
/// transform. The half-plane route also provides `1 - |phi(z)|^2` without
/// cancellation: 1 - |C^{-1}(W)|^2 = 4 Im W / |W + i|^2.
pub(crate) enum DiskView<'a, T: Real> {
    Native(&'a MapDescriptor<T>),
    Cayley(&'a MapDescriptor<T>),
}

impl<'a, T: Real> DiskView<'a, T> {
    pub fn of(m: &'a MapDescriptor<T>) -> Result<Self> {
        match m.domain() {
            Domain::Disk => Ok(DiskView::Native(m)),
            Domain::HalfPlane => Ok(DiskView::Cayley(m)),
            _ => Err(Error::Descriptor("one-dimensional map required".into())),
        }
    }

    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        match self {
            DiskView::Native(m) => m.eval_scalar_checked(z),
            DiskView::Cayley(m) => {
                let w = cayley_raw(z)?;
                Ok(cayley_inv_raw(m.eval_scalar_checked(w)?))
            }
        }
    }

    /// (phi(z), 1 - |phi(z)|^2), the latter stable for the Cayley route.
    pub fn eval_with_gap(&self, z: C<T>) -> Result<(C<T>, T)> {
        match self {
            DiskView::Native(m) => {
                let w = m.eval_scalar_checked(z)?;
                Ok((w, (T::one() - w.norm_sqr()).max(T::zero())))
            }
            DiskView::Cayley(m) => {
                let big_w = m.eval_scalar_checked(cayley_raw(z)?)?;
                let i = Complex::new(T::zero(), T::one());
                let gap = T::of(4.0) * big_w.im.max(T::zero()) / (big_w + i).norm_sqr();
                Ok((cayley_inv_raw(big_w), gap))
            }
        }
    }

    fn dw_in_disk(&self, dw: &BoundaryPoint<T>) -> C<T> {
        match (self, dw) {
            (DiskView::Native(_), BoundaryPoint::Finite(z)) => *z,
            (DiskView::Cayley(_), BoundaryPoint::Infinity) => Complex::new(T::one(), T::zero()),
            (DiskView::Cayley(_), BoundaryPoint::Finite(x)) => {
                let z = cayley_inv_raw(*x);
                z / Complex::new(z.norm(), T::zero())
            }
            (DiskView::Native(_), BoundaryPoint::Infinity) => {
                unreachable!("disk maps have finite boundary points")
            }
        }
    }
}

/// Both dilatation estimators and their agreement flag.
#[derive(Debug, Clone, Copy)]
pub struct DilatationEstimate<T: Real> {
    /// Headline value (the radial estimator).
    pub alpha: T,
    pub radial: T,
    pub orbital: T,
    /// Set when the estimators disagree beyond 1e-4 or alpha is suspiciously
    /// close to zero.
    pub flagged: bool,
}

/// Coefficient of dilatation at a known Denjoy-Wolff point.
///
/// Radial estimator: (1 - |phi(r zeta)|)/(1 - r) at r = 1 - 2^-k,
/// k = 4..40, Aitken-accelerated. Orbital estimator: the limit of
/// (1 - |z_{n+1}|)/(1 - |z_n|) along a disk-model orbit.
pub fn dilatation_coefficient<T: Real>(
    m: &MapDescriptor<T>,
    dw: &BoundaryPoint<T>,
) -> Result<DilatationEstimate<T>> {
    let view = DiskView::of(m)?;
    let zeta = view.dw_in_disk(dw);

    let mut radial_seq = Vec::with_capacity(37);
    for k in 4..=40 {
        let gap_r = T::of(2.0).powi(-k);
        let r = T::one() - gap_r;
        let z = zeta * Complex::new(r, T::zero());
        let (w, gap_sq) = view.eval_with_gap(z)?;
        // 1 - |w| = (1 - |w|^2)/(1 + |w|), cancellation-free.
        let one_minus_abs = gap_sq / (T::one() + w.norm());
        radial_seq.push(one_minus_abs / gap_r);
    }
    let radial = accelerate_real(&radial_seq, T::of(1e-7));

    let mut orbital_seq = Vec::new();
    let mut z = zeta * Complex::new(T::of(0.2), T::zero());
    let mut gap_prev = {
        let g_sq = (T::one() - z.norm_sqr()).max(T::zero());
        g_sq / (T::one() + z.norm())
    };
    for _ in 0..600 {
        let (w, gap_sq) = view.eval_with_gap(z)?;
        let gap = gap_sq / (T::one() + w.norm());
        if gap < T::of(1e-13) || gap_prev < T::of(1e-13) {
            break;
        }
        orbital_seq.push(gap / gap_prev);
        gap_prev = gap;
        z = w;
        if (T::one() - z.norm()) < T::of(1e-11) {
            break;
        }
    }
    if orbital_seq.len() < 3 {
        return Err(Error::Inconclusive(
            "orbit too short for the orbital dilatation estimator".into(),
        ));
    }
    let orbital = accelerate_real(&orbital_seq, T::of(1e-7));

    let disagree = (radial.value - orbital.value).abs() > T::of(1e-4);
    let tiny = radial.value <= T::of(1e-8);
    Ok(DilatationEstimate {
        alpha: radial.value,
        radial: radial.value,
        orbital: orbital.value,
        flagged: disagree || tiny,
    })
}

/// Estimator diagnostics carried by a classification.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyEvidence<T: Real> {
    pub dilatation: Option<DilatationEstimate<T>>,
    pub dw_spread: Option<T>,
    /// Set for borderline parabolic verdicts (alpha within the declared
    /// numerical band around 1).
    pub borderline: bool,
}

#[derive(Debug, Clone)]
pub enum Classification<T: Real> {
    Elliptic {
        fixed_point: C<T>,
        multiplier: C<T>,
        evidence: ClassifyEvidence<T>,
    },
    Hyperbolic {
        dw: BoundaryPoint<T>,
        alpha: T,
        evidence: ClassifyEvidence<T>,
    },
    Parabolic {
        dw: BoundaryPoint<T>,
        evidence: ClassifyEvidence<T>,
    },
}

impl<T: Real> Classification<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Classification::Elliptic { .. } => "elliptic",
            Classification::Hyperbolic { .. } => "hyperbolic",
            Classification::Parabolic { .. } => "parabolic",
        }
    }
}

/// Full classification: elliptic if an interior fixed point exists, else
/// hyperbolic/parabolic by the dilatation coefficient.
pub fn classify<T: Real>(m: &MapDescriptor<T>) -> Result<Classification<T>> {
    if let Some((fixed_point, multiplier)) = find_interior_fixed_point(m)? {
        if multiplier.norm() > T::one() + T::of(1e-10) {
            return Err(Error::Inconclusive(format!(
                "interior fixed point with |multiplier| = {:?} > 1",
                multiplier.norm()
            )));
        }
        return Ok(Classification::Elliptic {
            fixed_point,
            multiplier,
            evidence: ClassifyEvidence {
                dilatation: None,
                dw_spread: None,
                borderline: false,
            },
        });
    }
    let dw = denjoy_wolff(m)?;
    let est = dilatation_coefficient(m, &dw.point)?;
    let alpha = est.alpha;
    let evidence = ClassifyEvidence {
        dilatation: Some(est),
        dw_spread: Some(dw.spread),
        borderline: alpha > T::one() - T::of(PARABOLIC_BAND.0),
    };
    if alpha <= T::one() - T::of(PARABOLIC_BAND.0) {
        Ok(Classification::Hyperbolic {
            dw: dw.point,
            alpha,
            evidence,
        })
    } else if alpha <= T::one() + T::of(PARABOLIC_BAND.1) {
        Ok(Classification::Parabolic {
            dw: dw.point,
            evidence,
        })
    } else {
        Err(Error::Inconclusive(format!(
            "estimated dilatation {alpha:?} exceeds 1 beyond tolerance"
        )))
    }
}

/// Achievable precision of the recorded step d_n = d(z_n, z_{n+1}): in disk
/// coordinates the Moebius denominator 1 - conj(w) z loses relative accuracy
/// like eps / (1 - |z|^2) near the boundary, so the monotonicity slack has
/// to grow accordingly. Half-plane steps carry no such cancellation.
pub fn step_noise_slack<T: Real>(trace: &OrbitTrace<T>, n: usize) -> T {
    let base = T::of(1e-12);
    match trace.domain {
        Domain::Disk => {
            let r = trace.points[n + 1].norm().max(trace.points[n].norm());
            let gap = (T::one() - r * r).max(T::of(1e-15));
            base + T::of(1e-15) / gap
        }
        _ => base,
    }
}

/// Non-tangential confinement margin of a half-plane orbit:
/// delta = pi/2 - max_n |Arg z_n - pi/2|. Errors if the orbit is not
/// confined (delta <= 0).
pub fn confinement_check<T: Real>(trace: &OrbitTrace<T>) -> Result<T> {
    if trace.domain != Domain::HalfPlane {
        return Err(Error::Descriptor(
            "confinement needs a half-plane trace".into(),
        ));
    }
    let half_pi = T::FRAC_PI_2();
    let worst = trace
        .args
        .iter()
        .map(|a| (*a - half_pi).abs())
        .fold(T::zero(), T::max);
    let delta = half_pi - worst;
    if delta <= T::zero() {
        return Err(Error::Inconclusive(format!(
            "orbit leaves every non-tangential sector (delta = {delta:?})"
        )));
    }
    Ok(delta)
}

/// Julia inequality at the Denjoy-Wolff point, sampled on the disk model:
/// the Poisson ratio satisfies P(phi(z)) >= P(z)/alpha. Returns the largest
/// violation (0 when the inequality holds everywhere sampled).
pub fn julia_check<T: Real>(
    m: &MapDescriptor<T>,
    dw: &BoundaryPoint<T>,
    alpha: T,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    let view = DiskView::of(m)?;
    let zeta = view.dw_in_disk(dw);
    let mut worst = T::zero();
    let mut pts = sample::disk_points::<T>(seed, 0.95);
    for _ in 0..n_samples {
        let z = pts.next().unwrap();
        let w = view.eval(z)?;
        let v = poisson_ratio(zeta, z) / alpha - poisson_ratio(zeta, w);
        if v > worst {
            worst = v;
        }
    }
    Ok(worst)
}

/// Report produced by [`julia_caratheodory_limit`].
#[derive(Debug, Clone, Copy)]
pub struct JuliaCaratheodory<T: Real> {
    pub a: T,
    /// Largest pairwise disagreement of the three ray limits.
    pub ray_spread: T,
}

/// The non-tangential limit of Phi(z)/z at infinity, extrapolated along the
/// rays Arg z in {pi/4, pi/2, 3pi/4} at |z| = 2^k, k = 4..40. The three ray
/// limits must agree within 1e-6.
pub fn julia_caratheodory_limit<T: Real>(m: &MapDescriptor<T>) -> Result<JuliaCaratheodory<T>> {
    if m.domain() != Domain::HalfPlane {
        return Err(Error::Descriptor(
            "Julia-Caratheodory limit needs a half-plane map".into(),
        ));
    }
    let angles = [T::FRAC_PI_4(), T::FRAC_PI_2(), T::of(3.0) * T::FRAC_PI_4()];
    let mut limits = Vec::with_capacity(3);
    for th in angles {
        let dir = Complex::new(th.cos(), th.sin());
        let mut vals = Vec::with_capacity(37);
        for k in 4..=40 {
            let z = dir * Complex::new(T::of(2.0).powi(k), T::zero());
            vals.push(m.eval_scalar_checked(z)? / z);
        }
        let acc = accelerate(&vals, T::of(1e-9));
        if !acc.converged {
            return Err(Error::Convergence {
                context: "Julia-Caratheodory ray limit".into(),
                prev: format!("{:?}", vals[vals.len() - 2]),
                last: format!("{:?}", vals[vals.len() - 1]),
                residual: acc.residual.as_f64(),
            });
        }
        limits.push(acc.value);
    }
    let mut spread = T::zero();
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            spread = spread.max((limits[i] - limits[j]).norm());
        }
    }
    if spread > T::of(1e-6) {
        return Err(Error::Inconclusive(format!(
            "ray limits disagree (spread {spread:?})"
        )));
    }
    let mean = (limits[0] + limits[1] + limits[2]) / Complex::new(T::of(3.0), T::zero());
    Ok(JuliaCaratheodory {
        a: mean.re,
        ray_spread: spread,
    })
}
