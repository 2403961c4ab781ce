//! The several-variable confinement machinery: the ball dilatation
//! coefficient c, the Koranyi functional L_n along orbits, the bound
//! S_n <= c L_n / L_{n+1}, and the boundedness verdict with the threshold
//! 3 - sqrt(8).
//!
//! Orbits of Siegel-domain descriptors are iterated in Siegel coordinates,
//! where L_n = |w1 + i| / (2 height) and the Julia functional 1/height are
//! ratios of growing quantities; ball coordinates would lose every digit of
//! 1 - z1 within a few dozen steps.

use crate::accel::accelerate_real;
use crate::ball::{
    ball_cayley_inv_raw, ball_cayley_raw, height_raw, koranyi_l_raw, siegel_koranyi_l,
    siegel_one_minus_nsq, siegel_pseudo_distance_raw, BallPoint,
};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CVector};
use crate::maps::{Domain, MapDescriptor};
use crate::scalar::{im_unit, Real, C};
use num_complex::Complex;

/// The Koranyi confinement threshold 3 - sqrt(8) = 0.17157287525380990...
pub fn koranyi_threshold<T: Real>() -> T {
    T::of(3.0) - T::of(8.0).sqrt()
}

/// A ball self-map seen in whichever coordinates are numerically viable:
/// native ball descriptors run in ball coordinates, Siegel descriptors run
/// natively with ball quantities recovered through exact identities.
pub(crate) enum BallView<'a, T: Real> {
    Ball(&'a MapDescriptor<T>),
    Siegel(&'a MapDescriptor<T>),
}

impl<'a, T: Real> BallView<'a, T> {
    pub fn of(m: &'a MapDescriptor<T>) -> Result<Self> {
        match m.domain() {
            Domain::Ball(_) => Ok(BallView::Ball(m)),
            Domain::Siegel(_) => Ok(BallView::Siegel(m)),
            _ => Err(Error::Descriptor("several-variable map required".into())),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BallView::Ball(m) | BallView::Siegel(m) => m.domain().dim(),
        }
    }

    /// Image of a ball point together with 1 - ||image||^2, cancellation-free
    /// on the Siegel route.
    fn eval_ball_with_gap(&self, z: &[C<T>]) -> Result<(CVector<T>, T)> {
        match self {
            BallView::Ball(m) => {
                let w = m.eval_checked(z)?;
                let gap = (T::one() - norm_sq(&w)).max(T::zero());
                Ok((w, gap))
            }
            BallView::Siegel(m) => {
                let w = m.eval_checked(&ball_cayley_raw(z)?)?;
                let gap = siegel_one_minus_nsq(&w);
                Ok((ball_cayley_inv_raw(&w), gap))
            }
        }
    }

    /// The sequence 1 - ||z_n||^2 along the orbit of a ball seed, iterated
    /// in native coordinates (Siegel orbits stay in Siegel coordinates).
    fn orbit_gaps(&self, z0: &[C<T>], n: usize) -> Result<Vec<T>> {
        let mut gaps = Vec::with_capacity(n + 1);
        match self {
            BallView::Siegel(m) => {
                let mut w = ball_cayley_raw(z0)?;
                gaps.push(siegel_one_minus_nsq(&w));
                for _ in 0..n {
                    if w[0].norm() > T::of(1e140) {
                        break;
                    }
                    w = m.eval_checked(&w)?;
                    gaps.push(siegel_one_minus_nsq(&w));
                }
            }
            BallView::Ball(m) => {
                let mut z = z0.to_vec();
                gaps.push(T::one() - norm_sq(&z));
                for _ in 0..n {
                    if T::one() - norm_sq(&z) < T::of(1e-12) {
                        break;
                    }
                    z = m.eval_checked(&z)?;
                    gaps.push((T::one() - norm_sq(&z)).max(T::zero()));
                }
            }
        }
        Ok(gaps)
    }
}

/// Radial + orbital estimate of the ball dilatation coefficient at e_1,
/// with the iterate law c(phi_n) = c^n measured for n = 2, 3.
#[derive(Debug, Clone)]
pub struct BallDilatation<T: Real> {
    /// Headline value (the radial estimator).
    pub c: T,
    pub radial: T,
    pub orbital: T,
    pub flagged: bool,
    /// (n, measured c(phi_n), expected c^n).
    pub iterate_law: Vec<(usize, T, T)>,
}

/// Estimates c = liminf (1 - ||phi(z)||)/(1 - ||z||) at the Denjoy-Wolff
/// point e_1 (infinity in the Siegel model).
pub fn ball_dilatation<T: Real>(m: &MapDescriptor<T>) -> Result<BallDilatation<T>> {
    let base = estimate_c(m)?;
    let mut iterate_law = Vec::new();
    for n in [2usize, 3] {
        let it = m.iterate(n);
        let measured = estimate_c(&it)?.0;
        iterate_law.push((n, measured, base.0.powi(n as i32)));
    }
    Ok(BallDilatation {
        c: base.0,
        radial: base.0,
        orbital: base.1,
        flagged: base.2,
        iterate_law,
    })
}

fn estimate_c<T: Real>(m: &MapDescriptor<T>) -> Result<(T, T, bool)> {
    let view = BallView::of(m)?;
    let n = view.dim();

    let mut radial_seq = Vec::with_capacity(37);
    for k in 4..=40 {
        let gap_r = T::of(2.0).powi(-k);
        let r = T::one() - gap_r;
        let mut z = vec![Complex::new(T::zero(), T::zero()); n];
        z[0] = Complex::new(r, T::zero());
        let (_, gap_sq) = view.eval_ball_with_gap(&z)?;
        let wnorm = (T::one() - gap_sq).max(T::zero()).sqrt();
        let one_minus_abs = gap_sq / (T::one() + wnorm);
        radial_seq.push(one_minus_abs / gap_r);
    }
    let radial = accelerate_real(&radial_seq, T::of(1e-7));

    let mut z0 = vec![Complex::new(T::zero(), T::zero()); n];
    z0[0] = Complex::new(T::of(0.1), T::zero());
    // (1 - ||z_{n+1}||)/(1 - ||z_n||) through the squared gaps:
    // ratio = (g_{n+1}/g_n) * (1 + ||z_n||)/(1 + ||z_{n+1}||).
    let gaps = view.orbit_gaps(&z0, 60)?;
    let mut orbital_seq = Vec::with_capacity(gaps.len());
    for g in gaps.windows(2) {
        let norm_a = (T::one() - g[0]).max(T::zero()).sqrt();
        let norm_b = (T::one() - g[1]).max(T::zero()).sqrt();
        orbital_seq.push(g[1] / g[0] * (T::one() + norm_a) / (T::one() + norm_b));
    }
    if orbital_seq.len() < 3 {
        return Err(Error::Inconclusive(
            "orbit too short for the orbital c".into(),
        ));
    }
    let orbital = accelerate_real(&orbital_seq, T::of(1e-7));
    let flagged = (radial.value - orbital.value).abs() > T::of(1e-4);
    Ok((radial.value, orbital.value, flagged))
}

/// Orbit record of the Koranyi functional L_n = |1 - z_n^1|/(1 - ||z_n||^2)
/// and the first-slot ratios S_n = |1 - z_{n+1}^1| / |1 - z_n^1|.
#[derive(Debug, Clone)]
pub struct KoranyiTrace<T: Real> {
    pub l: Vec<T>,
    pub s: Vec<T>,
    pub heights: Vec<T>,
    /// Ball first coordinates (for reporting; tends to 1).
    pub ball_z1: Vec<C<T>>,
    pub sup_l: T,
    /// First index attaining the supremum.
    pub argmax: usize,
    /// True when the supremum is attained before the final quarter of the
    /// computed range (heuristic stabilization criterion).
    pub bounded_verdict: bool,
}

impl<T: Real> KoranyiTrace<T> {
    /// Largest violation of S_n <= c L_n / L_{n+1} (1 + 1e-9); 0 if none.
    pub fn max_s_violation(&self, c: T) -> T {
        let slack = T::one() + T::of(1e-9);
        let mut worst = T::zero();
        for n in 0..self.s.len() {
            let bound = c * self.l[n] / self.l[n + 1] * slack;
            let v = self.s[n] - bound;
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    /// Relative change of L over the trailing window.
    pub fn tail_relative_change(&self, window: usize) -> T {
        let last = *self.l.last().unwrap();
        let start = self.l.len().saturating_sub(window);
        let mut worst = T::zero();
        for v in &self.l[start..] {
            let r = (*v - last).abs() / last.max(T::of(1e-300));
            if r > worst {
                worst = r;
            }
        }
        worst
    }
}

/// Runs n steps of the orbit from a ball seed and records the Koranyi
/// quantities. Siegel descriptors iterate in Siegel coordinates.
pub fn koranyi_trace<T: Real>(
    m: &MapDescriptor<T>,
    z0: &BallPoint<T>,
    n: usize,
) -> Result<KoranyiTrace<T>> {
    let view = BallView::of(m)?;
    if z0.dim() != view.dim() {
        return Err(Error::Descriptor("seed dimension mismatch".into()));
    }
    let i = im_unit::<T>();
    let one = Complex::new(T::one(), T::zero());

    let mut l = Vec::with_capacity(n + 1);
    let mut heights = Vec::with_capacity(n + 1);
    let mut ball_z1 = Vec::with_capacity(n + 1);
    let mut first_slot_abs: Vec<T> = Vec::with_capacity(n + 1);

    match view {
        BallView::Siegel(map) => {
            let mut w = ball_cayley_raw(z0.coords())?;
            for step in 0..=n {
                l.push(siegel_koranyi_l(&w));
                heights.push(height_raw(&w));
                ball_z1.push((w[0] - i) / (w[0] + i));
                // |1 - z1| = 2/|w1 + i|
                first_slot_abs.push(T::of(2.0) / (w[0] + i).norm());
                if step < n {
                    w = map.eval_checked(&w)?;
                }
            }
        }
        BallView::Ball(map) => {
            let mut z = z0.coords().to_vec();
            for step in 0..=n {
                let gap = T::one() - norm_sq(&z);
                if gap < T::of(1e-13) {
                    break;
                }
                l.push(koranyi_l_raw(&z));
                heights.push(gap / (one - z[0]).norm_sqr());
                ball_z1.push(z[0]);
                first_slot_abs.push((one - z[0]).norm());
                if step < n {
                    z = map.eval_checked(&z)?;
                }
            }
        }
    }

    if l.len() < 2 {
        return Err(Error::Inconclusive("orbit horizon too short".into()));
    }
    let s: Vec<T> = first_slot_abs.windows(2).map(|p| p[1] / p[0]).collect();
    let mut sup_l = T::neg_infinity();
    let mut argmax = 0;
    for (k, v) in l.iter().enumerate() {
        if *v > sup_l {
            sup_l = *v;
            argmax = k;
        }
    }
    let bounded_verdict = argmax * 4 < l.len() * 3;
    Ok(KoranyiTrace {
        l,
        s,
        heights,
        ball_z1,
        sup_l,
        argmax,
        bounded_verdict,
    })
}

/// Confinement check through iterates: applies [`koranyi_trace`] to the
/// N-th iterate (where c^N drops below 3 - sqrt(8)) and verifies the full
/// orbit through the interleaving bound
/// d(z_{kN+j}, z_{kN}) <= d(z_0, z_j).
#[derive(Debug, Clone)]
pub struct ClaimExtension<T: Real> {
    pub c: T,
    pub c_power: T,
    pub threshold: T,
    pub n_power: usize,
    /// Trace of the subsampled (iterated-map) orbit.
    pub subsampled: KoranyiTrace<T>,
    /// Full-orbit Koranyi functional.
    pub full: KoranyiTrace<T>,
    /// Largest violation of the interleaving pseudo-distance bound.
    pub interleave_violation: T,
    /// Subsampled and full orbits both bounded, interleaving holds.
    pub verdict: bool,
}

pub fn claim_extension_check<T: Real>(
    m: &MapDescriptor<T>,
    z0: &BallPoint<T>,
    n_power: usize,
    total_n: usize,
) -> Result<ClaimExtension<T>> {
    if n_power == 0 {
        return Err(Error::Descriptor("n_power must be positive".into()));
    }
    let c = estimate_c(m)?.0;
    let c_power = c.powi(n_power as i32);
    let threshold = koranyi_threshold::<T>();

    let iterated = m.iterate(n_power);
    let sub_steps = total_n / n_power;
    let subsampled = koranyi_trace(&iterated, z0, sub_steps)?;
    let full = koranyi_trace(m, z0, total_n)?;

    // Interleaving bound, evaluated in Siegel coordinates where the
    // pseudo-distance of deep orbit points is still computable.
    let interleave_violation = match BallView::of(m)? {
        BallView::Siegel(map) => {
            let mut pts: Vec<CVector<T>> = Vec::with_capacity(total_n + 1);
            let mut w = ball_cayley_raw(z0.coords())?;
            pts.push(w.clone());
            for _ in 0..total_n {
                w = map.eval_checked(&w)?;
                pts.push(w.clone());
            }
            let mut worst = T::zero();
            for j in 1..n_power {
                let base = siegel_pseudo_distance_raw(&pts[0], &pts[j]);
                let mut k = 1;
                while k * n_power + j <= total_n {
                    let d = siegel_pseudo_distance_raw(&pts[k * n_power], &pts[k * n_power + j]);
                    let v = d - base;
                    if v > worst {
                        worst = v;
                    }
                    k += 1;
                }
            }
            worst
        }
        BallView::Ball(map) => {
            let mut pts: Vec<CVector<T>> = Vec::with_capacity(total_n + 1);
            let mut z = z0.coords().to_vec();
            pts.push(z.clone());
            for _ in 0..total_n {
                if T::one() - norm_sq(&z) < T::of(1e-13) {
                    break;
                }
                z = map.eval_checked(&z)?;
                pts.push(z.clone());
            }
            let mut worst = T::zero();
            for j in 1..n_power {
                if j >= pts.len() {
                    break;
                }
                let base = crate::ball::pseudo_distance_raw(&pts[0], &pts[j]);
                let mut k = 1;
                while k * n_power + j < pts.len() {
                    let d =
                        crate::ball::pseudo_distance_raw(&pts[k * n_power], &pts[k * n_power + j]);
                    worst = worst.max(d - base);
                    k += 1;
                }
            }
            worst
        }
    };

    let verdict =
        subsampled.bounded_verdict && full.bounded_verdict && interleave_violation <= T::of(1e-10);
    Ok(ClaimExtension {
        c,
        c_power,
        threshold,
        n_power,
        subsampled,
        full,
        interleave_violation,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::scalar::c64 as c;

    fn seed(re: f64, im: f64, re2: f64, im2: f64) -> BallPoint<f64> {
        BallPoint::new(vec![c(re, im), c(re2, im2)]).unwrap()
    }

    #[test]
    fn threshold_value() {
        let t: f64 = koranyi_threshold();
        assert!((t - 0.171_572_875_253_809_9).abs() < 1e-15);
    }

    #[test]
    fn dilatation_of_siegel_claim_map() {
        let m = corpus::siegel_claim_map::<f64>(8.0, 2);
        let d = ball_dilatation(&m).unwrap();
        assert!((d.c - 0.125).abs() < 1e-3, "c = {}", d.c);
        assert!(!d.flagged);
        for (n, measured, expected) in &d.iterate_law {
            assert!(
                (measured - expected).abs() <= 0.1 * expected,
                "c(phi_{n}) = {measured}, want {expected}"
            );
        }
    }

    #[test]
    fn dilatation_matches_disk_alpha_at_n1() {
        // N = 1 ball automorphism with a = 0.5: c = 1/3, as in the disk.
        let m = corpus::ball_first_slot_mobius::<f64>(0.5, 1);
        let d = ball_dilatation(&m).unwrap();
        assert!((d.c - 1.0 / 3.0).abs() < 1e-6, "c = {}", d.c);
    }

    #[test]
    fn koranyi_trace_of_claim_map_is_bounded() {
        let m = corpus::siegel_claim_map::<f64>(8.0, 2);
        let tr = koranyi_trace(&m, &seed(0.1, 0.05, 0.2, -0.1), 200).unwrap();
        assert_eq!(tr.l.len(), 201);
        assert!(tr.bounded_verdict, "argmax {} of {}", tr.argmax, tr.l.len());
        assert!(tr.argmax < 150);
        assert!(tr.tail_relative_change(25) < 1e-6);
        assert!(
            tr.max_s_violation(0.125) <= 0.0,
            "violation {}",
            tr.max_s_violation(0.125)
        );
        // heights grow by at least A each step (ball Julia inequality)
        for h in tr.heights.windows(2) {
            assert!(h[1] >= 8.0 * h[0] * (1.0 - 1e-9));
        }
    }

    #[test]
    fn koranyi_trace_native_ball_short_horizon() {
        let m = corpus::ball_first_slot_mobius::<f64>(0.5, 2);
        let tr = koranyi_trace(&m, &seed(0.0, 0.0, 0.3, 0.1), 20).unwrap();
        assert!(tr.l.len() >= 10);
        assert!(tr.l.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn claim_extension_for_a2_map() {
        let m = corpus::siegel_claim_map::<f64>(2.0, 2);
        let ext = claim_extension_check(&m, &seed(0.05, 0.1, 0.15, -0.05), 3, 198).unwrap();
        assert!((ext.c - 0.5).abs() < 1e-3, "c = {}", ext.c);
        assert!(ext.c_power < ext.threshold);
        assert!(
            ext.interleave_violation <= 1e-10,
            "violation {}",
            ext.interleave_violation
        );
        assert!(ext.subsampled.bounded_verdict);
        assert!(ext.full.bounded_verdict);
        assert!(ext.verdict);
    }

    #[test]
    fn claim_extension_with_n_power_one_reduces_to_trace() {
        let m = corpus::siegel_claim_map::<f64>(8.0, 2);
        let z0 = seed(0.1, 0.05, 0.2, -0.1);
        let ext = claim_extension_check(&m, &z0, 1, 100).unwrap();
        let tr = koranyi_trace(&m, &z0, 100).unwrap();
        assert_eq!(ext.full.l.len(), tr.l.len());
        assert!((ext.full.sup_l - tr.sup_l).abs() < 1e-12);
        assert!(ext.verdict);
    }
}
