//! Geometry of the unit ball in C^N and its unbounded Siegel model.
//!
//! The ball automorphisms gamma_a, the invariant quantity Q(a, b), the
//! pseudo-hyperbolic distance, and the ball Cayley transform with the fixed
//! convention `w1 = i (1 + z1)/(1 - z1), w' = z'/(1 - z1)` (so `0 -> iota`
//! and `e1 -> infinity`). Quantities along deep orbits are computed on the
//! Siegel side, where they are ratios of growing numbers instead of
//! differences of nearly-equal ones.

use crate::error::{Error, Result};
use crate::linalg::{herm_inner, norm, norm_sq, CVector};
use crate::scalar::{im_unit, Real, C};
use num_complex::Complex;

/// A point of the open unit ball, ||z|| < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T: Real> {
    coords: CVector<T>,
}

impl<T: Real> BallPoint<T> {
    pub fn new(coords: CVector<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain {
                domain: "ball",
                detail: "empty coordinate vector".into(),
            });
        }
        if coords
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain {
                domain: "ball",
                detail: "non-finite coordinates".into(),
            });
        }
        if norm(&coords) >= T::one() - T::of(1e-15) {
            return Err(Error::Domain {
                domain: "ball",
                detail: format!("||z|| >= 1 - 1e-15 for {coords:?}"),
            });
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn coords(&self) -> &[C<T>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A point of the Siegel domain, Im w1 > ||w'||^2.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint<T: Real> {
    coords: CVector<T>,
}

impl<T: Real> SiegelPoint<T> {
    pub fn new(coords: CVector<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain {
                domain: "siegel",
                detail: "empty coordinate vector".into(),
            });
        }
        if coords
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain {
                domain: "siegel",
                detail: "non-finite coordinates".into(),
            });
        }
        let h = height_raw(&coords);
        if h <= T::zero() || h.is_nan() {
            return Err(Error::Domain {
                domain: "siegel",
                detail: format!("height {h:?} not positive"),
            });
        }
        Ok(Self { coords })
    }

    /// The base point iota = (i, 0').
    pub fn iota(n: usize) -> Self {
        let mut coords = vec![Complex::new(T::zero(), T::zero()); n];
        coords[0] = im_unit();
        Self { coords }
    }

    pub fn coords(&self) -> &[C<T>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Im w1 - ||w'||^2.
    pub fn height(&self) -> T {
        height_raw(&self.coords)
    }
}

pub fn height_raw<T: Real>(w: &[C<T>]) -> T {
    w[0].im - norm_sq(&w[1..])
}

/// The ball automorphism gamma_a with gamma_a(a) = 0,
/// gamma_a(z) = (P_a z + s_a Q_a z - a)/(1 - (z, a)); gamma_0 = -identity
/// (the continuous limit of the formula).
pub fn ball_automorphism<T: Real>(a: &BallPoint<T>, z: &BallPoint<T>) -> BallPoint<T> {
    let out = ball_automorphism_raw(a.coords(), z.coords());
    BallPoint { coords: out }
}

pub fn ball_automorphism_raw<T: Real>(a: &[C<T>], z: &[C<T>]) -> CVector<T> {
    let a_nsq = norm_sq(a);
    let one = Complex::new(T::one(), T::zero());
    if a_nsq <= T::of(1e-300) {
        return z.iter().map(|v| -v).collect();
    }
    let za = herm_inner(z, a);
    let p_coef = za / Complex::new(a_nsq, T::zero());
    let s = Complex::new((T::one() - a_nsq).sqrt(), T::zero());
    let den = one - za;
    a.iter()
        .zip(z)
        .map(|(ak, zk)| {
            let p = p_coef * ak;
            let q = zk - p;
            (p + s * q - ak) / den
        })
        .collect()
}

/// Q(a, b) = |1 - (a, b)|^2 / ((1 - ||a||^2)(1 - ||b||^2)); >= 1, decreased
/// by every self-map of the ball.
pub fn q_quantity_raw<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    let one = Complex::new(T::one(), T::zero());
    let num = (one - herm_inner(a, b)).norm_sqr();
    num / ((T::one() - norm_sq(a)) * (T::one() - norm_sq(b)))
}

pub fn q_quantity<T: Real>(a: &BallPoint<T>, b: &BallPoint<T>) -> T {
    q_quantity_raw(a.coords(), b.coords())
}

/// Pseudo-hyperbolic distance d(a, b) = ||gamma_a(b)||.
pub fn pseudo_distance_raw<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    norm(&ball_automorphism_raw(a, b))
}

pub fn pseudo_distance<T: Real>(a: &BallPoint<T>, b: &BallPoint<T>) -> T {
    pseudo_distance_raw(a.coords(), b.coords())
}

/// Q expressed through the Siegel sesquilinear form
/// rho(v, w) = (v1 - conj(w1))/(2i) - <v', w'>, scaled so huge coordinates
/// do not overflow: Q = |rho(v,w)|^2 / (rho(v,v) rho(w,w)).
pub fn siegel_q_raw<T: Real>(v: &[C<T>], w: &[C<T>]) -> T {
    let hv = height_raw(v).sqrt();
    let hw = height_raw(w).sqrt();
    let two_i = Complex::new(T::zero(), T::of(2.0));
    let rho = (v[0] - w[0].conj()) / two_i - herm_inner(&v[1..], &w[1..]);
    let t = (rho / Complex::new(hv, T::zero())) / Complex::new(hw, T::zero());
    t.norm_sqr()
}

/// Pseudo-hyperbolic distance computed on the Siegel side:
/// d^2 = 1 - 1/Q.
pub fn siegel_pseudo_distance_raw<T: Real>(v: &[C<T>], w: &[C<T>]) -> T {
    let q = siegel_q_raw(v, w);
    (T::one() - q.recip()).max(T::zero()).sqrt()
}

/// Ball Cayley transform C(z) = (i (1 + z1)/(1 - z1), z'/(1 - z1)).
pub fn ball_cayley_raw<T: Real>(z: &[C<T>]) -> Result<CVector<T>> {
    let one = Complex::new(T::one(), T::zero());
    let den = one - z[0];
    if den.norm() < T::of(1e-15) {
        return Err(Error::Domain {
            domain: "ball",
            detail: "Cayley transform has a pole at z1 = 1".into(),
        });
    }
    let mut out = Vec::with_capacity(z.len());
    out.push(im_unit::<T>() * (one + z[0]) / den);
    for zp in &z[1..] {
        out.push(zp / den);
    }
    Ok(out)
}

/// Inverse ball Cayley transform: z1 = (w1 - i)/(w1 + i), z' = 2i w'/(w1 + i).
pub fn ball_cayley_inv_raw<T: Real>(w: &[C<T>]) -> CVector<T> {
    let i = im_unit::<T>();
    let den = w[0] + i;
    let two_i = Complex::new(T::zero(), T::of(2.0));
    let mut out = Vec::with_capacity(w.len());
    out.push((w[0] - i) / den);
    for wp in &w[1..] {
        out.push(two_i * wp / den);
    }
    out
}

pub fn ball_cayley<T: Real>(z: &BallPoint<T>) -> Result<SiegelPoint<T>> {
    SiegelPoint::new(ball_cayley_raw(z.coords())?)
}

pub fn ball_cayley_inv<T: Real>(w: &SiegelPoint<T>) -> Result<BallPoint<T>> {
    BallPoint::new(ball_cayley_inv_raw(w.coords()))
}

/// The Koranyi functional L(z) = |1 - z1| / (1 - ||z||^2) in ball coordinates.
pub fn koranyi_l_raw<T: Real>(z: &[C<T>]) -> T {
    let one = Complex::new(T::one(), T::zero());
    (one - z[0]).norm() / (T::one() - norm_sq(z))
}

/// The same functional computed from the Siegel side:
/// L = |w1 + i| / (2 height(w)). Exact identity, no cancellation.
pub fn siegel_koranyi_l<T: Real>(w: &[C<T>]) -> T {
    let i = im_unit::<T>();
    (w[0] + i).norm() / (T::of(2.0) * height_raw(w))
}

/// 1 - ||z||^2 of the ball preimage, computed from the Siegel side:
/// 1 - ||z||^2 = 4 height(w) / |w1 + i|^2.
pub fn siegel_one_minus_nsq<T: Real>(w: &[C<T>]) -> T {
    let i = im_unit::<T>();
    T::of(4.0) * height_raw(w) / (w[0] + i).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64 as c;

    fn bp(v: Vec<C<f64>>) -> BallPoint<f64> {
        BallPoint::new(v).unwrap()
    }

    #[test]
    fn gamma_a_examples() {
        let a = bp(vec![c(0.3, 0.1), c(-0.2, 0.4)]);
        let ga_a = ball_automorphism(&a, &a);
        assert!(norm(ga_a.coords()) < 1e-14);

        // N = 1 reduces to the disk formula: a = 0.5, z = 0 -> -0.5.
        let a1 = bp(vec![c(0.5, 0.0)]);
        let z0 = bp(vec![c(0.0, 0.0)]);
        let out = ball_automorphism(&a1, &z0);
        assert!((out.coords()[0] - c(-0.5, 0.0)).norm() < 1e-15);

        // gamma_a(0) = -a in general.
        let out2 = ball_automorphism(&a, &BallPoint::origin(2));
        for (u, v) in out2.coords().iter().zip(a.coords()) {
            assert!((u + v).norm() < 1e-15);
        }

        // gamma_0 = -identity.
        let z = bp(vec![c(0.2, -0.3), c(0.1, 0.0)]);
        let out3 = ball_automorphism(&BallPoint::origin(2), &z);
        for (u, v) in out3.coords().iter().zip(z.coords()) {
            assert!((u + v).norm() < 1e-15);
        }
    }

    #[test]
    fn q_quantity_examples() {
        let a = bp(vec![c(0.3, 0.1), c(-0.2, 0.4)]);
        assert!((q_quantity(&a, &a) - 1.0).abs() < 1e-14);

        let b = bp(vec![c(0.1, -0.5), c(0.3, 0.2)]);
        let q0 = q_quantity(&BallPoint::origin(2), &b);
        let expect = 1.0 / (1.0 - norm_sq(b.coords()));
        assert!((q0 - expect).abs() < 1e-14);

        // N = 2 with orthogonal slots: |1 - 0|^2 / (0.75 * 0.75) = 16/9.
        let u = bp(vec![c(0.5, 0.0), c(0.0, 0.0)]);
        let v = bp(vec![c(0.0, 0.0), c(0.5, 0.0)]);
        assert!((q_quantity(&u, &v) - 16.0 / 9.0).abs() < 1e-14);

        // Symmetry.
        assert!((q_quantity(&a, &b) - q_quantity(&b, &a)).abs() < 1e-14);
    }

    #[test]
    fn cayley_convention_and_height() {
        let z0 = BallPoint::<f64>::origin(2);
        let w = ball_cayley(&z0).unwrap();
        assert!((w.coords()[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(w.coords()[1].norm() < 1e-15);
        assert!((w.height() - 1.0).abs() < 1e-15);

        let z = bp(vec![c(0.2, 0.3), c(-0.1, 0.25)]);
        let w = ball_cayley(&z).unwrap();
        // height identity: height * (1 - ||z||^2)^{-1} |1 - z1|^2 = 1
        let expect = (1.0 - norm_sq(z.coords())) / (c(1.0, 0.0) - z.coords()[0]).norm_sqr();
        assert!((w.height() - expect).abs() < 1e-14);

        // height(C(z)) * L(z) * |1 - z1| = 1
        let l = koranyi_l_raw(z.coords());
        let prod = w.height() * l * (c(1.0, 0.0) - z.coords()[0]).norm();
        assert!((prod - 1.0).abs() < 1e-13);

        let back = ball_cayley_inv(&w).unwrap();
        for (u, v) in back.coords().iter().zip(z.coords()) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn cayley_matches_disk_model_at_n1() {
        let z = bp(vec![c(0.3, 0.2)]);
        let w = ball_cayley(&z).unwrap();
        let disk = crate::geometry::cayley_raw(z.coords()[0]).unwrap();
        assert!((w.coords()[0] - disk).norm() < 1e-15);
    }

    #[test]
    fn siegel_q_matches_ball_q() {
        let a = bp(vec![c(0.3, 0.1), c(-0.2, 0.4)]);
        let b = bp(vec![c(0.1, -0.5), c(0.3, 0.2)]);
        let va = ball_cayley_raw(a.coords()).unwrap();
        let vb = ball_cayley_raw(b.coords()).unwrap();
        let q_ball = q_quantity(&a, &b);
        let q_sieg = siegel_q_raw(&va, &vb);
        assert!((q_ball - q_sieg).abs() < 1e-12 * q_ball);

        let d_ball = pseudo_distance(&a, &b);
        let d_sieg = siegel_pseudo_distance_raw(&va, &vb);
        assert!((d_ball - d_sieg).abs() < 1e-12);
    }

    #[test]
    fn koranyi_functional_identities() {
        let z = bp(vec![c(0.4, 0.2), c(0.1, -0.3)]);
        let w = ball_cayley_raw(z.coords()).unwrap();
        assert!((koranyi_l_raw(z.coords()) - siegel_koranyi_l(&w)).abs() < 1e-13);
        let nsq = 1.0 - norm_sq(z.coords());
        assert!((siegel_one_minus_nsq(&w) - nsq).abs() < 1e-13);
    }

    #[test]
    fn construction_rejects_bad_points() {
        assert!(BallPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(SiegelPoint::new(vec![c(0.0, 0.5), c(1.0, 0.0)]).is_err());
        assert!(SiegelPoint::new(vec![c(0.0, 1.2), c(1.0, 0.0)]).is_ok());
    }
}
