//! Invariant geometry of the unit disk and the upper half-plane.
//!
//! Pseudo-hyperbolic and hyperbolic distances, disk automorphisms, the
//! Cayley transform (fixed convention `C(z) = i(1+z)/(1-z)`, so `0 -> i` and
//! `1 -> infinity`), and horodisks measured through the Poisson kernel.
//!
//! Points within 1e-15 of the boundary are rejected at construction instead
//! of clamped: every downstream quantity blows up there.

use crate::error::{Error, Result};
use crate::scalar::{im_unit, Real, C};
use num_complex::Complex;

/// Construction rejects points within this distance of the boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-15;

/// A point of the open unit disk, `|z| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T: Real>(C<T>);

impl<T: Real> DiskPoint<T> {
    pub fn new(value: C<T>) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain {
                domain: "disk",
                detail: format!("non-finite point {value:?}"),
            });
        }
        if value.norm() >= T::one() - T::of(BOUNDARY_MARGIN) {
            return Err(Error::Domain {
                domain: "disk",
                detail: format!("|z| >= 1 - 1e-15 for {value:?}"),
            });
        }
        Ok(Self(value))
    }

    pub fn origin() -> Self {
        Self(Complex::new(T::zero(), T::zero()))
    }

    pub fn value(self) -> C<T> {
        self.0
    }
}

/// A point of the open upper half-plane, `Im z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint<T: Real>(C<T>);

impl<T: Real> HalfPlanePoint<T> {
    pub fn new(value: C<T>) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain {
                domain: "halfplane",
                detail: format!("non-finite point {value:?}"),
            });
        }
        if value.im <= T::of(BOUNDARY_MARGIN) {
            return Err(Error::Domain {
                domain: "halfplane",
                detail: format!("Im z <= 1e-15 for {value:?}"),
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> C<T> {
        self.0
    }
}

/// d(z, w) = |(z - w) / (1 - conj(w) z)| on raw complex values.
pub fn pseudo_distance_raw<T: Real>(z: C<T>, w: C<T>) -> T {
    let one = Complex::new(T::one(), T::zero());
    ((z - w) / (one - w.conj() * z)).norm()
}

/// Pseudo-hyperbolic distance of two disk points, in [0, 1).
pub fn pseudo_distance<T: Real>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    pseudo_distance_raw(z.0, w.0)
}

/// Hyperbolic distance rho = log((1 + d)/(1 - d)).
pub fn hyperbolic_distance<T: Real>(z: DiskPoint<T>, w: DiskPoint<T>) -> T {
    let d = pseudo_distance(z, w);
    ((T::one() + d) / (T::one() - d)).ln()
}

/// Pseudo-hyperbolic distance in the half-plane model: |(z - w)/(z - conj w)|.
pub fn halfplane_pseudo_distance_raw<T: Real>(z: C<T>, w: C<T>) -> T {
    ((z - w) / (z - w.conj())).norm()
}

pub fn halfplane_pseudo_distance<T: Real>(z: HalfPlanePoint<T>, w: HalfPlanePoint<T>) -> T {
    halfplane_pseudo_distance_raw(z.0, w.0)
}

/// The disk automorphism gamma(z) = c (z - a)/(1 - conj(a) z); requires
/// |c| = 1 within 1e-12. With c = 1 it sends a to the origin.
pub fn disk_automorphism<T: Real>(
    a: DiskPoint<T>,
    c: C<T>,
    z: DiskPoint<T>,
) -> Result<DiskPoint<T>> {
    if (c.norm() - T::one()).abs() > T::of(1e-12) {
        return Err(Error::Descriptor(format!(
            "rotation factor must be unimodular, |c| = {:?}",
            c.norm()
        )));
    }
    let one = Complex::new(T::one(), T::zero());
    let w = c * (z.0 - a.0) / (one - a.0.conj() * z.0);
    DiskPoint::new(w)
}

/// Cayley transform C(z) = i (1 + z)/(1 - z) on raw values; maps the disk
/// onto the upper half-plane with 0 -> i and the boundary point 1 -> infinity.
pub fn cayley_raw<T: Real>(z: C<T>) -> Result<C<T>> {
    let one = Complex::new(T::one(), T::zero());
    if (z - one).norm() < T::of(BOUNDARY_MARGIN) {
        return Err(Error::Domain {
            domain: "disk",
            detail: "Cayley transform has a pole at z = 1".into(),
        });
    }
    Ok(im_unit::<T>() * (one + z) / (one - z))
}

/// Inverse Cayley transform: w -> (w - i)/(w + i).
pub fn cayley_inv_raw<T: Real>(w: C<T>) -> C<T> {
    let i = im_unit::<T>();
    (w - i) / (w + i)
}

pub fn cayley_to_halfplane<T: Real>(z: DiskPoint<T>) -> Result<HalfPlanePoint<T>> {
    HalfPlanePoint::new(cayley_raw(z.0)?)
}

pub fn cayley_to_disk<T: Real>(w: HalfPlanePoint<T>) -> Result<DiskPoint<T>> {
    DiskPoint::new(cayley_inv_raw(w.0))
}

/// Poisson-kernel ratio (1 - |z|^2)/|zeta - z|^2 at the boundary point zeta.
pub fn poisson_ratio<T: Real>(zeta: C<T>, z: C<T>) -> T {
    (T::one() - z.norm_sqr()) / (zeta - z).norm_sqr()
}

/// Horodisk at a boundary point: H(t) = { z : (1-|z|^2)/|zeta-z|^2 > 1/t }.
#[derive(Debug, Clone, Copy)]
pub struct Horodisk<T: Real> {
    base: C<T>,
    level: T,
}

impl<T: Real> Horodisk<T> {
    pub fn new(base: C<T>, level: T) -> Result<Self> {
        if (base.norm() - T::one()).abs() > T::of(1e-12) {
            return Err(Error::Descriptor(format!(
                "horodisk base must be on the unit circle, |zeta| = {:?}",
                base.norm()
            )));
        }
        if level <= T::zero() || level.is_nan() {
            return Err(Error::Descriptor("horodisk level must be positive".into()));
        }
        Ok(Self { base, level })
    }

    pub fn base(&self) -> C<T> {
        self.base
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn contains(&self, z: DiskPoint<T>) -> bool {
        poisson_ratio(self.base, z.0) > self.level.recip()
    }
}

pub fn horodisk_contains<T: Real>(h: &Horodisk<T>, z: DiskPoint<T>) -> bool {
    h.contains(z)
}
