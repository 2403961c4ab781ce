//! Deterministic sampling.
//!
//! Validation and the property suites draw points from a seeded
//! low-discrepancy stream (the additive recurrence driven by the generalized
//! golden ratios), so a fixed seed reproduces runs bit for bit on any
//! platform. splitmix64 supplies the seeded stream offsets.

use crate::scalar::{c, Real, C};
use num_complex::Complex;

pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Low-discrepancy stream in [0,1)^d: x_{k+1} = frac(x_k + alpha) with
/// alpha_i = phi_d^{-(i+1)}, phi_d the positive root of x^(d+1) = x + 1.
pub struct Rd {
    alpha: Vec<f64>,
    state: Vec<f64>,
}

impl Rd {
    pub fn new(d: usize, seed: u64) -> Self {
        assert!(d >= 1);
        let mut phi = 1.0_f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
        }
        let mut alpha = Vec::with_capacity(d);
        let mut a = 1.0;
        for _ in 0..d {
            a /= phi;
            alpha.push(a);
        }
        let mut rng = SplitMix64::new(seed);
        let state = (0..d).map(|_| rng.next_f64()).collect();
        Self { alpha, state }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        for (s, a) in self.state.iter_mut().zip(&self.alpha) {
            *s += *a;
            if *s >= 1.0 {
                *s -= 1.0;
            }
        }
        self.state.clone()
    }
}

/// Interior disk points with |z| <= rmax, area-uniform in the radial scale.
pub fn disk_points<T: Real>(seed: u64, rmax: f64) -> impl Iterator<Item = C<T>> {
    let mut rd = Rd::new(2, seed);
    std::iter::from_fn(move || {
        let p = rd.next_point();
        let r = rmax * p[0].sqrt();
        let th = 2.0 * std::f64::consts::PI * p[1];
        Some(c(r * th.cos(), r * th.sin()))
    })
}

/// Upper half-plane points: x in [-8, 8], y log-uniform in [1e-2, 1e2].
pub fn halfplane_points<T: Real>(seed: u64) -> impl Iterator<Item = C<T>> {
    let mut rd = Rd::new(2, seed);
    std::iter::from_fn(move || {
        let p = rd.next_point();
        let x = (p[0] - 0.5) * 16.0;
        let y = 10f64.powf(p[1] * 4.0 - 2.0);
        Some(c(x, y))
    })
}

/// Unit-modulus complex numbers.
pub fn unit_moduli<T: Real>(seed: u64) -> impl Iterator<Item = C<T>> {
    let mut rd = Rd::new(1, seed);
    std::iter::from_fn(move || {
        let p = rd.next_point();
        let th = 2.0 * std::f64::consts::PI * p[0];
        Some(c(th.cos(), th.sin()))
    })
}

/// Interior points of the unit ball in C^n with norm <= rmax.
pub fn ball_points<T: Real>(n: usize, seed: u64, rmax: f64) -> impl Iterator<Item = Vec<C<T>>> {
    let mut rd = Rd::new(2 * n + 1, seed);
    std::iter::from_fn(move || {
        let p = rd.next_point();
        // Gaussian direction via Box-Muller on consecutive pairs.
        let mut dir = Vec::with_capacity(n);
        let mut nsq = 0.0_f64;
        for j in 0..n {
            let u = p[2 * j].max(1e-12);
            let v = p[2 * j + 1];
            let m = (-2.0 * u.ln()).sqrt();
            let re = m * (2.0 * std::f64::consts::PI * v).cos();
            let im = m * (2.0 * std::f64::consts::PI * v).sin();
            nsq += re * re + im * im;
            dir.push((re, im));
        }
        let norm = nsq.sqrt().max(1e-12);
        let r = rmax * p[2 * n].powf(1.0 / (2.0 * n as f64));
        Some(
            dir.into_iter()
                .map(|(re, im)| c(re * r / norm, im * r / norm))
                .collect(),
        )
    })
}

/// Siegel domain points: w' in a box, Im w1 = ||w'||^2 + h with h log-uniform.
pub fn siegel_points<T: Real>(n: usize, seed: u64) -> impl Iterator<Item = Vec<C<T>>> {
    assert!(n >= 1);
    let mut rd = Rd::new(2 * n, seed);
    std::iter::from_fn(move || {
        let p = rd.next_point();
        let mut w = Vec::with_capacity(n);
        let mut wp_nsq = 0.0_f64;
        for j in 1..n {
            let re = (p[2 * j] - 0.5) * 3.0;
            let im = (p[2 * j + 1] - 0.5) * 3.0;
            wp_nsq += re * re + im * im;
            w.push(Complex::new(T::of(re), T::of(im)));
        }
        let x = (p[0] - 0.5) * 10.0;
        let h = 10f64.powf(p[1] * 3.4 - 1.7); // [2e-2, 50]
        let w1 = c::<T>(x, wp_nsq + h);
        let mut out = Vec::with_capacity(n);
        out.push(w1);
        out.extend(w);
        Some(out)
    })
}
