//! Aitken delta-squared acceleration with a convergence certificate.
//!
//! Every limit reported by this crate goes through [`accelerate`] (or its
//! real-sequence wrapper); raw sequence tails are never used as limits. The
//! certificate is the magnitude of the last correction of the best
//! extrapolation row.

use crate::scalar::{Real, C};

/// Result of accelerating one sequence.
#[derive(Debug, Clone, Copy)]
pub struct Accel<T: Real> {
    pub value: C<T>,
    /// Magnitude of the last correction on the best row.
    pub residual: T,
    /// `residual <= tol` for the tolerance the caller requested.
    pub converged: bool,
    /// Input terms actually used after noise truncation.
    pub used: usize,
}

/// Same certificate for a real-valued sequence.
#[derive(Debug, Clone, Copy)]
pub struct AccelReal<T: Real> {
    pub value: T,
    pub residual: T,
    pub converged: bool,
    pub used: usize,
}

/// Iterated Aitken extrapolation of a complex sequence.
///
/// The input is first truncated at its smallest successive difference:
/// beyond that point differences are dominated by rounding noise and the
/// delta-squared quotient would amplify it. Degenerate second differences
/// are treated as "already converged" and propagate the current value.
pub fn accelerate<T: Real>(seq: &[C<T>], tol: T) -> Accel<T> {
    assert!(!seq.is_empty(), "cannot accelerate an empty sequence");
    if seq.len() == 1 {
        return Accel {
            value: seq[0],
            residual: T::infinity(),
            converged: false,
            used: 1,
        };
    }

    let mut best_i = 0;
    let mut best_d = T::infinity();
    for i in 0..seq.len() - 1 {
        let d = (seq[i + 1] - seq[i]).norm();
        if d < best_d {
            best_d = d;
            best_i = i;
        }
    }
    let cut = (best_i + 2).min(seq.len());

    let mut cur: Vec<C<T>> = seq[..cut].to_vec();
    let mut value = *cur.last().unwrap();
    let mut residual = (cur[cur.len() - 1] - cur[cur.len() - 2]).norm();

    for _ in 0..4 {
        if cur.len() < 3 {
            break;
        }
        let mut next: Vec<C<T>> = Vec::with_capacity(cur.len() - 2);
        for i in 0..cur.len() - 2 {
            let d1 = cur[i + 1] - cur[i];
            let d2 = cur[i + 2] - cur[i + 1];
            let den = d2 - d1;
            let scale = cur[i + 2].norm().max(T::one());
            if den.norm() <= T::epsilon() * scale * T::of(16.0) {
                next.push(cur[i + 2]);
            } else {
                next.push(cur[i + 2] - d2 * d2 / den);
            }
        }
        let r = if next.len() >= 2 {
            (next[next.len() - 1] - next[next.len() - 2]).norm()
        } else {
            (next[0] - *cur.last().unwrap()).norm()
        };
        if r <= residual {
            residual = r;
            value = *next.last().unwrap();
        }
        cur = next;
    }

    Accel {
        value,
        residual,
        converged: residual <= tol,
        used: cut,
    }
}

pub fn accelerate_real<T: Real>(seq: &[T], tol: T) -> AccelReal<T> {
    let cseq: Vec<C<T>> = seq.iter().map(|&x| C::new(x, T::zero())).collect();
    let a = accelerate(&cseq, tol);
    AccelReal {
        value: a.value.re,
        residual: a.residual,
        converged: a.converged,
        used: a.used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn geometric_sequence_is_collapsed_exactly() {
        // s_n = 2 + 3 * 0.5^n; the limit is 2.
        let seq: Vec<f64> = (0..12).map(|n| 2.0 + 3.0 * 0.5f64.powi(n)).collect();
        let a = accelerate_real(&seq, 1e-12);
        assert!(a.converged, "residual {:e}", a.residual);
        assert!((a.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_geometric_modes() {
        // s_n = 1 + 0.7^n + 0.3^n needs an iterated pass.
        let seq: Vec<f64> = (0..30)
            .map(|n| 1.0 + 0.7f64.powi(n) + 0.3f64.powi(n))
            .collect();
        let a = accelerate_real(&seq, 1e-10);
        assert!(a.converged);
        assert!((a.value - 1.0).abs() < 1e-10, "value {}", a.value);
    }

    #[test]
    fn constant_sequence() {
        let seq = vec![4.0f64; 8];
        let a = accelerate_real(&seq, 1e-14);
        assert!(a.converged);
        assert_eq!(a.value, 4.0);
    }

    #[test]
    fn noisy_tail_is_truncated() {
        // Clean geometric decay down to ~1e-9, then rounding-level jitter.
        let mut seq: Vec<f64> = (0..30).map(|n| 5.0 + 0.5f64.powi(n)).collect();
        for (k, v) in seq.iter_mut().enumerate().skip(24) {
            *v = 5.0 + if k % 2 == 0 { 3e-13 } else { -2e-13 };
        }
        let a = accelerate_real(&seq, 1e-9);
        assert!(a.converged);
        assert!((a.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn complex_ratio_sequence() {
        let lim = Complex64::new(0.0, 2.0);
        let seq: Vec<Complex64> = (0..20)
            .map(|n| lim - Complex64::new(0.0, 1.0) * 0.5f64.powi(n))
            .collect();
        let a = accelerate(&seq, 1e-12);
        assert!(a.converged);
        assert!((a.value - lim).norm() < 1e-12);
    }

    #[test]
    fn short_input_does_not_certify() {
        let a = accelerate_real(&[1.0f64], 1e-9);
        assert!(!a.converged);
    }
}
