//! Built-in test maps shared by the verification suite, the CLI and the
//! integration tests. Closed forms for all of these are known, which is what
//! makes them usable as oracles.

use crate::linalg::CMatrix;
use crate::maps::expr::Expr;
use crate::maps::{Domain, MapDescriptor};
use crate::scalar::{c, Real};

fn konst<T: Real>(re: f64, im: f64) -> Expr<T> {
    Expr::Const(vec![c(re, im)])
}

/// Half-plane affine map a z + (b_re + i b_im).
pub fn hp_affine<T: Real>(a: f64, b_re: f64, b_im: f64) -> MapDescriptor<T> {
    let e = Expr::add(Expr::mul(konst(a, 0.0), Expr::var()), konst(b_re, b_im));
    MapDescriptor::new(Domain::HalfPlane, e).expect("affine half-plane map")
}

/// Phi(z) = 2z + sqrt(z); hyperbolic with A = 2 and a genuinely nonlinear
/// perturbation.
pub fn hp_two_z_plus_sqrt<T: Real>() -> MapDescriptor<T> {
    let e = Expr::add(
        Expr::mul(konst(2.0, 0.0), Expr::var()),
        Expr::sqrt(Expr::var()),
    );
    MapDescriptor::new(Domain::HalfPlane, e).expect("2z + sqrt z")
}

/// Phi(z) = 2z + z^(3/4) via sqrt(z) * sqrt(sqrt(z)); the perturbation grows
/// faster than |z|^(1/2), so it violates a (M, eps) = (1, 1/2) growth bound.
pub fn hp_slow_perturbation<T: Real>() -> MapDescriptor<T> {
    let e = Expr::add(
        Expr::mul(konst(2.0, 0.0), Expr::var()),
        Expr::mul(Expr::sqrt(Expr::var()), Expr::sqrt(Expr::sqrt(Expr::var()))),
    );
    MapDescriptor::new(Domain::HalfPlane, e).expect("2z + z^(3/4)")
}

/// Phi(z) = z/(z + 1): parabolic-type with finite Denjoy-Wolff point 0.
pub fn hp_inverse_decay<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::HalfPlane, e).expect("z/(z+1)")
}

/// Disk automorphism (z + a)/(1 + a z) with real a in (-1, 1); hyperbolic
/// with Denjoy-Wolff point 1 and alpha = (1 - a)/(1 + a).
pub fn disk_mobius_symmetric<T: Real>(a: f64) -> MapDescriptor<T> {
    let e = Expr::mobius(c(1.0, 0.0), c(a, 0.0), c(a, 0.0), c(1.0, 0.0), Expr::var());
    MapDescriptor::new(Domain::Disk, e).expect("disk automorphism")
}

/// The a = 0.5 instance, alpha = 1/3.
pub fn disk_mobius_a_half<T: Real>() -> MapDescriptor<T> {
    disk_mobius_symmetric(0.5)
}

/// phi(z) = z/(2 - z): elliptic with fixed point 0 and multiplier 1/2.
pub fn disk_elliptic_half<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(-1.0, 0.0),
        c(2.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("z/(2-z)")
}

/// phi(z) = i z: elliptic rotation about 0.
pub fn disk_rotation_i<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(0.0, 1.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("iz")
}

/// phi(z) = s z; not a self-map for s > 1 (negative-test map).
pub fn disk_scale<T: Real>(s: f64) -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(s, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("sz")
}

/// phi(z) = (1 + z)/2: the Cayley transport of 2z + i; hyperbolic with
/// Denjoy-Wolff point 1 and alpha = 1/2.
pub fn disk_affine_half<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(0.5, 0.0),
        c(0.5, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("(1+z)/2")
}

/// phi(z) = (1 + z)/(3 - z): the Cayley transport of z + i; parabolic with
/// Denjoy-Wolff point 1.
pub fn disk_parabolic<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
        c(3.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("(1+z)/(3-z)")
}

/// phi(z) = (1 + 2z)/(2 + z): the Cayley transport of 3z; hyperbolic
/// automorphism with alpha = 1/3.
pub fn disk_transport_of_triple<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(2.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(2.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::Disk, e).expect("(1+2z)/(2+z)")
}

/// phi(z) = 0.5 z + 0.1 z^2: elliptic, non-Moebius, multiplier 1/2.
pub fn disk_koenigs_quadratic<T: Real>() -> MapDescriptor<T> {
    let e = Expr::add(
        Expr::mul(konst(0.5, 0.0), Expr::var()),
        Expr::mul(konst(0.1, 0.0), Expr::powi(Expr::var(), 2)),
    );
    MapDescriptor::new(Domain::Disk, e).expect("0.5z + 0.1z^2")
}

/// phi(w) = (w + 1)/(1 - w) on the half-plane: elliptic, fixes i with
/// multiplier i (the transport of the disk rotation by i).
pub fn hp_elliptic_rotation<T: Real>() -> MapDescriptor<T> {
    let e = Expr::mobius(
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
        c(1.0, 0.0),
        Expr::var(),
    );
    MapDescriptor::new(Domain::HalfPlane, e).expect("(w+1)/(1-w)")
}

/// Siegel test map Phi(w) = (A w1 + sqrt(w1), sqrt(A) w') in C^n; a
/// hyperbolic self-map with dilatation coefficient 1/A. The perturbation is
/// Herglotz in the w1 slot only, so self-map-ness is certain rather than
/// sampled.
pub fn siegel_claim_map<T: Real>(a: f64, n: usize) -> MapDescriptor<T> {
    let e = Expr::add(
        Expr::SiegelDilate {
            factor: T::of(a),
            arg: Box::new(Expr::var()),
        },
        Expr::sqrt(Expr::var()),
    );
    MapDescriptor::new(Domain::Siegel(n), e).expect("siegel claim map")
}

/// Pure non-isotropic dilation delta_A on the Siegel domain in C^n.
pub fn siegel_dilation_map<T: Real>(a: f64, n: usize) -> MapDescriptor<T> {
    let e = Expr::SiegelDilate {
        factor: T::of(a),
        arg: Box::new(Expr::var()),
    };
    MapDescriptor::new(Domain::Siegel(n), e).expect("siegel dilation")
}

/// Psi_0 form (A z1, sqrt(A) U z') with a diagonal rotation U.
pub fn siegel_psi0_map<T: Real>(a: f64, phase: f64, n: usize) -> MapDescriptor<T> {
    let mut u = CMatrix::identity(n - 1);
    for k in 0..n - 1 {
        u.set(k, k, c(phase.cos(), phase.sin()));
    }
    let e = Expr::Unitary {
        matrix: crate::maps::schema::expand_block(&u, n),
        arg: Box::new(Expr::SiegelDilate {
            factor: T::of(a),
            arg: Box::new(Expr::var()),
        }),
    };
    MapDescriptor::new(Domain::Siegel(n), e).expect("psi0 map")
}

/// Degenerate ball self-map (phi(z1), 0, ..., 0) from a disk Moebius map.
pub fn ball_first_slot_mobius<T: Real>(a: f64, n: usize) -> MapDescriptor<T> {
    let e = Expr::mobius(c(1.0, 0.0), c(a, 0.0), c(a, 0.0), c(1.0, 0.0), Expr::var());
    MapDescriptor::new(Domain::Ball(n), e).expect("ball first-slot map")
}

/// Unitary rotation of the ball in C^n.
pub fn ball_rotation<T: Real>(phase: f64, n: usize) -> MapDescriptor<T> {
    let mut u = CMatrix::identity(n);
    u.set(0, 0, c(phase.cos(), phase.sin()));
    let e = Expr::Unitary {
        matrix: u,
        arg: Box::new(Expr::var()),
    };
    MapDescriptor::new(Domain::Ball(n), e).expect("ball rotation")
}

/// Named one-dimensional corpus used by `verify-all`.
pub fn one_dim_corpus<T: Real>() -> Vec<(&'static str, MapDescriptor<T>)> {
    vec![
        ("disk_automorphism_a_half", disk_mobius_a_half()),
        ("disk_elliptic_z_over_2mz", disk_elliptic_half()),
        ("disk_rotation_i", disk_rotation_i()),
        ("disk_affine_half", disk_affine_half()),
        ("disk_parabolic", disk_parabolic()),
        ("disk_transport_of_3z", disk_transport_of_triple()),
        ("disk_koenigs_quadratic", disk_koenigs_quadratic()),
        ("hp_2z_plus_i", hp_affine(2.0, 0.0, 1.0)),
        ("hp_z_plus_i", hp_affine(1.0, 0.0, 1.0)),
        ("hp_3z_plus_1", hp_affine(3.0, 1.0, 0.0)),
        ("hp_2z_plus_sqrt", hp_two_z_plus_sqrt()),
        ("hp_elliptic_rotation", hp_elliptic_rotation()),
    ]
}

/// Ball/Siegel corpus used by `verify-all`.
pub fn several_var_corpus<T: Real>() -> Vec<(&'static str, MapDescriptor<T>)> {
    vec![
        ("siegel_claim_a8", siegel_claim_map(8.0, 2)),
        ("siegel_claim_a2", siegel_claim_map(2.0, 2)),
        ("siegel_dilation_a4", siegel_dilation_map(4.0, 2)),
        (
            "siegel_psi0_a4",
            siegel_psi0_map(4.0, std::f64::consts::FRAC_PI_3, 2),
        ),
        ("ball_first_slot_mobius", ball_first_slot_mobius(0.5, 2)),
        ("ball_rotation", ball_rotation(0.9, 2)),
    ]
}
