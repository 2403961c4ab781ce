//! The full invariant suite behind `verify-all`: every module's sampled
//! invariants run against the built-in corpus, reported as one measured
//! violation per item.

use crate::accel::accelerate_real;
use crate::ball::SiegelPoint;
use crate::ball::{self, pseudo_distance_raw as ball_d, q_quantity_raw, siegel_q_raw, BallPoint};
use crate::corpus;
use crate::dynamics::{self, Classification};
use crate::geometry::{self, cayley_raw, pseudo_distance_raw};
use crate::maps::{Domain, MapDescriptor};
use crate::sample;
use crate::scalar::c64 as c;
use crate::siegel::{siegel_dilation, SiegelBoundary};
use crate::valiron::{ValironModel, ValironOptions};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct SuiteItem {
    pub name: &'static str,
    pub passed: bool,
    /// Largest measured violation (0 when the invariant held exactly).
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub items: Vec<SuiteItem>,
    pub rng_seed: u64,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn item(name: &'static str, measured: f64, threshold: f64, detail: String) -> SuiteItem {
    SuiteItem {
        name,
        passed: measured <= threshold,
        measured,
        threshold,
        detail,
    }
}

fn fail_item(name: &'static str, detail: String) -> SuiteItem {
    SuiteItem {
        name,
        passed: false,
        measured: f64::INFINITY,
        threshold: 0.0,
        detail,
    }
}

/// Runs every invariant; `inject_bad_map` adds a non-self-map (2z on the
/// disk) to the validation corpus to demonstrate failure reporting.
pub fn run_full_suite(rng_seed: u64, inject_bad_map: bool) -> SuiteReport {
    let mut items = vec![near_triangle(rng_seed)];
    items.push(conformal_invariance(rng_seed));
    items.push(cayley_isometry(rng_seed));
    items.push(horodisk_nesting(rng_seed));

    items.push(validation_corpus(rng_seed, inject_bad_map));
    items.push(schwarz_origin(rng_seed));
    items.push(iterate_consistency());

    items.push(step_monotonicity());
    items.push(no_periodic_orbits());
    items.push(property1_ratio());
    items.push(y_ratio_law());
    items.push(transport_consistency());

    items.push(psi_n_identity());
    items.push(qn_convergence());
    items.push(iterated_functional_equation());
    items.push(theta_surjectivity());
    items.push(theta_harmonicity());

    items.push(ball_q_monotonicity(rng_seed));
    items.push(ball_d_contraction(rng_seed));
    items.push(ball_julia_orbit());
    items.push(height_algebra(rng_seed));
    items.push(psi0_closed_form());

    SuiteReport { items, rng_seed }
}

fn near_triangle(seed: u64) -> SuiteItem {
    let mut pts = sample::disk_points::<f64>(seed ^ 0x11, 0.99);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let z = pts.next().unwrap();
        let w = pts.next().unwrap();
        let zeta = pts.next().unwrap();
        let a = pseudo_distance_raw(z, zeta);
        let b = pseudo_distance_raw(zeta, w);
        let bound = (a + b) / (1.0 + a * b);
        worst = worst.max(pseudo_distance_raw(z, w) - bound);
    }
    item(
        "geometry/near_triangle",
        worst,
        1e-12,
        "d(z,w) <= (d1+d2)/(1+d1 d2)".into(),
    )
}

fn conformal_invariance(seed: u64) -> SuiteItem {
    let mut pts = sample::disk_points::<f64>(seed ^ 0x22, 0.98);
    let mut phases = sample::unit_moduli::<f64>(seed ^ 0x23);
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let a = pts.next().unwrap();
        let ph = phases.next().unwrap();
        let z = pts.next().unwrap();
        let w = pts.next().unwrap();
        let one = Complex64::new(1.0, 0.0);
        let gz = ph * (z - a) / (one - a.conj() * z);
        let gw = ph * (w - a) / (one - a.conj() * w);
        worst = worst.max((pseudo_distance_raw(gz, gw) - pseudo_distance_raw(z, w)).abs());
    }
    item(
        "geometry/conformal_invariance",
        worst,
        1e-12,
        "d(g z, g w) = d(z, w)".into(),
    )
}

fn cayley_isometry(seed: u64) -> SuiteItem {
    let mut pts = sample::disk_points::<f64>(seed ^ 0x33, 0.95);
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let z = pts.next().unwrap();
        let w = pts.next().unwrap();
        let cz = cayley_raw(z).unwrap();
        let cw = cayley_raw(w).unwrap();
        let d_disk = pseudo_distance_raw(z, w);
        let d_hp = geometry::halfplane_pseudo_distance_raw(cz, cw);
        worst = worst.max((d_disk - d_hp).abs());
    }
    item(
        "geometry/cayley_isometry",
        worst,
        1e-12,
        "disk and half-plane d agree".into(),
    )
}

fn horodisk_nesting(seed: u64) -> SuiteItem {
    let mut pts = sample::disk_points::<f64>(seed ^ 0x44, 0.995);
    let mut phases = sample::unit_moduli::<f64>(seed ^ 0x45);
    let mut violations = 0usize;
    for _ in 0..2000 {
        let zeta = phases.next().unwrap();
        let z = pts.next().unwrap();
        let t1 = 0.1 + 1.9 * pts.next().unwrap().norm();
        let t2 = t1 + 0.5;
        let h1 = geometry::Horodisk::new(zeta, t1).unwrap();
        let h2 = geometry::Horodisk::new(zeta, t2).unwrap();
        let zp = geometry::DiskPoint::new(z).unwrap();
        if h1.contains(zp) && !h2.contains(zp) {
            violations += 1;
        }
    }
    item(
        "geometry/horodisk_nesting",
        violations as f64,
        0.0,
        "H(t1) inside H(t2) for t1 < t2".into(),
    )
}

fn validation_corpus(seed: u64, inject_bad_map: bool) -> SuiteItem {
    let mut maps = corpus::one_dim_corpus::<f64>();
    maps.extend(corpus::several_var_corpus::<f64>());
    let mut detail = String::new();
    let mut worst = 0.0f64;
    for (name, m) in &maps {
        let rep = m.validate_self_map(2000, seed ^ 0x55);
        if !rep.verdict {
            worst = worst.max(rep.max_boundary_violation.max(rep.schwarz_violation));
            detail.push_str(&format!("{name} failed validation; "));
        }
    }
    if inject_bad_map {
        let bad = corpus::disk_scale::<f64>(2.0);
        let rep = bad.validate_self_map(2000, seed ^ 0x55);
        if rep.verdict {
            return fail_item(
                "maps/validation_corpus",
                "injected non-self-map 2z passed validation".into(),
            );
        }
        worst = f64::INFINITY;
        detail.push_str(&format!(
            "injected_bad_map_2z boundary violation {:.3e}; ",
            rep.max_boundary_violation
        ));
    }
    item("maps/validation_corpus", worst, 1e-10, detail)
}

fn schwarz_origin(seed: u64) -> SuiteItem {
    let maps = [
        corpus::disk_elliptic_half::<f64>(),
        corpus::disk_rotation_i::<f64>(),
        corpus::disk_koenigs_quadratic(),
    ];
    let mut worst = 0.0f64;
    for m in &maps {
        let mut pts = sample::disk_points::<f64>(seed ^ 0x66, 0.995);
        for _ in 0..1000 {
            let z = pts.next().unwrap();
            let w = m.eval_scalar_raw(z).unwrap();
            worst = worst.max(w.norm() - z.norm());
        }
    }
    item(
        "maps/schwarz_origin",
        worst,
        1e-12,
        "|phi(z)| <= |z| when phi(0) = 0".into(),
    )
}

fn iterate_consistency() -> SuiteItem {
    let mut worst = 0.0f64;
    for (_, m) in corpus::one_dim_corpus::<f64>() {
        let z0 = match m.domain() {
            Domain::Disk => c(0.2, 0.1),
            _ => c(0.4, 1.1),
        };
        let mut w = z0;
        for n in 1..=4usize {
            w = m.eval_scalar_raw(w).unwrap();
            let v = m.iterate(n).eval_scalar_raw(z0).unwrap();
            worst = worst.max((v - w).norm() / w.norm().max(1.0));
        }
    }
    item(
        "maps/iterate_consistency",
        worst,
        1e-10,
        "eval(iterate(m,n)) = n-fold eval".into(),
    )
}

fn step_monotonicity() -> SuiteItem {
    let mut worst = 0.0f64;
    for (_, m) in corpus::one_dim_corpus::<f64>() {
        let starts: [Complex64; 2] = match m.domain() {
            Domain::Disk => [c(0.3, 0.2), c(-0.5, 0.1)],
            _ => [c(0.5, 1.5), c(-1.0, 0.3)],
        };
        for z0 in starts {
            let t = dynamics::iterate_orbit(&m, z0, 150, None).unwrap();
            for (n, w) in t.steps.windows(2).enumerate() {
                let slack = dynamics::step_noise_slack(&t, n) - 1e-12;
                worst = worst.max(w[1] - w[0] - slack);
            }
        }
    }
    item(
        "dynamics/step_monotonicity",
        worst,
        1e-12,
        "d_n non-increasing".into(),
    )
}

fn no_periodic_orbits() -> SuiteItem {
    let maps = [
        corpus::disk_mobius_a_half::<f64>(),
        corpus::disk_affine_half::<f64>(),
        corpus::disk_parabolic(),
        corpus::disk_transport_of_triple::<f64>(),
    ];
    let mut min_gap = f64::INFINITY;
    for m in &maps {
        for n in 1..=5usize {
            let it = m.iterate(n);
            for i in 0..10 {
                for j in 0..10 {
                    let z = c(-0.9 + 0.2 * i as f64, -0.9 + 0.2 * j as f64);
                    if z.norm() >= 0.95 {
                        continue;
                    }
                    let w = it.eval_scalar_raw(z).unwrap();
                    min_gap = min_gap.min(pseudo_distance_raw(w, z));
                }
            }
        }
    }
    // pass when every grid point moves by at least 1e-8
    item(
        "dynamics/no_periodic_orbit",
        if min_gap >= 1e-8 { 0.0 } else { 1e-8 - min_gap },
        0.0,
        format!("smallest displacement {min_gap:.3e}"),
    )
}

fn property1_ratio() -> SuiteItem {
    let maps = [
        corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
        corpus::hp_affine::<f64>(3.0, 1.0, 0.0),
        corpus::hp_two_z_plus_sqrt::<f64>(),
    ];
    let mut worst = 0.0f64;
    for m in &maps {
        let jc = dynamics::julia_caratheodory_limit(m).unwrap();
        let t = dynamics::iterate_orbit(m, c(0.3, 1.0), 4000, None).unwrap();
        let last = t.ratios.last().unwrap();
        worst = worst.max((last - Complex64::new(jc.a, 0.0)).norm());
    }
    item(
        "dynamics/property1_ratio",
        worst,
        1e-4,
        "z_{n+1}/z_n -> A".into(),
    )
}

fn y_ratio_law() -> SuiteItem {
    let maps = [
        corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
        corpus::hp_two_z_plus_sqrt::<f64>(),
    ];
    let mut worst = 0.0f64;
    for m in &maps {
        let jc = dynamics::julia_caratheodory_limit(m).unwrap();
        let t = dynamics::iterate_orbit(m, c(0.3, 1.0), 4000, None).unwrap();
        let ys: Vec<f64> = t.points.windows(2).map(|p| p[1].im / p[0].im).collect();
        let acc = accelerate_real(&ys, 1e-6);
        worst = worst.max((acc.value - jc.a).abs());
    }
    item(
        "dynamics/y_ratio_law",
        worst,
        1e-4,
        "y_{n+1}/y_n -> A".into(),
    )
}

fn transport_consistency() -> SuiteItem {
    let pairs: [(MapDescriptor<f64>, MapDescriptor<f64>); 3] = [
        (corpus::hp_affine(2.0, 0.0, 1.0), corpus::disk_affine_half()),
        (corpus::hp_affine(1.0, 0.0, 1.0), corpus::disk_parabolic()),
        (
            corpus::hp_affine(3.0, 0.0, 0.0),
            corpus::disk_transport_of_triple(),
        ),
    ];
    let mut worst = 0.0f64;
    for (hp, disk) in &pairs {
        let ch = match dynamics::classify(hp) {
            Ok(v) => v,
            Err(e) => return fail_item("dynamics/cayley_transport", e.to_string()),
        };
        let cd = match dynamics::classify(disk) {
            Ok(v) => v,
            Err(e) => return fail_item("dynamics/cayley_transport", e.to_string()),
        };
        if ch.kind() != cd.kind() {
            return fail_item(
                "dynamics/cayley_transport",
                format!("kind mismatch: {} vs {}", ch.kind(), cd.kind()),
            );
        }
        if let (
            Classification::Hyperbolic { alpha: ah, .. },
            Classification::Hyperbolic { alpha: ad, .. },
        ) = (&ch, &cd)
        {
            worst = worst.max((ah - ad).abs());
        }
    }
    item(
        "dynamics/cayley_transport",
        worst,
        1e-6,
        "classification transports".into(),
    )
}

fn build_model(map: &MapDescriptor<f64>, z0: Complex64) -> Result<ValironModel<f64>, SuiteItem> {
    ValironModel::build(map, z0, ValironOptions::default())
        .map_err(|e| fail_item("valiron/model_build", e.to_string()))
}

fn psi_n_identity() -> SuiteItem {
    let map = corpus::hp_two_z_plus_sqrt::<f64>();
    let m = match build_model(&map, c(0.0, 1.0)) {
        Ok(m) => m,
        Err(it) => return it,
    };
    let grid = [c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 0.5), c(2.0, 3.0)];
    let mut last = f64::INFINITY;
    for n in 0..m.trace().len() - 1 {
        let rn = m.renormalizer(n);
        let rn1 = m.renormalizer(n + 1);
        let mut worst = 0.0f64;
        for &z in &grid {
            let v = rn1.apply(map.eval_scalar_raw(rn.inverse(z)).unwrap());
            worst = worst.max((v - z).norm());
        }
        last = worst;
    }
    item(
        "valiron/psi_n_identity",
        last,
        1e-3,
        "tau_{n+1} . Phi . tau_n^{-1} -> id".into(),
    )
}

fn qn_convergence() -> SuiteItem {
    let map = corpus::hp_two_z_plus_sqrt::<f64>();
    let m = match build_model(&map, c(0.0, 1.0)) {
        Ok(m) => m,
        Err(it) => return it,
    };
    let pts = &m.trace().points;
    let q_im: Vec<f64> = pts.windows(2).map(|p| p[1].im / p[0].im).collect();
    let acc = accelerate_real(&q_im, 1e-6);
    item(
        "valiron/qn_convergence",
        (acc.value - m.a()).abs(),
        1e-4,
        "Im q_n -> A".into(),
    )
}

fn iterated_functional_equation() -> SuiteItem {
    let mut worst = 0.0f64;
    for map in [
        corpus::hp_affine::<f64>(2.0, 0.0, 1.0),
        corpus::hp_two_z_plus_sqrt::<f64>(),
    ] {
        let m = match build_model(&map, c(0.0, 1.0)) {
            Ok(m) => m,
            Err(it) => return it,
        };
        let mut t_n = c(0.0, 1.0);
        for n in 1..=20usize {
            t_n = Complex64::new(m.a(), 0.0) * t_n + Complex64::new(m.b_inf(), 0.0);
            let s = match m.sigma(m.trace().points[n]) {
                Ok(s) => s.value,
                Err(e) => return fail_item("valiron/iterated_functional_eq", e.to_string()),
            };
            worst = worst.max((s - t_n).norm() / t_n.norm().max(1.0));
        }
    }
    item(
        "valiron/iterated_functional_eq",
        worst,
        1e-6,
        "sigma(z_n) = T_n(i)".into(),
    )
}

fn theta_surjectivity() -> SuiteItem {
    let map = corpus::hp_affine::<f64>(3.0, 1.0, 0.0);
    let p = c(-0.5, 0.0);
    let mut worst = 0.0f64;
    for k in 1..8 {
        let target = std::f64::consts::PI * k as f64 / 8.0;
        let z0 = p + c(target.cos(), target.sin());
        let m = match build_model(&map, z0) {
            Ok(m) => m,
            Err(it) => return it,
        };
        worst = worst.max((m.theta() - target).abs());
    }
    item(
        "valiron/theta_surjectivity",
        worst,
        1e-6,
        "theta attains pi k/8".into(),
    )
}

fn theta_harmonicity() -> SuiteItem {
    let map = corpus::hp_two_z_plus_sqrt::<f64>();
    let center = c(0.3, 1.4);
    let m = match build_model(&map, center) {
        Ok(m) => m,
        Err(it) => return it,
    };
    let theta_center = m.theta();
    let mut mean = 0.0;
    for k in 0..64 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        let z0 = center + c(0.1 * th.cos(), 0.1 * th.sin());
        let mk = match build_model(&map, z0) {
            Ok(m) => m,
            Err(it) => return it,
        };
        mean += mk.theta();
    }
    mean /= 64.0;
    item(
        "valiron/theta_harmonicity",
        (theta_center - mean).abs(),
        1e-3,
        "mean-value property of theta".into(),
    )
}

fn ball_q_monotonicity(seed: u64) -> SuiteItem {
    let mut worst = 0.0f64;
    for (_, m) in corpus::several_var_corpus::<f64>() {
        let n = m.domain().dim();
        let mut pts = sample::ball_points::<f64>(n, seed ^ 0x77, 0.9);
        for _ in 0..10_000 {
            let a = pts.next().unwrap();
            let b = pts.next().unwrap();
            let (qa, qb) = match m.domain() {
                Domain::Siegel(_) => {
                    let va = ball::ball_cayley_raw(&a).unwrap();
                    let vb = ball::ball_cayley_raw(&b).unwrap();
                    let fa = m.eval_checked(&va).unwrap();
                    let fb = m.eval_checked(&vb).unwrap();
                    (siegel_q_raw(&fa, &fb), siegel_q_raw(&va, &vb))
                }
                _ => {
                    let fa = m.eval_checked(&a).unwrap();
                    let fb = m.eval_checked(&b).unwrap();
                    (q_quantity_raw(&fa, &fb), q_quantity_raw(&a, &b))
                }
            };
            worst = worst.max(qa - qb * (1.0 + 1e-12));
        }
    }
    item(
        "ball/q_monotonicity",
        worst,
        0.0,
        "Q(f a, f b) <= Q(a, b)".into(),
    )
}

fn ball_d_contraction(seed: u64) -> SuiteItem {
    let mut worst = 0.0f64;
    for (_, m) in corpus::several_var_corpus::<f64>() {
        let n = m.domain().dim();
        let mut pts = sample::ball_points::<f64>(n, seed ^ 0x88, 0.9);
        for _ in 0..5000 {
            let a = pts.next().unwrap();
            let b = pts.next().unwrap();
            let (da, db) = match m.domain() {
                Domain::Siegel(_) => {
                    let va = ball::ball_cayley_raw(&a).unwrap();
                    let vb = ball::ball_cayley_raw(&b).unwrap();
                    let fa = m.eval_checked(&va).unwrap();
                    let fb = m.eval_checked(&vb).unwrap();
                    (
                        ball::siegel_pseudo_distance_raw(&fa, &fb),
                        ball::siegel_pseudo_distance_raw(&va, &vb),
                    )
                }
                _ => {
                    let fa = m.eval_checked(&a).unwrap();
                    let fb = m.eval_checked(&b).unwrap();
                    (ball_d(&fa, &fb), ball_d(&a, &b))
                }
            };
            worst = worst.max(da - db - 1e-12);
        }
    }
    item(
        "ball/d_contraction",
        worst.max(0.0),
        0.0,
        "d(f a, f b) <= d(a, b)".into(),
    )
}

fn ball_julia_orbit() -> SuiteItem {
    // 1/height_{n+1} <= c / height_n along Siegel orbits (c = 1/A).
    let mut worst = 0.0f64;
    for (a, map) in [
        (8.0, corpus::siegel_claim_map::<f64>(8.0, 2)),
        (2.0, corpus::siegel_claim_map::<f64>(2.0, 2)),
        (4.0, corpus::siegel_dilation_map::<f64>(4.0, 2)),
    ] {
        let z0 = BallPoint::new(vec![c(0.1, 0.05), c(0.2, -0.1)]).unwrap();
        let tr = crate::koranyi::koranyi_trace(&map, &z0, 120).unwrap();
        for h in tr.heights.windows(2) {
            // h_{n+1} >= A h_n within 1e-9 relative slack
            worst = worst.max((a * h[0] - h[1]) / (a * h[0]));
        }
    }
    item(
        "ball/julia_orbit",
        worst.max(0.0),
        1e-9,
        "heights grow by at least A".into(),
    )
}

fn height_algebra(seed: u64) -> SuiteItem {
    let mut pts = sample::siegel_points::<f64>(2, seed ^ 0x99);
    let mut worst = 0.0f64;
    let b = SiegelBoundary::new(vec![c(1.0, 1.0), c(-1.0, 0.0)]).unwrap();
    let psi = crate::siegel::PsiParams::new(
        vec![c(0.7, 5.3), c(0.4, -0.6)],
        crate::linalg::CMatrix::from_rows(vec![vec![c(0.6, 0.8)]]).unwrap(),
    )
    .unwrap();
    for _ in 0..1000 {
        let w = SiegelPoint::new(pts.next().unwrap()).unwrap();
        let h = w.height();
        let t = crate::siegel::siegel_translation(&b, &w);
        worst = worst.max((t.height() - h).abs() / h);
        let d = siegel_dilation(4.0, &w).unwrap();
        worst = worst.max((d.height() - 4.0 * h).abs() / (4.0 * h));
        let p = psi.apply(&w);
        worst = worst.max((p.height() - psi.scale() * h).abs() / (psi.scale() * h));
    }
    item(
        "ball/height_algebra",
        worst,
        1e-10,
        "translation/dilation/psi height laws".into(),
    )
}

fn psi0_closed_form() -> SuiteItem {
    // Psi_0^n(w) = (A^n w1, A^{n/2} U^n w') against iterated evaluation.
    let a = 4.0f64;
    let phase = std::f64::consts::FRAC_PI_3;
    let map = corpus::siegel_psi0_map::<f64>(a, phase, 2);
    let w0 = vec![c(0.3, 2.0), c(0.4, -0.2)];
    let mut w = w0.clone();
    let mut worst = 0.0f64;
    for n in 1..=20 {
        w = map.eval_checked(&w).unwrap();
        let an = a.powi(n);
        let expect0 = w0[0] * Complex64::new(an, 0.0);
        let rot = Complex64::from_polar(1.0, phase * n as f64);
        let expect1 = w0[1] * Complex64::new(an.sqrt(), 0.0) * rot;
        worst = worst.max((w[0] - expect0).norm() / expect0.norm());
        worst = worst.max((w[1] - expect1).norm() / expect1.norm());
    }
    item(
        "ball/psi0_closed_form",
        worst,
        1e-9,
        "Psi_0 iterates in closed form".into(),
    )
}
