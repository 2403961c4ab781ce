//! Command-line driver: loads map descriptors, runs classification,
//! conjugation and confinement experiments, and emits CSV/JSON artifacts.
//!
//! Exit codes: 0 ok, 1 suite failure, 2 config error, 3 inconclusive or
//! divergent, 4 not a self-map.

mod emit;
mod parse;

use clap::{Args, Parser, Subcommand};
use emit::{cjson, map_indexed, thread_cap, Meta};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use valironkit::ball::BallPoint;
use valironkit::dynamics::{self, BoundaryPoint, Classification};
use valironkit::koranyi;
use valironkit::maps::Domain;
use valironkit::sample;
use valironkit::suite;
use valironkit::valiron::{ValironModel, ValironOptions};
use valironkit::{Error, MapDescriptor64};

#[derive(Parser)]
#[command(
    name = "valironkit",
    version,
    about = "Iteration experiments for analytic self-maps: Denjoy-Wolff location, type classification, intertwining models, Koranyi confinement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArgs {
    /// Map descriptor: inline JSON (starts with '{') or a file path.
    #[arg(long)]
    map: String,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed for all sampling (recorded in every output).
    #[arg(long, default_value_t = 7)]
    rng_seed: u64,
    /// Step cap; defaults depend on the subcommand.
    #[arg(long)]
    max_n: Option<usize>,
    /// Certificate tolerance override where applicable.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a map as elliptic, hyperbolic or parabolic.
    Classify {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Record an orbit trace as CSV.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        /// Starting point (complex literal like `0.5+1i`).
        #[arg(long, default_value = "i", allow_hyphen_values = true)]
        start: String,
    },
    /// Build the intertwining model; emits JSON, the base-orbit CSV and an
    /// optional theta field over a seed grid.
    Valiron {
        #[command(flatten)]
        map: MapArgs,
        /// Base point of the renormalized orbit.
        #[arg(long, default_value = "i", allow_hyphen_values = true)]
        z0: String,
        /// Theta-field grid `a,b,nx,ny` with complex corners.
        #[arg(long, allow_hyphen_values = true)]
        seed_grid: Option<String>,
    },
    /// Sweep the Heins curve t -> H(t sigma).
    Heins {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value = "i", allow_hyphen_values = true)]
        z0: String,
        /// Comma-separated positive parameters.
        #[arg(long, default_value = "0.5,1,1.5,2.5")]
        t_grid: String,
    },
    /// Koranyi confinement verdict for a hyperbolic ball/Siegel map.
    BallClaim {
        #[command(flatten)]
        map: MapArgs,
        /// Iterate power N with c^N below the threshold (default: smallest).
        #[arg(long)]
        n_power: Option<usize>,
        /// Number of quasi-random seeds.
        #[arg(long, default_value_t = 5)]
        seeds: usize,
    },
    /// Run every module invariant against the built-in corpus.
    VerifyAll {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        rng_seed: u64,
        /// Add a known non-self-map to demonstrate failure reporting.
        #[arg(long, default_value_t = false)]
        inject_bad_map: bool,
    },
}

enum CliError {
    Config(String),
    Inconclusive(String),
    NotSelfMap(String),
    Suite,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Suite => 1,
            CliError::Config(_) => 2,
            CliError::Inconclusive(_) => 3,
            CliError::NotSelfMap(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Suite => "invariant suite failed".into(),
            CliError::Config(m) => format!("config error: {m}"),
            CliError::Inconclusive(m) => format!("inconclusive: {m}"),
            CliError::NotSelfMap(m) => format!("not a self-map: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Descriptor(m) => CliError::Config(m),
            Error::Domain { detail, .. } => CliError::NotSelfMap(detail),
            other => CliError::Inconclusive(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { map } => cmd_classify(&map),
        Command::Orbit { map, start } => cmd_orbit(&map, &start),
        Command::Valiron { map, z0, seed_grid } => cmd_valiron(&map, &z0, seed_grid.as_deref()),
        Command::Heins { map, z0, t_grid } => cmd_heins(&map, &z0, &t_grid),
        Command::BallClaim {
            map,
            n_power,
            seeds,
        } => cmd_ball_claim(&map, n_power, seeds),
        Command::VerifyAll {
            out,
            rng_seed,
            inject_bad_map,
        } => cmd_verify_all(&out, rng_seed, inject_bad_map),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("valironkit: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_map(spec: &str) -> Result<MapDescriptor64, CliError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)
            .map_err(|e| CliError::Config(format!("cannot read map file '{spec}': {e}")))?
    };
    MapDescriptor64::from_json(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn parse_point(s: &str) -> Result<Complex64, CliError> {
    parse::complex(s).map_err(CliError::Config)
}

fn boundary_json(p: &BoundaryPoint<f64>) -> Value {
    match p {
        BoundaryPoint::Finite(z) => cjson(*z),
        BoundaryPoint::Infinity => json!("infinity"),
    }
}

fn cmd_classify(args: &MapArgs) -> Result<(), CliError> {
    let m = load_map(&args.map)?;
    let meta = Meta::new(
        &format!("classify;map={};seed={}", args.map, args.rng_seed),
        args.rng_seed,
    );
    if !m.domain().is_scalar() {
        return Err(CliError::Config(
            "classify expects a one-dimensional map; use ball-claim for several variables".into(),
        ));
    }
    let report = m.validate_self_map(2000, args.rng_seed);
    if !report.verdict {
        return Err(CliError::NotSelfMap(format!(
            "validation failed: boundary violation {:.3e}, contraction violation {:.3e}",
            report.max_boundary_violation, report.schwarz_violation
        )));
    }
    let cls = dynamics::classify(&m)?;
    let body = match &cls {
        Classification::Elliptic {
            fixed_point,
            multiplier,
            ..
        } => json!({
            "kind": "elliptic",
            "fixed_point": cjson(*fixed_point),
            "lambda": cjson(*multiplier),
        }),
        Classification::Hyperbolic {
            dw,
            alpha,
            evidence,
        } => json!({
            "kind": "hyperbolic",
            "alpha": alpha,
            "dw": boundary_json(dw),
            "evidence": {
                "radial": evidence.dilatation.map(|d| d.radial),
                "orbital": evidence.dilatation.map(|d| d.orbital),
                "flagged": evidence.dilatation.map(|d| d.flagged),
                "dw_spread": evidence.dw_spread,
            },
        }),
        Classification::Parabolic { dw, evidence } => json!({
            "kind": "parabolic",
            "dw": boundary_json(dw),
            "evidence": {
                "radial": evidence.dilatation.map(|d| d.radial),
                "orbital": evidence.dilatation.map(|d| d.orbital),
                "flagged": evidence.dilatation.map(|d| d.flagged),
                "borderline": evidence.borderline,
            },
        }),
    };
    let mut doc = body;
    doc["meta"] = meta.json();
    let path =
        emit::write_json(&args.out, "classification.json", &doc).map_err(CliError::Config)?;
    println!("{}", serde_json::to_string(&doc).expect("json"));
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn orbit_csv(meta: &Meta, trace: &valironkit::OrbitTrace64) -> String {
    let mut out = meta.csv_header();
    out.push_str("n,re,im,abs,arg,step_d,ratio_re,ratio_im\n");
    for (n, z) in trace.points.iter().enumerate() {
        let (step, rre, rim) = if n < trace.steps.len() {
            (
                trace.steps[n].to_string(),
                trace.ratios[n].re.to_string(),
                trace.ratios[n].im.to_string(),
            )
        } else {
            (String::new(), String::new(), String::new())
        };
        out.push_str(&format!(
            "{n},{},{},{},{},{step},{rre},{rim}\n",
            z.re,
            z.im,
            z.norm(),
            trace.args[n],
        ));
    }
    out
}

fn cmd_orbit(args: &MapArgs, start: &str) -> Result<(), CliError> {
    let m = load_map(&args.map)?;
    if !m.domain().is_scalar() {
        return Err(CliError::Config(
            "orbit expects a one-dimensional map".into(),
        ));
    }
    let z0 = parse_point(start)?;
    let max_n = args.max_n.unwrap_or(1000);
    let meta = Meta::new(
        &format!(
            "orbit;map={};start={start};max_n={max_n};seed={}",
            args.map, args.rng_seed
        ),
        args.rng_seed,
    );
    let trace = dynamics::iterate_orbit(&m, z0, max_n, None)?;
    let path = emit::write_file(&args.out, "orbit.csv", &orbit_csv(&meta, &trace))
        .map_err(CliError::Config)?;
    println!(
        "{}",
        json!({
            "meta": meta.json(),
            "length": trace.len(),
            "termination": trace.termination.name(),
            "last": cjson(trace.last()),
        })
    );
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_valiron(args: &MapArgs, z0_str: &str, seed_grid: Option<&str>) -> Result<(), CliError> {
    let m = load_map(&args.map)?;
    if m.domain() != Domain::HalfPlane {
        return Err(CliError::Config(
            "valiron expects a half-plane map (transport disk maps first)".into(),
        ));
    }
    let z0 = parse_point(z0_str)?;
    let mut opts = ValironOptions::default();
    if let Some(n) = args.max_n {
        opts.max_orbit = n;
    }
    if let Some(t) = args.tol {
        opts.sigma_tol = t;
    }
    let grid_desc = seed_grid.unwrap_or("-");
    let meta = Meta::new(
        &format!(
            "valiron;map={};z0={z0_str};grid={grid_desc};max_n={};tol={:?};seed={}",
            args.map, opts.max_orbit, args.tol, args.rng_seed
        ),
        args.rng_seed,
    );

    // On any failure, leave partial diagnostics behind for scripting
    // before the nonzero exit.
    let built: Result<_, Error> = (|| {
        let model = ValironModel::build(&m, z0, opts)?;
        let grid = model.hyperbolic_grid(3.0, 5, 5);
        let mut residual_max = 0.0f64;
        let mut residual_sum = 0.0f64;
        let mut n_max_used = 0usize;
        for &z in &grid {
            let fz = m.eval_scalar_raw(z)?;
            let s_fz = model.sigma(fz)?;
            let s_z = model.sigma(z)?;
            n_max_used = n_max_used.max(s_fz.n_used).max(s_z.n_used);
            let r = (s_fz.value
                - Complex64::new(model.a(), 0.0) * s_z.value
                - Complex64::new(model.b_inf(), 0.0))
            .norm();
            residual_sum += r;
            residual_max = residual_max.max(r);
        }
        let residual_mean = residual_sum / grid.len() as f64;
        let angular = match model.angular_derivative()? {
            valironkit::valiron::AngularDerivative::Present { value, .. } => json!(value),
            valironkit::valiron::AngularDerivative::Absent { .. } => Value::Null,
        };
        Ok((model, residual_max, residual_mean, angular, n_max_used))
    })();
    let (model, residual_max, residual_mean, angular, n_max_used) = match built {
        Ok(v) => v,
        Err(e) => {
            let doc = json!({ "meta": meta.json(), "error": e.to_string() });
            let _ = emit::write_json(&args.out, "valiron.json", &doc);
            return Err(e.into());
        }
    };

    let doc = json!({
        "meta": meta.json(),
        "A": model.a(),
        "b_inf": model.b_inf(),
        "theta": model.theta(),
        "theta_direct": model.theta_direct(),
        "flagged": model.flagged(),
        "residual_max": residual_max,
        "residual_mean": residual_mean,
        "angular_derivative": angular,
        "n_max_used": n_max_used,
    });
    let path = emit::write_json(&args.out, "valiron.json", &doc).map_err(CliError::Config)?;
    let orbit_path = emit::write_file(&args.out, "orbit.csv", &orbit_csv(&meta, model.trace()))
        .map_err(CliError::Config)?;
    eprintln!("wrote {}", path.display());
    eprintln!("wrote {}", orbit_path.display());

    if let Some(gs) = seed_grid {
        let grid = parse::SeedGrid::parse(gs).map_err(CliError::Config)?;
        let points = grid.points();
        let thetas = map_indexed(points.clone(), thread_cap(), |&p| {
            ValironModel::build(&m, p, opts).map(|mdl| mdl.theta())
        });
        let mut csv = meta.csv_header();
        csv.push_str("re_z0,im_z0,theta\n");
        for (p, th) in points.iter().zip(&thetas) {
            match th {
                Ok(t) => csv.push_str(&format!("{},{},{t}\n", p.re, p.im)),
                Err(e) => return Err(CliError::Inconclusive(format!("theta at {p}: {e}"))),
            }
        }
        let tf = emit::write_file(&args.out, "theta_field.csv", &csv).map_err(CliError::Config)?;
        eprintln!("wrote {}", tf.display());
    }

    println!("{}", serde_json::to_string(&doc).expect("json"));
    Ok(())
}

fn cmd_heins(args: &MapArgs, z0_str: &str, t_grid: &str) -> Result<(), CliError> {
    let m = load_map(&args.map)?;
    if m.domain() != Domain::HalfPlane {
        return Err(CliError::Config("heins expects a half-plane map".into()));
    }
    let z0 = parse_point(z0_str)?;
    let ts = parse::real_list(t_grid).map_err(CliError::Config)?;
    if ts.iter().any(|t| *t <= 0.0) {
        return Err(CliError::Config("Heins parameters must be positive".into()));
    }
    let meta = Meta::new(
        &format!(
            "heins;map={};z0={z0_str};t={t_grid};seed={}",
            args.map, args.rng_seed
        ),
        args.rng_seed,
    );
    let model = ValironModel::build(&m, z0, ValironOptions::default())?;
    let samples = model.heins_curve(&ts, 10_000)?;
    let mut csv = meta.csv_header();
    csv.push_str("t,kind,re,im\n");
    for s in &samples {
        match s.value {
            Some(v) => csv.push_str(&format!("{},{},{},{}\n", s.t, s.kind.name(), v.re, v.im)),
            None => csv.push_str(&format!("{},{},,\n", s.t, s.kind.name())),
        }
    }
    let path = emit::write_file(&args.out, "heins.csv", &csv).map_err(CliError::Config)?;
    let kinds: Vec<&str> = samples.iter().map(|s| s.kind.name()).collect();
    println!(
        "{}",
        json!({ "meta": meta.json(), "kinds": kinds, "count": samples.len() })
    );
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_ball_claim(args: &MapArgs, n_power: Option<usize>, n_seeds: usize) -> Result<(), CliError> {
    let m = load_map(&args.map)?;
    let dim = match m.domain() {
        Domain::Ball(n) | Domain::Siegel(n) => n,
        _ => {
            return Err(CliError::Config(
                "ball-claim expects a ball or siegel map".into(),
            ))
        }
    };
    let max_n = args.max_n.unwrap_or(200);
    let meta = Meta::new(
        &format!(
            "ball-claim;map={};n_power={n_power:?};seeds={n_seeds};max_n={max_n};seed={}",
            args.map, args.rng_seed
        ),
        args.rng_seed,
    );

    let dil = koranyi::ball_dilatation(&m)?;
    if dil.c >= 1.0 - 1e-4 {
        return Err(CliError::Inconclusive(format!(
            "claim inapplicable: estimated dilatation {:.6} is not hyperbolic",
            dil.c
        )));
    }
    let threshold: f64 = koranyi::koranyi_threshold();
    let n_power = match n_power {
        Some(k) if k >= 1 => k,
        Some(_) => return Err(CliError::Config("n_power must be positive".into())),
        None => {
            let mut k = 1usize;
            while dil.c.powi(k as i32) >= threshold && k < 32 {
                k += 1;
            }
            k
        }
    };

    let mut seeds = Vec::with_capacity(n_seeds);
    let mut stream = sample::ball_points::<f64>(dim, args.rng_seed, 0.4);
    while seeds.len() < n_seeds {
        seeds.push(
            BallPoint::new(stream.next().unwrap()).map_err(|e| CliError::Config(e.to_string()))?,
        );
    }

    let mut sup_l = 0.0f64;
    let mut bounded = true;
    let mut first_csv: Option<String> = None;
    let mut per_seed = Vec::new();
    for (k, z0) in seeds.iter().enumerate() {
        let ext = koranyi::claim_extension_check(&m, z0, n_power, max_n)?;
        sup_l = sup_l.max(ext.full.sup_l);
        bounded &= ext.verdict;
        per_seed.push(json!({
            "trace_len": ext.full.l.len(),
            "sup_L": ext.full.sup_l,
            "argmax": ext.full.argmax,
            "bounded": ext.verdict,
            "interleave_violation": ext.interleave_violation,
            "max_s_violation": ext.full.max_s_violation(dil.c),
        }));
        if k == 0 {
            let tr = &ext.full;
            let mut csv = meta.csv_header();
            csv.push_str("n,L,S,height,re_z1,im_z1\n");
            for n in 0..tr.l.len() {
                let s = if n < tr.s.len() {
                    tr.s[n].to_string()
                } else {
                    String::new()
                };
                csv.push_str(&format!(
                    "{n},{},{s},{},{},{}\n",
                    tr.l[n], tr.heights[n], tr.ball_z1[n].re, tr.ball_z1[n].im
                ));
            }
            first_csv = Some(csv);
        }
    }

    let doc = json!({
        "meta": meta.json(),
        "c": dil.c,
        "c_orbital": dil.orbital,
        "flagged": dil.flagged,
        "threshold": threshold,
        "N_power": n_power,
        "sup_L": sup_l,
        "bounded": bounded,
        "iterate_law": dil.iterate_law.iter().map(|(n, m, e)| json!({"n": n, "measured": m, "expected": e})).collect::<Vec<_>>(),
        "seeds": per_seed,
    });
    let path = emit::write_json(&args.out, "claim.json", &doc).map_err(CliError::Config)?;
    if let Some(csv) = first_csv {
        let cp = emit::write_file(&args.out, "koranyi.csv", &csv).map_err(CliError::Config)?;
        eprintln!("wrote {}", cp.display());
    }
    println!("{}", serde_json::to_string(&doc).expect("json"));
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify_all(
    out: &std::path::Path,
    rng_seed: u64,
    inject_bad_map: bool,
) -> Result<(), CliError> {
    let meta = Meta::new(
        &format!("verify-all;seed={rng_seed};inject={inject_bad_map}"),
        rng_seed,
    );
    let report = suite::run_full_suite(rng_seed, inject_bad_map);
    for item in &report.items {
        println!(
            "[{}] {} measured={:.3e} threshold={:.3e}{}",
            if item.passed { "PASS" } else { "FAIL" },
            item.name,
            item.measured,
            item.threshold,
            if item.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", item.detail)
            }
        );
    }
    let doc = json!({
        "meta": meta.json(),
        "all_passed": report.all_passed(),
        "items": report.items.iter().map(|i| json!({
            "name": i.name,
            "passed": i.passed,
            "measured": i.measured,
            "threshold": i.threshold,
            "detail": i.detail,
        })).collect::<Vec<_>>(),
    });
    let path = emit::write_json(out, "verify_report.json", &doc).map_err(CliError::Config)?;
    eprintln!("wrote {}", path.display());
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Suite)
    }
}
