//! End-to-end tests of the command surface: artifact formats, the exit-code
//! contract (0 ok / 1 suite failure / 2 config error / 3 inconclusive /
//! 4 not-a-self-map) and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_valironkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad stdout JSON: {e}\n{text}"))
}

const MOBIUS_DISK: &str = r#"{"domain":"disk","N":1,"expr":{"op":"mobius","args":[{"op":"variable"}],"params":{"a":{"re":1.0,"im":0.0},"b":{"re":0.5,"im":0.0},"c":{"re":0.5,"im":0.0},"d":{"re":1.0,"im":0.0}}}}"#;
const ELLIPTIC_DISK: &str = r#"{"domain":"disk","N":1,"expr":{"op":"mobius","args":[{"op":"variable"}],"params":{"a":{"re":1.0,"im":0.0},"b":{"re":0.0,"im":0.0},"c":{"re":-1.0,"im":0.0},"d":{"re":2.0,"im":0.0}}}}"#;
const DOUBLING_DISK: &str = r#"{"domain":"disk","N":1,"expr":{"op":"mobius","args":[{"op":"variable"}],"params":{"a":{"re":2.0,"im":0.0},"b":{"re":0.0,"im":0.0},"c":{"re":0.0,"im":0.0},"d":{"re":1.0,"im":0.0}}}}"#;
const TWO_Z_PLUS_I: &str = r#"{"domain":"halfplane","N":1,"expr":{"op":"add","args":[{"op":"multiply","args":[{"op":"constant","params":{"value":{"re":2.0,"im":0.0}}},{"op":"variable"}]},{"op":"constant","params":{"value":{"re":0.0,"im":1.0}}}]}}"#;
const SIEGEL_A8: &str = r#"{"domain":"siegel","N":2,"expr":{"op":"add","args":[{"op":"siegel_dilation","args":[{"op":"variable"}],"params":{"factor":8.0}},{"op":"sqrt","args":[{"op":"variable"}]}]}}"#;
const BALL_ROTATION: &str = r#"{"domain":"ball","N":2,"expr":{"op":"unitary","args":[{"op":"variable"}],"params":{"matrix":[[{"re":0.0,"im":1.0},{"re":0.0,"im":0.0}],[{"re":0.0,"im":0.0},{"re":1.0,"im":0.0}]]}}}"#;

#[test]
fn classify_hyperbolic_automorphism() {
    let dir = tempdir("classify_hyp");
    let out = run(&[
        "classify",
        "--map",
        MOBIUS_DISK,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "hyperbolic");
    let alpha = v["alpha"].as_f64().unwrap();
    assert!((alpha - 1.0 / 3.0).abs() < 1e-6, "alpha {alpha}");
    assert!(dir.join("classification.json").exists());
    // meta embedded
    assert_eq!(v["meta"]["rng_seed"], 7);
    assert!(v["meta"]["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn classify_elliptic_map() {
    let dir = tempdir("classify_ell");
    let out = run(&[
        "classify",
        "--map",
        ELLIPTIC_DISK,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "elliptic");
    assert!((v["lambda"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!(v["lambda"]["im"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn classify_rejects_non_self_map_with_exit_4() {
    let dir = tempdir("classify_bad");
    let out = run(&[
        "classify",
        "--map",
        DOUBLING_DISK,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn malformed_map_is_a_config_error() {
    let dir = tempdir("classify_malformed");
    let out = run(&[
        "classify",
        "--map",
        "{not json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "classify",
        "--map",
        "/nonexistent/map.json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orbit_csv_has_the_declared_columns() {
    let dir = tempdir("orbit");
    let out = run(&[
        "orbit",
        "--map",
        TWO_Z_PLUS_I,
        "--start",
        "i",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("orbit.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# valironkit"));
    assert_eq!(
        lines.next().unwrap(),
        "n,re,im,abs,arg,step_d,ratio_re,ratio_im"
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,0,1,1,"));
}

#[test]
fn valiron_emits_model_and_theta_field() {
    let dir = tempdir("valiron");
    let out = run(&[
        "valiron",
        "--map",
        TWO_Z_PLUS_I,
        "--out",
        dir.to_str().unwrap(),
        "--seed-grid",
        "-1+0.5i,1+2i,2,2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert!((v["A"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!(v["b_inf"].as_f64().unwrap().abs() < 1e-8);
    assert!((v["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-9);
    assert!((v["angular_derivative"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!(v["n_max_used"].as_u64().unwrap() > 0);

    let tf = std::fs::read_to_string(dir.join("theta_field.csv")).unwrap();
    let mut lines = tf.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "re_z0,im_z0,theta");
    // theta(z0) = Arg(z0 + i) for 2z + i
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (re, im, th): (f64, f64, f64) = (
        row[0].parse().unwrap(),
        row[1].parse().unwrap(),
        row[2].parse().unwrap(),
    );
    let expect = num_complex::Complex64::new(re, im + 1.0).arg();
    assert!((th - expect).abs() < 1e-8, "theta {th} vs {expect}");
}

#[test]
fn heins_sweep_kinds() {
    let dir = tempdir("heins");
    let out = run(&[
        "heins",
        "--map",
        TWO_Z_PLUS_I,
        "--t-grid",
        "0.5,1.0,1.5,2.5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let kinds: Vec<&str> = v["kinds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k.as_str().unwrap())
        .collect();
    assert_eq!(
        kinds,
        [
            "interior-fixed",
            "interior-fixed",
            "interior-fixed",
            "infinity-dw"
        ]
    );
    let csv = std::fs::read_to_string(dir.join("heins.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("t,kind,re,im"));
    assert!(csv.contains("2.5,infinity-dw,,"));
}

#[test]
fn ball_claim_verdict() {
    let dir = tempdir("ball_claim");
    let out = run(&[
        "ball-claim",
        "--map",
        SIEGEL_A8,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert!((v["c"].as_f64().unwrap() - 0.125).abs() < 1e-3);
    assert!((v["threshold"].as_f64().unwrap() - 0.1715728752538097).abs() < 1e-12);
    assert_eq!(v["N_power"], 1);
    assert_eq!(v["bounded"], true);
    assert!(v["sup_L"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.join("koranyi.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "n,L,S,height,re_z1,im_z1");
}

#[test]
fn valiron_on_parabolic_map_exits_3_with_diagnostics() {
    const Z_PLUS_I: &str = r#"{"domain":"halfplane","N":1,"expr":{"op":"add","args":[{"op":"variable"},{"op":"constant","params":{"value":{"re":0.0,"im":1.0}}}]}}"#;
    let dir = tempdir("valiron_parabolic");
    let out = run(&["valiron", "--map", Z_PLUS_I, "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    // partial diagnostics are still written for scripting
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("valiron.json")).unwrap()).unwrap();
    assert!(doc["error"].as_str().unwrap().contains("not hyperbolic"));
}

#[test]
fn ball_claim_extends_through_iterates_automatically() {
    const SIEGEL_A2: &str = r#"{"domain":"siegel","N":2,"expr":{"op":"add","args":[{"op":"siegel_dilation","args":[{"op":"variable"}],"params":{"factor":2.0}},{"op":"sqrt","args":[{"op":"variable"}]}]}}"#;
    let dir = tempdir("ball_claim_a2");
    let out = run(&[
        "ball-claim",
        "--map",
        SIEGEL_A2,
        "--max-n",
        "198",
        "--seeds",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["c"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(v["N_power"], 3, "0.5^3 is the first power below the threshold");
    assert_eq!(v["bounded"], true);
}

#[test]
fn ball_claim_rejects_elliptic_map_with_exit_3() {
    let dir = tempdir("ball_claim_ell");
    let out = run(&[
        "ball-claim",
        "--map",
        BALL_ROTATION,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_all_passes_and_reruns_identically() {
    let dir1 = tempdir("verify1");
    let dir2 = tempdir("verify2");
    let out1 = run(&["verify-all", "--out", dir1.to_str().unwrap()]);
    assert!(
        out1.status.success(),
        "{}",
        String::from_utf8_lossy(&out1.stderr)
    );
    let out2 = run(&["verify-all", "--out", dir2.to_str().unwrap()]);
    assert!(out2.status.success());
    // Determinism: identical config + seed means byte-identical artifacts.
    let r1 = std::fs::read(dir1.join("verify_report.json")).unwrap();
    let r2 = std::fs::read(dir2.join("verify_report.json")).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(out1.stdout, out2.stdout);
}

#[test]
fn verify_all_reports_injected_failure_with_exit_1() {
    let dir = tempdir("verify_bad");
    let out = run(&[
        "verify-all",
        "--inject-bad-map",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL] maps/validation_corpus"));
}

#[test]
fn valiron_rerun_is_byte_identical() {
    let dir1 = tempdir("det1");
    let dir2 = tempdir("det2");
    for d in [&dir1, &dir2] {
        let out = run(&[
            "valiron",
            "--map",
            TWO_Z_PLUS_I,
            "--out",
            d.to_str().unwrap(),
            "--seed-grid",
            "-1+0.5i,1+2i,3,3",
        ]);
        assert!(out.status.success());
    }
    for name in ["valiron.json", "orbit.csv", "theta_field.csv"] {
        let a = std::fs::read(dir1.join(name)).unwrap();
        let b = std::fs::read(dir2.join(name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs between runs");
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir1 = tempdir("thr1");
    let dir2 = tempdir("thr2");
    let mk = |dir: &Path, threads: &str| {
        let out = bin()
            .args([
                "valiron",
                "--map",
                TWO_Z_PLUS_I,
                "--out",
                dir.to_str().unwrap(),
                "--seed-grid",
                "-1+0.5i,1+2i,4,4",
            ])
            .env("VALIRONKIT_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
    };
    mk(&dir1, "1");
    mk(&dir2, "4");
    let a = std::fs::read(dir1.join("theta_field.csv")).unwrap();
    let b = std::fs::read(dir2.join("theta_field.csv")).unwrap();
    assert_eq!(a, b, "parallel reduction must be deterministic");
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("valironkit_test_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
