//! Drives the compiled binary end to end: pipeline smoke, determinism
//! of artifacts, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn rcar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, want: i32, what: &str) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "{what}: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn pipeline_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let out = rcar(
        dir,
        &[
            "simulate",
            "--n-series",
            "40",
            "--n-obs",
            "120",
            "--coeff",
            "sqrt-beta:2,1.4",
            "--seed",
            "9",
            "--out",
            "panel.csv",
        ],
    );
    assert_code(&out, 0, "simulate");
    assert!(dir.join("panel.csv").exists());
    assert!(dir.join("panel.csv.meta").exists());

    let out = rcar(dir, &["estimate", "--panel", "panel.csv", "--out", "coeffs.csv"]);
    assert_code(&out, 0, "estimate");
    let coeffs = std::fs::read_to_string(dir.join("coeffs.csv")).unwrap();
    assert!(coeffs.starts_with("series,a_hat\n"));
    assert_eq!(coeffs.lines().count(), 41);

    // Without --out the result CSV goes to stdout.
    let out = rcar(
        dir,
        &["test", "--coeffs", "coeffs.csv", "--null", "sqrt-beta", "--alpha", "2", "--beta", "1.4"],
    );
    assert_code(&out, 0, "test simple");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("method,statistic,p_value,critical_value,level,alpha_hat,beta_hat,mc_reps\n"));
    assert!(stdout.contains("T1_simple"));

    let out = rcar(
        dir,
        &[
            "test",
            "--coeffs",
            "coeffs.csv",
            "--null",
            "parametric",
            "--alpha",
            "2",
            "--beta",
            "1.4",
            "--out",
            "t2.csv",
        ],
    );
    assert_code(&out, 0, "test parametric");
    assert!(std::fs::read_to_string(dir.join("t2.csv")).unwrap().contains("T2_parametric"));

    let out = rcar(
        dir,
        &["test", "--coeffs", "coeffs.csv", "--null", "composite", "--mc-reps", "120", "--seed", "4"],
    );
    assert_code(&out, 0, "test composite");
    assert!(String::from_utf8(out.stdout).unwrap().contains("T1_composite"));

    let out = rcar(dir, &["density", "--coeffs", "coeffs.csv", "--grid", "0:1:9", "--out", "kde.csv"]);
    assert_code(&out, 0, "density");
    let kde = std::fs::read_to_string(dir.join("kde.csv")).unwrap();
    assert!(kde.starts_with("x,g_hat\n"));
    assert_eq!(kde.lines().count(), 10);

    std::fs::write(
        dir.join("study.conf"),
        "reps = 4\nN = 25\nn = 80\nalpha0 = 2\nbeta0 = 1.4\nalt = 2,1.4\nout_dir = study\n",
    )
    .unwrap();
    let out = rcar(dir, &["study", "--config", "study.conf", "--workers", "2"]);
    assert_code(&out, 0, "study");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("beta_alt,level,size_or_power_t1,size_or_power_t2,reps_ok,reps_failed\n"));
    for f in ["rows.csv", "summary.csv", "pvalues_t1.csv", "pvalues_t2.csv"] {
        assert!(dir.join("study").join(f).exists(), "missing {f}");
    }
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (seed, out) in [("7", "a.csv"), ("7", "b.csv"), ("8", "c.csv")] {
        let out = rcar(
            dir,
            &[
                "simulate", "--n-series", "12", "--n-obs", "60", "--coeff", "beta:2,2",
                "--shock-b", "0.4", "--seed", seed, "--out", out,
            ],
        );
        assert_code(&out, 0, "simulate");
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.join("b.csv")).unwrap(), "same seed, same panel");
    assert_ne!(a, std::fs::read(dir.join("c.csv")).unwrap(), "new seed, new panel");
    assert_eq!(
        std::fs::read(dir.join("a.csv.meta")).unwrap(),
        std::fs::read(dir.join("b.csv.meta")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    assert_code(&rcar(dir, &["--help"]), 0, "--help");
    assert_code(&rcar(dir, &["--frobnicate"]), 2, "unknown flag");
    assert_code(&rcar(dir, &["simulate", "--n-series", "3"]), 2, "missing required args");
    assert_code(
        &rcar(dir, &["estimate", "--panel", "nope.csv", "--out", "x.csv"]),
        2,
        "missing input file",
    );

    std::fs::write(dir.join("c.csv"), "series,a_hat\n1,0.5\n2,-0.25\n3,0.75\n").unwrap();
    assert_code(
        &rcar(dir, &["test", "--coeffs", "c.csv", "--null", "cauchy"]),
        2,
        "unknown null",
    );
    assert_code(
        &rcar(dir, &["test", "--coeffs", "c.csv", "--null", "point"]),
        2,
        "point null without --a0",
    );
    // A Beta null over (0,1) is ill-posed for a negative estimate: domain
    // failure, not usage failure.
    assert_code(
        &rcar(dir, &["test", "--coeffs", "c.csv", "--null", "beta", "--alpha", "2", "--beta", "2"]),
        1,
        "beta null with out-of-support estimate",
    );
    // The same data under a point null is fine.
    assert_code(
        &rcar(dir, &["test", "--coeffs", "c.csv", "--null", "point", "--a0", "0.3"]),
        0,
        "point null accepts negative estimates",
    );

    std::fs::write(dir.join("bad.conf"), "reps = 4\nreps = 5\n").unwrap();
    assert_code(&rcar(dir, &["study", "--config", "bad.conf"]), 2, "duplicate config key");
}
