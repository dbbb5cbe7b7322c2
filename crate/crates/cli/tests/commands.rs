use std::path::Path;
use std::process::{Command, Output};

fn sympcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympcrit")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn flat_run_exits_cleanly_with_constant_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "flat.conf", "preset=flat\nnx=16\nny=16\nt_end=1\n");
    let out = dir.path().join("out");
    let o = sympcrit(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        let cols: Vec<f64> = r.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((cols[1] - std::f64::consts::TAU.powi(2)).abs() < 1e-12);
        assert_eq!(cols[6], 0.0);
    }
    for f in ["cos_alpha", "residual", "gauss_curvature"] {
        assert!(out.join(format!("{f}.ppm")).exists());
        assert!(out.join(format!("{f}.ppm.range.txt")).exists());
    }
    assert!(out.join("final.kaf").exists());
}

#[test]
fn perturbed_run_is_byte_stable_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.conf",
        "preset=perturbed_torus\nnx=24\nny=24\neps=0.05\neps_g=0.02\nt_end=0.3\nrecord_every=5\n",
    );
    let mut csvs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let o = sympcrit(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        csvs.push(std::fs::read(out.join("diagnostics.csv")).unwrap());
        for f in ["cos_alpha", "residual", "gauss_curvature"] {
            let a = std::fs::read(dir.path().join("out0").join(format!("{f}.ppm"))).unwrap();
            let b = std::fs::read(out.join(format!("{f}.ppm"))).unwrap();
            assert_eq!(a, b);
        }
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    let l: Vec<f64> = text.lines().skip(1).map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(l.len() > 3);
    assert!(l.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{l:?}");
}

#[test]
fn ellipticity_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.conf", "samples=10000\n");
    let o = sympcrit(&["check-ellipticity", "--config", &cfg, "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let rest = last.strip_prefix("min det σ = ").unwrap();
    let (value, verdict) = rest.split_once(", ").unwrap();
    assert!(value.parse::<f64>().unwrap() > 0.0);
    assert_eq!(verdict, "PASS");
}

#[test]
fn convergence_order_on_random_surface() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.conf", "preset=random_fourier\nnx=32\nny=32\namplitude=0.15\ncarrier=0.4\n");
    let o = sympcrit(&["convergence-order", "--config", &cfg, "--seed", "5"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    let line = text.lines().find(|l| l.contains("Laplacian of cos(alpha)")).unwrap();
    assert!(line.starts_with("PASS"), "{line}");
    let orders = line.split("orders ").nth(1).unwrap();
    let finest: f64 = orders.split(" (").next().unwrap().split(", ").last().unwrap().parse().unwrap();
    assert!((1.8..=2.2).contains(&finest), "{finest}");
}

#[test]
fn identities_pass_on_perturbed_torus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "i.conf", "preset=perturbed_torus\nnx=64\nny=64\neps_g=0.03\nsamples=2000\n");
    let o = sympcrit(&["check-identities", "--config", &cfg]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9, "{text}");
}

#[test]
fn failing_suite_sets_exit_status_and_names_the_check() {
    // the pointwise curvature integrates to zero only up to O(h²)
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.conf", "preset=random_fourier\nnx=16\nny=16\namplitude=0.3\ncarrier=0.4\nsamples=100\n");
    let o = sympcrit(&["check-identities", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL total curvature")));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.conf", "nx=-3\n");
    let o = sympcrit(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("'nx'"));
    let o = sympcrit(&["run", "--config", "/nonexistent.conf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent.conf"));
}
