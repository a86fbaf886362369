use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn navslip(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_navslip"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

const SMALL: &str = r#"
[basis]
modes = 8

[sim]
dt = 1e-2
t_final = 0.2
initial = [0.3, -0.2, 0.1]
"#;

#[test]
fn basis_writes_checks_and_reuses_cache() {
    let d = TempDir::new().unwrap();
    let o = navslip(d.path(), SMALL, &["basis"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let checks = read(d.path(), "basis_checks.csv");
    assert!(checks.starts_with("check,value,limit,pass"));
    assert!(!checks.contains("false"));
    let cache = read(d.path(), "basis.json");
    let v: serde_json::Value = serde_json::from_str(&cache).unwrap();
    assert_eq!(v["K"], 8);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 8);

    let again = navslip(d.path(), &format!("verbosity = \"info\"\n{SMALL}"), &["basis"]);
    assert_eq!(code(&again), 0);
    assert!(String::from_utf8_lossy(&again.stderr).contains("cache hit"));
    assert_eq!(read(d.path(), "basis.json"), cache);
}

#[test]
fn simulate_is_reproducible_for_fixed_seed() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = navslip(d.path(), SMALL, &["simulate", "--seed", "11"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["trajectory.csv", "audit.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
    assert_eq!(
        fs::read(a.path().join("out/noise.bin")).unwrap(),
        fs::read(b.path().join("out/noise.bin")).unwrap()
    );

    let c = TempDir::new().unwrap();
    navslip(c.path(), SMALL, &["simulate", "--seed", "12"]);
    assert_ne!(read(a.path(), "trajectory.csv"), read(c.path(), "trajectory.csv"));
}

#[test]
fn manifest_lists_outputs_and_status() {
    let d = TempDir::new().unwrap();
    let o = navslip(d.path(), SMALL, &["simulate", "--plot-data"]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "manifest.json")).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["status"], "completed");
    let files: Vec<&str> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    for f in ["noise.bin", "trajectory.csv", "audit.csv", "plot_trajectory.csv"] {
        assert!(files.contains(&f), "{f} missing from {files:?}");
        assert!(d.path().join("out").join(f).exists());
    }
    assert_eq!(m["noise_checksums"].as_array().unwrap().len(), 1);
    assert!(m["basis_checksum"].as_str().unwrap().len() == 64);
}

#[test]
fn trajectory_header_and_stride() {
    let d = TempDir::new().unwrap();
    let cfg = format!("{SMALL}save_stride = 5\nwrite_coeffs = true\n");
    let o = navslip(d.path(), &cfg, &["simulate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let traj = read(d.path(), "trajectory.csv");
    let mut lines = traj.lines();
    let header = lines.next().unwrap();
    let cols: Vec<&str> = header.split(',').collect();
    assert_eq!(cols.first(), Some(&"t"));
    assert_eq!(cols[1], "c_1");
    assert_eq!(cols[8], "c_8");
    assert_eq!(
        &cols[9..],
        ["energy", "grad_energy", "boundary_form", "noise_increment_ip"]
    );
    let times: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(times.len(), 5);
    assert!((times[4] - 0.2).abs() < 1e-12);
}

#[test]
fn zero_data_gives_zero_trajectory() {
    let d = TempDir::new().unwrap();
    let cfg = "[basis]\nmodes = 6\n[sim]\ndt = 1e-2\nt_final = 0.1\nwrite_coeffs = true\n[noise]\nenabled = false\n";
    let o = navslip(d.path(), cfg, &["simulate"]);
    assert_eq!(code(&o), 0);
    assert!(!d.path().join("out/noise.bin").exists());
    for line in read(d.path(), "trajectory.csv").lines().skip(1) {
        for v in line.split(',').skip(1) {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn inviscid_run_is_accepted() {
    let d = TempDir::new().unwrap();
    let o = navslip(d.path(), SMALL, &["simulate", "--nu", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_errors_exit_one() {
    let d = TempDir::new().unwrap();
    let o = navslip(d.path(), "[sim]\nviscosity = 1.0\n", &["simulate"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("viscosity"));

    assert_eq!(code(&navslip(d.path(), SMALL, &["simulate", "--dt", "-1"])), 1);
    assert_eq!(code(&navslip(d.path(), SMALL, &["simulate", "--modes", "0"])), 1);
    assert_eq!(code(&navslip(d.path(), SMALL, &["study", "bogus"])), 1);
    assert_eq!(code(&navslip(d.path(), SMALL, &["--frobnicate", "basis"])), 1);

    let missing = Command::new(env!("CARGO_BIN_EXE_navslip"))
        .args(["basis", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(code(&missing), 1);
}

#[test]
fn corrupted_cache_is_rebuilt() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&navslip(d.path(), SMALL, &["basis"])), 0);
    let p = d.path().join("out/basis.json");
    let text = fs::read_to_string(&p).unwrap();
    let tampered = text.replacen("\"lambda\": ", "\"lambda\": 1", 1);
    assert_ne!(text, tampered);
    fs::write(&p, tampered).unwrap();
    let o = navslip(d.path(), SMALL, &["basis"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum mismatch"));
    assert_eq!(fs::read_to_string(&p).unwrap(), text);
}

#[test]
fn blow_up_exits_two_and_keeps_partial_output() {
    let d = TempDir::new().unwrap();
    let cfg = "[basis]\nmodes = 8\n[sim]\nnu = 0.0\ndt = 0.5\nt_final = 50.0\ninitial = [1e150, 1e150, 1e150, 1e150, 1e150, 1e150, 1e150, 1e150]\n[noise]\nenabled = false\n";
    let o = navslip(d.path(), cfg, &["simulate"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(d.path(), "trajectory.csv").lines().count() > 1);
    assert!(read(d.path(), "audit.csv").lines().count() > 1);
    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "manifest.json")).unwrap();
    assert!(m["status"].as_str().unwrap().starts_with("failed"));
}

#[test]
fn study_threshold_violation_exits_three() {
    let d = TempDir::new().unwrap();
    let base = "[basis]\nmodes = 6\n[sim]\ndt = 1e-2\nt_final = 0.2\n[study]\nnu_grid = [1e-1, 1e-2]\nsamples = 4\n";
    let ok = navslip(d.path(), base, &["study", "uniform", "--plot-data"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let table = read(d.path(), "study_uniform.csv");
    assert_eq!(table.lines().count(), 3);
    assert!(read(d.path(), "plot_uniform.csv").lines().count() > 8);

    let strict = format!("{base}[study.thresholds]\nmax_ratio = 1.0\n");
    let o = navslip(d.path(), &strict, &["study", "uniform"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn study_is_independent_of_thread_count() {
    let base = "[basis]\nmodes = 6\n[sim]\ndt = 1e-2\nt_final = 0.2\ninitial = [0.5]\n[study]\nnu_grid = [1e-1, 3e-2, 1e-2]\nsamples = 6\n";
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(
        code(&navslip(
            a.path(),
            &format!("threads = 1\n{base}"),
            &["study", "invlimit"]
        )),
        0
    );
    assert_eq!(
        code(&navslip(
            b.path(),
            &format!("threads = 3\n{base}"),
            &["study", "invlimit"]
        )),
        0
    );
    for f in [
        "study_invlimit.csv",
        "study_invlimit_samples.csv",
        "study_invlimit_summary.csv",
    ] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
}

#[test]
fn audit_writes_levels_and_summary() {
    let d = TempDir::new().unwrap();
    let cfg = "[basis]\nmodes = 6\n[sim]\nt_final = 0.2\ninitial = [1.0, 0.5]\n[audit]\ndts = [4e-3, 2e-3, 1e-3]\n";
    let o = navslip(d.path(), cfg, &["audit"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for i in 0..3 {
        assert!(d.path().join(format!("out/audit_level{i}.csv")).exists());
    }
    assert_eq!(read(d.path(), "audit_summary.csv").lines().count(), 4);

    let strict = format!("{cfg}max_relative = 0.0\n");
    assert_eq!(code(&navslip(d.path(), &strict, &["audit"])), 3);
}
