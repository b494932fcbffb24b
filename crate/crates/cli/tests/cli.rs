use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    let out = format!("output={}", dir.display());
    Command::new(env!("CARGO_BIN_EXE_boussinesq"))
        .args(args)
        .args(["--set", &out])
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn header_row(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().find(|l| !l.starts_with('#')).unwrap().to_string()
}

#[test]
fn specfun_table_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = run(d.path(), &["specfun-table", "--set", "beta=1.0"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let fa = std::fs::read(a.path().join("specfun.csv")).unwrap();
    let fb = std::fs::read(b.path().join("specfun.csv")).unwrap();
    // only the output directory differs between the two runs
    let strip = |v: &[u8]| String::from_utf8_lossy(v).lines().filter(|l| !l.starts_with("# output=")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&fa), strip(&fb));
    let text = String::from_utf8(fa).unwrap();
    assert!(text.contains("# beta=1.0\n") && text.contains("# command=specfun-table\n"));
    assert!(header_row(&a.path().join("specfun.csv")).starts_with("zeta_re,zeta_im,w_re,w_im,wp_re,wp_im,ode_residual"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 201);
}

#[test]
fn specfun_table_json_and_k0_check() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["specfun-table", "--set", "beta=0.5", "--set", "format=json", "--set", "zeta_count=40"]);
    assert_eq!(code(&o), 0);
    let v = json(&d.path().join("specfun.json"));
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ode_residual", "k0_connection"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 40);
    assert_eq!(v["config"]["zeta_count"], "40");
}

#[test]
fn config_file_with_overrides() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# decay run\nbeta = 1.0\nzeta_count = 10\n").unwrap();
    let o = run(d.path(), &["specfun-table", "--config", cfg.to_str().unwrap(), "--set", "beta=0.4"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(d.path().join("specfun.csv")).unwrap();
    assert!(text.contains("# beta=0.4\n") && text.contains("# zeta_count=10\n"));
}

#[test]
fn config_errors_exit_3() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.cfg");
    std::fs::write(&bad, "beta 0.4\n").unwrap();
    for args in [
        vec!["specfun-table", "--set", "nonsense=1"],
        vec!["specfun-table", "--set", "beta=-1"],
        vec!["specfun-table", "--config", bad.to_str().unwrap()],
        vec!["specfun-table", "--config", "/nonexistent/run.cfg"],
        vec!["decay-study", "--set", "times=0.5,2,5,10,20,50,100"],
        vec!["no-such-command"],
    ] {
        let o = run(d.path(), &args);
        assert_eq!(code(&o), 3, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn computation_error_exit_2() {
    let d = tempfile::tempdir().unwrap();
    // the vorticity Gaussian does not decay to the edge tolerance on [-3, 3]
    let o = run(d.path(), &["solve-reference", "--set", "omega_amplitude=1", "--set", "y_min=-3", "--set", "y_max=3", "--set", "n_points=121", "--set", "times=1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("reference"));
}

#[test]
fn solvers_share_a_schema_and_compare() {
    let d = tempfile::tempdir().unwrap();
    let common = ["--set", "times=0,1,3", "--set", "n_points=513"];
    for cmd in ["solve-explicit", "solve-reference"] {
        let o = run(d.path(), &[&[cmd][..], &common[..]].concat());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for i in 0..3 {
        let e = d.path().join(format!("explicit_{i:03}.csv"));
        let r = d.path().join(format!("reference_{i:03}.csv"));
        assert_eq!(header_row(&e), header_row(&r));
        assert_eq!(header_row(&e), "y,psi_re,psi_im,rho_re,rho_im,omega_re,omega_im,ux_re,ux_im,uy_re,uy_im");
    }
    let text = std::fs::read_to_string(d.path().join("explicit_002.csv")).unwrap();
    assert!(text.contains("# time=3\n") && text.contains("# max_rel_error="));

    let o = run(d.path(), &[&["compare"][..], &common[..]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("compare.json"));
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);

    let o = run(d.path(), &[&["compare", "--set", "tolerance=1e-14"][..], &common[..]].concat());
    assert_eq!(code(&o), 1);
    let v = json(&d.path().join("compare.json"));
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["status"] == "fail"));
}

#[test]
fn decay_study_reports_fits() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["decay-study", "--set", "n_points=513"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header_row(&d.path().join("decay_series.csv")), "t,ux,uy,rho");
    let v = json(&d.path().join("decay_fit.json"));
    let ux = &v["results"]["fits"]["ux"];
    assert!((ux["expected_exponent"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((ux["exponent"].as_f64().unwrap() - 0.2).abs() < 0.05);
    assert_eq!(ux["log_factor"], false);
    for key in ["config", "results", "checks"] {
        assert!(v.get(key).is_some());
    }
}

#[test]
fn lap_check_passes_on_small_grid() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["lap-check", "--set", "omega_amplitude=1", "--set", "y_min=-8", "--set", "y_max=8", "--set", "n_points=161"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&d.path().join("lap_check.json"));
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 6);
    assert!(names.contains(&"lap_reconstruction") && names.contains(&"tg_order_minus"));
}
