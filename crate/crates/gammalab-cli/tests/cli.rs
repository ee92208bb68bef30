use std::process::{Command, Output};

use gammalab_cli::{read_gamma_json, GammaReport, BesselReport, SCHEMA};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammalab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gamma_json(args: &[&str]) -> GammaReport {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    read_gamma_json(&stdout(&o)).unwrap()
}

#[test]
fn gl2_q3_sweep_has_three_orbits_of_unit_gamma() {
    let r = gamma_json(&["gamma", "--q", "3", "--n", "2", "--theta", "all-regular"]);
    assert_eq!(r.rows.len(), 3);
    for row in &r.rows {
        assert_eq!(row.orbit.len(), 2);
        if row.shalika {
            assert!(row.gamma.is_none());
            assert!(!row.local.gamma.is_constant());
        } else {
            assert!((row.abs_gamma.unwrap() - 1.0).abs() < 1e-8);
            assert!(row.max_route_delta.unwrap() < 1e-8);
            assert_eq!(row.pairs_checked, 144);
        }
    }
}

#[test]
fn single_theta_matches_torus_route() {
    let r = gamma_json(&["gamma", "--q", "2", "--n", "3", "--theta", "1"]);
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    let g = row.gamma.unwrap();
    let t = row.routes.torus.unwrap();
    assert!((g[0] - t[0]).abs() < 1e-9 && (g[1] - t[1]).abs() < 1e-9);
    assert_eq!(row.orbit, vec![1, 2, 4]);
}

#[test]
fn shalika_row_reports_local_factors() {
    let r = gamma_json(&["gamma", "--q", "3", "--n", "2", "--theta", "2"]);
    let row = &r.rows[0];
    assert!(row.shalika);
    assert!(row.local.l_factor.has_pole());
    assert_eq!(row.local.epsilon.x_shift, -1);
    assert!((row.local.epsilon.num[0].re - 3f64.powf(-0.5)).abs() < 1e-12);
}

#[test]
fn level_zero_parameter_is_honoured() {
    let r = gamma_json(&["gamma", "--q", "3", "--n", "2", "--theta", "2", "--c-re", "0", "--c-im", "1"]);
    assert_eq!(r.rows[0].local.c, [0.0, 1.0]);
    let bad = run(&["gamma", "--q", "3", "--n", "2", "--c-re", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn precondition_violations_exit_with_two() {
    for args in [
        vec!["gamma", "--q", "3", "--n", "2", "--theta", "4"],
        vec!["gamma", "--q", "6", "--n", "2"],
        vec!["gamma", "--p", "4", "--n", "2"],
        vec!["gamma", "--q", "2", "--n", "1"],
        vec!["export", "--q", "2", "--n", "3", "--theta", "7"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn psi_inverse_conjugates_gamma() {
    let a = gamma_json(&["gamma", "--q", "5", "--n", "2", "--theta", "1"]);
    let b = gamma_json(&["gamma", "--q", "5", "--n", "2", "--theta", "1", "--psi-inverse"]);
    let (ga, gb) = (a.rows[0].gamma.unwrap(), b.rows[0].gamma.unwrap());
    // γ(π, ψ^{-1}) = ω_π(−1)·γ(π, ψ), a sign.
    let ratio_re = (gb[0] * ga[0] + gb[1] * ga[1]).abs();
    assert!((ratio_re - 1.0).abs() < 1e-9);
}

#[test]
fn verify_suites_pass() {
    for args in [vec!["verify", "--q", "2", "--n", "3"], vec!["verify", "--q", "5", "--n", "2", "--exhaustive"]] {
        let o = run(&args);
        let text = stdout(&o);
        assert!(o.status.success(), "{args:?}\n{text}");
        assert!(text.contains("PASS") && !text.contains("FAIL"));
        assert!(text.contains("character_orthogonality") && text.contains("homdim_bound"));
    }
    let o = run(&["verify", "--q", "3", "--n", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert!(names.contains(&"modified_functional_equation"));
    assert!(names.contains(&"functional_equation"));
}

#[test]
fn bessel_export_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gl3.csv");
    let o = run(&["export", "--kind", "bessel", "--q", "2", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema=gammalab/1 kind=bessel"));
    assert_eq!(lines.next().unwrap(), "k,composition,scalars,re,im");
    let rows: Vec<&str> = lines.collect();
    // Two orbits, four compositions of 3, one unit in F_2.
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().any(|r| r.starts_with("1,1;1;1,0;0;0,")));
}

#[test]
fn bessel_export_json_identity_entry() {
    let o = run(&["export", "--kind", "bessel", "--q", "3", "--n", "2", "--theta", "1", "--format", "json"]);
    let r: BesselReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.tables.len(), 1);
    assert_eq!(r.tables[0].entries.len(), 2 + 2 * 2);
}

#[test]
fn gamma_export_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let o = run(&["export", "--kind", "gamma", "--q", "2", "--n", "4", "--format", "json", "--seed", "5", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        texts.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let report = read_gamma_json(std::str::from_utf8(&texts[0]).unwrap()).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again.as_bytes(), texts[0].as_slice());
    assert_eq!(report.rows.len(), 3);

    let csv1 = run(&["gamma", "--q", "3", "--n", "3", "--format", "csv"]);
    let csv2 = run(&["gamma", "--q", "3", "--n", "3", "--format", "csv"]);
    assert_eq!(csv1.stdout, csv2.stdout);
}

#[test]
fn unwritable_output_path_is_reported() {
    let o = run(&["export", "--q", "2", "--n", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}
