//! End-to-end checks of the command-line surface: exit codes, stream
//! discipline, formats, and schema round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

use thermoforge_core::instance::InstanceFile;
use thermoforge_core::spectra::{BathPair, BlockSpectrum, EnergyLevels, EngineSpec};
use thermoforge_core::transforms::{TransformReport, Transformation};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_thermoforge")
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("thermoforge-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn ground_to_semi_gibbs() -> String {
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let t = Transformation::new(
        BlockSpectrum::pure(&spec, 0, 0),
        spec.clone(),
        BlockSpectrum::semi_gibbs_of(&spec),
        spec,
    )
    .unwrap();
    serde_json::to_string(&InstanceFile::transformation(&t)).unwrap()
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let forward = write_fixture("fwd.json", &ground_to_semi_gibbs());
    let out = run(&["check", forward.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // Reversed: semi-Gibbs → ground state needs free entropy.
    let doc: InstanceFile = serde_json::from_str(&ground_to_semi_gibbs()).unwrap();
    let mut reversed = doc.clone();
    reversed.state = doc.final_state.clone().unwrap();
    reversed.final_state = Some(doc.state.clone());
    let path = write_fixture("rev.json", &serde_json::to_string(&reversed).unwrap());
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"verdict\": \"infeasible\""));
    assert!(text.contains("violating_alpha"));
}

#[test]
fn check_report_reparses_under_the_schema() {
    let forward = write_fixture("roundtrip.json", &ground_to_semi_gibbs());
    let out = run(&["check", forward.to_str().unwrap()]);
    let report: TransformReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.feasible_cslto);
    assert!((report.s_distance - 0.787338671698).abs() < 1e-9);
}

#[test]
fn schema_errors_exit_2_with_the_field_path_and_no_stdout() {
    let path = write_fixture(
        "bad.json",
        r#"{"beta":[0.5,1.0],"h1":[0,1],"h2":[0,1],
            "state":{"kind":"diagonal","p":[0.5,0.5]},
            "final":{"kind":"diagonal","p":[0.25,0.25,0.25,0.25]}}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no report on stdout when exit 2");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("state.p"), "stderr: {err}");

    let missing_final = write_fixture(
        "nofinal.json",
        r#"{"beta":[0.5,1.0],"h1":[0,1],"h2":[0,1],
            "state":{"kind":"diagonal","p":[0.25,0.25,0.25,0.25]}}"#,
    );
    let out = run(&["check", missing_final.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn engine_rejects_wrong_bath_order() {
    let path = write_fixture(
        "engine-order.json",
        r#"{"beta":[1.0,0.5],"h1":[0,1],"h2":[0,1],
            "state":{"kind":"diagonal","p":[0.25,0.25,0.25,0.25]}}"#,
    );
    let out = run(&["engine", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn engine_table_emits_the_alpha_work_csv() {
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let hot = spec.h1().gibbs(0.5);
    let cold = spec.h2().gibbs(1.0);
    let state = BlockSpectrum::product(&cold, &hot).unwrap();
    let doc = InstanceFile::diagonal(&spec, state.p());
    let path = write_fixture("engine-table.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["engine", path.to_str().unwrap(), "--table"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,w1,w2,w_ext,eta1,eta2"));
    assert!(lines.clone().count() >= 120);
    assert!(text.lines().last().unwrap().starts_with("inf,"));
}

#[test]
fn correlation_engine_reports_the_mutual_information_budget() {
    let path = write_fixture(
        "corr.json",
        r#"{"beta":[0.5,1.0],"h1":[0.0,0.0],"h2":[0.0,0.0],
            "state":{"kind":"diagonal","p":[0.5,0.0,0.0,0.5]}}"#,
    );
    let out = run(&["engine", path.to_str().unwrap(), "--correlation"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let budget = report["budget"].as_f64().unwrap();
    assert!((budget - core::f64::consts::LN_2).abs() <= 1e-9);
}

#[test]
fn curve_on_semi_gibbs_is_the_diagonal() {
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let doc = InstanceFile::diagonal(&spec, BlockSpectrum::semi_gibbs_of(&spec).p());
    let path = write_fixture("curve.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["curve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y"));
    let z = spec.semi_gibbs().log_z_product().exp();
    for line in lines {
        let mut cells = line.split(',');
        let x: f64 = cells.next().unwrap().parse().unwrap();
        let y: f64 = cells.next().unwrap().parse().unwrap();
        assert!((y - x / z).abs() <= 1e-9, "off the diagonal: {line}");
    }
}

#[test]
fn asym_on_a_diagonal_state_is_all_zero() {
    let path = write_fixture(
        "asym.json",
        r#"{"beta":[0.5,1.0],"h1":[0,1],"h2":[0,1],
            "state":{"kind":"diagonal","p":[0.4,0.3,0.2,0.1]}}"#,
    );
    let out = run(&["asym", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(value.abs() <= 1e-10, "nonzero asymmetry row: {line}");
    }
}

#[test]
fn bench_rejects_unknown_suites() {
    let out = run(&["bench", "--suite", "nonsense", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn counterexample_dumps_reload_through_check() {
    // Any instance dumped by the harness schema must replay via the CLI.
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 0.7, 1.9]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.2]).unwrap(),
        BathPair::new(0.4, 1.6).unwrap(),
    )
    .unwrap();
    let t = Transformation::new(
        BlockSpectrum::new(vec![0.3, 0.1, 0.25, 0.05, 0.2, 0.1], 3, 2).unwrap(),
        spec.clone(),
        BlockSpectrum::semi_gibbs_of(&spec),
        spec,
    )
    .unwrap();
    let doc = InstanceFile::transformation(&t);
    let path = write_fixture("dump.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["check", path.to_str().unwrap()]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let report: TransformReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.s_distance.is_finite());
}

#[test]
fn tolerance_env_var_loosens_the_verdict() {
    let doc: InstanceFile = serde_json::from_str(&ground_to_semi_gibbs()).unwrap();
    let mut reversed = doc.clone();
    reversed.state = doc.final_state.clone().unwrap();
    reversed.final_state = Some(doc.state.clone());
    let path = write_fixture("tol.json", &serde_json::to_string(&reversed).unwrap());

    let strict = run(&["check", path.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(1));

    let loose = Command::new(bin())
        .args(["check", path.to_str().unwrap()])
        .env("THERMOFORGE_TOL", "10.0")
        .output()
        .unwrap();
    assert_eq!(
        loose.status.code(),
        Some(0),
        "slack 10 nats accepts everything"
    );

    // The --tol flag wins over the environment.
    let flag = Command::new(bin())
        .args(["check", path.to_str().unwrap(), "--tol", "1e-9"])
        .env("THERMOFORGE_TOL", "10.0")
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(1));
}

#[test]
fn csv_format_flattens_the_report() {
    let forward = write_fixture("flat.json", &ground_to_semi_gibbs());
    let out = run(&["check", forward.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value"));
    assert!(text.contains("s_distance,0.787338671698"));
    assert!(text.contains("work.extraction.w1,"));
}

#[test]
fn signed_alpha_route_is_selectable() {
    let forward = write_fixture("signed.json", &ground_to_semi_gibbs());
    let out = run(&["check", forward.to_str().unwrap(), "--signed-alpha"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"route\": \"cslto-signed\""));
}

#[test]
fn engine_and_bench_reports_reparse_under_their_schemas() {
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let hot = spec.h1().gibbs(0.5);
    let cold = spec.h2().gibbs(1.0);
    let doc = InstanceFile::diagonal(&spec, BlockSpectrum::product(&cold, &hot).unwrap().p());
    let path = write_fixture("report-rt.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["engine", path.to_str().unwrap()]);
    let report: thermoforge_core::engine::EngineReport =
        serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.spontaneous);
    assert!(report.statements.is_some());

    let out = run(&["bench", "--suite", "irreversibility", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let suite: thermoforge_core::veribench::BenchReport =
        serde_json::from_value(value["suites"][0].clone()).unwrap();
    assert_eq!(suite.trials, 20);
    assert!(suite.passed());
}

#[test]
fn engine_no_catalytic_flag_switches_the_route() {
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let hot = spec.h1().gibbs(0.5);
    let cold = spec.h2().gibbs(1.0);
    let doc = InstanceFile::diagonal(&spec, BlockSpectrum::product(&cold, &hot).unwrap().p());
    let path = write_fixture("route.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["engine", path.to_str().unwrap(), "--no-catalytic"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["route"], "thermo-majorization");
}

#[test]
fn lp_cross_check_spans_hamiltonian_changes() {
    // Swapped Hamiltonians force the clock extension inside the LP route;
    // the two non-catalytic verdicts must agree.
    let spec = EngineSpec::new(
        EnergyLevels::new(vec![0.0, 1.0]).unwrap(),
        EnergyLevels::new(vec![0.0, 0.4]).unwrap(),
        BathPair::new(0.5, 1.0).unwrap(),
    )
    .unwrap();
    let state = BlockSpectrum::new(vec![0.4, 0.3, 0.2, 0.1], 2, 2).unwrap();
    let t =
        Transformation::new(state.clone(), spec.clone(), state.swapped(), spec.swapped()).unwrap();
    let doc = InstanceFile::transformation(&t);
    let path = write_fixture("lp-clock.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["check", path.to_str().unwrap(), "--no-catalytic", "--lp"]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slto = report["feasible_slto"].as_bool().unwrap();
    let lp = report["lp_verdict"].as_str().unwrap();
    assert_eq!(lp, if slto { "feasible" } else { "infeasible" });
}

#[test]
fn dense_inputs_carry_a_dephasing_warning() {
    let path = write_fixture(
        "dense.json",
        r#"{"beta":[0.5,1.0],"h1":[0.0,1.0],"h2":[0.0],
            "state":{"kind":"dense","re":[[0.5,0.5],[0.5,0.5]],"im":[[0.0,0.0],[0.0,0.0]]},
            "final":{"kind":"diagonal","p":[0.5,0.5]}}"#,
    );
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dephased"), "missing warning: {text}");
}
