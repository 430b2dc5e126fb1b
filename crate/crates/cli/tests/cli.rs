use std::path::PathBuf;
use std::process::{Command, Output};

use qcorr::channels::ChannelClass;
use qcorr::classicality::ClassicalityVerdict;
use qcorr::io::parse_state;
use qcorr::measures::MeasureResult;
use qcorr::numerics::Tolerances;
use qcorr::repro::{intro_output_state, ReproReport};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_measure_prepare_channel() {
    let o = qcorr(&["classify-channel", &data("measure_prepare.json")]);
    assert_eq!(o.status.code(), Some(0));
    let class: ChannelClass = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!class.unital);
    assert!(!class.semi_classical);
    assert!(class.can_create_qc);
}

#[test]
fn classify_full_dephasing_reports_its_basis() {
    let o = qcorr(&["classify-channel", &data("phase_damping_1.json")]);
    let class: ChannelClass = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(class.unital && class.semi_classical && !class.can_create_qc);
    assert!(class.sc_basis.is_some());
}

#[test]
fn apply_output_parses_and_matches_expected_state() {
    let o = qcorr(&[
        "apply",
        "--channel",
        &data("measure_prepare.json"),
        "--state",
        &data("intro_state.json"),
        "--target",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rho = parse_state(&stdout(&o), &Tolerances::default()).unwrap();
    let expected = intro_output_state();
    assert_eq!(rho.dims(), expected.dims());
    let dev = (rho.matrix() - expected.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(dev < 1e-11, "{dev}");
}

#[test]
fn apply_rejects_out_of_range_target() {
    let o = qcorr(&[
        "apply",
        "--channel",
        &data("measure_prepare.json"),
        "--state",
        &data("intro_state.json"),
        "--target",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_cc_on_cc_and_non_cc_states() {
    let o = qcorr(&["check-cc", &data("intro_state.json")]);
    let v: ClassicalityVerdict = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_cc && v.residual <= 1e-9);
    assert!(v.witness_basis.is_some());

    let o = qcorr(&["check-cc", &data("bell.json")]);
    let v: ClassicalityVerdict = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!v.is_cc);
}

#[test]
fn check_cc_tolerance_override_is_echoed() {
    let o = qcorr(&["check-cc", "--tol", "1.0", &data("bell.json")]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["metadata"]["tolerances"]["command"], 1.0);
    assert_eq!(doc["tol_cc"], 1.0);
    assert_eq!(doc["is_cc"], true);
}

#[test]
fn check_cc_rejects_non_hermitian_input() {
    let o = qcorr(&["check-cc", &data("not_hermitian.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotHermitian"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"dims\": [2], \"matrix\": ").unwrap();
    let o = qcorr(&["check-cc", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = qcorr(&["check-cc", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flags_and_names_are_rejected() {
    assert_eq!(qcorr(&["check-cc", "--bogus", &data("bell.json")]).status.code(), Some(2));
    assert_eq!(qcorr(&["repro", "no-such-case"]).status.code(), Some(2));
    assert_eq!(qcorr(&["suite", "t9"]).status.code(), Some(2));
    assert_eq!(qcorr(&["measure", "--kind", "trace", &data("bell.json")]).status.code(), Some(2));
}

#[test]
fn measure_bell_state() {
    let o = qcorr(&["measure", "--kind", "geometric", "--restarts", "3", &data("bell.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r: MeasureResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r.value - 0.5).abs() < 1e-5, "{}", r.value);

    let o = qcorr(&["measure", "--kind", "relent", "--restarts", "3", &data("bell.json")]);
    let r: MeasureResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r.value - 1.0).abs() < 1e-5, "{}", r.value);
    assert_eq!(r.diagnostics.restarts, 3);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["measure", "--kind", "geometric", "--restarts", "4", "--seed", "11", &data("intro_state.json")];
    let a = qcorr(&args);
    let b = qcorr(&args);
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["metadata"]["seed"], 11);
}

#[test]
fn numbers_carry_at_most_twelve_significant_digits() {
    let o = qcorr(&["apply", "--channel", &data("amplitude_damping_0.5.json"), "--state", &data("bell.json"), "--target", "1"]);
    let text = stdout(&o);
    for token in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        let mantissa = token.split('e').next().unwrap();
        let digits = mantissa.chars().filter(char::is_ascii_digit).collect::<String>();
        let significant = digits.trim_start_matches('0');
        assert!(significant.len() <= 12, "{token}");
    }
}

#[test]
fn repro_qutrit_table_shows_rational_eigenvalues() {
    let o = qcorr(&["repro", "qutrit-phase-damping", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.ends_with(": 2/3, 1/6, 1/6")));
}

#[test]
fn repro_json_parses_as_report() {
    let o = qcorr(&["repro", "intro-example"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ReproReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.pass);
    assert_eq!(r.case, "intro-example");
}

#[test]
fn suite_runs_and_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1.json");
    let o = qcorr(&["suite", "t1-qubit-exhaustive", "--trials", "2", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: ReproReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.pass);
}

#[test]
fn version_and_help_exit_zero() {
    assert_eq!(qcorr(&["--version"]).status.code(), Some(0));
    assert_eq!(qcorr(&["--help"]).status.code(), Some(0));
}
