//! Command-line front end for `qcorr`.
//!
//! Every command prints one JSON document (or a plain table with
//! `--format table`). JSON output carries a `metadata` object next to the
//! result fields, so a state printed by `apply` parses as a state document.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use qcorr::channels::{TOL_CLASSIFY, TOL_TP};
use qcorr::classicality::{is_classically_correlated_with, TOL_CC};
use qcorr::io::{parse_channel, parse_state};
use qcorr::measures::{q_measure, MeasureKind, TOL_MONO};
use qcorr::numerics::Tolerances;
use qcorr::repro::{run_case, theorem_suite_with, ReproReport, Suite, TOL_QC};
use qcorr::{Error, OptimizerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Significant digits kept in printed numbers.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Quantum correlations under local channels")]
pub struct Cli {
    /// Decision threshold for the command (classification or CC residual).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts for basis optimization.
    #[arg(long, global = true, default_value_t = 20)]
    pub restarts: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Geometric,
    Relent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a channel as unital, semi-classical or neither.
    ClassifyChannel { channel: PathBuf },
    /// Apply a channel to one subsystem of a state.
    Apply {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        target: usize,
    },
    /// Decide whether a bipartite state is classically correlated.
    CheckCc { state: PathBuf },
    /// Estimate a correlation measure.
    Measure {
        #[arg(long, value_enum)]
        kind: Kind,
        state: PathBuf,
    },
    /// Run a worked example.
    Repro { case: String },
    /// Run a randomized theorem suite.
    Suite {
        which: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ClassifyChannel { .. } => "classify-channel",
            Command::Apply { .. } => "apply",
            Command::CheckCc { .. } => "check-cc",
            Command::Measure { .. } => "measure",
            Command::Repro { .. } => "repro",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(format!("{e:?}: {e}"))
    }
}

struct Outcome {
    result: Value,
    pass: bool,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let doc = document(&cli, outcome.result);
            let text = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
                    s.push('\n');
                    s
                }
                Format::Table => table(&doc),
            };
            if let Err(e) = emit(cli.out.as_deref(), &text, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
            if outcome.pass {
                EXIT_OK
            } else {
                EXIT_ASSERTION
            }
        }
        Err(Failure::Input(msg)) | Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn optimizer(cli: &Cli) -> OptimizerConfig {
    OptimizerConfig {
        restarts: cli.restarts,
        seed: cli.seed,
        ..OptimizerConfig::default()
    }
}

fn check_tol(tol: Option<f64>, default: f64) -> Result<f64, Failure> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            Err(Failure::Input(format!("--tol must be a finite non-negative number, got {t}")))
        }
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

fn to_value(x: impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn report_outcome(r: ReproReport) -> Outcome {
    let pass = r.pass;
    Outcome { result: to_value(r), pass }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let tols = Tolerances::default();
    match &cli.command {
        Command::ClassifyChannel { channel } => {
            let tol = check_tol(cli.tol, TOL_CLASSIFY)?;
            let ch = parse_channel(&read(channel)?, TOL_TP)?;
            Ok(Outcome { result: to_value(ch.classify(tol)), pass: true })
        }
        Command::Apply { channel, state, target } => {
            let ch = parse_channel(&read(channel)?, TOL_TP)?;
            let rho = parse_state(&read(state)?, &tols)?;
            let out = ch.apply_local(&rho, *target)?;
            Ok(Outcome { result: to_value(&out), pass: true })
        }
        Command::CheckCc { state } => {
            let tol = check_tol(cli.tol, TOL_CC)?;
            let rho = parse_state(&read(state)?, &tols)?;
            let verdict = is_classically_correlated_with(&rho, &optimizer(cli), tol)?;
            Ok(Outcome { result: to_value(verdict), pass: true })
        }
        Command::Measure { kind, state } => {
            let rho = parse_state(&read(state)?, &tols)?;
            let kind = match kind {
                Kind::Geometric => MeasureKind::Geometric,
                Kind::Relent => MeasureKind::RelativeEntropy,
            };
            let result = q_measure(&rho, kind, &optimizer(cli), &[])?;
            Ok(Outcome { result: to_value(result), pass: true })
        }
        Command::Repro { case } => Ok(report_outcome(run_case(case, &optimizer(cli))?)),
        Command::Suite { which, trials } => {
            let suite = Suite::parse(which).ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Failure::Input(format!("unknown suite {which:?}; expected one of {}", names.join(", ")))
            })?;
            Ok(report_outcome(theorem_suite_with(suite, *trials, &optimizer(cli))?))
        }
    }
}

fn document(cli: &Cli, result: Value) -> Value {
    let tols = Tolerances::default();
    let command_tol = match cli.command {
        Command::ClassifyChannel { .. } => Some(check_tol(cli.tol, TOL_CLASSIFY).unwrap_or(TOL_CLASSIFY)),
        Command::CheckCc { .. } => Some(check_tol(cli.tol, TOL_CC).unwrap_or(TOL_CC)),
        _ => None,
    };
    let metadata = json!({
        "tool": "qcorr",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "seed": cli.seed,
        "restarts": cli.restarts,
        "significant_digits": SIG_DIGITS,
        "tolerances": {
            "command": command_tol,
            "herm": tols.herm,
            "psd": tols.psd,
            "trace": tols.trace,
            "spec": tols.spec,
            "supp": tols.supp,
            "norm": tols.norm,
            "tp": TOL_TP,
            "classify": TOL_CLASSIFY,
            "cc": TOL_CC,
            "mono": TOL_MONO,
            "qc": TOL_QC,
        },
    });
    let mut doc = Map::new();
    doc.insert("metadata".into(), metadata);
    match result {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    round_numbers(Value::Object(doc))
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let y: f64 = s.parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(fields) => Value::Object(fields.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

/// `key: value` lines, nested objects flattened to dotted keys. Arrays of
/// scalars are joined with commas and deeper arrays printed as JSON.
pub fn table(doc: &Value) -> String {
    let mut out = String::new();
    flatten(&mut out, "", doc);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        _ => None,
    }
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(fields) => {
            for (k, item) in fields {
                flatten(out, &key(k), item);
            }
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            for (i, item) in items.iter().enumerate() {
                flatten(out, &key(&i.to_string()), item);
            }
        }
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            let text = parts.map_or_else(|| v.to_string(), |p| p.join(", "));
            let _ = writeln!(out, "{prefix}: {text}");
        }
        _ => {
            let _ = writeln!(out, "{prefix}: {}", scalar(v).unwrap_or_default());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_significant_digits() {
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(-1.0 / 3.0 * 1e-20), -3.33333333333e-21);
        assert_eq!(round_sig(0.5), 0.5);
        assert_eq!(round_sig(-0.0), -0.0);
    }

    #[test]
    fn table_flattens_nested_fields() {
        let t = table(&json!({"a": {"b": 1, "c": [1, 2]}, "d": "x, y"}));
        assert_eq!(t, "a.b: 1\na.c: 1, 2\nd: x, y\n");
    }
}
