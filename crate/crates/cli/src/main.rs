//! `agcover`: command-line front end for the almost-generic-cover toolkit.
//!
//! Exit codes: 0 success, 2 validation failure, 3 internal consistency
//! failure, 64 usage error, 66 unreadable input file.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use agcover::feasibility::FeasibilityError;
use agcover::galois::GaloisError;
use agcover::local_models::verify_local_model;
use agcover::monodromy::{certify, FiberModel, TrackError, TrackingParams};
use agcover::{
    check_constraints, enumerate_brute_force, enumerate_profiles, validate_profile, CountCap,
    EnumerationQuery, GaloisReport, InvariantReport, SingularProfile,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_INPUT: u8 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "agcover",
    version,
    about = "Numerical invariants of almost generic covers of the plane"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    /// `w^3 - 3u^n w - v`, index `n`
    S3,
    /// `(w^2 - u)(w^2 - u + v^k)`, index `k`
    S2pair,
    /// `w^2 - u`, index ignored
    Smooth2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants of X, B and the Hodge bound for a profile file.
    Invariants { file: PathBuf },
    /// Invariants of the Galois closure and its resolution for a profile file.
    Galois { file: PathBuf },
    /// Necessary conditions for a profile file; exits 2 unless all pass.
    Check { file: PathBuf },
    /// Admissible profiles in a search box.
    Enumerate {
        /// Half the degree of the branch curve.
        #[arg(long)]
        d: u64,
        /// Cover degree; every N in 2..=4d^2 when omitted.
        #[arg(long = "N", visible_alias = "cover-degree")]
        cover_degree: Option<u64>,
        /// Largest class index.
        #[arg(long, default_value_t = 1)]
        k_max: u32,
        /// Per-class count cap; the genus budget bounds counts when omitted.
        #[arg(long)]
        cap: Option<u64>,
        /// Scan the full box instead of the pruned search.
        #[arg(long)]
        brute_force: bool,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Abort after visiting this many search nodes.
        #[arg(long, default_value_t = 50_000_000)]
        node_limit: u64,
    },
    /// Symbolic computations for the normal form f_n.
    LocalModel {
        #[arg(long)]
        n: u32,
        /// Exit 3 if any check fails.
        #[arg(long)]
        verify: bool,
    },
    /// Numerically certified local monodromy group of a model.
    Monodromy {
        #[arg(long, value_enum)]
        model: Model,
        /// n for s3, k for s2pair.
        #[arg(long, default_value_t = 1)]
        index: u32,
        /// Largest step as a fraction of one loop piece.
        #[arg(long, default_value_t = 1.0 / 64.0)]
        max_step: f64,
        /// Bound on root motion per step relative to the smallest root gap.
        #[arg(long, default_value_t = 0.2)]
        motion_fraction: f64,
        /// Newton residual tolerance.
        #[arg(long, default_value_t = 1e-12)]
        newton_tol: f64,
        /// Smallest admissible root separation along a path.
        #[arg(long, default_value_t = 1e-9)]
        min_separation: f64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Report plus exit code for a command that ran to completion.
struct Outcome {
    report: Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli.command) {
        Ok(outcome) => {
            let text = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&outcome.report).expect("serializable")
                }
                Format::Table => render_table(&outcome.report),
            };
            println!("{text}");
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("agcover: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Invariants { file } => {
            let p = load_valid_profile(file)?;
            let report = InvariantReport::compute(&p);
            let code = if report.noether_ok {
                0
            } else {
                EXIT_CONSISTENCY
            };
            Ok(Outcome {
                report: to_value(&report),
                code,
            })
        }
        Command::Galois { file } => {
            let p = load_profile(file)?;
            let report = GaloisReport::compute(&p).map_err(|GaloisError::InvalidProfile(v)| {
                let names: Vec<&str> = v.iter().map(|x| x.name()).collect();
                Failure::new(
                    EXIT_VALIDATION,
                    format!("invalid profile: {}", names.join(", ")),
                )
            })?;
            Ok(Outcome {
                report: to_value(&report),
                code: 0,
            })
        }
        Command::Check { file } => {
            let p = load_profile(file)?;
            let report = check_constraints(&p);
            let code = if report.admissible {
                0
            } else {
                EXIT_VALIDATION
            };
            Ok(Outcome {
                report: to_value(&report),
                code,
            })
        }
        Command::Enumerate {
            d,
            cover_degree,
            k_max,
            cap,
            brute_force,
            jobs,
            node_limit,
        } => {
            let count_cap = cap.map_or(CountCap::DeltaBudget, CountCap::PerClass);
            let mut q = EnumerationQuery::new(*d, *cover_degree, *k_max, count_cap);
            q.jobs = *jobs;
            q.node_limit = *node_limit;
            let found = if *brute_force {
                enumerate_brute_force(&q)
            } else {
                enumerate_profiles(&q)
            }
            .map_err(|e| match e {
                FeasibilityError::InvalidQuery(m) => Failure::new(EXIT_USAGE, m),
                other => Failure::new(EXIT_VALIDATION, other.to_string()),
            })?;
            let report = json!({
                "query": {
                    "d": d,
                    "N": cover_degree,
                    "k_max": k_max,
                    "cap": cap,
                    "mode": if *brute_force { "brute_force" } else { "pruned" },
                },
                "count": found.len(),
                "profiles": found,
            });
            Ok(Outcome { report, code: 0 })
        }
        Command::LocalModel { n, verify } => {
            if *n == 0 {
                return Err(Failure::new(EXIT_USAGE, "--n must be positive"));
            }
            let report = verify_local_model(*n);
            let code = if *verify && !report.all_passed() {
                EXIT_CONSISTENCY
            } else {
                0
            };
            let mut value = to_value(&report);
            // polynomials read better as expressions than as term lists
            let obj = value.as_object_mut().expect("struct serializes to object");
            obj.insert(
                "ramification".into(),
                json!(report.ramification.to_string()),
            );
            obj.insert(
                "discriminant".into(),
                json!(report.discriminant.to_string()),
            );
            obj.insert(
                "branch_curve".into(),
                json!(report.branch_curve.to_string()),
            );
            obj.insert(
                "residual".into(),
                json!(report.residual.as_ref().map(ToString::to_string)),
            );
            obj.insert("branch_type".into(), json!(report.branch_type.to_string()));
            obj.insert("all_passed".into(), json!(report.all_passed()));
            Ok(Outcome {
                report: value,
                code,
            })
        }
        Command::Monodromy {
            model,
            index,
            max_step,
            motion_fraction,
            newton_tol,
            min_separation,
        } => {
            let fiber = match model {
                Model::S3 => FiberModel::s3_cover(*index),
                Model::S2pair => FiberModel::s2_pair(*index),
                Model::Smooth2 => FiberModel::smooth2(),
            };
            for (name, v) in [
                ("--max-step", max_step),
                ("--motion-fraction", motion_fraction),
                ("--newton-tol", newton_tol),
                ("--min-separation", min_separation),
            ] {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Failure::new(EXIT_USAGE, format!("{name} must be positive")));
                }
            }
            let params = TrackingParams {
                max_step: max_step.min(1.0),
                motion_fraction: *motion_fraction,
                newton_tol: *newton_tol,
                min_separation: *min_separation,
                ..TrackingParams::default()
            };
            let report = certify(&fiber, &params).map_err(|e| match e {
                TrackError::InvalidModel(m) => Failure::new(EXIT_USAGE, m),
                other => Failure::new(EXIT_CONSISTENCY, other.to_string()),
            })?;
            let code = if report.certified {
                0
            } else {
                EXIT_CONSISTENCY
            };
            Ok(Outcome {
                report: to_value(&report),
                code,
            })
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialization is infallible")
}

fn load_profile(path: &PathBuf) -> Result<SingularProfile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))?;
    SingularProfile::from_json(&text)
        .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))
}

fn load_valid_profile(path: &PathBuf) -> Result<SingularProfile, Failure> {
    let p = load_profile(path)?;
    let violations = validate_profile(&p);
    if violations.is_empty() {
        Ok(p)
    } else {
        let names: Vec<&str> = violations.iter().map(|v| v.name()).collect();
        Err(Failure::new(
            EXIT_VALIDATION,
            format!("invalid profile: {}", names.join(", ")),
        ))
    }
}

/// Two-column `key  value` rendering; nested keys are joined with dots and
/// `{"num","den"}` rationals print as `num/den`.
fn render_table(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (i, (k, v)) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "{k:<width$}  {v}");
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            if let Some(text) = rational_text(map) {
                rows.push((prefix.to_string(), text));
            } else if map.is_empty() {
                rows.push((prefix.to_string(), "{}".into()));
            } else {
                for (k, child) in map {
                    flatten(&join(k), child, rows);
                }
            }
        }
        Value::Array(items) if items.iter().all(is_inline) => {
            rows.push((prefix.to_string(), inline_text(v)));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let key = match item.get("name").and_then(Value::as_str) {
                    Some(name) => join(name),
                    None => format!("{prefix}[{i}]"),
                };
                match item {
                    Value::Object(map) if map.contains_key("name") => {
                        let rest: Map<String, Value> = map
                            .iter()
                            .filter(|(k, _)| k.as_str() != "name")
                            .map(|(k, v)| (k.clone(), v.clone()))
                            .collect();
                        if let (Some(passed), 2) =
                            (rest.get("passed").and_then(Value::as_bool), rest.len())
                        {
                            let detail = rest.get("detail").map(scalar_text).unwrap_or_default();
                            let mark = if passed { "pass" } else { "FAIL" };
                            rows.push((key, format!("{mark}  {detail}")));
                        } else if let (Some(passed), 1) =
                            (rest.get("passed").and_then(Value::as_bool), rest.len())
                        {
                            rows.push((key, if passed { "pass" } else { "FAIL" }.into()));
                        } else {
                            flatten(&key, &Value::Object(rest), rows);
                        }
                    }
                    Value::Object(_) if item.get("d").is_some() => {
                        let profile: SingularProfile =
                            serde_json::from_value(item.clone()).expect("profile value");
                        rows.push((key, profile.to_string()));
                    }
                    _ => flatten(&key, item, rows),
                }
            }
        }
        other => rows.push((prefix.to_string(), scalar_text(other))),
    }
}

fn is_inline(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(is_inline),
        _ => true,
    }
}

fn inline_text(v: &Value) -> String {
    match v {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(inline_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => scalar_text(other),
    }
}

fn rational_text(map: &Map<String, Value>) -> Option<String> {
    if map.len() != 2 {
        return None;
    }
    let num = map.get("num")?;
    let den = map.get("den")?;
    let den_text = scalar_text(den);
    Some(if den_text == "1" {
        scalar_text(num)
    } else {
        format!("{}/{}", scalar_text(num), den_text)
    })
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
