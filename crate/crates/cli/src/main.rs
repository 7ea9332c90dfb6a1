mod parse;
mod suite;

use clap::{Parser, Subcommand};
use narain_core::axioms::{CheckReport, REPORT_SCHEMA};
use narain_core::correlators::{schwinger_closed_form, schwinger_truncated, Configuration};
use narain_core::fock::graded_basis;
use narain_core::lattice::model_file::load_model;
use narain_core::lattice::Model;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(name = "narain-os", version, about = "Lattice full vertex algebras: correlators and axiom checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model file utilities.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Evaluate a Schwinger function; one CSV row per `--points` list.
    Corr {
        #[arg(long)]
        model: PathBuf,
        /// `;`-separated insertions, e.g. `e(1,0); jl#0; e(-1,0)`.
        #[arg(long)]
        insertions: String,
        /// `;`-separated `re,im` points; repeat the flag for several configurations.
        #[arg(long, required = true)]
        points: Vec<String>,
        #[arg(long, default_value_t = 8.0)]
        cutoff: f64,
        #[arg(long)]
        closed_form: bool,
    },
    /// Run one axiom check, or `all`, and write a JSON report.
    Check {
        /// Check name or `all`.
        name: String,
        #[arg(long)]
        model: PathBuf,
        /// Truncation for unitarity and basis cutoff for the energy bounds.
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance override `<check>=<value>`; repeatable.
        #[arg(long = "tol", value_parser = parse::tol_override)]
        tol: Vec<(String, f64)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a JSON report written by `check`.
    Report { file: PathBuf },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Parse and validate a model file.
    Validate { file: PathBuf },
    /// Dump the graded basis up to `h + h̄ ≤ cutoff` as CSV.
    Basis {
        file: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        cutoff: f64,
    },
}

enum Failure {
    Checks,
    Usage(String),
    BadModel(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Usage(_) | Failure::BadModel(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Checks => eprintln!("one or more checks failed"),
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::BadModel(m) => eprintln!("bad model file: {m}"),
                Failure::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Model { action: ModelAction::Validate { file } } => {
            let m = model(&file)?;
            let (p, q) = m.lattice.signature();
            println!("ok: {} rank {} signature ({p},{q})", m.name, m.rank());
            Ok(())
        }
        Command::Model { action: ModelAction::Basis { file, cutoff } } => basis(&model(&file)?, cutoff),
        Command::Corr { model: path, insertions, points, cutoff, closed_form } => {
            corr(&model(&path)?, &insertions, &points, cutoff, closed_form)
        }
        Command::Check { name, model: path, cutoff, seed, tol, out } => {
            let m = model(&path)?;
            let mut tolerances = suite::default_tolerances();
            for (k, v) in tol {
                match tolerances.get_mut(&k) {
                    Some(slot) => *slot = v,
                    None => return Err(Failure::Usage(format!("no tunable tolerance for `{k}`"))),
                }
            }
            let names: Vec<&str> = if name == "all" {
                suite::CHECKS.to_vec()
            } else if suite::CHECKS.contains(&name.as_str()) {
                vec![name.as_str()]
            } else {
                return Err(Failure::Usage(format!("unknown check `{name}`; expected one of {} or all", suite::CHECKS.join(", "))));
            };
            let settings = suite::Settings { cutoff, seed, tolerances };
            check(&m, &names, name == "all", &settings, &out)
        }
        Command::Report { file } => summarize(&file),
    }
}

fn model(path: &Path) -> Result<Model, Failure> {
    load_model(path).map_err(|e| Failure::BadModel(e.to_string()))
}

fn basis(m: &Model, cutoff: f64) -> Result<(), Failure> {
    println!("h,hbar,charge,left,right");
    let osc = |v: &[narain_core::fock::Osc]| v.iter().map(|o| format!("{}(-{})", o.dir, o.mode)).collect::<Vec<_>>().join(" ");
    for sector in graded_basis(m, cutoff) {
        for mono in &sector.monomials {
            let charge = mono.charge.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            println!(
                "{},{},{charge},{},{}",
                parse::float(sector.grading.h),
                parse::float(sector.grading.hbar),
                osc(&mono.left),
                osc(&mono.right)
            );
        }
    }
    Ok(())
}

fn corr(m: &Model, insertions: &str, points: &[String], cutoff: f64, closed_form: bool) -> Result<(), Failure> {
    let ins = parse::insertions(m, insertions).map_err(Failure::Usage)?;
    println!("points,value_re,value_im,error_estimate");
    for spec in points {
        let pts = parse::points(spec).map_err(Failure::Usage)?;
        if pts.len() != ins.len() {
            return Err(Failure::Usage(format!("{} points for {} insertions", pts.len(), ins.len())));
        }
        let label = pts.iter().map(|z| parse::complex(*z)).collect::<Vec<_>>().join(" ");
        let cfg = Configuration::new(pts).map_err(|e| Failure::Usage(e.to_string()))?;
        let (value, err) = if closed_form {
            (schwinger_closed_form(m, &ins, &cfg).map_err(|e| Failure::Internal(e.to_string()))?, String::new())
        } else {
            let v = schwinger_truncated(m, &ins, &cfg, cutoff).map_err(|e| Failure::Internal(e.to_string()))?;
            (v.value, parse::float(v.truncation_error))
        };
        println!("{label},{},{},{err}", parse::float(value.re), parse::float(value.im));
    }
    Ok(())
}

fn check(m: &Model, names: &[&str], combined: bool, s: &suite::Settings, out: &Path) -> Result<(), Failure> {
    let start = Instant::now();
    let reports: Vec<CheckReport> = names
        .par_iter()
        .map(|n| suite::run(m, n, s).map_err(|e| Failure::Internal(format!("{n}: {e}"))))
        .collect::<Result<_, _>>()?;
    let elapsed = start.elapsed();
    let ok = reports.iter().all(CheckReport::passed);
    let body = if combined {
        json!({
            "schema": REPORT_SCHEMA,
            "model": m.name,
            "run": { "cutoff": s.cutoff, "seed": s.seed, "tolerances": s.tolerances },
            "verdict": if ok { "pass" } else { "fail" },
            "reports": reports,
        })
    } else {
        serde_json::to_value(&reports[0]).map_err(|e| Failure::Internal(e.to_string()))?
    };
    write(out, &(serde_json::to_string_pretty(&body).expect("reports serialize") + "\n"))?;
    if combined {
        write(&out.with_extension("csv"), &metrics_csv(&reports))?;
    }
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({ "generated_unix": stamp, "elapsed_seconds": elapsed.as_secs_f64(), "report": out.display().to_string() });
    write(&out.with_extension("meta.json"), &(meta.to_string() + "\n"))?;
    for r in &reports {
        println!("{:<22} {:?}", r.check, r.verdict);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

/// One `check,metric,value` row per scalar leaf; nested keys joined with `.`.
fn metrics_csv(reports: &[CheckReport]) -> String {
    fn leaves(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(o) => o.iter().for_each(|(k, x)| leaves(&format!("{prefix}.{k}"), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| leaves(&format!("{prefix}.{i}"), x, out)),
            Value::Number(n) => out.push((prefix.into(), n.as_f64().map(parse::float).unwrap_or_else(|| n.to_string()))),
            Value::Null => out.push((prefix.into(), String::new())),
            Value::Bool(b) => out.push((prefix.into(), b.to_string())),
            Value::String(s) => out.push((prefix.into(), format!("\"{}\"", s.replace('"', "\"\"")))),
        }
    }
    let mut text = String::from("check,metric,value\n");
    for r in reports {
        let mut rows = Vec::new();
        for (k, v) in &r.metrics {
            leaves(k, v, &mut rows);
        }
        for (k, v) in rows {
            text.push_str(&format!("{},{k},{v}\n", r.check));
        }
    }
    text
}

fn summarize(file: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let reports: Vec<CheckReport> = match v.get("reports") {
        Some(r) => serde_json::from_value(r.clone()),
        None => serde_json::from_value(v).map(|r| vec![r]),
    }
    .map_err(|e| Failure::Usage(format!("not a check report: {e}")))?;
    for r in &reports {
        let symbols = r.params.get("insertions").and_then(Value::as_array).map(|a| a.len()).unwrap_or(0);
        println!("{:<22} {:?}{}", r.check, r.verdict, if symbols > 0 { format!(" ({symbols} insertions)") } else { String::new() });
    }
    if reports.iter().all(CheckReport::passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
