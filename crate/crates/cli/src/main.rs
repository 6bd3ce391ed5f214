mod commands;
mod config;
mod error;
mod examples;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::commands::Status;
use crate::config::Overrides;
use crate::error::CliError;

/// Liouville and strong-Liouville verdicts for Lévy generators.
#[derive(Parser, Debug)]
#[command(name = "levy-liouville", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for the report and CSV files
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Monte Carlo path count
    #[arg(long, global = true, value_name = "N")]
    paths: Option<usize>,
    /// Monte Carlo worker threads; never changes results
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Half-width of the zero-search box
    #[arg(long = "box", global = true, value_name = "W")]
    box_halfwidth: Option<f64>,
    /// Grid points per axis of the zero search
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Zero-acceptance tolerance on |ψ|
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Growth bound: const:c, pow:k or exp:b
    #[arg(long, global = true, value_name = "BOUND")]
    growth: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the triplet for admissibility
    Validate,
    /// Evaluate ψ (or h∘ψ) at the configured points
    Symbol,
    /// Classify the zero set of ψ as a closed subgroup
    Zeroset,
    /// Liouville verdict with a verified witness
    Verdict,
    /// Strong-Liouville verdict under a growth bound
    StrongVerdict,
    /// Compare the verdicts of ψ and h∘ψ
    Subordinate,
    /// Sample X_t and write the endpoints
    Simulate,
    /// Test a candidate for P_t f = f
    CheckHarmonic,
    /// Cross-check the zero set against the exact group from the triplet
    Duality,
    /// Run the bundled corpus
    Examples,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Symbol => "symbol",
            Command::Zeroset => "zeroset",
            Command::Verdict => "verdict",
            Command::StrongVerdict => "strong-verdict",
            Command::Subordinate => "subordinate",
            Command::Simulate => "simulate",
            Command::CheckHarmonic => "check-harmonic",
            Command::Duality => "duality",
            Command::Examples => "examples",
        }
    }
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        seed: c.seed,
        paths: c.paths,
        workers: c.workers,
        box_halfwidth: c.box_halfwidth,
        grid: c.grid,
        tol: c.tol,
        growth: c.growth.clone(),
    }
}

/// Runs a subcommand; returns the embedded config (if it got that far) and
/// the outcome.
fn execute(command: Command, common: &Common) -> (Value, Result<(Value, Status), CliError>) {
    let Some(path) = &common.config else {
        return (Value::Null, Err(CliError::Usage(format!("{} needs --config PATH", command.name()))));
    };
    let cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => return (Value::Null, Err(e)),
    };
    if command == Command::Validate {
        let embedded = json!({ "triplet": cfg.triplet });
        return (embedded, commands::validate(&cfg.triplet));
    }
    let run = match config::resolve(cfg, &overrides(common)) {
        Ok(r) => r,
        Err(e) => return (Value::Null, Err(e)),
    };
    let embedded = serde_json::to_value(&run.resolved).expect("config serializes");
    let out = &common.out;
    let outcome = match command {
        Command::Symbol => commands::symbol(&run, out),
        Command::Zeroset => commands::zeroset(&run),
        Command::Verdict => commands::verdict(&run),
        Command::StrongVerdict => commands::strong_verdict(&run),
        Command::Subordinate => commands::subordinate(&run),
        Command::Simulate => commands::simulate(&run, out),
        Command::CheckHarmonic => commands::check_harmonic_cmd(&run, out),
        Command::Duality => commands::duality(&run),
        Command::Validate | Command::Examples => unreachable!("handled before resolution"),
    };
    (embedded, outcome)
}

fn write_report(out: &Path, command: &str, report: &Value) -> Result<(), CliError> {
    let path = out.join(format!("{command}.json"));
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn summary(command: &str, result: &Value) -> String {
    let mut line = command.to_string();
    for key in ["verdict", "outcome"] {
        if let Some(v) = result.get(key).and_then(Value::as_str) {
            line.push_str(&format!(": {v}"));
        }
    }
    if let Some(w) = result.get("witness").filter(|w| !w.is_null()) {
        line.push_str(&format!(", witness {} {}", w["kind"].as_str().unwrap_or("?"), w["vector"]));
    }
    if let Some(g) = result.get("lattice_generators") {
        let dim = result["subspace_basis"].as_array().map_or(0, Vec::len);
        line.push_str(&format!(": subspace dimension {dim}, lattice generators {g}"));
    }
    if let Some(a) = result.get("verdicts_agree") {
        line.push_str(&format!(": base {}, subordinated {}, agree {a}", result["base"]["verdict"], result["subordinated"]["verdict"]));
    }
    if let Some(h) = result.pointer("/report/harmonic") {
        line.push_str(&format!(": harmonic {h}"));
    }
    line
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = &cli.common.out;
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: {}: {e}", out.display());
        return ExitCode::from(1);
    }
    let name = cli.command.name();
    let version = env!("CARGO_PKG_VERSION");

    if cli.command == Command::Examples {
        let rows = examples::run(&overrides(&cli.common));
        let all = rows.iter().all(|r| r.pass);
        let report = json!({ "version": version, "command": name, "status": if all { "pass" } else { "fail" }, "result": rows });
        if let Err(e) = write_report(out, name, &report) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        println!("{} of {} checks passed", rows.iter().filter(|r| r.pass).count(), rows.len());
        return ExitCode::from(if all { 0 } else { 1 });
    }

    let (config, outcome) = execute(cli.command, &cli.common);
    let (report, code) = match outcome {
        Ok((result, status)) => {
            println!("{}", summary(name, &result));
            let (label, code) = match status {
                Status::Conclusive => ("conclusive", 0),
                Status::Inconclusive => ("inconclusive", 2),
            };
            (json!({ "version": version, "command": name, "status": label, "config": config, "result": result }), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (json!({ "version": version, "command": name, "status": "error", "config": config, "error": e.body() }), 1)
        }
    };
    if let Err(e) = write_report(out, name, &report) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
