use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bqo_core::audit::{self, AuditReport, Bounds};
use bqo_core::qo::{element_from_json, parse_spec};
use bqo_core::upseq::{is_bad, up_from_json, up_to_json};
use bqo_core::{colorer, Error, QoSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Decide quasi-orders, color bad sequences and run audits. Every command
/// prints one JSON document.
#[derive(Parser)]
#[command(name = "bqo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two elements.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Test whether an ultimately periodic sequence is bad.
    Bad(Point),
    /// Generate bad sequences.
    GenBad {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Color a bad sequence and print the branch trace.
    Color(Point),
    /// Print the derivative chain of a bad sequence of sequences.
    Derive(Point),
    /// Run an audit suite.
    Audit {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Args)]
struct Point {
    #[arg(long)]
    spec: PathBuf,
    /// UP literal `{"pre":[..],"per":[..]}`
    #[arg(long)]
    x: String,
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Largest element size (oracle and generators) or tree node count
    /// (linearization).
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long, default_value_t = 2)]
    max_pre: usize,
    #[arg(long, default_value_t = 4)]
    max_per: usize,
}

impl Sampling {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_pre: self.max_pre,
            max_per: self.max_per,
            max_size: self.bound,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Properness,
    Oracle,
    Identities,
    Linearization,
}

fn load_spec(path: &Path) -> Result<QoSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

fn literal(text: &str) -> Result<Value, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad literal {text:?}: {e}")))
}

fn report(r: AuditReport) -> Result<(Value, u8), Error> {
    let code = if r.passed { 0 } else { 1 };
    Ok((r.to_json(), code))
}

fn execute(command: Command) -> Result<(Value, u8), Error> {
    match command {
        Command::Check { spec, left, right } => {
            let spec = load_spec(&spec)?;
            let x = element_from_json(&spec, &literal(&left)?)?;
            let y = element_from_json(&spec, &literal(&right)?)?;
            Ok((audit::check_pair(&spec, &x, &y)?, 0))
        }
        Command::Bad(p) => {
            let spec = load_spec(&p.spec)?;
            let x = up_from_json(&spec, &literal(&p.x)?)?;
            Ok((json!({ "bad": is_bad(&spec, &x)?, "x": up_to_json(&spec, &x) }), 0))
        }
        Command::GenBad { spec, sampling } => {
            let spec = load_spec(&spec)?;
            let found = audit::gen_bad(&spec, sampling.seed, sampling.count, &sampling.bounds())?;
            let samples: Vec<Value> = found.iter().map(|x| up_to_json(&spec, x)).collect();
            Ok((json!({ "seed": sampling.seed, "found": samples.len(), "samples": samples }), 0))
        }
        Command::Color(p) => {
            let spec = load_spec(&p.spec)?;
            let x = up_from_json(&spec, &literal(&p.x)?)?;
            Ok((colorer::color(&spec, &x)?.to_json(), 0))
        }
        Command::Derive(p) => {
            let spec = load_spec(&p.spec)?;
            let x = up_from_json(&spec, &literal(&p.x)?)?;
            Ok((audit::derive_report(&spec, &x)?, 0))
        }
        Command::Audit { suite, spec, sampling } => {
            let spec = load_spec(&spec)?;
            let (seed, count, bounds) = (sampling.seed, sampling.count, sampling.bounds());
            match suite {
                Suite::Properness => report(audit::audit_properness(&spec, seed, count, &bounds)?),
                Suite::Oracle => report(audit::audit_oracle_equiv(&spec, sampling.bound)?),
                Suite::Identities => report(audit::audit_identities(&spec, seed, count, &bounds)?),
                Suite::Linearization => {
                    let labels = match &spec {
                        QoSpec::Tree1(of) | QoSpec::TreeM(of) => of.as_ref(),
                        other => other,
                    };
                    report(audit::audit_linearization(labels, sampling.bound)?)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = match execute(cli.command) {
        Ok(done) => done,
        Err(e) => (json!({ "error": e.to_string() }), 2),
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("JSON value serializes"));
    ExitCode::from(code)
}
