//! `repvol <command> --input <file.json> [--seed N] [--out <path>] [--tol <r>]`
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use repvol_core::io;
use repvol_core::{group, rep_volume, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    Entropy,
    Barycenter,
    Simplex,
    Schlafli,
    Naturalmap,
    Repvolume,
    Scan,
    /// Writes the bundled input documents into the `--out` directory.
    Fixtures,
}

#[derive(Debug, Parser)]
#[command(name = "repvol", version, about = "Volumes of representations and natural maps in (products of) hyperbolic spaces")]
struct Cli {
    command: Command,
    /// JSON input document.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (JSON, or CSV for `scan`); standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override.
    #[arg(long)]
    tol: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: if e.is_numerical() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("repvol: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::input(format!("--tol must be positive, got {t}")));
        }
    }
    if cli.command == Command::Fixtures {
        return write_fixtures(cli.out.as_deref().ok_or_else(|| Failure::input("fixtures needs --out <directory>"))?);
    }
    let path = cli.input.as_deref().ok_or_else(|| Failure::input("--input <file.json> is required"))?;
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let provenance = |tolerances: Value| {
        json!({
            "config_sha256": hex::encode(Sha256::digest(&bytes)),
            "seed": cli.seed,
            "tolerances": tolerances,
            "version": env!("CARGO_PKG_VERSION"),
        })
    };
    let (result, tolerances) = match cli.command {
        Command::Entropy => (to_value(&io::run_entropy(&parse(&bytes)?)?), json!({ "optimal_scaling": 0.0 })),
        Command::Barycenter => {
            let r = io::run_barycenter(&parse(&bytes)?, cli.tol)?;
            let tol = r.tol;
            (to_value(&r), json!({ "gradient_norm": tol }))
        }
        Command::Simplex => (to_value(&io::run_simplex(&parse(&bytes)?)?), json!({ "quadrature_relative": 1e-11 })),
        Command::Schlafli => {
            let r = io::run_schlafli(&parse(&bytes)?)?;
            let mut v = to_value(&r);
            let tol = cli.tol.unwrap_or(1e-5);
            v["within_tolerance"] = json!(r.max_relative_error <= tol);
            (v, json!({ "relative_error": tol, "angle_step": repvol_core::simplex::SCHLAFLI_STEP, "volume_step": io::VOLUME_FD_STEP }))
        }
        Command::Naturalmap => {
            let input: io::NaturalMapInput = parse(&bytes)?;
            let r = io::run_naturalmap(&input, cli.seed, cli.tol)?;
            let tol = json!({
                "barycenter_gradient": r.barycenter_tol,
                "finite_difference_step": input.config.fd_step,
                "bound_slack": input.config.bound_slack,
                "dedup": group::DEDUP_TOL,
            });
            (to_value(&r), tol)
        }
        Command::Repvolume => {
            let r = io::run_repvolume(&parse(&bytes)?, cli.seed)?;
            let tol = cli.tol.unwrap_or(1e-8);
            let mut v = to_value(&r);
            v["degrees_integral"] = json!(r.max_degree_defect <= tol);
            (v, repvolume_tolerances(tol))
        }
        Command::Scan => return scan(cli, &bytes, provenance),
        Command::Fixtures => unreachable!("handled above"),
    };
    let doc = json!({ "command": command_name(cli.command), "result": result, "provenance": provenance(tolerances) });
    emit(cli.out.as_deref(), &pretty(&doc))
}

fn scan(cli: &Cli, bytes: &[u8], provenance: impl Fn(Value) -> Value) -> Result<(), Failure> {
    let (r, summary) = io::run_scan(&parse(bytes)?, cli.seed)?;
    let tol = cli.tol.unwrap_or(1e-6);
    let mut v = to_value(&summary);
    v["within_tolerance"] = json!(summary.max_deviation <= tol);
    let mut tolerances = repvolume_tolerances(tol);
    tolerances["max_deviation"] = json!(tol);
    let doc = json!({ "command": "scan", "result": v, "provenance": provenance(tolerances) });
    match cli.out.as_deref() {
        Some(csv) => {
            write(csv, &r.to_csv())?;
            write(&csv.with_extension("json"), &pretty(&doc))
        }
        None => {
            let mut doc = doc;
            doc["result"]["csv"] = json!(r.to_csv());
            emit(None, &pretty(&doc))
        }
    }
}

fn repvolume_tolerances(integrality: f64) -> Value {
    json!({
        "degree_integrality": integrality,
        "nondegeneracy": rep_volume::NONDEGENERACY_TOL,
        "vanishing": rep_volume::VANISHING_TOL,
        "relator": group::RELATOR_TOL,
    })
}

fn write_fixtures(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
    for b in io::bundled_inputs()? {
        write(&dir.join(b.file), &pretty(&b.document))?;
    }
    Ok(())
}

fn command_name(c: Command) -> String {
    c.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn parse<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::input(format!("invalid input document: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
