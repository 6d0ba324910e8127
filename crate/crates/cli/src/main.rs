use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use hamsix_core::affine::{parse_q, Param};
use hamsix_core::catalog::{check, expected_variant_outcome, instantiate_variant, Params, Ranges, TypeId, Variant};
use hamsix_core::document::{emit_profile, parse_profile};
use hamsix_core::report::{StructuredReport, SCHEMA};
use hamsix_core::verify::{verify, Normalize};

/// Verify fixed point data of semi-free Hamiltonian circle actions on
/// symplectic 6-manifolds.
///
/// Exit status: 0 feasible, 2 infeasible (with certificate), 1 malformed
/// or inconsistent input, or a catalog instance that misses its expected
/// outcome.
#[derive(Parser, Debug)]
#[command(name = "hamsix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify profile documents; a directory verifies every `.toml` in it.
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Instantiate a catalog type, verify it and compare with its expected outcome.
    Catalog {
        #[arg(long = "type", value_name = "ID")]
        type_id: String,
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        g1: Option<u32>,
        #[arg(long)]
        flip: bool,
        #[arg(long)]
        same_level: bool,
        /// Write the instantiated profile document here.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Pin one parameter, `NAME=VALUE`.
    #[arg(long, value_name = "NAME=VALUE", default_value = "t0=1", conflicts_with = "no_normalize")]
    normalize: String,
    #[arg(long)]
    no_normalize: bool,
    /// Attach the rule explanation to every constraint.
    #[arg(long)]
    explain: bool,
}

impl OutputArgs {
    fn normalization(&self) -> Result<Normalize, String> {
        if self.no_normalize {
            return Ok(Normalize::Off);
        }
        let (name, value) = self
            .normalize
            .split_once('=')
            .ok_or_else(|| format!("--normalize expects NAME=VALUE, got `{}`", self.normalize))?;
        let p: Param = name.trim().parse().map_err(|e: String| format!("--normalize: {e}"))?;
        let v = parse_q(value).ok_or_else(|| format!("--normalize: `{value}` is not a rational number"))?;
        if v <= parse_q("0").expect("zero parses") || p == Param::Level {
            return Err("--normalize must pin a size or gap to a positive value".into());
        }
        Ok(Normalize::Pin(p, v))
    }
}

/// Outcome of one profile, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Feasible,
    Infeasible,
    Failed,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Feasible => 0,
            Outcome::Infeasible => 2,
            Outcome::Failed => 1,
        }
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum Item {
    Report(Box<StructuredReport>),
    Error {
        schema: &'static str,
        source: String,
        #[serde(rename = "error")]
        message: String,
    },
}

impl Item {
    fn outcome(&self) -> Outcome {
        match self {
            Item::Error { .. } => Outcome::Failed,
            Item::Report(r) if !r.checked || !r.golden_passed() => Outcome::Failed,
            Item::Report(r) if r.sample.is_some() => Outcome::Feasible,
            Item::Report(_) => Outcome::Infeasible,
        }
    }

    fn text(&self) -> String {
        match self {
            Item::Report(r) => r.to_text(),
            Item::Error { source, message, .. } => format!("profile: {source}\nerror: {message}\n"),
        }
    }
}

fn verify_file(path: &Path, norm: &Normalize, explain: bool) -> Item {
    let source = path.display().to_string();
    let fail = |message: String| Item::Error {
        schema: SCHEMA,
        source: source.clone(),
        message,
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read: {e}")),
    };
    let profile = match parse_profile(&text) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    match verify(&profile, norm) {
        Ok(v) => Item::Report(Box::new(StructuredReport::new(&v, explain).with_source(source.clone()))),
        Err(e) => fail(e.to_string()),
    }
}

fn collect_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| format!("{}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "toml"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn print(items: &[Item], format: Format, batch: bool) {
    let body = match format {
        Format::Structured if batch => serde_json::to_string_pretty(items).expect("reports always serialize") + "\n",
        Format::Structured => serde_json::to_string_pretty(&items[0]).expect("reports always serialize") + "\n",
        Format::Text => items.iter().map(Item::text).collect::<Vec<_>>().join("\n"),
    };
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn finish(items: &[Item]) -> ExitCode {
    let worst = items.iter().map(Item::outcome).max().unwrap_or(Outcome::Failed);
    ExitCode::from(worst.code())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify { paths, output } => {
            let norm = output.normalization()?;
            let files = collect_paths(&paths)?;
            if files.is_empty() {
                return Err("no profile documents found".into());
            }
            let batch = files.len() > 1 || paths.iter().any(|p| p.is_dir());
            let items: Vec<Item> = files.par_iter().map(|f| verify_file(f, &norm, output.explain)).collect();
            print(&items, output.format, batch);
            Ok(finish(&items))
        }
        Command::Catalog {
            type_id,
            k,
            n,
            g,
            g1,
            flip,
            same_level,
            emit,
            output,
        } => {
            let norm = output.normalization()?;
            let id: TypeId = type_id.parse().map_err(|e| format!("{e}"))?;
            let params = Params { k, n, g, g1 };
            let ranges = Ranges {
                k: (-1000, 1000),
                g: (0, 1000),
                g1: (0, 1000),
            };
            let variant = Variant { flip, same_level };
            let profile = instantiate_variant(id, &params, &ranges, variant).map_err(|e| e.to_string())?;
            if let Some(path) = emit {
                fs::write(&path, emit_profile(&profile)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let expected = expected_variant_outcome(id, &params, &ranges, variant).map_err(|e| e.to_string())?;
            let source = hamsix_core::catalog::describe_params(id, &params);
            let item = match verify(&profile, &norm) {
                Ok(v) => {
                    let golden = check(&v.report, &v.result, &expected);
                    Item::Report(Box::new(
                        StructuredReport::new(&v, output.explain)
                            .with_source(source)
                            .with_golden(golden),
                    ))
                }
                Err(e) => Item::Error {
                    schema: SCHEMA,
                    source,
                    message: e.to_string(),
                },
            };
            let items = [item];
            print(&items, output.format, false);
            Ok(finish(&items))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
