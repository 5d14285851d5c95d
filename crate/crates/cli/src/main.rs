use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use curvecount::genera::genus_report;
use curvecount::model::condition_vectors;
use curvecount::selfcheck::run_all;
use curvecount::trace::{TraceNode, Tracer};
use curvecount::{moduli_dimension, CountValue, Engine, MemoStore, Problem};
use serde::Serialize;
use serde_json::Value;

mod cache;

/// Trace files stop expanding after this many nodes.
const TRACE_NODE_LIMIT: usize = 200_000;

#[derive(Parser)]
#[command(
    name = "curvecount",
    version,
    about = "Count rational curves in P^n meeting linear subspaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of degree-d rational curves meeting general subspaces.
    Count(Query),
    /// Canonical degree of a one-dimensional family, as JSON.
    Genus(Query),
    /// Every count for degrees 1..=d-max.
    Table(TableArgs),
    /// Run the identity and oracle suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct Query {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: u32,
    /// Comma-separated codimensions, e.g. 2,2,2,2.
    #[arg(long, value_parser = parse_conds)]
    conds: Conds,
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write a JSON derivation trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d_max: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
struct Conds(Vec<u32>);

fn parse_conds(s: &str) -> Result<Conds, String> {
    s.split(',')
        .map(|t| u32::from_str(t.trim()).map_err(|e| format!("bad codimension {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Conds)
}

/// Largest table degree per ambient dimension.
fn table_limit(n: u32) -> u32 {
    match n {
        3 | 4 => 8,
        5 => 6,
        6 => 5,
        7 => 4,
        8 => 3,
        9 | 10 => 2,
        11..=16 => 1,
        _ => 0,
    }
}

const TABLE_ENVELOPE: &str =
    "d <= 8 for n = 3, 4; d <= 6 for n = 5; d <= 5 for n = 6; d <= 4 for n = 7; d <= 3 for n = 8; d <= 2 for n = 9, 10; d = 1 for n = 11..16";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Count(q) => {
            let engine = open_engine(q.cache.as_deref())?;
            let p = Problem::new(q.n, q.d, q.conds.0.iter().copied())?;
            let value = engine.degree_count(&p)?;
            if let Some(path) = &q.trace {
                write_trace(path, &Tracer::new(&engine).count(&p)?)?;
            }
            close_engine(q.cache.as_deref(), &engine)?;
            writeln!(out, "{value}")?;
        }
        Command::Genus(q) => {
            let engine = open_engine(q.cache.as_deref())?;
            let p = Problem::new(q.n, q.d, q.conds.0.iter().copied())?;
            let report = genus_report(&engine, &p)?;
            if let Some(path) = &q.trace {
                write_trace(path, &Tracer::new(&engine).genus(&p)?)?;
            }
            close_engine(q.cache.as_deref(), &engine)?;
            let json = GenusJson {
                conds: report.problem.codims().to_vec(),
                deg_k: report.deg_k,
                genus_if_connected: report.genus_if_connected,
                thickening: report.thickening.plus_codims(),
                dropped: report.thickening.dropped.clone(),
                deg_k_cross_check: report.deg_k_cross_check,
                genus_if_connected_cross_check: report.genus_if_connected_cross_check,
                consistent: report.consistent,
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)?;
        }
        Command::Table(t) => {
            moduli_dimension(t.n, 1)?;
            if t.d_max < 1 || t.d_max > table_limit(t.n) {
                bail!(
                    "table for n={} d-max={} is outside the supported envelope ({TABLE_ENVELOPE})",
                    t.n,
                    t.d_max
                );
            }
            let engine = open_engine(t.cache.as_deref())?;
            let mut text = String::new();
            if let Format::Csv = t.format {
                text.push_str("d,conds,N\n");
            }
            for d in 1..=t.d_max {
                for v in condition_vectors(t.n, d, 0)? {
                    let p = Problem::from_parts(t.n, d, v)?;
                    let value = engine.degree_count(&p)?;
                    text.push_str(&table_row(t.format, d, p.codims(), &value)?);
                    text.push('\n');
                }
            }
            close_engine(t.cache.as_deref(), &engine)?;
            out.write_all(text.as_bytes())?;
        }
        Command::Selfcheck(s) => {
            let engine = Engine::new();
            let results = run_all(&engine, s.n, s.d_max)?;
            let mut ok = true;
            for r in &results {
                match &r.failure {
                    None => writeln!(out, "PASS {} ({} checks)", r.name, r.checked)?,
                    Some(f) => {
                        ok = false;
                        writeln!(out, "FAIL {} ({} checks): {f}", r.name, r.checked)?;
                    }
                }
            }
            return Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GenusJson {
    conds: Vec<u32>,
    #[serde(rename = "deg_K")]
    deg_k: i64,
    genus_if_connected: Option<i64>,
    /// Enlarged codimensions of the retained conditions.
    thickening: Vec<u32>,
    dropped: Vec<usize>,
    #[serde(rename = "deg_K_cross_check")]
    deg_k_cross_check: i64,
    genus_if_connected_cross_check: Option<i64>,
    consistent: bool,
}

fn table_row(format: Format, d: u32, conds: &[u32], value: &CountValue) -> Result<String> {
    Ok(match format {
        Format::Csv => {
            let joined: Vec<String> = conds.iter().map(u32::to_string).collect();
            format!("{d},{},{value}", joined.join(";"))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                d: u32,
                conds: &'a [u32],
                #[serde(rename = "N")]
                n: Value,
            }
            let n = Value::Number(serde_json::Number::from_str(&value.to_string())?);
            serde_json::to_string(&Row { d, conds, n })?
        }
    })
}

fn open_engine(cache: Option<&Path>) -> Result<Engine> {
    Ok(match cache {
        Some(path) => Engine::with_store(cache::load(path)?),
        None => Engine::with_store(MemoStore::new()),
    })
}

fn close_engine(cache: Option<&Path>, engine: &Engine) -> Result<()> {
    if let Some(path) = cache {
        cache::save(path, engine.store())?;
    }
    Ok(())
}

fn write_trace(path: &Path, root: &Arc<TraceNode>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&root.to_json(TRACE_NODE_LIMIT))?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing trace {}", path.display()))
}
