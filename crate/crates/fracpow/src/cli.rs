//! The `fracpow` command-line frontend.
//!
//! Subcommands:
//!
//! - `solve`: solve `u = A^(-alpha) b` on the unit square and report
//!   `eps2`/`epsinf`/`max_u` against the exact spectral solution;
//! - `quad-error`: the scalar quadrature error study;
//! - `table`: reproduce one of the reference tables, optionally checking it
//!   against the shipped data (`--check`);
//! - `dump-field`: write a right-hand-side field as CSV.
//!
//! Exit codes are a stable contract: 0 success, 1 check failure, 2 usage
//! error, 3 capacity/resource error.
//!
//! An optional `key=value` config file (`--config`) supplies defaults;
//! explicit flags override it. `--threads` (or the `FRACPOW_THREADS`
//! environment variable) caps the worker count of the table sweeps.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridFunction};
use crate::solver::{solution_report, SolverConfig};
use crate::spectral::SpectralBasis;
use crate::quadrature::{default_kappa_samples, quad_error_study};
use crate::tables::{diff_against_reference, run_table, RhsKind, SweepSpec, Table};

#[derive(Parser)]
#[command(
    name = "fracpow",
    version,
    about = "Fractional-power elliptic solver via semigroup quadrature"
)]
struct Cli {
    /// Optional key=value config file; explicit flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Cap on worker threads (falls back to FRACPOW_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve u = A^(-alpha) b and report errors against the exact solution
    Solve(SolveArgs),
    /// Quadrature error study for the scalar integral S(alpha+p, kappa)
    QuadError(QuadErrorArgs),
    /// Reproduce a reference table (1..5), optionally --check it
    Table(TableArgs),
    /// Dump a right-hand-side field as CSV
    DumpField(DumpFieldArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Fractional exponent, in (0, 1)
    #[arg(long)]
    alpha: Option<f64>,
    /// Quadrature node count
    #[arg(long)]
    m: Option<usize>,
    /// Integrand shift exponent [default: 0]
    #[arg(long)]
    p: Option<usize>,
    /// Grid cells per axis [default: 256]
    #[arg(long = "N", value_name = "N")]
    n: Option<usize>,
    /// Right-hand side: f1 | f2 [default: f1]
    #[arg(long)]
    rhs: Option<String>,
    /// Lower spectral bound; defaults to the smallest eigenvalue
    #[arg(long)]
    delta: Option<f64>,
    /// Domain side lengths [default: 1]
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    /// Write the solve report as JSON
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the approximate solution field as CSV
    #[arg(long, value_name = "FILE")]
    dump_approx: Option<PathBuf>,
    /// Write the exact reference field as CSV
    #[arg(long, value_name = "FILE")]
    dump_exact: Option<PathBuf>,
    /// Write the normalized field u / max u as CSV
    #[arg(long, value_name = "FILE")]
    dump_normalized: Option<PathBuf>,
}

#[derive(Args)]
struct QuadErrorArgs {
    /// Node counts, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Shift exponents, comma separated [default: 0]
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    /// Exponents alpha in (0, 1), comma separated
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Write results as CSV (columns m,p,alpha,epsilon)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Table id, 1..5
    #[arg(long)]
    table: Option<u8>,
    /// Compare against the shipped reference values
    #[arg(long)]
    check: bool,
    /// Relative tolerance for --check [default: 0.10 for table 1, 0.01 otherwise]
    #[arg(long)]
    tol: Option<f64>,
    /// Output CSV path [default: table<id>.csv]
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the diff report as JSON
    #[arg(long, value_name = "FILE")]
    diff_json: Option<PathBuf>,
}

#[derive(Args)]
struct DumpFieldArgs {
    /// Field to dump: f1 | f2 | zero [default: f1]
    #[arg(long)]
    rhs: Option<String>,
    /// Grid cells per axis [default: 256]
    #[arg(long = "N", value_name = "N")]
    n: Option<usize>,
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    /// Output CSV path
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Values from the optional config file; consulted when a flag is absent.
struct FileConfig {
    map: HashMap<String, String>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Domain(format!(
                        "config line {} is not key=value: '{line}'",
                        lineno + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { map })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Domain(format!("config value '{raw}' for '{key}' is invalid"))
            }),
        }
    }

    fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim().parse::<T>().map_err(|_| {
                        Error::Domain(format!("config value '{raw}' for '{key}' is invalid"))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Domain(_) => 2,
                Error::Capacity(_) | Error::Io(_) => 3,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let config = FileConfig::load(cli.config.as_deref())?;
    let threads = match cli.threads.or(config.get("threads")?) {
        Some(t) => Some(t),
        None => match std::env::var("FRACPOW_THREADS") {
            Ok(raw) => Some(raw.parse().map_err(|_| {
                Error::Domain(format!("FRACPOW_THREADS value '{raw}' is invalid"))
            })?),
            Err(_) => None,
        },
    };
    let body = || match cli.command {
        Command::Solve(args) => cmd_solve(args, &config),
        Command::QuadError(args) => cmd_quad_error(args, &config),
        Command::Table(args) => cmd_table(args, &config),
        Command::DumpField(args) => cmd_dump_field(args, &config),
    };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
            pool.install(body)
        }
        None => body(),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Domain(format!("missing required --{flag} (flag or config)")))
}

fn grid_from(n: Option<usize>, l1: Option<f64>, l2: Option<f64>) -> Result<Grid2D> {
    Grid2D::new(
        n.unwrap_or(256),
        n.unwrap_or(256),
        l1.unwrap_or(1.0),
        l2.unwrap_or(1.0),
    )
}

fn write_field_csv(path: &Path, field: &GridFunction) -> Result<()> {
    fs::write(path, field.to_csv())?;
    Ok(())
}

fn cmd_solve(args: SolveArgs, config: &FileConfig) -> Result<i32> {
    // resolve and validate everything before any computation
    let alpha = require(args.alpha.or(config.get("alpha")?), "alpha")?;
    let m = require(args.m.or(config.get("m")?), "m")?;
    let p = args.p.or(config.get("p")?).unwrap_or(0);
    let n = args.n.or(config.get("N")?);
    let rhs: RhsKind = args
        .rhs
        .or(config.get("rhs")?)
        .unwrap_or_else(|| "f1".to_string())
        .parse()?;
    let delta = args.delta.or(config.get("delta")?);
    let grid = grid_from(n, args.l1.or(config.get("l1")?), args.l2.or(config.get("l2")?))?;
    let mut solver_config = SolverConfig::new(alpha, m)?.with_p(p);
    if let Some(d) = delta {
        solver_config = solver_config.with_delta(d)?;
    }

    let basis = SpectralBasis::analytic(grid, 1.0, 0.0)?;
    let b = rhs.field(grid);
    let report = solution_report(&basis, &solver_config, &b)?;

    println!("eps2 = {:.16e}", report.eps2);
    println!("epsinf = {:.16e}", report.epsinf);
    println!("max_u = {:.16e}", report.max_u);

    let path_str = |p: &PathBuf| p.display().to_string();
    if let Some(path) = &args.dump_approx {
        write_field_csv(path, &report.approx)?;
    }
    if let Some(path) = &args.dump_exact {
        write_field_csv(path, &report.exact)?;
    }
    if let Some(path) = &args.dump_normalized {
        write_field_csv(path, &report.normalized)?;
    }
    if let Some(out) = &args.out {
        let json = report.to_json(
            args.dump_approx.as_ref().map(path_str).as_deref(),
            args.dump_exact.as_ref().map(path_str).as_deref(),
            args.dump_normalized.as_ref().map(path_str).as_deref(),
        );
        fs::write(out, json)?;
    }
    Ok(0)
}

fn cmd_quad_error(args: QuadErrorArgs, config: &FileConfig) -> Result<i32> {
    let ms = require(args.m.or(config.get_list("m")?), "m")?;
    let ps = args.p.or(config.get_list("p")?).unwrap_or_else(|| vec![0]);
    let alphas = require(args.alpha.or(config.get_list("alpha")?), "alpha")?;
    let samples = default_kappa_samples();

    let mut csv = String::from("m,p,alpha,epsilon\n");
    for &m in &ms {
        for &p in &ps {
            for &alpha in &alphas {
                let eps = quad_error_study(m, alpha, p, &samples)?;
                println!("m={m} p={p} alpha={alpha} eps = {eps:.16e}");
                csv.push_str(&format!("{m},{p},{alpha},{eps:.16e}\n"));
            }
        }
    }
    if let Some(out) = &args.out {
        fs::write(out, csv)?;
    }
    Ok(0)
}

fn cmd_table(args: TableArgs, config: &FileConfig) -> Result<i32> {
    let id = require(args.table.or(config.get("table")?), "table")?;
    let spec = SweepSpec::for_table(id)?;
    let tol = args
        .tol
        .or(config.get("tol")?)
        .unwrap_or(if id == 1 { 0.10 } else { 0.01 });

    let produced = run_table(&spec)?;
    let out = args
        .out
        .or(config.get("out")?)
        .unwrap_or_else(|| PathBuf::from(format!("table{id}.csv")));
    fs::write(&out, produced.to_csv())?;
    println!("wrote {}", out.display());

    if !args.check {
        return Ok(0);
    }
    let reference = Table::reference(id)?;
    let diff = diff_against_reference(&produced, &reference, tol)?;
    if let Some(path) = &args.diff_json {
        fs::write(path, diff.to_json())?;
    }
    println!(
        "check table {id}: {} cells, max relative deviation {:.3e} (tolerance {tol})",
        diff.comparisons, diff.max_rel_deviation
    );
    if diff.passed() {
        println!("check PASSED");
        Ok(0)
    } else {
        for failure in &diff.failures {
            eprintln!(
                "FAIL {}: produced {:.6e}, reference {:.6e}, deviation {:.3e}",
                failure.cell, failure.produced, failure.reference, failure.rel_deviation
            );
        }
        println!("check FAILED ({} cells over tolerance)", diff.failures.len());
        Ok(1)
    }
}

fn cmd_dump_field(args: DumpFieldArgs, config: &FileConfig) -> Result<i32> {
    let choice = args
        .rhs
        .or(config.get("rhs")?)
        .unwrap_or_else(|| "f1".to_string());
    let grid = grid_from(
        args.n.or(config.get("N")?),
        args.l1.or(config.get("l1")?),
        args.l2.or(config.get("l2")?),
    )?;
    let field = match choice.as_str() {
        "zero" => GridFunction::zeros(grid),
        other => other.parse::<RhsKind>()?.field(grid),
    };
    let out = args
        .out
        .or(config.get("out")?)
        .unwrap_or_else(|| PathBuf::from("field.csv"));
    write_field_csv(&out, &field)?;
    println!("wrote {}", out.display());
    Ok(0)
}
