//! `coulomb-count`: scan data and verification for disc counting statistics
//! of planar Coulomb gases.

mod commands;
mod config;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coulomb_count::statistics::Regime;
use coulomb_count::verify::{run_all, Level, VerifyOptions};
use serde::Serialize;

use crate::commands::Table;
use crate::config::{ConfigError, Defaults, Format, GridSpec, RawConfig, RunConfig};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "coulomb-count", version, about = "Counting statistics of planar Coulomb gases in a centered disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean and variance against the radius, with bulk and edge laws.
    VarianceCurve(RunArgs),
    /// Variance across the edge of the droplet against the scaled distance S.
    EdgeProfile(RunArgs),
    /// Mean and variance near the origin against the scale T.
    OriginProfile(RunArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// ginibre, mittag_leffler, product, trunc_weak, trunc_strong or tabulated
    #[arg(long)]
    ensemble: Option<String>,
    /// 2 or 4
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// bulk, edge, origin, weak_bulk or weak_edge
    #[arg(long)]
    regime: Option<String>,
    /// min:max:points[:log]
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Monte Carlo trials per grid point (0 disables)
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<String>,
    /// Ensemble parameter key=value (b, c, m, c_tilde, file); repeatable
    #[arg(long = "param")]
    params: Vec<String>,
    /// key=value settings file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
    /// Perturb every reference value; the run must fail
    #[arg(long)]
    negative_control: bool,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<coulomb_count::Error> for Failure {
    fn from(e: coulomb_count::Error) -> Self {
        match e {
            coulomb_count::Error::Unsupported(msg) => Failure::Usage(msg),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::VarianceCurve(args) => run_scan(args, &VARIANCE_DEFAULTS, commands::variance_curve),
        Command::EdgeProfile(args) => run_scan(args, &EDGE_DEFAULTS, commands::edge_profile),
        Command::OriginProfile(args) => run_scan(args, &ORIGIN_DEFAULTS, commands::origin_profile),
        Command::Verify(args) => return verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

const VARIANCE_DEFAULTS: Defaults = Defaults {
    regime: |name| if name == "trunc_weak" { Regime::WeakBulk } else { Regime::Bulk },
    grid: |_| GridSpec {
        min: 0.05,
        max: 1.0,
        points: 20,
        log: false,
    },
    allowed: &[Regime::Bulk, Regime::WeakBulk],
};

const EDGE_DEFAULTS: Defaults = Defaults {
    regime: |name| if name == "trunc_weak" { Regime::WeakEdge } else { Regime::Edge },
    grid: |regime| match regime {
        Regime::WeakEdge => GridSpec {
            min: 0.0,
            max: 50.0,
            points: 26,
            log: false,
        },
        _ => GridSpec {
            min: -2.0,
            max: 3.0,
            points: 21,
            log: false,
        },
    },
    allowed: &[Regime::Edge, Regime::WeakEdge],
};

const ORIGIN_DEFAULTS: Defaults = Defaults {
    regime: |_| Regime::Origin,
    grid: |_| GridSpec {
        min: 0.05,
        max: 3.0,
        points: 20,
        log: false,
    },
    allowed: &[Regime::Origin],
};

fn resolve(args: RunArgs, defaults: &Defaults) -> Result<RunConfig, Failure> {
    let base = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let mut flags = RawConfig {
        ensemble: args.ensemble,
        beta: args.beta,
        n: args.n,
        regime: args.regime,
        grid: args.grid,
        trials: args.trials,
        seed: args.seed,
        format: args.format,
        out: args.out,
        ..RawConfig::default()
    };
    for kv in &args.params {
        flags.add_param(kv)?;
    }
    Ok(RunConfig::resolve(base.overlay(flags), defaults)?)
}

fn run_scan(
    args: RunArgs,
    defaults: &Defaults,
    scan: fn(&RunConfig) -> coulomb_count::Result<Table>,
) -> Result<(), Failure> {
    let cfg = resolve(args, defaults)?;
    let table = scan(&cfg)?;
    let text = match cfg.format {
        Format::Csv => render_csv(&cfg, &table),
        Format::Json => render_json(&cfg, &table),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn render_csv(cfg: &RunConfig, table: &Table) -> String {
    let mut s = String::new();
    s.push_str(&format!("# coulomb-count {}\n", env!("CARGO_PKG_VERSION")));
    for line in cfg.echo() {
        s.push_str("# ");
        s.push_str(&line);
        s.push('\n');
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    config: &'a RunConfig,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
    curve: &'a coulomb_count::statistics::ScanCurve,
}

fn render_json(cfg: &RunConfig, table: &Table) -> String {
    let out = JsonOutput {
        config: cfg,
        columns: &table.columns,
        rows: &table.rows,
        curve: &table.curve,
    };
    let mut s = serde_json::to_string_pretty(&out).expect("plain data serializes");
    s.push('\n');
    s
}

fn verify(args: VerifyArgs) -> ExitCode {
    let opts = VerifyOptions {
        level: match args.level {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        },
        negative_control: args.negative_control,
    };
    let color = std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let paint = |ok: bool| -> String {
        let word = if ok { "PASS" } else { "FAIL" };
        match (color, ok) {
            (false, _) => word.to_string(),
            (true, true) => format!("\x1b[32m{word}\x1b[0m"),
            (true, false) => format!("\x1b[31m{word}\x1b[0m"),
        }
    };
    let results = run_all(opts);
    let mut all_ok = true;
    for r in &results {
        let ok = r.passed && r.within_budget();
        all_ok &= ok;
        let over = if r.within_budget() { "" } else { ", over budget" };
        println!(
            "criterion {:02} {:<36} {} {} ({:.1} s of {} s{over})",
            r.id,
            r.name,
            paint(ok),
            r.detail,
            r.elapsed.as_secs_f64(),
            r.budget.as_secs()
        );
    }
    let passed = results.iter().filter(|r| r.passed && r.within_budget()).count();
    println!("{passed}/{} criteria passed", results.len());
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
