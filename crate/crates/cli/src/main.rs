//! `steinlaw` — batch front-end for exact-law computation, Stein-equation
//! checks, bound audits, rate fits, and enumeration oracles.
//!
//! Exit codes: 0 success, 1 validation error, 2 bound violation detected,
//! 3 numeric-consistency failure.

mod commands;
mod config;
mod output;
mod pool;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use commands::{AuditOpts, LimitLawOpts, OracleOpts, RateFitOpts, SteinCheckOpts};
use config::Config;

#[derive(Parser)]
#[command(
    name = "steinlaw",
    about = "Exact magnetization laws, Stein-equation solutions, and weighted Berry-Esseen distance audits",
    version
)]
struct Cli {
    /// Config file with one [section] per subcommand; flags override it
    #[arg(long, global = true)]
    config: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate normalizers, moments, and tail-bound margins of the density family
    LimitLaw(LimitLawArgs),
    /// Evaluate Stein-equation residuals and the solution bounds on a grid
    SteinCheck(SteinCheckArgs),
    /// Weighted distances, bound terms, and implied constants over an (n, p) sweep
    Audit(AuditArgs),
    /// Brute-force enumeration checks of laws and pair diagnostics
    Oracle(OracleArgs),
    /// Log-log rate fits of the weighted distances
    RateFit(RateFitArgs),
}

#[derive(Args)]
struct LimitLawArgs {
    /// Half-degree k of the exponent (paired with --a; repeatable)
    #[arg(long = "k", value_delimiter = ',')]
    ks: Vec<u32>,
    /// Rate constant a (paired with --k; repeatable)
    #[arg(long = "a", value_delimiter = ',')]
    als: Vec<f64>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output path ("-" = stdout)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SteinCheckArgs {
    #[arg(long = "k", value_delimiter = ',')]
    ks: Vec<u32>,
    #[arg(long = "a", value_delimiter = ',')]
    als: Vec<f64>,
    /// Threshold z of the Stein equation (repeatable)
    #[arg(long = "z", value_delimiter = ',', allow_hyphen_values = true)]
    zs: Vec<f64>,
    /// Number of grid points over [-span, span]
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    /// Half-width of the evaluation grid
    #[arg(long = "grid-span")]
    grid_span: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AuditArgs {
    /// Model: curie-weiss or monomer-dimer
    #[arg(long)]
    model: Option<String>,
    /// System sizes (repeatable, strictly increasing)
    #[arg(long = "n", value_delimiter = ',')]
    ns: Vec<u64>,
    /// Weight exponents p >= 0 (repeatable)
    #[arg(long = "p", value_delimiter = ',')]
    ps: Vec<f64>,
    /// Inverse temperature (curie-weiss only; the audit requires 1)
    #[arg(long)]
    beta: Option<f64>,
    /// Truncation rule: support-bound or fixed
    #[arg(long = "a-rule")]
    a_rule: Option<String>,
    /// Truncation level when --a-rule fixed
    #[arg(long = "a")]
    a: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Model to check (repeatable; default both)
    #[arg(long = "model")]
    models: Vec<String>,
    /// Largest size to enumerate (spins <= 14, dimers <= 10)
    #[arg(long = "max-n")]
    max_n: Option<u32>,
}

#[derive(Args)]
struct RateFitArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "n", value_delimiter = ',')]
    ns: Vec<u64>,
    #[arg(long = "p", value_delimiter = ',')]
    ps: Vec<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(cfg) => cfg,
            Err(msg) => {
                eprintln!("error: {msg}");
                std::process::exit(1);
            }
        },
        None => Config::default(),
    };

    let result = match cli.command {
        Command::LimitLaw(args) => commands::run_limit_law(
            LimitLawOpts {
                ks: args.ks,
                als: args.als,
                format: args.format,
                out: args.out,
            },
            &config,
        ),
        Command::SteinCheck(args) => commands::run_stein_check(
            SteinCheckOpts {
                ks: args.ks,
                als: args.als,
                zs: args.zs,
                grid_points: args.grid_points,
                grid_span: args.grid_span,
                format: args.format,
                out: args.out,
            },
            &config,
        ),
        Command::Audit(args) => commands::run_audit(
            AuditOpts {
                model: args.model,
                ns: args.ns,
                ps: args.ps,
                beta: args.beta,
                a_rule: args.a_rule,
                a: args.a,
                format: args.format,
                out: args.out,
                threads: args.threads,
            },
            &config,
        ),
        Command::Oracle(args) => commands::run_oracle(
            OracleOpts {
                models: args.models,
                max_n: args.max_n,
            },
            &config,
        ),
        Command::RateFit(args) => commands::run_rate_fit(
            RateFitOpts {
                model: args.model,
                ns: args.ns,
                ps: args.ps,
                format: args.format,
                out: args.out,
                threads: args.threads,
            },
            &config,
        ),
    };

    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.exit_code());
        }
    }
}
