use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stein_cli::{parse_expression, run, Command};
use stein_core::scalar::parse_rational;
use stein_core::{Rational, SteinError};

#[derive(Parser)]
#[command(
    name = "stein",
    version,
    about = "Stein operators for algebraic combinations of random variables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args)]
struct Common {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Append the construction trace.
    #[arg(long, global = true)]
    explain: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a Stein operator for the expression.
    Operator { expr: String },
    /// Check moment residuals of the constructed operator.
    Verify {
        expr: String,
        #[arg(long, default_value_t = 12)]
        kmax: u64,
    },
    /// Differential equation for the density.
    DensityOde { expr: String },
    /// Meijer G candidate for the density.
    GDensity { expr: String },
    /// Compare the Mellin transform of the G candidate with the exact one.
    Mellin {
        expr: String,
        /// Probe points for the numeric fallback, e.g. 1/2,1,3.
        #[arg(long, value_parser = rational_list)]
        probes: Option<RationalList>,
    },
    /// Exact search for operators of a fixed shape.
    MinimalSearch {
        expr: String,
        /// Highest power of D.
        #[arg(long)]
        order: u32,
        /// Highest power of M.
        #[arg(long)]
        degree: u32,
        /// Number of moment equations; defaults to the number of unknowns.
        #[arg(long)]
        rows: Option<usize>,
    },
    /// Moments, from the catalog or from seeds through the moment recurrence.
    Moments {
        expr: String,
        #[arg(long, default_value_t = 12)]
        kmax: u64,
        #[arg(long, value_parser = rational_list)]
        seeds: Option<RationalList>,
    },
}

#[derive(Clone)]
struct RationalList(Vec<Rational>);

fn rational_list(s: &str) -> Result<RationalList, String> {
    s.split(',')
        .map(|t| parse_rational(t).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(RationalList)
}

fn command(cmd: Cmd) -> Result<Command, SteinError> {
    Ok(match cmd {
        Cmd::Operator { expr } => Command::Operator(parse_expression(&expr)?),
        Cmd::Verify { expr, kmax } => Command::Verify {
            expr: parse_expression(&expr)?,
            kmax,
        },
        Cmd::DensityOde { expr } => Command::DensityOde(parse_expression(&expr)?),
        Cmd::GDensity { expr } => Command::GDensity(parse_expression(&expr)?),
        Cmd::Mellin { expr, probes } => Command::Mellin {
            expr: parse_expression(&expr)?,
            probes: probes.map(|p| p.0),
        },
        Cmd::MinimalSearch {
            expr,
            order,
            degree,
            rows,
        } => Command::MinimalSearch {
            expr: parse_expression(&expr)?,
            order,
            degree,
            rows,
        },
        Cmd::Moments { expr, kmax, seeds } => Command::Moments {
            expr: parse_expression(&expr)?,
            kmax,
            seeds: seeds.map(|s| s.0),
        },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors share exit code 1 with expression errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let report = command(cli.cmd).and_then(|c| run(&c));
    match report {
        Ok(r) => {
            if cli.opts.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&r.render_json(cli.opts.explain)).unwrap()
                );
            } else {
                print!("{}", r.render_text(cli.opts.explain));
            }
            ExitCode::from(r.status.code() as u8)
        }
        Err(e) => {
            if cli.opts.json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
