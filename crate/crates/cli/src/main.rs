use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;
mod output;

use output::{Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "starga", version, about = "Star products on multivector algebras: tables, reports and checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier applied to every numeric tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure constants and Killing metric of a bivector algebra, or the
    /// blade product table of a Clifford algebra.
    Algebra {
        /// so3, lorentz:std, lorentz:nonstd, un:N, gln:N or clifford:D:euclid|std|nonstd
        name: String,
    },
    /// Extended Hamiltonian, equations of motion and BRST charge checks.
    Brst(commands::BrstArgs),
    /// Metric, Christoffel symbols and curvature on a coordinate grid.
    Geometry(commands::GeometryArgs),
    /// Free rigid body trajectory with conservation checks.
    RigidBody(commands::RigidBodyArgs),
    /// Seeded property checks grouped by topic.
    PropertySuite(commands::SuiteArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common;
    if !(common.tol.is_finite() && common.tol > 0.0) {
        eprintln!("error: --tol must be a positive number");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Algebra { name } => commands::algebra(name, &common),
        Command::Brst(args) => commands::brst(args, &common),
        Command::Geometry(args) => commands::geometry(args, &common),
        Command::RigidBody(args) => commands::rigid_body(args, &common),
        Command::PropertySuite(args) => commands::property_suite(args, &common),
    };
    match result {
        Ok(report) => finish(report, &common),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn finish(report: Report, common: &Common) -> ExitCode {
    let text = report.render(common.format);
    let written = match &common.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}", Failure::list_json(&report.failures));
        ExitCode::from(1)
    }
}
