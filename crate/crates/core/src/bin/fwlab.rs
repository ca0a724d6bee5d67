use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fwlab::experiments::{run_all, ConfigFile, ExperimentId, Overrides, Summary};

/// Usage and configuration errors.
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "fwlab", version, about = "Pseudospectral experiments for the two-component Fornberg-Whitham system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm asymptotics, interpolation, Littlewood-Paley and Besov checks
    VerifyNorms(Common),
    /// Residual decay of the approximate solutions
    Residuals(Common),
    /// Paired evolutions separating at unit time
    Nonuniform(Common),
    /// Hölder dependence on data in the weaker norm
    Holder(Common),
    /// Wave breaking from certified data
    Blowup(Common),
    /// Frequency-shell data statics and Besov growth
    Inflation(Common),
    /// Every experiment in order
    All(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: results)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Number of grid points
    #[arg(long, value_name = "N")]
    grid_n: Option<usize>,
    /// Box length
    #[arg(long, value_name = "L")]
    box_l: Option<f64>,
    /// Reduced parameter lists and grids
    #[arg(long)]
    quick: bool,
    /// Seed for randomized sweeps
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
}

impl Command {
    fn split(&self) -> (Vec<ExperimentId>, &Common) {
        match self {
            Command::VerifyNorms(c) => (vec![ExperimentId::VerifyNorms], c),
            Command::Residuals(c) => (vec![ExperimentId::Residuals], c),
            Command::Nonuniform(c) => (vec![ExperimentId::Nonuniform], c),
            Command::Holder(c) => (vec![ExperimentId::Holder], c),
            Command::Blowup(c) => (vec![ExperimentId::Blowup], c),
            Command::Inflation(c) => (vec![ExperimentId::Inflation], c),
            Command::All(c) => (ExperimentId::ALL.to_vec(), c),
        }
    }
}

fn print_summary(summary: &Summary) {
    for rep in &summary.experiments {
        println!("== {} ({:.1} s): {}", rep.experiment, rep.wall_time_s, rep.status());
        for v in &rep.verdicts {
            println!("  {v}");
        }
        for n in &rep.notes {
            println!("  note: {n}");
        }
    }
    println!("overall: {}", summary.status);
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let (ids, common) = cli.command.split();
    let file = match common.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let ov = Overrides {
        out: common.out.clone(),
        grid_n: common.grid_n,
        box_l: common.box_l,
        quick: common.quick,
        seed: common.seed,
    };
    match run_all(&ids, file.as_ref(), &ov) {
        Ok(summary) => {
            print_summary(&summary);
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e @ fwlab::Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
