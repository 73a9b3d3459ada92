use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use spdc_cli::output::write_report;
use spdc_cli::tasks::DEFAULT_TOLERANCE;
use spdc_cli::{bundled, CliError, Format, RunOptions, Scenario, Task};

#[derive(Parser)]
#[command(name = "spdc", version, about = "Guided-wave down-conversion: designs, spectra and interferograms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the number of frequency grid points.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Bound for the mirror-symmetry and mode-residual checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Intersection design of the two period curves.
    Design { scenario: String },
    /// Geometry at which the period curves touch.
    Tangency { scenario: String },
    /// Spectral functions of every channel.
    Spectrum { scenario: String },
    /// Hong-Ou-Mandel interferogram.
    Hom { scenario: String },
    /// Polarization interferogram and visibility versus delay.
    Polarization { scenario: String },
    /// Peak polarization visibility versus device length.
    Visibility { scenario: String },
    /// Entanglement length over the emission band.
    EntanglementLength { scenario: String },
    /// Run the task named in the scenario.
    Run { scenario: String },
    /// List bundled scenarios.
    List,
}

fn list(format: Format) -> anyhow::Result<()> {
    let table = bundled::list_table()?;
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut stdout);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|v| v.render()))?;
            }
            w.flush()?;
        }
        Format::JsonLines => {
            for row in &table.rows {
                let record: serde_json::Map<String, serde_json::Value> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), serde_json::Value::String(v.render())))
                    .collect();
                writeln!(stdout, "{}", serde_json::Value::Object(record))?;
            }
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (name, task) = match &cli.command {
        Command::Design { scenario } => (scenario, Some(Task::Design)),
        Command::Tangency { scenario } => (scenario, Some(Task::Tangency)),
        Command::Spectrum { scenario } => (scenario, Some(Task::Spectrum)),
        Command::Hom { scenario } => (scenario, Some(Task::Hom)),
        Command::Polarization { scenario } => (scenario, Some(Task::Polarization)),
        Command::Visibility { scenario } => (scenario, Some(Task::VisibilityVsLength)),
        Command::EntanglementLength { scenario } => (scenario, Some(Task::EntanglementLength)),
        Command::Run { scenario } => (scenario, None),
        Command::List => unreachable!("handled before"),
    };
    let g = &cli.global;
    let scenario = Scenario::load(name)?;
    let options = RunOptions { task, grid_points: g.grid_points, tolerance: g.tolerance };
    let report = spdc_cli::run(&scenario, &options)?;
    for path in write_report(&report, &g.out, g.format)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::List = cli.command {
        return match list(cli.global.format).context("listing bundled scenarios") {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{e:#}");
                ExitCode::from(1)
            }
        };
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
