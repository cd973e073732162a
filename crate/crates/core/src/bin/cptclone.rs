use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cptclone::harness::{
    chi_curve, exit, parse_quantity, parse_values, render_cf2d, run_scenario, sweep, ChiAxis,
    ChiDefaults, Dimension, HarnessError, ScenarioConfig, SweepParam,
};
use cptclone::LambdaParams;

#[derive(Parser)]
#[command(
    name = "cptclone",
    version,
    about = "Image cloning by coherent population trapping in a vapor cell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write images, metrics and dumps.
    Run {
        scenario: PathBuf,
        /// Output directory (defaults to the scenario's outputs.directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario for each value of one parameter.
    Sweep {
        scenario: PathBuf,
        /// probe_power, coupling_power or density.
        #[arg(long)]
        param: SweepParam,
        /// "a, b, c" or "start..end:count", with units.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate χ along g, G or N with the others at the experimental values.
    Chi {
        #[arg(long)]
        axis: ChiAxis,
        /// Start of the range, with units ("10 gamma", "0.1e12 per_cm3").
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// CSV destination; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a CF2D field dump as a 16-bit PGM.
    Render {
        dump: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn axis_value(text: &str, axis: ChiAxis, gamma: f64) -> Result<f64, HarnessError> {
    let dim = match axis {
        ChiAxis::Density => Dimension::Density,
        _ => Dimension::Rate,
    };
    parse_quantity(text, dim)
        .and_then(|q| q.resolve(Some(gamma)))
        .map_err(HarnessError::Config)
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { scenario, out } => {
            let config = ScenarioConfig::from_file(&scenario)?;
            let dir = out.unwrap_or_else(|| config.outputs.directory.clone());
            let report = run_scenario(&config, &dir)?;
            for m in &report.metrics {
                println!(
                    "{},{},{},{}",
                    m.scenario_id, m.metric_name, m.value, m.units
                );
            }
            log::info!("{} finished in {:.2?}", report.scenario_id, report.duration);
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => {
            let config = ScenarioConfig::from_file(&scenario)?;
            let values = parse_values(&values, param)?;
            let report = sweep(&config, param, &values, &out)?;
            for row in &report.rows {
                let coupling = row
                    .coupling_ncc
                    .map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
                println!(
                    "{} = {} {}: clone NCC {:.4}, coupling NCC {coupling}",
                    row.parameter, row.value, row.units, row.clone_ncc
                );
            }
        }
        Command::Chi {
            axis,
            from,
            to,
            points,
            out,
        } => {
            let params = LambdaParams::experiment();
            let from = axis_value(&from, axis, params.gamma)?;
            let to = axis_value(&to, axis, params.gamma)?;
            let curve = chi_curve(
                &params,
                axis,
                from,
                to,
                points,
                ChiDefaults::experiment(params.gamma),
            )?;
            if !curve.skipped.is_empty() {
                eprintln!("note: skipped {} sample(s) at g = 0", curve.skipped.len());
            }
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .map_err(|e| HarnessError::Io { path, source: e })?;
                    curve.write_csv(BufWriter::new(file))?;
                }
                None => curve.write_csv(io::stdout().lock())?,
            }
        }
        Command::Render { dump, out } => render_cf2d(&dump, &out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::VALIDATION
            } else {
                exit::OK
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
