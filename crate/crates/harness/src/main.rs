use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mmrelay_core::doppler::{build_table, DEFAULT_HALF_WINDOW, DEFAULT_SPACING};
use mmrelay_harness::experiments::{self, any_unconverged, Param, SweepSpec};
use mmrelay_harness::plot::emit_plot_data;
use mmrelay_harness::records::{read_csv, write_csv, RunRecord};
use mmrelay_harness::{HarnessConfig, HarnessError};

/// Environment variable naming the output directory (default: current dir).
const OUT_ENV: &str = "MMRELAY_OUT";

#[derive(Parser)]
#[command(name = "mmrelay", version, about = "Power allocation experiments for train-mounted mmWave relays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured scheme once on the scenario; writes run.csv
    Run { config: PathBuf },
    /// Sweep one parameter; writes sweep-<param>.csv
    Sweep {
        config: PathBuf,
        /// M, dl, v (km/h), PT (dBm) or sigma_v (m/s)
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long)]
        values: String,
        /// Trials per point (default: the config's `trials`)
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Velocity-error Monte Carlo study; writes mc-velocity.csv
    McVelocity {
        config: PathBuf,
        /// Comma-separated standard deviations in m/s
        #[arg(long)]
        sigmas: String,
        #[arg(long)]
        trials: usize,
    },
    /// Turn a results file into <figure>.dat and <figure>.manifest
    PlotData {
        csv: PathBuf,
        /// <E|EE|SE>-vs-<M|dl|v|PT|sigma_v>
        #[arg(long)]
        figure: String,
    },
    /// Write the RSRP to relative Doppler lookup table; writes doppler-table.txt
    DopplerTable {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPACING)]
        spacing: f64,
        #[arg(long, default_value_t = DEFAULT_HALF_WINDOW)]
        half_window: usize,
    },
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, HarnessError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| HarnessError::Usage(format!("{what}: {s:?} is not a number")))
        })
        .collect()
}

fn out_dir() -> Result<PathBuf, HarnessError> {
    let dir = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn summarize(rows: &[RunRecord]) {
    for r in rows.iter().filter(|r| r.is_aggregate() || r.param == "none") {
        let value = r.value.map_or_else(String::new, |v| format!("{}={v} ", r.param));
        match (r.energy_j, r.ee_bits_per_j) {
            (Some(e), Some(ee)) => {
                let floor = if r.meets_floor == Some(false) { "  below D_min" } else { "" };
                println!("{value}{:<10} E = {e:.6} J  EE = {ee:.6e} bits/J{floor}", r.scheme);
            }
            _ => println!("{value}{:<10} failed: {}", r.scheme, r.error),
        }
    }
}

fn finish(rows: Vec<RunRecord>, path: &Path) -> Result<ExitCode, HarnessError> {
    write_csv(path, &rows)?;
    summarize(&rows);
    println!("wrote {}", path.display());
    if any_unconverged(&rows) {
        eprintln!("warning: the optimizer did not converge at some points");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn execute(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run { config } => {
            let hc = HarnessConfig::load(&config)?;
            let rows = experiments::run_scenario(&hc)?;
            finish(rows, &out_dir()?.join("run.csv"))
        }
        Command::Sweep {
            config,
            param,
            values,
            trials,
        } => {
            let hc = HarnessConfig::load(&config)?;
            let param = Param::parse(&param)
                .ok_or_else(|| HarnessError::Usage(format!("unknown sweep parameter {param:?}")))?;
            let spec = SweepSpec {
                param,
                values: parse_list(&values, "--values")?,
                schemes: hc.schemes.clone(),
                trials: trials.unwrap_or(hc.trials),
                seed: hc.scenario.seed,
            };
            let rows = experiments::sweep(&hc, &spec)?;
            finish(rows, &out_dir()?.join(format!("sweep-{}.csv", param.name())))
        }
        Command::McVelocity {
            config,
            sigmas,
            trials,
        } => {
            let hc = HarnessConfig::load(&config)?;
            let sigmas = parse_list(&sigmas, "--sigmas")?;
            let rows = experiments::monte_carlo_velocity_error(&hc, &sigmas, trials)?;
            finish(rows, &out_dir()?.join("mc-velocity.csv"))
        }
        Command::PlotData { csv, figure } => {
            let rows = read_csv(&csv)?;
            let files = emit_plot_data(&rows, &figure, &out_dir()?)?;
            println!("wrote {}", files.data.display());
            println!("wrote {}", files.manifest.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::DopplerTable {
            config,
            spacing,
            half_window,
        } => {
            let hc = HarnessConfig::load(&config)?;
            let table = build_table(&hc.scenario, spacing, half_window)?;
            let path = out_dir()?.join("doppler-table.txt");
            std::fs::write(&path, table.to_text()).map_err(|e| HarnessError::Io {
                path: path.clone(),
                source: e,
            })?;
            println!("{} entries, wrote {}", table.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
