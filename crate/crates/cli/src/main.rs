use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_qed::scenarios::{self, ParsedConfig, ScenarioConfig, SweepConfig};
use cavity_qed::{Error, Result};
use clap::{Parser, Subcommand};
use log::{info, warn};

/// Cavity QED open-system simulator.
#[derive(Parser)]
#[command(name = "cavity-qed", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario and write its CSV (and plot, if configured).
    Run { config: PathBuf },
    /// Run a parameter sweep.
    Sweep { config: PathBuf },
    /// Plot CSV columns against time as SVG.
    Plot {
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are configuration errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config } => match scenarios::load_config(&config)? {
            ParsedConfig::Scenario(cfg) => run(&cfg),
            ParsedConfig::Sweep(_) => Err(Error::Config(format!(
                "{} describes a sweep; use the 'sweep' command",
                config.display()
            ))),
        },
        Command::Sweep { config } => match scenarios::load_config(&config)? {
            ParsedConfig::Sweep(cfg) => sweep(&cfg),
            ParsedConfig::Scenario(_) => Err(Error::Config(format!(
                "{} has no 'axis'/'values'; use the 'run' command",
                config.display()
            ))),
        },
        Command::Plot { csv, columns, out } => {
            scenarios::render_plot(&csv, &columns, &out)?;
            info!("wrote {}", out.display());
            Ok(())
        }
        Command::Validate { config } => {
            match scenarios::load_config(&config)? {
                ParsedConfig::Scenario(cfg) => describe(&cfg),
                ParsedConfig::Sweep(cfg) => {
                    println!("sweep over {} with {} values", cfg.axis.name(), cfg.values.len());
                    describe(&cfg.base);
                }
            }
            println!("ok");
            Ok(())
        }
    }
}

fn describe(cfg: &ScenarioConfig) {
    let s = &cfg.integration;
    let steps = cfg.integration_config().map(|c| c.step_count()).unwrap_or_default();
    println!(
        "dt = {:e} s, t_max = {:e} s, {steps} steps, sample every {}",
        s.dt, s.t_max, s.sample_every
    );
    let measures: Vec<&str> = cfg.measures.iter().map(|m| m.name()).collect();
    println!("measures: {}", measures.join(", "));
}

fn run(cfg: &ScenarioConfig) -> Result<()> {
    let output = scenarios::run_scenario(cfg)?;
    let Some(csv) = &cfg.output_csv else {
        warn!("no output_csv configured; results discarded");
        return Ok(());
    };
    scenarios::write_csv(&output, csv)?;
    info!("wrote {} ({} samples)", csv.display(), output.record.len());
    if let Some(plot) = &cfg.output_plot {
        write_plot(cfg, csv, plot)?;
    }
    Ok(())
}

fn write_plot(cfg: &ScenarioConfig, csv: &Path, plot: &Path) -> Result<()> {
    let columns = if cfg.plot_columns.is_empty() {
        let mut cols = vec!["discord".to_string()];
        if cfg.measures.contains(scenarios::Measure::Concurrence) {
            cols.push("concurrence".into());
        }
        cols
    } else {
        cfg.plot_columns.clone()
    };
    scenarios::render_plot(csv, &columns, plot)?;
    info!("wrote {}", plot.display());
    Ok(())
}

fn sweep(cfg: &SweepConfig) -> Result<()> {
    let output = scenarios::run_sweep(cfg)?;
    let mut failed = 0;
    for (value, e) in output.failures() {
        eprintln!("{} = {value}: {e}", cfg.axis.name());
        failed += 1;
    }
    if let Some(path) = &cfg.summary_csv {
        info!("wrote {}", path.display());
    }
    if failed > 0 {
        warn!("{failed} of {} runs failed", output.runs.len());
        let first = output.runs.into_iter().find_map(|r| r.result.err());
        return first.map_or(Ok(()), Err);
    }
    Ok(())
}
