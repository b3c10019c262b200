//! Config-driven runs, sweeps, CSV output and plots.

pub mod config;
pub mod output;
pub mod plot;
pub mod run;
pub mod sweep;

use std::path::Path;

use crate::error::{Error, Result};

pub use config::{
    parse_config, parse_scenario, parse_sweep, Measure, MeasureSet, ParsedConfig, ScenarioConfig, SweepAxis,
    SweepConfig,
};
pub use output::{read_csv, write_csv, write_csv_to, CsvTable};
pub use plot::{render_plot, render_svg};
pub use run::{run_scenario, run_scenario_with, RunOutput, SampleReport};
pub use sweep::{run_sweep, run_sweep_with, settle_time, SummaryRow, SweepOutput};

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
