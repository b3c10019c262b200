//! Parameter sweeps over `alpha` or `gamma`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{error, info};

use super::config::SweepConfig;
use super::output::{format_float, write_csv};
use super::run::{run_scenario_with, RunOutput};
use crate::error::{Error, Result};
use crate::exec::Backend;

/// Discord below which a run counts as decayed.
pub const DISCORD_THRESHOLD: f64 = 0.01;

/// Earliest sample time from which discord stays below `threshold` to the end
/// of the record; `None` if the last sample is still above it.
pub fn settle_time(times: &[f64], discord: &[f64], threshold: f64) -> Option<f64> {
    let last_above = discord.iter().rposition(|&d| d >= threshold);
    match last_above {
        None => times.first().copied(),
        Some(i) if i + 1 < times.len() => Some(times[i + 1]),
        Some(_) => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub min_discord: Option<f64>,
    pub time_to_discord_below: Option<f64>,
}

impl SummaryRow {
    pub fn from_run(value: f64, run: &RunOutput) -> Self {
        let discord = run.discord_series();
        let min_discord = discord.as_ref().and_then(|d| d.iter().copied().reduce(f64::min));
        let time_to_discord_below = discord
            .as_ref()
            .and_then(|d| settle_time(&run.record.times, d, DISCORD_THRESHOLD));
        Self {
            value,
            min_discord,
            time_to_discord_below,
        }
    }
}

#[derive(Debug)]
pub struct SweepRun {
    pub value: f64,
    pub result: Result<RunOutput>,
    pub csv_path: Option<PathBuf>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub runs: Vec<SweepRun>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutput {
    pub fn failures(&self) -> impl Iterator<Item = (f64, &Error)> {
        self.runs.iter().filter_map(|r| r.result.as_ref().err().map(|e| (r.value, e)))
    }
}

/// `<dir>/<stem>_<axis>_<i>.csv` for the `i`-th sweep value.
pub fn run_csv_path(base: &Path, axis: &str, index: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    base.with_file_name(format!("{stem}_{axis}_{index}.csv"))
}

pub fn summary_header(axis: &str) -> String {
    format!("{axis},min_discord,time_to_discord_below_0.01")
}

pub fn write_summary_to<W: Write>(mut sink: W, axis: &str, rows: &[SummaryRow]) -> std::io::Result<()> {
    writeln!(sink, "{}", summary_header(axis))?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for row in rows {
        writeln!(
            sink,
            "{},{},{}",
            format_float(row.value),
            opt(row.min_discord),
            opt(row.time_to_discord_below)
        )?;
    }
    Ok(())
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_sweep_with(cfg, Backend::default())
}

/// Runs every sweep value, concurrently under `Backend::Parallel`, and writes
/// the per-run and summary CSVs named in the config. Runs that fail are
/// logged and kept in the output; the rest are still written.
pub fn run_sweep_with(cfg: &SweepConfig, backend: Backend) -> Result<SweepOutput> {
    let axis = cfg.axis.name();
    let indexed: Vec<(usize, f64)> = cfg.values.iter().copied().enumerate().collect();
    let results = backend.map(&indexed, |&(_, value)| {
        cfg.scenario_for(value)
            .and_then(|scenario| run_scenario_with(&scenario, Backend::Sequential))
    });

    let mut runs = Vec::with_capacity(results.len());
    let mut summary = Vec::new();
    for ((index, value), result) in indexed.into_iter().zip(results) {
        let mut csv_path = None;
        match &result {
            Ok(run) => {
                summary.push(SummaryRow::from_run(value, run));
                if let Some(base) = &cfg.base.output_csv {
                    let path = run_csv_path(base, axis, index);
                    write_csv(run, &path)?;
                    info!("{axis} = {value}: wrote {}", path.display());
                    csv_path = Some(path);
                }
            }
            Err(e) => error!("{axis} = {value}: run failed: {e}"),
        }
        runs.push(SweepRun { value, result, csv_path });
    }

    if let Some(path) = &cfg.summary_csv {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        write_summary_to(&mut w, axis, &summary).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(SweepOutput { runs, summary })
}
