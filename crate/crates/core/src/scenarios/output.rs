//! CSV trajectories.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::{RunOutput, SampleReport};
use crate::error::{Error, Result};
use crate::solver::TrajectoryRecord;
use crate::state::Side;

pub const MEASURE_COLUMNS: [&str; 7] = ["S_A", "S_B", "S_AB", "concurrence", "mutual_info", "classical_corr", "discord"];

/// Populations must sum to one within this much in every emitted row.
pub const ROW_TRACE_TOL: f64 = 1e-6;

pub fn header(basis_labels: &[String]) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain(basis_labels.iter().cloned())
        .chain(MEASURE_COLUMNS.iter().map(|s| s.to_string()))
        .collect()
}

/// 12 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// Writes the trajectory and reports as CSV to any sink.
pub fn write_csv_to<W: Write>(
    sink: W,
    record: &TrajectoryRecord,
    reports: &[SampleReport],
    measured: Side,
) -> Result<()> {
    if record.len() != reports.len() {
        return Err(Error::DimensionMismatch {
            context: "write_csv: samples vs reports",
            expected: record.len(),
            found: reports.len(),
        });
    }
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    };
    w.write_record(header(&record.basis_labels)).map_err(csv_err)?;
    for (i, (report, (t, pops))) in reports.iter().zip(record.times.iter().zip(&record.populations)).enumerate() {
        report
            .check_invariants(measured)
            .map_err(|e| Error::AtSample { sample: i, source: Box::new(e) })?;
        let total: f64 = pops.iter().sum();
        if (total - 1.0).abs() > ROW_TRACE_TOL {
            return Err(Error::AtSample {
                sample: i,
                source: Box::new(Error::InvalidState(format!("populations sum to {total}"))),
            });
        }
        let fields = report.fields();
        let row = std::iter::once(format_float(*t))
            .chain(pops.iter().map(|&p| format_float(p)))
            .chain(fields.iter().map(|f| f.map(format_float).unwrap_or_default()));
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| csv_err(e.into()))?;
    Ok(())
}

pub fn write_csv(output: &RunOutput, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_csv_to(&mut buf, &output.record, &output.reports, output.measured_side).map_err(|e| with_path(e, path))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

/// A CSV loaded back as named columns; empty fields become `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        let i = self.headers.iter().position(|h| h == name)?;
        Some(&self.columns[i])
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let csv_err = |message: String| Error::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(e.to_string()))?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let value = if field.is_empty() {
                None
            } else {
                Some(
                    field
                        .parse::<f64>()
                        .map_err(|_| csv_err(format!("row {}: '{field}' is not a number", line + 1)))?,
                )
            };
            col.push(value);
        }
    }
    Ok(CsvTable { headers, columns })
}
