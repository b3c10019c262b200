//! Evolution plus per-sample measures.

use log::info;

use super::config::{Measure, MeasureSet, ScenarioConfig};
use crate::error::{Error, Result};
use crate::exec::Backend;
use crate::measures::{self, BasisOptimizer, CorrelationReport, DISCORD_CLAMP_TOL};
use crate::solver::{self, TrajectoryRecord};
use crate::state::{DensityMatrix, Side};

/// Measures evaluated on one snapshot; `None` where not requested or not defined.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SampleReport {
    pub s_a: Option<f64>,
    pub s_b: Option<f64>,
    pub s_ab: Option<f64>,
    pub concurrence: Option<f64>,
    pub mutual_info: Option<f64>,
    pub classical_corr: Option<f64>,
    pub discord: Option<f64>,
}

impl SampleReport {
    pub fn from_correlation(r: &CorrelationReport) -> Self {
        Self {
            s_a: Some(r.s_a),
            s_b: Some(r.s_b),
            s_ab: Some(r.s_ab),
            concurrence: r.concurrence,
            mutual_info: Some(r.mutual_info),
            classical_corr: Some(r.classical_corr),
            discord: Some(r.discord),
        }
    }

    /// Fields in CSV column order.
    pub fn fields(&self) -> [Option<f64>; 7] {
        [
            self.s_a,
            self.s_b,
            self.s_ab,
            self.concurrence,
            self.mutual_info,
            self.classical_corr,
            self.discord,
        ]
    }

    /// Consistency relations among whichever fields are present.
    pub fn check_invariants(&self, measured: Side) -> Result<()> {
        let fail = |what: String| Err(Error::InvalidState(format!("sample report: {what}")));
        for (name, v) in ["S_A", "S_B", "S_AB", "concurrence", "mutual_info", "classical_corr", "discord"]
            .iter()
            .zip(self.fields())
        {
            if let Some(v) = v {
                if !v.is_finite() {
                    return fail(format!("{name} is not finite"));
                }
            }
        }
        if let (Some(a), Some(b), Some(ab), Some(i)) = (self.s_a, self.s_b, self.s_ab, self.mutual_info) {
            if (a + b - ab - i).abs() > 1e-9 {
                return fail(format!("mutual_info = {i} but S_A + S_B - S_AB = {}", a + b - ab));
            }
        }
        if let Some(c) = self.concurrence {
            if !(-1e-9..=1.0 + 1e-9).contains(&c) {
                return fail(format!("concurrence {c} outside [0, 1]"));
            }
        }
        if let (Some(i), Some(j), Some(d)) = (self.mutual_info, self.classical_corr, self.discord) {
            if (i - j - d).abs() > 1e-9 {
                return fail(format!("discord = {d} but I - J = {}", i - j));
            }
            let s_measured = match measured {
                Side::A => self.s_a,
                Side::B => self.s_b,
            };
            if d < -DISCORD_CLAMP_TOL || s_measured.is_some_and(|s| d > s + 1e-6) {
                return fail(format!("discord {d} outside [0, S(measured)]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: TrajectoryRecord,
    pub reports: Vec<SampleReport>,
    pub measured_side: Side,
}

impl RunOutput {
    pub fn discord_series(&self) -> Option<Vec<f64>> {
        self.reports.iter().map(|r| r.discord).collect()
    }
}

/// Evaluates `set` on one state.
pub fn measure_sample(
    rho: &DensityMatrix,
    set: &MeasureSet,
    measured: Side,
    optimizer: &BasisOptimizer,
) -> Result<SampleReport> {
    let two_qubit = rho.split() == (2, 2);
    if set.contains(Measure::Discord) {
        let mut report = SampleReport::from_correlation(&measures::discord_with(rho, measured, optimizer)?);
        if !set.contains(Measure::Concurrence) {
            report.concurrence = None;
        }
        return Ok(report);
    }
    let mut report = SampleReport::default();
    if set.contains(Measure::Entropy) {
        report.s_a = Some(measures::von_neumann_entropy(&rho.reduced(Side::A)?)?);
        report.s_b = Some(measures::von_neumann_entropy(&rho.reduced(Side::B)?)?);
        report.s_ab = Some(measures::von_neumann_entropy(rho)?);
    }
    if set.contains(Measure::MutualInfo) {
        if let (Some(a), Some(b), Some(ab)) = (report.s_a, report.s_b, report.s_ab) {
            report.mutual_info = Some(a + b - ab);
        }
    }
    if set.contains(Measure::ClassicalCorr) {
        report.classical_corr = Some(measures::classical_correlation_with(rho, measured, optimizer)?.bits);
    }
    if set.contains(Measure::Concurrence) && two_qubit {
        report.concurrence = Some(measures::concurrence(rho)?);
    }
    Ok(report)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run_scenario_with(cfg, Backend::default())
}

/// Runs one scenario; `backend` spreads the per-sample measures over workers.
pub fn run_scenario_with(cfg: &ScenarioConfig, backend: Backend) -> Result<RunOutput> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let rho0 = cfg.initial_state()?;
    let integration = cfg.integration_config()?;
    let record = solver::evolve(&rho0, &model, &integration)?;
    info!(
        "evolved {:?} model: {} samples over {:.3e} s",
        model.kind,
        record.len(),
        cfg.integration.t_max
    );

    let optimizer = BasisOptimizer::with_backend(Backend::Sequential);
    let results = backend.map(&record.states, |rho| {
        measure_sample(rho, &cfg.measures, cfg.measured_side, &optimizer)
    });
    let mut reports = Vec::with_capacity(results.len());
    for (sample, r) in results.into_iter().enumerate() {
        let report = r.map_err(|e| Error::AtSample { sample, source: Box::new(e) })?;
        report
            .check_invariants(cfg.measured_side)
            .map_err(|e| Error::AtSample { sample, source: Box::new(e) })?;
        reports.push(report);
    }
    Ok(RunOutput {
        record,
        reports,
        measured_side: cfg.measured_side,
    })
}
