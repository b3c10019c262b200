//! Master-equation integration.
//!
//! One step applies the exact unitary `U = exp(-iH dt/ħ)` by conjugation and
//! then a first-order dissipator step written in Kraus form,
//!
//! `ρ' = M₀ ρ̃ M₀ + (dt/ħ) Σ_k γ_k A_k ρ̃ A_k†`, `M₀ = (I - (dt/ħ) Σ_k γ_k A_k†A_k)^½`,
//!
//! which agrees with the Euler step `ρ̃ + L(ρ̃) dt/ħ` up to O(dt²) and keeps ρ
//! positive with unit trace. [`exact_oracle`] exponentiates the full
//! Liouvillian and serves as the accuracy reference.

mod oracle;

use log::debug;

use crate::error::{Error, Result};
use crate::linalg::{eigh, unitary_from_hamiltonian, ComplexMatrix, C64};
use crate::models::{JumpOperator, ModelSystem};
use crate::state::{DensityMatrix, POSITIVITY_TOL, STATE_HERMITIAN_TOL, TRACE_TOL};

pub use oracle::{exact_oracle, expm, liouvillian, MAX_ORACLE_DIM};

/// Largest allowed `g_max·dt/ħ`.
pub const MAX_COUPLING_PHASE_PER_STEP: f64 = 0.05;
/// Default step as a fraction of `ħ/g_max`.
pub const DEFAULT_DT_FRACTION: f64 = 1e-3;
/// Target number of recorded samples when `sample_every` is not given.
pub const DEFAULT_SAMPLE_TARGET: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    /// Seconds.
    pub dt: f64,
    /// Seconds.
    pub t_max: f64,
    pub sample_every: usize,
    pub renormalize: bool,
    pub hbar: f64,
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_max: f64, sample_every: usize, renormalize: bool, hbar: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        if !(t_max >= dt && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be >= dt, got t_max = {t_max}, dt = {dt}"
            )));
        }
        if sample_every == 0 {
            return Err(Error::InvalidParameter("sample_every must be positive".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be > 0, got {hbar}")));
        }
        Ok(Self {
            dt,
            t_max,
            sample_every,
            renormalize,
            hbar,
        })
    }

    /// `dt = 10⁻³ ħ/g_max`, renormalization on, about
    /// [`DEFAULT_SAMPLE_TARGET`] samples.
    pub fn for_model(model: &ModelSystem, t_max: f64) -> Result<Self> {
        let dt = default_dt(model, t_max);
        let mut cfg = Self::new(dt, t_max, 1, true, model.hbar)?;
        cfg.sample_every = (cfg.step_count() / DEFAULT_SAMPLE_TARGET).max(1);
        cfg.check_against(model)?;
        Ok(cfg)
    }

    /// Steps needed to reach `t_max`; the last one may overshoot by less than `dt`.
    pub fn step_count(&self) -> usize {
        (self.t_max / self.dt - 1e-9).ceil().max(1.0) as usize
    }

    /// Initial state, every `sample_every`-th step, and the final step.
    pub fn sample_count(&self) -> usize {
        let steps = self.step_count();
        steps / self.sample_every + 1 + usize::from(!steps.is_multiple_of(self.sample_every))
    }

    /// Splitting-accuracy guard: `g_max·dt/ħ ≤ 0.05`.
    pub fn check_against(&self, model: &ModelSystem) -> Result<()> {
        if (self.hbar - model.hbar).abs() > 1e-12 * model.hbar {
            return Err(Error::InvalidParameter(format!(
                "integration hbar {} differs from model hbar {}",
                self.hbar, model.hbar
            )));
        }
        let phase = model.max_coupling * self.dt / self.hbar;
        if phase > MAX_COUPLING_PHASE_PER_STEP {
            return Err(Error::InvalidParameter(format!(
                "g_max*dt/hbar = {phase:.3e} exceeds {MAX_COUPLING_PHASE_PER_STEP}; reduce dt"
            )));
        }
        Ok(())
    }
}

pub fn default_dt(model: &ModelSystem, t_max: f64) -> f64 {
    if model.max_coupling > 0.0 {
        DEFAULT_DT_FRACTION * model.hbar / model.max_coupling
    } else {
        t_max * DEFAULT_DT_FRACTION
    }
}

/// `L(ρ) = Σ γ_k (A ρ A† - ½{ρ, A†A})`.
pub fn lindblad_apply(rho: &ComplexMatrix, jumps: &[JumpOperator]) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for jump in jumps {
        if jump.operator.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                context: "lindblad_apply",
                expected: rho.dim(),
                found: jump.operator.dim(),
            });
        }
        if jump.rate == 0.0 {
            continue;
        }
        let a = &jump.operator;
        let a_dag = a.adjoint();
        let ada = a_dag.matmul(a);
        let sandwich = a.matmul(rho).matmul(&a_dag);
        let anti = &rho.matmul(&ada) + &ada.matmul(rho);
        out += &(&sandwich - &anti.scale_real(0.5)).scale_real(jump.rate);
    }
    Ok(out)
}

/// Precomputed operators for repeated steps with a fixed model and `dt`.
#[derive(Clone, Debug)]
pub struct Propagator {
    unitary: ComplexMatrix,
    unitary_dag: ComplexMatrix,
    /// `M₀`; `None` without dissipation.
    no_jump: Option<ComplexMatrix>,
    /// `(√(γ dt/ħ) A, √(γ dt/ħ) A†)`
    channels: Vec<(ComplexMatrix, ComplexMatrix)>,
    renormalize: bool,
    split: (usize, usize),
}

/// Per-step bookkeeping returned by [`Propagator::advance`].
#[derive(Clone, Copy, Debug, Default)]
pub struct StepDiagnostics {
    /// |Tr ρ' - 1| before any renormalization.
    pub trace_drift: f64,
}

impl Propagator {
    pub fn new(model: &ModelSystem, cfg: &IntegrationConfig) -> Result<Self> {
        cfg.check_against(model)?;
        let unitary = unitary_from_hamiltonian(&model.hamiltonian, cfg.dt, cfg.hbar)?;
        let unitary_dag = unitary.adjoint();
        let dt_over_hbar = cfg.dt / cfg.hbar;
        let channels: Vec<(ComplexMatrix, ComplexMatrix)> = model
            .jumps
            .iter()
            .filter(|j| j.rate > 0.0)
            .map(|j| {
                let a = j.operator.scale_real((j.rate * dt_over_hbar).sqrt());
                let a_dag = a.adjoint();
                (a, a_dag)
            })
            .collect();
        let no_jump = if channels.is_empty() {
            None
        } else {
            let mut keep = ComplexMatrix::identity(model.dim());
            for (a, a_dag) in &channels {
                keep = &keep - &a_dag.matmul(a);
            }
            let decomposition = eigh(&keep.hermitian_part())?;
            if decomposition.eigenvalues[0] < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "dt = {:e} too large for the dissipation rates (no-jump weight {:.3e} < 0)",
                    cfg.dt, decomposition.eigenvalues[0]
                )));
            }
            Some(decomposition.reconstruct_with(|l| C64::new(l.sqrt(), 0.0)))
        };
        Ok(Self {
            unitary,
            unitary_dag,
            no_jump,
            channels,
            renormalize: cfg.renormalize,
            split: model.split,
        })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// One split step. `step_index` is only used in error reports.
    pub fn advance(&self, rho: &ComplexMatrix, step_index: usize) -> Result<(ComplexMatrix, StepDiagnostics)> {
        let rotated = self.unitary.matmul(rho).matmul(&self.unitary_dag);
        let mut next = match &self.no_jump {
            Some(m0) => m0.matmul(&rotated).matmul(m0),
            None => rotated.clone(),
        };
        for (a, a_dag) in &self.channels {
            next += &a.matmul(&rotated).matmul(a_dag);
        }

        let trace = next.trace();
        let drift = (trace - C64::new(1.0, 0.0)).norm();
        if !drift.is_finite() {
            return Err(Error::StepBreach {
                step: step_index,
                reason: "non-finite density matrix".into(),
            });
        }
        if self.renormalize {
            next = next.scale(trace.inv()).hermitian_part();
        } else {
            if drift > TRACE_TOL {
                return Err(Error::StepBreach {
                    step: step_index,
                    reason: format!("trace drift {drift:.3e} exceeds {TRACE_TOL:e}"),
                });
            }
            if next.hermiticity_violation() > STATE_HERMITIAN_TOL {
                next = next.hermitian_part();
            }
        }
        Ok((next, StepDiagnostics { trace_drift: drift }))
    }
}

/// Single step of the splitting scheme.
pub fn step(rho: &DensityMatrix, model: &ModelSystem, cfg: &IntegrationConfig) -> Result<DensityMatrix> {
    check_conformable(rho, model)?;
    let propagator = Propagator::new(model, cfg)?;
    let (next, _) = propagator.advance(rho.matrix(), 1)?;
    DensityMatrix::new(next, model.split).map_err(|e| Error::StepBreach {
        step: 1,
        reason: e.to_string(),
    })
}

fn check_conformable(rho: &DensityMatrix, model: &ModelSystem) -> Result<()> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state vs model",
            expected: model.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    /// Seconds.
    pub times: Vec<f64>,
    /// Diagonal of ρ at each sample.
    pub populations: Vec<Vec<f64>>,
    pub states: Vec<DensityMatrix>,
    pub basis_labels: Vec<String>,
    /// Largest |Tr ρ - 1| seen before renormalization.
    pub max_trace_drift: f64,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Population time series of the basis state `label`.
    pub fn population_series(&self, label: &str) -> Option<Vec<f64>> {
        let i = self.basis_labels.iter().position(|l| l == label)?;
        Some(self.populations.iter().map(|p| p[i]).collect())
    }
}

/// Integrates from `rho0`, recording the initial state, every
/// `sample_every`-th step and the final step.
pub fn evolve(rho0: &DensityMatrix, model: &ModelSystem, cfg: &IntegrationConfig) -> Result<TrajectoryRecord> {
    check_conformable(rho0, model)?;
    rho0.validate()?;
    let propagator = Propagator::new(model, cfg)?;
    let steps = cfg.step_count();
    let capacity = cfg.sample_count();

    let mut record = TrajectoryRecord {
        times: Vec::with_capacity(capacity),
        populations: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        basis_labels: model.basis_labels.clone(),
        max_trace_drift: 0.0,
    };
    record.times.push(0.0);
    record.populations.push(rho0.populations());
    record.states.push(rho0.clone());

    let mut rho = rho0.matrix().clone();
    for k in 1..=steps {
        let (next, diag) = propagator.advance(&rho, k)?;
        record.max_trace_drift = record.max_trace_drift.max(diag.trace_drift);
        rho = next;
        if k % cfg.sample_every == 0 || k == steps {
            let snapshot = DensityMatrix::from_parts(rho.clone(), propagator.split)?;
            let min = snapshot.min_eigenvalue()?;
            if min < -POSITIVITY_TOL {
                return Err(Error::StepBreach {
                    step: k,
                    reason: format!("negative eigenvalue {min:.3e}"),
                });
            }
            record.times.push(k as f64 * cfg.dt);
            record.populations.push(snapshot.populations());
            record.states.push(snapshot);
        }
    }
    debug!(
        "evolved {} steps, {} samples, max trace drift before renormalization {:.3e}",
        steps,
        record.len(),
        record.max_trace_drift
    );
    Ok(record)
}
