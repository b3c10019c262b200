//! Density matrices with a labeled bipartition.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64};

/// Allowed anti-Hermitian part of a state.
pub const STATE_HERMITIAN_TOL: f64 = 1e-8;
/// Allowed |Tr ρ - 1|.
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated as integration noise.
pub const POSITIVITY_TOL: f64 = 1e-7;

/// One factor of a bipartition. `A` is always the photon factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Deserialize, serde::Serialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on `dA ⊗ dB`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    split: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity against the state tolerances.
    pub fn new(matrix: ComplexMatrix, split: (usize, usize)) -> Result<Self> {
        let state = Self::from_parts(matrix, split)?;
        state.validate()?;
        Ok(state)
    }

    /// Checks only the dimensions. For intermediate states whose invariants
    /// are verified elsewhere.
    pub fn from_parts(matrix: ComplexMatrix, split: (usize, usize)) -> Result<Self> {
        if split.0 * split.1 != matrix.dim() {
            return Err(Error::DimensionMismatch {
                context: "DensityMatrix split",
                expected: matrix.dim(),
                found: split.0 * split.1,
            });
        }
        Ok(Self { matrix, split })
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn from_pure(psi: &[C64], split: (usize, usize)) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("ket norm² = {norm}, expected 1")));
        }
        Self::new(ComplexMatrix::outer(psi, psi)?, split)
    }

    /// Projector onto a computational basis state.
    pub fn basis_state(index: usize, split: (usize, usize)) -> Result<Self> {
        let dim = split.0 * split.1;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range for dim {dim}")));
        }
        Self::new(ComplexMatrix::basis_op(dim, index, index), split)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_violation();
        if herm > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian: violation {herm:.3e}")));
        }
        let trace = self.matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::eigvalsh(&self.matrix.hermitian_part())?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn split(&self) -> (usize, usize) {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.split.0,
            Side::B => self.split.1,
        }
    }

    /// Reduced state of the factor `keep`, with the trivial split `(d, 1)`.
    pub fn reduced(&self, keep: Side) -> Result<DensityMatrix> {
        let m = linalg::partial_trace(&self.matrix, self.split, keep)?;
        let d = m.dim();
        Ok(DensityMatrix {
            matrix: m,
            split: (d, 1),
        })
    }

    /// Diagonal of ρ in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal_real()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }
}
