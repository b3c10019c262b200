//! Exact propagation by exponentiating the Liouvillian superoperator.

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64};
use crate::models::ModelSystem;
use crate::state::DensityMatrix;

/// Largest Hilbert-space dimension accepted (superoperator 64×64).
pub const MAX_ORACLE_DIM: usize = 8;

const TAYLOR_SCALE: f64 = 0.5;
const TAYLOR_MAX_TERMS: usize = 40;

/// Superoperator `M` with `d vec(ρ)/dt = M vec(ρ)` under column stacking.
///
/// Commutator part `-(i/ħ)(I⊗H - Hᵀ⊗I)`; each jump contributes
/// `(γ/ħ)(Ā⊗A - ½ I⊗A†A - ½ (A†A)ᵀ⊗I)`.
pub fn liouvillian(model: &ModelSystem, hbar: f64) -> ComplexMatrix {
    let d = model.dim();
    let id = ComplexMatrix::identity(d);
    let h = &model.hamiltonian;
    let coherent = &kron(&id, h) - &kron(&h.transpose(), &id);
    let mut m = coherent.scale(C64::new(0.0, -1.0 / hbar));
    for jump in &model.jumps {
        if jump.rate == 0.0 {
            continue;
        }
        let a = &jump.operator;
        let ada = a.adjoint().matmul(a);
        let gain = kron(&a.conj(), a);
        let loss = &kron(&id, &ada) + &kron(&ada.transpose(), &id);
        m += &(&gain - &loss.scale_real(0.5)).scale_real(jump.rate / hbar);
    }
    m
}

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.norm_one();
    let squarings = if norm > TAYLOR_SCALE {
        (norm / TAYLOR_SCALE).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=TAYLOR_MAX_TERMS {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        sum += &term;
        if term.norm_one() <= f64::EPSILON * 1e-2 * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `ρ(t) = unvec(exp(M t) vec ρ₀)`.
pub fn exact_oracle(rho0: &DensityMatrix, model: &ModelSystem, t: f64, hbar: f64) -> Result<DensityMatrix> {
    if model.dim() > MAX_ORACLE_DIM {
        return Err(Error::Unsupported(format!(
            "exact oracle supports dimension <= {MAX_ORACLE_DIM}, got {}",
            model.dim()
        )));
    }
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            context: "exact_oracle",
            expected: model.dim(),
            found: rho0.dim(),
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("oracle time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let propagator = expm(&liouvillian(model, hbar).scale_real(t));
    let evolved = propagator.apply(&rho0.matrix().vectorize());
    let rho = ComplexMatrix::unvectorize(&evolved)?.hermitian_part();
    DensityMatrix::new(rho, model.split)
}
