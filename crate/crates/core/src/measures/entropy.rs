use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::state::DensityMatrix;

/// Eigenvalues at or below this contribute nothing to the entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Negative eigenvalues down to `-EIGEN_CLAMP_TOL` are rounding noise and
/// clamp to zero before logs and square roots.
pub const EIGEN_CLAMP_TOL: f64 = 1e-10;

/// Anything more negative than `-EIGEN_CLAMP_TOL` means the state is corrupt.
pub(crate) fn clamp_spectrum(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -EIGEN_CLAMP_TOL {
                return Err(Error::InvalidState(format!("eigenvalue {v:.3e} below -{EIGEN_CLAMP_TOL:e}")));
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// `-Σ λ log₂ λ` over a spectrum, skipping `λ ≤ ENTROPY_CUTOFF`.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    let mut values = eigvalsh(m)?;
    clamp_spectrum(&mut values)?;
    Ok(entropy_of_spectrum(&values))
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix())
}
