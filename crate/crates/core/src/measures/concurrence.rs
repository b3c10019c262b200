use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, ComplexMatrix, C64, ZERO};
use crate::state::DensityMatrix;

use super::entropy::clamp_spectrum;

/// Eigenvalues of `ρ ρ̃` at or below this are taken as exactly zero.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

fn sigma_y_sigma_y() -> ComplexMatrix {
    let y = ComplexMatrix::from_row_major(2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
        .expect("2x2");
    kron(&y, &y)
}

/// Spin-flipped state `(σ_y⊗σ_y) ρ* (σ_y⊗σ_y)†`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = sigma_y_sigma_y();
    yy.matmul(&rho.conj()).matmul(&yy.adjoint())
}

/// Wootters concurrence of a two-qubit state.
///
/// The eigenvalues of `ρ ρ̃` are taken from the Hermitian matrix `√ρ ρ̃ √ρ`,
/// which has the same spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 || rho.split() != (2, 2) {
        return Err(Error::Unsupported(format!(
            "concurrence needs a two-qubit state, got dim {} split {:?}",
            rho.dim(),
            rho.split()
        )));
    }
    let flipped = spin_flip(rho.matrix());
    let decomposition = eigh(&rho.matrix().hermitian_part())?;
    let mut spectrum = decomposition.eigenvalues.clone();
    clamp_spectrum(&mut spectrum)?;
    let root = {
        let d = crate::linalg::EigenDecomposition {
            eigenvalues: spectrum,
            eigenvectors: decomposition.eigenvectors,
        };
        d.reconstruct_with(|l| C64::new(l.sqrt(), 0.0))
    };
    let r = root.matmul(&flipped).matmul(&root).hermitian_part();
    let mut lambdas = crate::linalg::eigvalsh(&r)?;
    clamp_spectrum(&mut lambdas)?;
    lambdas.sort_by(|a, b| b.total_cmp(a));
    // Square roots turn ~1e-16 rounding into ~1e-8; treat that floor as zero.
    for l in lambdas.iter_mut() {
        if *l <= SPECTRUM_FLOOR {
            *l = 0.0;
        }
    }
    let roots: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::initial_state_jcm;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn product_state_is_separable() {
        let rho = DensityMatrix::basis_state(1, (2, 2)).unwrap();
        assert!(concurrence(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn bell_state_is_maximal() {
        let rho = initial_state_jcm(FRAC_PI_4).unwrap();
        assert!(spin_flip(rho.matrix()).approx_eq(rho.matrix(), 1e-15));
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn pure_state_at_pi_over_6() {
        let rho = initial_state_jcm(FRAC_PI_6).unwrap();
        let expected = (2.0 * FRAC_PI_6).sin();
        assert!((concurrence(&rho).unwrap() - expected).abs() < 1e-7);
        assert!((expected - 0.8660).abs() < 5e-5);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let rho = crate::models::initial_state_ohplus();
        assert!(concurrence(&rho).is_err());
    }
}
