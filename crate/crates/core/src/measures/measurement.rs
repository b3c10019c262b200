//! Qubit von Neumann measurements and the post-measurement ensembles they induce.

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, ComplexMatrix, C64};
use crate::state::{DensityMatrix, Side};

use super::entropy::{clamp_spectrum, entropy_of_spectrum};

/// Outcome probabilities at or below this are treated as impossible.
pub const OUTCOME_CUTOFF: f64 = 1e-12;

/// Rank-1 projector pair `{|b₀⟩⟨b₀|, |b₁⟩⟨b₁|}` with
/// `|b₀⟩ = cos θ|0⟩ + sin θ e^{iφ}|1⟩` and `|b₁⟩ = sin θ e^{-iφ}|0⟩ - cos θ|1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
    pub vectors: [[C64; 2]; 2],
    pub projectors: [ComplexMatrix; 2],
}

pub fn projective_basis(theta: f64, phi: f64) -> MeasurementBasis {
    let (s, c) = theta.sin_cos();
    let phase = C64::from_polar(1.0, phi);
    let b0 = [C64::new(c, 0.0), phase * s];
    let b1 = [phase.conj() * s, C64::new(-c, 0.0)];
    let projector = |b: &[C64; 2]| ComplexMatrix::outer(b, b).expect("2-vectors");
    MeasurementBasis {
        theta,
        phi,
        projectors: [projector(&b0), projector(&b1)],
        vectors: [b0, b1],
    }
}

/// One measurement outcome: probability and the normalized conditional state
/// of the unmeasured factor (absent when the outcome is impossible).
#[derive(Clone, Debug)]
pub struct ConditionalOutcome {
    pub probability: f64,
    pub state: Option<DensityMatrix>,
}

fn require_qubit(rho: &DensityMatrix, measured: Side) -> Result<()> {
    let d = rho.side_dim(measured);
    if d != 2 {
        return Err(Error::Unsupported(format!(
            "projective measurement implemented for a 2-dimensional subsystem, side {measured} has dimension {d}"
        )));
    }
    Ok(())
}

/// `⟨b| ρ |b⟩` contracted on the measured qubit: the unnormalized
/// post-measurement state of the other factor. Its trace is the outcome probability.
pub(crate) fn project_out(rho: &ComplexMatrix, split: (usize, usize), measured: Side, b: &[C64; 2]) -> ComplexMatrix {
    let (da, db) = split;
    match measured {
        Side::A => ComplexMatrix::from_fn(db, |j, l| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..2 {
                for ip in 0..2 {
                    acc += b[i].conj() * rho[(i * db + j, ip * db + l)] * b[ip];
                }
            }
            acc
        }),
        Side::B => ComplexMatrix::from_fn(da, |i, ip| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                for l in 0..2 {
                    acc += b[j].conj() * rho[(i * 2 + j, ip * 2 + l)] * b[l];
                }
            }
            acc
        }),
    }
}

/// `{(p_k, ρ_k)}` for measuring `measured` in `basis`.
pub fn conditional_ensemble(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
    measured: Side,
) -> Result<Vec<ConditionalOutcome>> {
    require_qubit(rho, measured)?;
    basis
        .vectors
        .iter()
        .map(|b| {
            let m = project_out(rho.matrix(), rho.split(), measured, b).hermitian_part();
            let p = m.trace().re;
            if p <= OUTCOME_CUTOFF {
                return Ok(ConditionalOutcome {
                    probability: p.max(0.0),
                    state: None,
                });
            }
            let d = m.dim();
            let state = DensityMatrix::from_parts(m.scale_real(1.0 / p), (d, 1))?;
            Ok(ConditionalOutcome {
                probability: p,
                state: Some(state),
            })
        })
        .collect()
}

/// `Σ_k p_k S(ρ_k)` for the basis `(θ, φ)`. Hot path of the optimizer, so
/// the projection is done directly on the raw matrix.
pub(crate) fn conditional_entropy(
    rho: &ComplexMatrix,
    split: (usize, usize),
    measured: Side,
    theta: f64,
    phi: f64,
) -> Result<f64> {
    let basis = projective_basis(theta, phi);
    let mut total = 0.0;
    for b in &basis.vectors {
        let m = project_out(rho, split, measured, b).hermitian_part();
        let p = m.trace().re;
        if p <= OUTCOME_CUTOFF {
            continue;
        }
        // Clamp before normalizing: dividing by a small p would inflate rounding noise.
        let mut values = eigvalsh(&m)?;
        clamp_spectrum(&mut values)?;
        values.iter_mut().for_each(|v| *v /= p);
        total += p * entropy_of_spectrum(&values);
    }
    Ok(total)
}

pub(crate) fn check_measurable(rho: &DensityMatrix, measured: Side) -> Result<()> {
    require_qubit(rho, measured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ZERO};
    use crate::measures::von_neumann_entropy;
    use crate::models::initial_state_jcm;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn computational_basis() {
        let b = projective_basis(0.0, 0.0);
        assert!(b.projectors[0].approx_eq(&ComplexMatrix::basis_op(2, 0, 0), 1e-15));
        assert!(b.projectors[1].approx_eq(&ComplexMatrix::basis_op(2, 1, 1), 1e-15));
    }

    #[test]
    fn hadamard_basis() {
        let b = projective_basis(FRAC_PI_4, 0.0);
        let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let minus = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        assert!(b.projectors[0].approx_eq(&plus, 1e-15));
        assert!(b.projectors[1].approx_eq(&minus, 1e-15));
    }

    #[test]
    fn basis_completeness_and_orthogonality() {
        let b = projective_basis(FRAC_PI_6, FRAC_PI_3);
        let sum = &b.projectors[0] + &b.projectors[1];
        assert!(sum.approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let overlap: C64 = (0..2).map(|i| b.vectors[0][i].conj() * b.vectors[1][i]).sum();
        assert!(overlap.norm() < 1e-15);
        for p in &b.projectors {
            assert!(p.matmul(p).approx_eq(p, 1e-12));
            assert!(p.is_hermitian(1e-15));
        }
    }

    #[test]
    fn product_state_deterministic_outcome() {
        // |0⟩⟨0| ⊗ σ with σ a mixed qubit state
        let sigma = ComplexMatrix::from_row_major(
            2,
            vec![C64::new(0.7, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.3, 0.0)],
        )
        .unwrap();
        let rho = DensityMatrix::new(kron(&ComplexMatrix::basis_op(2, 0, 0), &sigma), (2, 2)).unwrap();
        let outcomes = conditional_ensemble(&rho, &projective_basis(0.0, 0.0), Side::A).unwrap();
        assert!((outcomes[0].probability - 1.0).abs() < 1e-15);
        assert!(outcomes[0].state.as_ref().unwrap().matrix().approx_eq(&sigma, 1e-15));
        assert!(outcomes[1].probability.abs() < 1e-15);
        assert!(outcomes[1].state.is_none());
    }

    #[test]
    fn bell_state_computational_basis() {
        let rho = initial_state_jcm(FRAC_PI_4).unwrap();
        let outcomes = conditional_ensemble(&rho, &projective_basis(0.0, 0.0), Side::A).unwrap();
        assert!((outcomes[0].probability - 0.5).abs() < 1e-15);
        assert!((outcomes[1].probability - 0.5).abs() < 1e-15);
        // photon 0 leaves the electron excited, photon 1 leaves it in the ground state
        let s0 = outcomes[0].state.as_ref().unwrap();
        let s1 = outcomes[1].state.as_ref().unwrap();
        assert!(s0.matrix().approx_eq(&ComplexMatrix::basis_op(2, 1, 1), 1e-15));
        assert!(s1.matrix().approx_eq(&ComplexMatrix::basis_op(2, 0, 0), 1e-15));
    }

    #[test]
    fn bell_state_hadamard_basis_gives_pure_conditionals() {
        let rho = initial_state_jcm(FRAC_PI_4).unwrap();
        let outcomes = conditional_ensemble(&rho, &projective_basis(FRAC_PI_4, 0.0), Side::A).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for o in &outcomes {
            assert!((o.probability - 0.5).abs() < 1e-15);
            let s = o.state.as_ref().unwrap();
            assert!(von_neumann_entropy(s).unwrap() < 1e-9);
        }
        for theta in [0.1, 0.5, 1.2] {
            for phi in [0.0, 2.0, 5.0] {
                let h = conditional_entropy(rho.matrix(), (2, 2), Side::A, theta, phi).unwrap();
                assert!(h.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn measuring_b_uses_second_factor() {
        // |0⟩_A ⊗ |+⟩_B measured on B in the Hadamard basis: outcome 0 certain.
        let s = FRAC_1_SQRT_2;
        let psi = [C64::new(s, 0.0), C64::new(s, 0.0), ZERO, ZERO];
        let rho = DensityMatrix::from_pure(&psi, (2, 2)).unwrap();
        let outcomes = conditional_ensemble(&rho, &projective_basis(FRAC_PI_4, 0.0), Side::B).unwrap();
        assert!((outcomes[0].probability - 1.0).abs() < 1e-15);
        let a = outcomes[0].state.as_ref().unwrap();
        assert!(a.matrix().approx_eq(&ComplexMatrix::basis_op(2, 0, 0), 1e-15));
    }

    #[test]
    fn rejects_four_dimensional_measured_side() {
        let rho = crate::models::initial_state_ohplus();
        assert!(conditional_ensemble(&rho, &projective_basis(0.0, 0.0), Side::B).is_err());
        assert!(conditional_ensemble(&rho, &projective_basis(0.0, 0.0), Side::A).is_ok());
    }
}
