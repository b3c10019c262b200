//! Entropies and bipartite correlation measures, in bits.
//!
//! For a state on `A ⊗ B` and a measured qubit side `M` with unmeasured side `U`:
//!
//! - mutual information `I = S(A) + S(B) - S(AB)`
//! - classical correlation `J = S(U) - min_{θ,φ} Σ_k p_k S(ρ_k)`
//! - discord `D = I - J`
//!
//! With `M = A` this is `J(B:A)` and `D(B:A)`.

mod concurrence;
mod entropy;
mod measurement;
mod optimize;

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, Side};

pub use concurrence::{concurrence, spin_flip};
pub use entropy::{entropy_of_spectrum, von_neumann_entropy, EIGEN_CLAMP_TOL, ENTROPY_CUTOFF};
pub use measurement::{
    conditional_ensemble, projective_basis, ConditionalOutcome, MeasurementBasis, OUTCOME_CUTOFF,
};
pub use optimize::{BasisOptimizer, OptimizedBasis};

/// Negative discord down to this magnitude is optimizer noise and clamps to zero.
pub const DISCORD_CLAMP_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CorrelationReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    /// Two-qubit states only.
    pub concurrence: Option<f64>,
    pub mutual_info: f64,
    pub classical_corr: f64,
    pub discord: f64,
    /// `(θ, φ)` of the optimal measurement.
    pub argmax_basis: (f64, f64),
}

impl CorrelationReport {
    /// Checks the internal consistency relations between the fields.
    pub fn check_invariants(&self, measured: Side) -> Result<()> {
        let fail = |what: String| Err(Error::InvalidState(format!("correlation report: {what}")));
        let mi = self.s_a + self.s_b - self.s_ab;
        if (self.mutual_info - mi).abs() > 1e-9 {
            return fail(format!("I = {} but S_A + S_B - S_AB = {mi}", self.mutual_info));
        }
        if (self.discord - (self.mutual_info - self.classical_corr)).abs() > 1e-9 {
            return fail(format!("D = {} but I - J = {}", self.discord, self.mutual_info - self.classical_corr));
        }
        let s_measured = match measured {
            Side::A => self.s_a,
            Side::B => self.s_b,
        };
        if self.discord < -DISCORD_CLAMP_TOL || self.discord > s_measured + 1e-6 {
            return fail(format!("D = {} outside [0, S(measured) = {s_measured}]", self.discord));
        }
        Ok(())
    }
}

pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s_a = von_neumann_entropy(&rho.reduced(Side::A)?)?;
    let s_b = von_neumann_entropy(&rho.reduced(Side::B)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    Ok(s_a + s_b - s_ab)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalCorrelation {
    pub bits: f64,
    pub theta: f64,
    pub phi: f64,
    pub min_conditional_entropy: f64,
    pub grid_conditional_entropy: f64,
}

/// Classical correlation extracted by measuring `measured`, with the default optimizer.
pub fn classical_correlation(rho: &DensityMatrix, measured: Side) -> Result<ClassicalCorrelation> {
    classical_correlation_with(rho, measured, &BasisOptimizer::default())
}

pub fn classical_correlation_with(
    rho: &DensityMatrix,
    measured: Side,
    optimizer: &BasisOptimizer,
) -> Result<ClassicalCorrelation> {
    measurement::check_measurable(rho, measured)?;
    let s_unmeasured = von_neumann_entropy(&rho.reduced(measured.other())?)?;
    let matrix = rho.matrix();
    let split = rho.split();
    let best = optimizer.minimize(|theta, phi| {
        measurement::conditional_entropy(matrix, split, measured, theta, phi)
    })?;
    Ok(ClassicalCorrelation {
        bits: s_unmeasured - best.value,
        theta: best.theta,
        phi: best.phi,
        min_conditional_entropy: best.value,
        grid_conditional_entropy: best.grid_value,
    })
}

/// Full correlation report with discord for a measurement on `measured`.
pub fn discord(rho: &DensityMatrix, measured: Side) -> Result<CorrelationReport> {
    discord_with(rho, measured, &BasisOptimizer::default())
}

pub fn discord_with(rho: &DensityMatrix, measured: Side, optimizer: &BasisOptimizer) -> Result<CorrelationReport> {
    let s_a = von_neumann_entropy(&rho.reduced(Side::A)?)?;
    let s_b = von_neumann_entropy(&rho.reduced(Side::B)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    let mutual_info = s_a + s_b - s_ab;
    let cc = classical_correlation_with(rho, measured, optimizer)?;
    let mut classical_corr = cc.bits;
    let mut d = mutual_info - classical_corr;
    if d < 0.0 {
        if d < -DISCORD_CLAMP_TOL {
            return Err(Error::InvalidState(format!("discord {d:.3e} is negative beyond optimizer noise")));
        }
        d = 0.0;
        classical_corr = mutual_info;
    }
    let concurrence = if rho.split() == (2, 2) {
        Some(concurrence(rho)?)
    } else {
        None
    };
    Ok(CorrelationReport {
        s_a,
        s_b,
        s_ab,
        concurrence,
        mutual_info,
        classical_corr,
        discord: d,
        argmax_basis: (cc.theta, cc.phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, unitary_from_hamiltonian, ComplexMatrix, C64};
    use crate::models::initial_state_jcm;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn bell() -> DensityMatrix {
        initial_state_jcm(FRAC_PI_4).unwrap()
    }

    fn classical_mixture() -> DensityMatrix {
        let m = &ComplexMatrix::basis_op(4, 0, 0).scale_real(0.5) + &ComplexMatrix::basis_op(4, 3, 3).scale_real(0.5);
        DensityMatrix::new(m, (2, 2)).unwrap()
    }

    fn product() -> DensityMatrix {
        let a = ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.9, 0.0], &[0.0, 0.1]]).unwrap();
        DensityMatrix::new(kron(&a, &b), (2, 2)).unwrap()
    }

    #[test]
    fn mutual_information_cases() {
        assert!(mutual_information(&product()).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell()).unwrap() - 2.0).abs() < 1e-9);
        let mixed = DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), (2, 2)).unwrap();
        assert!(mutual_information(&mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn classical_correlation_cases() {
        assert!(classical_correlation(&product(), Side::A).unwrap().bits.abs() < 1e-9);
        assert!((classical_correlation(&bell(), Side::A).unwrap().bits - 1.0).abs() < 1e-9);
        let cc = classical_correlation(&classical_mixture(), Side::A).unwrap();
        assert!((cc.bits - 1.0).abs() < 1e-9);
        assert!(cc.theta.abs() < 1e-9 || (cc.theta - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn discord_cases() {
        let r = discord(&classical_mixture(), Side::A).unwrap();
        assert!(r.discord.abs() < 1e-6);

        let r = discord(&bell(), Side::A).unwrap();
        assert!((r.discord - 1.0).abs() < 1e-6);
        assert!((r.s_a - 1.0).abs() < 1e-9);
        assert!((r.concurrence.unwrap() - 1.0).abs() < 1e-6);
        r.check_invariants(Side::A).unwrap();
    }

    #[test]
    fn pure_state_discord_equals_entanglement_entropy() {
        for k in 0..=12 {
            let alpha = FRAC_PI_4 * k as f64 / 12.0;
            let rho = initial_state_jcm(alpha).unwrap();
            // Schmidt coefficients are cos α, sin α.
            let (c2, s2) = (alpha.cos().powi(2), alpha.sin().powi(2));
            let e = entropy_of_spectrum(&[c2, s2]);
            for side in [Side::A, Side::B] {
                let r = discord(&rho, side).unwrap();
                assert!((r.discord - e).abs() < 1e-6, "alpha {alpha}: {} vs {e}", r.discord);
            }
        }
    }

    #[test]
    fn ohplus_discord_requires_qubit_side() {
        let rho = crate::models::initial_state_ohplus();
        let r = discord(&rho, Side::A).unwrap();
        assert!(r.concurrence.is_none());
        assert!(r.discord.abs() < 1e-9);
        assert!(matches!(discord(&rho, Side::B), Err(Error::Unsupported(_))));
    }

    fn random_state() -> impl Strategy<Value = DensityMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_map(|raw| {
            let g = ComplexMatrix::from_row_major(4, raw.into_iter().map(|(r, i)| C64::new(r, i)).collect())
                .unwrap();
            let m = g.matmul(&g.adjoint());
            let tr = m.trace();
            DensityMatrix::new(m.scale(tr.inv()).hermitian_part(), (2, 2)).unwrap()
        })
    }

    fn random_pure() -> impl Strategy<Value = DensityMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4).prop_map(|raw| {
            let mut psi: Vec<C64> = raw.into_iter().map(|(r, i)| C64::new(r, i)).collect();
            let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-6);
            psi.iter_mut().for_each(|z| *z /= n);
            DensityMatrix::from_pure(&psi, (2, 2)).unwrap()
        })
    }

    fn random_local_unitary() -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec(-2.0f64..2.0, 8).prop_map(|v| {
            let h = |w: &[f64]| {
                ComplexMatrix::from_row_major(
                    2,
                    vec![C64::new(w[0], 0.0), C64::new(w[1], w[2]), C64::new(w[1], -w[2]), C64::new(w[3], 0.0)],
                )
                .unwrap()
            };
            let ua = unitary_from_hamiltonian(&h(&v[..4]), 1.0, 1.0).unwrap();
            let ub = unitary_from_hamiltonian(&h(&v[4..]), 1.0, 1.0).unwrap();
            kron(&ua, &ub)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn entropy_is_unitarily_invariant(rho in random_state(), u in random_local_unitary(), v in random_local_unitary()) {
            let w = u.matmul(&v);
            let rotated = DensityMatrix::new(w.matmul(rho.matrix()).matmul(&w.adjoint()).hermitian_part(), (2, 2)).unwrap();
            let s0 = von_neumann_entropy(&rho).unwrap();
            let s1 = von_neumann_entropy(&rotated).unwrap();
            prop_assert!((s0 - s1).abs() < 1e-9);
        }

        #[test]
        fn pure_states_have_equal_marginal_entropies(rho in random_pure()) {
            let sa = von_neumann_entropy(&rho.reduced(Side::A).unwrap()).unwrap();
            let sb = von_neumann_entropy(&rho.reduced(Side::B).unwrap()).unwrap();
            prop_assert!((sa - sb).abs() < 1e-9);
        }

        #[test]
        fn concurrence_local_unitary_invariance(rho in random_state(), u in random_local_unitary()) {
            let rotated = DensityMatrix::new(u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part(), (2, 2)).unwrap();
            let c0 = concurrence(&rho).unwrap();
            let c1 = concurrence(&rotated).unwrap();
            prop_assert!((c0 - c1).abs() < 1e-8, "{} vs {}", c0, c1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn discord_bounds(rho in random_state()) {
            for side in [Side::A, Side::B] {
                let r = discord(&rho, side).unwrap();
                prop_assert!(r.classical_corr >= -1e-9);
                prop_assert!(r.classical_corr <= r.mutual_info + 1e-9);
                r.check_invariants(side).unwrap();
            }
        }

        #[test]
        fn refinement_never_increases_objective(rho in random_state()) {
            let cc = classical_correlation(&rho, Side::A).unwrap();
            prop_assert!(cc.min_conditional_entropy <= cc.grid_conditional_entropy);
        }

        #[test]
        fn pure_state_discord_symmetric(rho in random_pure()) {
            let ab = discord(&rho, Side::A).unwrap();
            let ba = discord(&rho, Side::B).unwrap();
            prop_assert!((ab.discord - ba.discord).abs() < 1e-6);
            prop_assert!((ab.discord - ab.s_a).abs() < 1e-6);
        }
    }
}
