//! Jaynes-Cummings and OH⁺ model systems.
//!
//! Both models truncate the cavity to photon numbers {0, 1}. Subsystem `A` is
//! always the photon; subsystem `B` is the electron (JCM) or the
//! (molecular orbital, nuclear configuration) pair (OH⁺).

use std::f64::consts::FRAC_PI_4;

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, ComplexMatrix, C64, ONE, ZERO};
use crate::state::DensityMatrix;

/// Coupling-to-frequency ratio above which the rotating-wave approximation is flagged.
pub const RWA_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ModelKind {
    Jcm,
    OhPlus,
}

#[derive(Clone, Debug)]
pub struct JumpOperator {
    pub operator: ComplexMatrix,
    /// s⁻¹
    pub rate: f64,
}

#[derive(Clone, Debug)]
pub struct ModelSystem {
    pub kind: ModelKind,
    pub hbar: f64,
    pub hamiltonian: ComplexMatrix,
    pub jumps: Vec<JumpOperator>,
    /// `(dA, dB)` with `A` the photon factor.
    pub split: (usize, usize),
    pub basis_labels: Vec<String>,
    /// Largest coupling constant in the Hamiltonian (energy units).
    pub max_coupling: f64,
}

impl ModelSystem {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Index of a ket label such as `"101"`.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis_labels.iter().position(|l| l == label)
    }
}

/// Binary labels for `factors` two-level factors, leftmost slowest.
pub fn basis_labels(factors: usize) -> Vec<String> {
    (0..1usize << factors)
        .map(|i| format!("{:0width$b}", i, width = factors))
        .collect()
}

pub fn label_to_index(label: &str) -> Option<usize> {
    if label.is_empty() || !label.chars().all(|c| c == '0' || c == '1') {
        return None;
    }
    usize::from_str_radix(label, 2).ok()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcmParams {
    pub hbar: f64,
    /// Shared atom/cavity frequency, s⁻¹.
    pub omega: f64,
    /// Coupling, energy units.
    pub g: f64,
    /// Photon leakage rate, s⁻¹.
    pub gamma: f64,
    /// Initial-state angle in [0, π/4].
    pub alpha: f64,
}

impl Default for JcmParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            omega: 1e8,
            g: 1e6,
            gamma: 0.0,
            alpha: 0.0,
        }
    }
}

impl JcmParams {
    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("omega", self.omega)?;
        non_negative("g", self.g)?;
        non_negative("gamma", self.gamma)?;
        check_alpha(self.alpha)
    }
}

/// Which nuclear configuration the bond-breaking operator ς_b raises into.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BondConvention {
    /// ς_b = |k=1⟩⟨k=0|: breaking moves the nuclei apart, the bound
    /// configuration k=0 carries ħω_b.
    #[default]
    BreakRaisesK,
    /// ς_b = |k=0⟩⟨k=1|.
    BreakLowersK,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OhPlusParams {
    pub hbar: f64,
    /// Shared cavity/electronic frequency, s⁻¹.
    pub omega: f64,
    /// Bond (phonon) frequency, s⁻¹.
    pub omega_b: f64,
    /// Bond coupling with the electron in the ground orbital.
    pub g_b0: f64,
    /// Bond coupling with the electron in the excited orbital.
    pub g_b1: f64,
    /// Field coupling with the nuclei close together (strong bond).
    pub g_a0: f64,
    /// Field coupling with the nuclei far apart (weak bond).
    pub g_a1: f64,
    /// Photon leakage rate, s⁻¹.
    pub gamma: f64,
    pub bond_convention: BondConvention,
}

impl Default for OhPlusParams {
    fn default() -> Self {
        let g_b0 = 1e4;
        let g_b1 = 100.0 * g_b0;
        let g_a1 = 2.0 * g_b1;
        let g_a0 = 100.0 * g_a1;
        Self {
            hbar: 1.0,
            omega: 1e9,
            omega_b: 1e8,
            g_b0,
            g_b1,
            g_a0,
            g_a1,
            gamma: g_a1,
            bond_convention: BondConvention::default(),
        }
    }
}

impl OhPlusParams {
    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("omega", self.omega)?;
        positive("omega_b", self.omega_b)?;
        for (name, v) in [
            ("g_b0", self.g_b0),
            ("g_b1", self.g_b1),
            ("g_a0", self.g_a0),
            ("g_a1", self.g_a1),
            ("gamma", self.gamma),
        ] {
            non_negative(name, v)?;
        }
        if self.g_b1 <= self.g_b0 {
            warn!(
                "OH+ coupling regime: expected g_b1 >> g_b0, got g_b1 = {} and g_b0 = {}",
                self.g_b1, self.g_b0
            );
        }
        if self.g_a0 <= self.g_a1 {
            warn!(
                "OH+ coupling regime: expected g_a0 >> g_a1, got g_a0 = {} and g_a1 = {}",
                self.g_a0, self.g_a1
            );
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    // Accept π/4 written with a few ulps of rounding.
    if (0.0..=FRAC_PI_4 + 1e-12).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in [0, pi/4], got {alpha}")))
    }
}

// Single-qubit building blocks.
fn lowering() -> ComplexMatrix {
    ComplexMatrix::basis_op(2, 0, 1)
}

fn raising() -> ComplexMatrix {
    ComplexMatrix::basis_op(2, 1, 0)
}

fn projector(level: usize) -> ComplexMatrix {
    ComplexMatrix::basis_op(2, level, level)
}

pub fn build_jcm(p: &JcmParams) -> Result<ModelSystem> {
    p.validate()?;
    let id = ComplexMatrix::identity(2);
    let a = kron_all(&[&lowering(), &id]);
    let sigma = kron_all(&[&id, &lowering()]);
    let a_dag = a.adjoint();
    let sigma_dag = sigma.adjoint();

    let free = &a_dag.matmul(&a) + &sigma_dag.matmul(&sigma);
    let exchange = &a_dag.matmul(&sigma) + &a.matmul(&sigma_dag);
    let hamiltonian = &free.scale_real(p.hbar * p.omega) + &exchange.scale_real(p.g);

    Ok(ModelSystem {
        kind: ModelKind::Jcm,
        hbar: p.hbar,
        hamiltonian,
        jumps: vec![JumpOperator {
            operator: a,
            rate: p.gamma,
        }],
        split: (2, 2),
        basis_labels: basis_labels(2),
        max_coupling: p.g,
    })
}

pub fn build_ohplus(p: &OhPlusParams) -> Result<ModelSystem> {
    p.validate()?;
    let id = ComplexMatrix::identity(2);
    let a = kron_all(&[&lowering(), &id, &id]);
    let sigma_a = kron_all(&[&id, &lowering(), &id]);
    let bond_local = match p.bond_convention {
        BondConvention::BreakRaisesK => raising(),
        BondConvention::BreakLowersK => lowering(),
    };
    let sigma_b = kron_all(&[&id, &id, &bond_local]);

    let mut hamiltonian = a.adjoint().matmul(&a).scale_real(p.hbar * p.omega);
    hamiltonian += &sigma_b.adjoint().matmul(&sigma_b).scale_real(p.hbar * p.omega_b);
    hamiltonian += &sigma_a.adjoint().matmul(&sigma_a).scale_real(p.hbar * p.omega);

    // Bond formation/breaking, strength conditioned on the orbital l.
    let bond_flip = &bond_local + &bond_local.adjoint();
    for (level, g_b) in [(0, p.g_b0), (1, p.g_b1)] {
        hamiltonian += &kron_all(&[&id, &projector(level), &bond_flip]).scale_real(g_b);
    }
    // Photon exchange, strength conditioned on the nuclear configuration k.
    let absorb = kron_all(&[&lowering(), &raising()]);
    let exchange = &absorb + &absorb.adjoint();
    for (config, g_a) in [(0, p.g_a0), (1, p.g_a1)] {
        hamiltonian += &crate::linalg::kron(&exchange, &projector(config)).scale_real(g_a);
    }

    let max_coupling = [p.g_b0, p.g_b1, p.g_a0, p.g_a1]
        .into_iter()
        .fold(0.0, f64::max);

    Ok(ModelSystem {
        kind: ModelKind::OhPlus,
        hbar: p.hbar,
        hamiltonian,
        jumps: vec![JumpOperator {
            operator: a,
            rate: p.gamma,
        }],
        split: (2, 4),
        basis_labels: basis_labels(3),
        max_coupling,
    })
}

/// `cos α |01⟩ + sin α |10⟩`.
pub fn initial_state_jcm(alpha: f64) -> Result<DensityMatrix> {
    check_alpha(alpha)?;
    let psi = [ZERO, C64::new(alpha.cos(), 0.0), C64::new(alpha.sin(), 0.0), ZERO];
    DensityMatrix::from_pure(&psi, (2, 2))
}

/// `|101⟩`: one cavity photon, electron in the ground orbital, nuclei apart.
pub fn initial_state_ohplus() -> DensityMatrix {
    let mut psi = [ZERO; 8];
    psi[0b101] = ONE;
    DensityMatrix::from_pure(&psi, (2, 4)).expect("basis projector is a valid state")
}

#[derive(Clone, Debug, PartialEq)]
pub struct RwaRatio {
    pub coupling: &'static str,
    pub frequency: &'static str,
    pub ratio: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RwaReport {
    pub ratios: Vec<RwaRatio>,
}

impl RwaReport {
    pub fn is_valid(&self) -> bool {
        self.ratios.iter().all(|r| !r.flagged)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &RwaRatio> {
        self.ratios.iter().filter(|r| r.flagged)
    }
}

/// Model parameters accepted by [`check_rwa`].
#[derive(Clone, Copy, Debug)]
pub enum ModelParams {
    Jcm(JcmParams),
    OhPlus(OhPlusParams),
}

/// Computes g/(ħω) for each coupling against the frequency it dresses and
/// flags ratios above [`RWA_THRESHOLD`]. Flags are logged, never fatal.
pub fn check_rwa(params: &ModelParams) -> RwaReport {
    let entry = |coupling, frequency, g: f64, hbar: f64, omega: f64| {
        let ratio = g / (hbar * omega);
        RwaRatio {
            coupling,
            frequency,
            ratio,
            flagged: ratio > RWA_THRESHOLD,
        }
    };
    let ratios = match params {
        ModelParams::Jcm(p) => vec![entry("g", "omega", p.g, p.hbar, p.omega)],
        ModelParams::OhPlus(p) => vec![
            entry("g_a0", "omega", p.g_a0, p.hbar, p.omega),
            entry("g_a1", "omega", p.g_a1, p.hbar, p.omega),
            entry("g_b0", "omega_b", p.g_b0, p.hbar, p.omega_b),
            entry("g_b1", "omega_b", p.g_b1, p.hbar, p.omega_b),
        ],
    };
    for r in ratios.iter().filter(|r| r.flagged) {
        warn!(
            "RWA validity: {}/(hbar*{}) = {:.3} exceeds {}",
            r.coupling, r.frequency, r.ratio, RWA_THRESHOLD
        );
    }
    RwaReport { ratios }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;
    use crate::state::Side;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_6, PI};

    fn idx(label: &str) -> usize {
        label_to_index(label).unwrap()
    }

    /// Independent assembly of the JCM Hamiltonian by enumerating basis kets.
    fn jcm_by_enumeration(p: &JcmParams) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(4);
        for photon in 0..2 {
            for electron in 0..2 {
                let i = photon * 2 + electron;
                h[(i, i)] = C64::new(p.hbar * p.omega * (photon + electron) as f64, 0.0);
            }
        }
        h[(idx("10"), idx("01"))] = C64::new(p.g, 0.0);
        h[(idx("01"), idx("10"))] = C64::new(p.g, 0.0);
        h
    }

    #[test]
    fn jcm_matrix_elements() {
        let p = JcmParams::default();
        let m = build_jcm(&p).unwrap();
        let h = &m.hamiltonian;
        assert_eq!(h[(idx("01"), idx("10"))], C64::new(1e6, 0.0));
        assert_eq!(h[(idx("10"), idx("01"))], C64::new(1e6, 0.0));
        assert_eq!(h[(idx("00"), idx("00"))], ZERO);
        assert_eq!(h[(idx("11"), idx("11"))], C64::new(2e8, 0.0));
        assert_eq!(h[(idx("01"), idx("01"))], C64::new(1e8, 0.0));
        assert_eq!(h, &jcm_by_enumeration(&p));
        assert_eq!(m.basis_labels, vec!["00", "01", "10", "11"]);
        assert_eq!(m.split, (2, 2));
    }

    /// Independent OH⁺ assembly: walk every basis ket and add the transitions
    /// each term can cause.
    fn ohplus_by_enumeration(p: &OhPlusParams) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(8);
        let at = |ph: usize, l: usize, k: usize| ph * 4 + l * 2 + k;
        for ph in 0..2 {
            for l in 0..2 {
                for k in 0..2 {
                    let i = at(ph, l, k);
                    let bound = if k == 0 { 1.0 } else { 0.0 };
                    h[(i, i)] = C64::new(
                        p.hbar * (p.omega * ph as f64 + p.omega_b * bound + p.omega * l as f64),
                        0.0,
                    );
                    let g_b = if l == 0 { p.g_b0 } else { p.g_b1 };
                    h[(at(ph, l, 1 - k), i)] += C64::new(g_b, 0.0);
                    let g_a = if k == 0 { p.g_a0 } else { p.g_a1 };
                    if ph == 1 && l == 0 {
                        h[(at(0, 1, k), i)] += C64::new(g_a, 0.0);
                    }
                    if ph == 0 && l == 1 {
                        h[(at(1, 0, k), i)] += C64::new(g_a, 0.0);
                    }
                }
            }
        }
        h
    }

    #[test]
    fn ohplus_matrix_elements() {
        let p = OhPlusParams::default();
        let m = build_ohplus(&p).unwrap();
        let h = &m.hamiltonian;
        assert_eq!(h.hermiticity_violation(), 0.0);
        assert_eq!(h[(idx("010"), idx("100"))].re, p.g_a0);
        assert_eq!(h[(idx("011"), idx("101"))].re, p.g_a1);
        assert_eq!(h[(idx("111"), idx("110"))].re, p.g_b1);
        assert_eq!(h[(idx("101"), idx("100"))].re, p.g_b0);
        assert!(h.approx_eq(&ohplus_by_enumeration(&p), 1e-6));
        assert_eq!(m.max_coupling, p.g_a0);
        assert_eq!(m.split, (2, 4));
    }

    #[test]
    fn ohplus_alternate_bond_convention_moves_bond_energy() {
        let p = OhPlusParams {
            bond_convention: BondConvention::BreakLowersK,
            ..OhPlusParams::default()
        };
        let h = build_ohplus(&p).unwrap().hamiltonian;
        assert_eq!(h[(idx("001"), idx("001"))].re, p.omega_b);
        assert_eq!(h[(idx("000"), idx("000"))].re, 0.0);
        assert_eq!(h[(idx("101"), idx("100"))].re, p.g_b0);
    }

    #[test]
    fn jcm_conserves_excitation_number() {
        let m = build_jcm(&JcmParams { g: 3.7e5, ..JcmParams::default() }).unwrap();
        let n = ComplexMatrix::from_diagonal(&[ZERO, ONE, ONE, C64::new(2.0, 0.0)]);
        assert_eq!(m.hamiltonian.commutator(&n), ComplexMatrix::zeros(4));
    }

    #[test]
    fn jump_annihilates_photon_vacuum() {
        for m in [
            build_jcm(&JcmParams::default()).unwrap(),
            build_ohplus(&OhPlusParams::default()).unwrap(),
        ] {
            let a = &m.jumps[0].operator;
            let d_b = m.split.1;
            for b in 0..d_b {
                let mut ket = vec![ZERO; m.dim()];
                ket[b] = ONE;
                assert!(a.apply(&ket).iter().all(|z| *z == ZERO));
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        for n in 1..=3 {
            for (i, label) in basis_labels(n).iter().enumerate() {
                assert_eq!(label_to_index(label), Some(i));
            }
        }
        assert_eq!(label_to_index("1x"), None);
    }

    #[test]
    fn jcm_initial_states() {
        let rho = initial_state_jcm(0.0).unwrap();
        assert_eq!(rho.matrix(), &ComplexMatrix::basis_op(4, 1, 1));

        let bell = initial_state_jcm(FRAC_PI_4).unwrap();
        for i in [1, 2] {
            for j in [1, 2] {
                assert!((bell.matrix()[(i, j)].re - 0.5).abs() < 1e-15);
            }
        }

        let rho = initial_state_jcm(FRAC_PI_6).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(rho.matrix().matmul(rho.matrix()).approx_eq(rho.matrix(), 1e-15));

        assert!(initial_state_jcm(1.0).is_err());
        assert!(initial_state_jcm(-0.1).is_err());
    }

    #[test]
    fn ohplus_initial_state() {
        let rho = initial_state_ohplus();
        assert_eq!(rho.matrix()[(5, 5)], ONE);
        assert_eq!(rho.matrix().as_slice().iter().filter(|z| **z != ZERO).count(), 1);
        let photon = partial_trace(rho.matrix(), (2, 4), Side::A).unwrap();
        assert_eq!(photon, ComplexMatrix::basis_op(2, 1, 1));
    }

    #[test]
    fn rwa_checks() {
        let jcm = check_rwa(&ModelParams::Jcm(JcmParams::default()));
        assert!(jcm.is_valid());
        assert!((jcm.ratios[0].ratio - 0.01).abs() < 1e-15);

        let strong = check_rwa(&ModelParams::Jcm(JcmParams { g: 1e8, ..JcmParams::default() }));
        assert!(!strong.is_valid());

        let oh = check_rwa(&ModelParams::OhPlus(OhPlusParams::default()));
        assert!(!oh.is_valid());
        let flagged: Vec<_> = oh.warnings().map(|r| r.coupling).collect();
        assert_eq!(flagged, vec!["g_a0"]);
        assert!((oh.ratios[0].ratio - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(build_jcm(&JcmParams { omega: 0.0, ..JcmParams::default() }).is_err());
        assert!(build_jcm(&JcmParams { gamma: -1.0, ..JcmParams::default() }).is_err());
        assert!(build_ohplus(&OhPlusParams { g_a1: -1.0, ..OhPlusParams::default() }).is_err());
    }

    proptest! {
        #[test]
        fn hamiltonians_hermitian(
            g in 0.0f64..1e7, omega in 1e6f64..1e9,
            gb0 in 0.0f64..1e6, gb1 in 0.0f64..1e6, ga0 in 0.0f64..1e8, ga1 in 0.0f64..1e8,
        ) {
            let jcm = build_jcm(&JcmParams { g, omega, ..JcmParams::default() }).unwrap();
            prop_assert!(jcm.hamiltonian.hermiticity_violation() <= 1e-12);
            let oh = build_ohplus(&OhPlusParams {
                g_b0: gb0, g_b1: gb1, g_a0: ga0, g_a1: ga1, omega, ..OhPlusParams::default()
            }).unwrap();
            prop_assert!(oh.hamiltonian.hermiticity_violation() <= 1e-12);
        }

        #[test]
        fn jcm_alpha_states_are_pure(alpha in 0.0f64..(PI / 4.0)) {
            let rho = initial_state_jcm(alpha).unwrap();
            prop_assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
    }
}
