//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::{ComplexMatrix, C64, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius mass falls below this fraction of ‖A‖_F.
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let violation = h.hermiticity_violation();
    if violation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { violation });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(h.dim());
    jacobi(&mut a, Some(&mut v));

    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending. Dimensions 1 and 2 use closed forms.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let violation = h.hermiticity_violation();
    if violation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { violation });
    }
    match h.dim() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![h[(0, 0)].re]),
        2 => {
            let (a, d) = (h[(0, 0)].re, h[(1, 1)].re);
            let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            Ok(vec![mean - radius, mean + radius])
        }
        _ => {
            let mut a = h.hermitian_part();
            jacobi(&mut a, None);
            let mut vals = a.diagonal_real();
            vals.sort_by(f64::total_cmp);
            Ok(vals)
        }
    }
}

/// `exp(-i H dt / ħ)` through the eigenbasis of `H`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, dt: f64, hbar: f64) -> Result<ComplexMatrix> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be > 0, got {hbar}")));
    }
    let decomposition = eigh(h)?;
    Ok(decomposition.reconstruct_with(|lambda| C64::from_polar(1.0, -lambda * dt / hbar)))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Diagonalizes `a` in place by two-sided complex Jacobi rotations,
/// accumulating the rotations into `v` when given.
fn jacobi(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = a.dim();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return;
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = D R with D = diag(.., e^{-iφ} at q, ..) making a_pq real.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                rotate(a, p, q, jpp, jpq, jqp, jqq);
                if let Some(v) = v.as_deref_mut() {
                    rotate_columns(v, p, q, jpp, jpq, jqp, jqq);
                }
            }
        }
    }
}

#[inline]
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, jpp: C64, jpq: C64, jqp: C64, jqq: C64) {
    for k in 0..m.dim() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
}

/// `a ← J† a J` restricted to rows and columns `p`, `q`.
#[inline]
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize, jpp: C64, jpq: C64, jqp: C64, jqq: C64) {
    rotate_columns(a, p, q, jpp, jpq, jqp, jqq);
    for k in 0..a.dim() {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
            .unwrap()
    }

    fn assert_valid(h: &ComplexMatrix, d: &EigenDecomposition) {
        let v = &d.eigenvectors;
        let vv = v.adjoint().matmul(v);
        assert!(vv.approx_eq(&ComplexMatrix::identity(h.dim()), 1e-12));
        let err = d.reconstruct().frobenius_distance(h);
        assert!(err <= 1e-10 * h.frobenius_norm().max(1.0), "reconstruction error {err}");
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_y_spectrum() {
        let d = eigh(&sigma_y()).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert_valid(&sigma_y(), &d);
    }

    #[test]
    fn diagonal_input_sorted() {
        let h = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]])
            .unwrap();
        let d = eigh(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_valid(&h, &d);
    }

    #[test]
    fn rabi_block_splitting() {
        let (omega, g) = (1e8, 1e6);
        let h = ComplexMatrix::from_real_rows(&[&[omega, g], &[g, omega]]).unwrap();
        let d = eigh(&h).unwrap();
        assert!((d.eigenvalues[0] - 0.99e8).abs() < 1e-6);
        assert!((d.eigenvalues[1] - 1.01e8).abs() < 1e-6);
        let vals = eigvalsh(&h).unwrap();
        assert!((vals[0] - 0.99e8).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        match eigh(&h) {
            Err(Error::NotHermitian { violation }) => assert_eq!(violation, 1.0),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        assert!(format!("{}", eigvalsh(&h).unwrap_err()).contains("1.000e0"));
    }

    #[test]
    fn zero_generator_gives_identity() {
        let u = unitary_from_hamiltonian(&ComplexMatrix::zeros(4), 0.37, 1.0).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(4), 1e-15));
    }

    #[test]
    fn rabi_half_transfer() {
        let (omega, g) = (1e8, 1e6);
        let h = ComplexMatrix::from_real_rows(&[&[omega, g], &[g, omega]]).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / g;
        let u = unitary_from_hamiltonian(&h, t, 1.0).unwrap();
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-9);
        let uu = u.adjoint().matmul(&u);
        assert!(uu.approx_eq(&ComplexMatrix::identity(2), 1e-10));
    }

    #[test]
    fn rejects_non_positive_dt() {
        assert!(unitary_from_hamiltonian(&ComplexMatrix::zeros(2), 0.0, 1.0).is_err());
    }

    #[test]
    fn two_by_two_closed_form_matches_jacobi() {
        let h = ComplexMatrix::from_row_major(
            2,
            vec![C64::new(0.3, 0.0), C64::new(0.1, -0.2), C64::new(0.1, 0.2), C64::new(-0.7, 0.0)],
        )
        .unwrap();
        let closed = eigvalsh(&h).unwrap();
        let full = eigh(&h).unwrap().eigenvalues;
        for (a, b) in closed.iter().zip(&full) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            ComplexMatrix::from_row_major(dim, v.into_iter().map(|(r, i)| C64::new(r, i)).collect())
                .unwrap()
                .hermitian_part()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reconstruction_dim4(h in hermitian(4)) {
            let d = eigh(&h).unwrap();
            prop_assert!(d.reconstruct().frobenius_distance(&h) <= 1e-10);
            let vv = d.eigenvectors.adjoint().matmul(&d.eigenvectors);
            prop_assert!(vv.approx_eq(&ComplexMatrix::identity(4), 1e-12));
        }

        #[test]
        fn reconstruction_dim8(h in hermitian(8)) {
            let d = eigh(&h).unwrap();
            prop_assert!(d.reconstruct().frobenius_distance(&h) <= 1e-10);
            let vals = eigvalsh(&h).unwrap();
            for (a, b) in vals.iter().zip(&d.eigenvalues) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn unitary_group_law(h in hermitian(4), t1 in 0.01f64..2.0, t2 in 0.01f64..2.0) {
            let u1 = unitary_from_hamiltonian(&h, t1, 1.0).unwrap();
            let u2 = unitary_from_hamiltonian(&h, t2, 1.0).unwrap();
            let u12 = unitary_from_hamiltonian(&h, t1 + t2, 1.0).unwrap();
            prop_assert!(u1.matmul(&u2).approx_eq(&u12, 1e-10));
        }
    }
}
