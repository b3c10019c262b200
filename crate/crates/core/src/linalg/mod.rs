//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Matrices are square and row-major. All tensor products follow one global
//! convention: the leftmost factor is the slowest-varying index, so a ket
//! `|p l k⟩` has flat index `(p * dl + l) * dk + k`.

mod eigh;

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::state::Side;

pub use eigh::{eigh, eigvalsh, unitary_from_hamiltonian, EigenDecomposition};

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for Hermiticity checks (max elementwise |h - h†|).
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::from_row_major",
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "ComplexMatrix::from_real_rows",
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::outer",
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    /// `|i⟩⟨j|` in a `dim`-dimensional space.
    pub fn basis_op(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise |m - m†|.
    pub fn hermiticity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Elementwise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "frobenius_distance: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `self · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "apply: dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Column-stacked vectorization `vec(m)`.
    pub fn vectorize(&self) -> Vec<C64> {
        let n = self.dim;
        let mut v = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`vectorize`](Self::vectorize).
    pub fn unvectorize(v: &[C64]) -> Result<Self> {
        let n = (v.len() as f64).sqrt().round() as usize;
        if n * n != v.len() {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::unvectorize",
                expected: n * n,
                found: v.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| v[j * n + i]))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "add_assign: dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Kronecker product `a ⊗ b`, with the `a` index varying slowest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, leftmost slowest.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Reduces a bipartite operator on `dA ⊗ dB` to the factor named by `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Side) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da * db != m.dim {
        return Err(Error::DimensionMismatch {
            context: "partial_trace",
            expected: da * db,
            found: m.dim,
        });
    }
    Ok(match keep {
        Side::A => ComplexMatrix::from_fn(da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Side::B => ComplexMatrix::from_fn(db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(
            2,
            vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
        )
        .unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma_y_antidiagonal() {
        let yy = kron(&sigma_y(), &sigma_y());
        // top-right to bottom-left: (0,3), (1,2), (2,1), (3,0)
        let expected = [-1.0, 1.0, 1.0, -1.0];
        for (r, want) in expected.iter().enumerate() {
            assert_eq!(yy[(r, 3 - r)], C64::new(*want, 0.0));
        }
        for i in 0..4 {
            for j in 0..4 {
                if i + j != 3 {
                    assert_eq!(yy[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn kron_raising_on_first_factor() {
        let op = kron(&ComplexMatrix::basis_op(2, 1, 0), &ComplexMatrix::identity(2));
        let out = op.apply(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(out, vec![ZERO, ZERO, ONE, ZERO]);
    }

    fn ket(dim: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; dim];
        v[i] = ONE;
        v
    }

    #[test]
    fn partial_trace_product_state() {
        let k = ket(4, 1); // |01⟩
        let rho = ComplexMatrix::outer(&k, &k).unwrap();
        let a = partial_trace(&rho, (2, 2), Side::A).unwrap();
        assert_eq!(a, ComplexMatrix::basis_op(2, 0, 0));
        let b = partial_trace(&rho, (2, 2), Side::B).unwrap();
        assert_eq!(b, ComplexMatrix::basis_op(2, 1, 1));
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![ZERO, C64::new(s, 0.0), C64::new(s, 0.0), ZERO];
        let rho = ComplexMatrix::outer(&psi, &psi).unwrap();
        let a = partial_trace(&rho, (2, 2), Side::A).unwrap();
        assert!(a.approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_ohplus_layout() {
        let k = ket(8, 5); // |101⟩
        let rho = ComplexMatrix::outer(&k, &k).unwrap();
        let b = partial_trace(&rho, (2, 4), Side::B).unwrap();
        assert_eq!(b, ComplexMatrix::basis_op(4, 1, 1)); // |01⟩ on (mol, nuclear)
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, (2, 3), Side::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vectorize_round_trip_is_column_major() {
        let m = ComplexMatrix::from_fn(3, |i, j| C64::new(i as f64, j as f64));
        let v = m.vectorize();
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(ComplexMatrix::unvectorize(&v).unwrap(), m);
    }

    fn int_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-4i32..=4, -4i32..=4), dim * dim).prop_map(move |v| {
            ComplexMatrix::from_row_major(
                dim,
                v.into_iter().map(|(r, i)| C64::new(r as f64, i as f64)).collect(),
            )
            .unwrap()
        })
    }

    fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            let m = ComplexMatrix::from_row_major(
                dim,
                v.into_iter().map(|(r, i)| C64::new(r, i)).collect(),
            )
            .unwrap();
            m.hermitian_part()
        })
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in int_matrix(2), b in int_matrix(2), c in int_matrix(3)) {
            prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
        }

        #[test]
        fn partial_trace_of_product(x in hermitian(2), y in hermitian(4)) {
            let xy = kron(&x, &y);
            let keep_a = partial_trace(&xy, (2, 4), Side::A).unwrap();
            let keep_b = partial_trace(&xy, (2, 4), Side::B).unwrap();
            prop_assert!(keep_a.approx_eq(&x.scale(y.trace()), 1e-12));
            prop_assert!(keep_b.approx_eq(&y.scale(x.trace()), 1e-12));
        }
    }
}
