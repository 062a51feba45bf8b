//! Dense complex matrix kernel for dimensions 2..=5.
//!
//! Everything downstream (states, observables, correlators) is built on
//! [`CMatrix`] / [`CVector`] and the four operations here: Hermitian
//! eigendecomposition, unitary evolution, anticommutators and expectation
//! values. Matrix exponentials are computed through the eigendecomposition
//! only; at these sizes that is exact to rounding and needs no series.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance demanded of eigendecomposition inputs (max norm).
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Kernel tolerance: reconstruction, unitarity, residuals (max norm).
pub const KERNEL_TOL: f64 = 1e-10;

/// Square complex matrix of dimension 2..=5.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<C64>,
}

/// Complex column vector (kets).
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    inner: DVector<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    /// Build from a row-major slice of length dim*dim.
    pub fn from_row_slice(dim: usize, data: &[C64]) -> Self {
        Self {
            inner: DMatrix::from_row_slice(dim, dim, data),
        }
    }

    /// Build from real row-major entries.
    pub fn from_real_rows(dim: usize, data: &[f64]) -> Self {
        let cd: Vec<C64> = data.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_slice(dim, &cd)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let d = entries.len();
        Self::from_fn(d, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.inner[(i, j)] = v;
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            inner: &self.inner * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner - &other.inner,
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            inner: &self.inner * &other.inner,
        }
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        CVector {
            inner: &self.inner * &v.inner,
        }
    }

    /// Max-norm deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Max-norm of the elementwise difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        (&self.inner - &other.inner)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// |a><b| outer product.
    pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
        CMatrix {
            inner: &a.inner * b.inner.adjoint(),
        }
    }

    pub(crate) fn from_dmatrix(m: DMatrix<C64>) -> Self {
        Self { inner: m }
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> CVector {
        CVector {
            inner: self.inner.column(j).into_owned(),
        }
    }
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: DVector::zeros(dim),
        }
    }

    /// Computational basis ket |index> (0-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { inner: v }
    }

    pub fn from_slice(data: &[C64]) -> Self {
        Self {
            inner: DVector::from_column_slice(data),
        }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self {
            inner: DVector::from_iterator(data.len(), data.iter().map(|&x| C64::new(x, 0.0))),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn get(&self, i: usize) -> C64 {
        self.inner[i]
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.inner[i] = v;
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// <self|other> with the conjugation on self.
    pub fn dot(&self, other: &CVector) -> C64 {
        self.inner.dotc(&other.inner)
    }

    pub fn scale(&self, s: C64) -> CVector {
        CVector {
            inner: &self.inner * s,
        }
    }

    pub fn add(&self, other: &CVector) -> CVector {
        CVector {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        CVector {
            inner: &self.inner - &other.inner,
        }
    }

    pub fn normalized(&self) -> CVector {
        self.scale(C64::new(1.0 / self.norm(), 0.0))
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        (&self.inner - &other.inner)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.inner.iter()
    }
}

/// Serialized matrix form shared by states, observables and configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let d = m.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| m.get(i, j).re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| m.get(i, j).im).collect())
            .collect();
        Self { dim: d, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let d = self.dim;
        if !(2..=5).contains(&d) {
            return Err(Error::BadDim { dim: d });
        }
        if self.re.len() != d
            || self.im.len() != d
            || self.re.iter().any(|r| r.len() != d)
            || self.im.iter().any(|r| r.len() != d)
        {
            return Err(Error::InvalidSpec {
                reason: format!("matrix entries do not form a {d}x{d} grid"),
            });
        }
        Ok(CMatrix::from_fn(d, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues sorted ascending; eigenvector columns orthonormal, each with
/// its first nonzero component made real-positive so the output is
/// reproducible.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k)
    }

    /// V diag(f(lambda)) V^dagger.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = self.dim();
        let v = self.eigenvectors.as_dmatrix();
        let diag = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                f(self.eigenvalues[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        CMatrix::from_dmatrix(v * diag * v.adjoint())
    }
}

/// Hermitian eigendecomposition with deterministic ordering.
pub fn herm_eig(a: &CMatrix) -> Result<EigenSystem> {
    let dev = a.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let se = a.as_dmatrix().clone().symmetric_eigen();
    let d = a.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let mut vals = Vec::with_capacity(d);
    let mut vecs = DMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        vals.push(se.eigenvalues[k]);
        let mut v = se.eigenvectors.column(k).into_owned();
        // fix the global phase: first component with magnitude > tol goes real-positive
        if let Some(lead) = v.iter().find(|c| c.norm() > 1e-9).copied() {
            let phase = lead.conj() / lead.norm();
            v *= phase;
        }
        vecs.set_column(col, &v);
    }
    Ok(EigenSystem {
        eigenvalues: vals,
        eigenvectors: CMatrix::from_dmatrix(vecs),
    })
}

/// U = exp(-i h t) via the eigendecomposition of Hermitian `h`.
pub fn evolve_unitary(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let es = herm_eig(h)?;
    Ok(es.apply(|lam| (-C64::i() * C64::new(lam * t, 0.0)).exp()))
}

/// Anticommutator {a, b} = ab + ba.
pub fn anticomm(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.mul(b).add(&b.mul(a)))
}

/// Re tr(rho a). `rho` is any dim-matched matrix here; the states module
/// provides the validated wrapper.
pub fn expval(rho: &CMatrix, a: &CMatrix) -> Result<f64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    Ok(rho.mul(a).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sigma_z() -> CMatrix {
        CMatrix::diagonal(&[1.0, -1.0])
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn identity_eigenvalues() {
        let es = herm_eig(&CMatrix::identity(3)).unwrap();
        for v in es.eigenvalues {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix_eigensystem() {
        let es = herm_eig(&CMatrix::diagonal(&[-1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(es.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(es.eigenvalues[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(es.eigenvalues[2], 1.0, epsilon = 1e-14);
        for k in 0..3 {
            let v = es.eigenvector(k);
            assert!(v.sub(&CVector::basis(3, k)).norm() < 1e-12);
        }
    }

    #[test]
    fn three_level_spin_x_eigensystem() {
        // (1/sqrt2) tridiagonal(1) has eigenvalues -1, 0, 1 and the
        // eigenvectors (1,-sqrt2,1)/2, (1,0,-1)/sqrt2, (1,sqrt2,1)/2
        let s = 1.0 / 2f64.sqrt();
        let h = CMatrix::from_real_rows(3, &[0.0, s, 0.0, s, 0.0, s, 0.0, s, 0.0]);
        let es = herm_eig(&h).unwrap();
        assert_abs_diff_eq!(es.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(es.eigenvalues[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(es.eigenvalues[2], 1.0, epsilon = 1e-12);
        let r2 = 2f64.sqrt();
        let minus = CVector::from_real(&[0.5, -r2 / 2.0, 0.5]);
        let zero = CVector::from_real(&[s, 0.0, -s]);
        let plus = CVector::from_real(&[0.5, r2 / 2.0, 0.5]);
        assert!(es.eigenvector(0).max_abs_diff(&minus) < 1e-10);
        assert!(es.eigenvector(1).max_abs_diff(&zero) < 1e-10);
        assert!(es.eigenvector(2).max_abs_diff(&plus) < 1e-10);
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let mut m = CMatrix::identity(2);
        m.set(0, 1, C64::new(0.5, 0.0));
        assert!(matches!(
            herm_eig(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let h = sigma_x().scale(0.5);
        let u = evolve_unitary(&h, 0.0).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn spin_half_period_is_minus_identity() {
        // exp(-i (sigma_x/2) 2pi) = -1 for half-integer spin
        let h = sigma_x().scale(0.5);
        let u = evolve_unitary(&h, 2.0 * std::f64::consts::PI).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(2).scale(-1.0)) < 1e-10);
    }

    #[test]
    fn anticommutator_paulis() {
        let two_id = anticomm(&sigma_z(), &sigma_z()).unwrap();
        assert!(two_id.max_abs_diff(&CMatrix::identity(2).scale(2.0)) < 1e-14);
        let zero = anticomm(&sigma_z(), &sigma_x()).unwrap();
        assert!(zero.max_abs() < 1e-14);
    }

    #[test]
    fn anticommutator_matches_direct_product_dim4() {
        let mut rng_state = 0x12345u64;
        let mut next = move || {
            // xorshift; only needs to be deterministic scatter
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state as f64 / u64::MAX as f64) - 0.5
        };
        let rand_herm = |next: &mut dyn FnMut() -> f64| {
            let mut m = CMatrix::zeros(4);
            for i in 0..4 {
                m.set(i, i, C64::new(next(), 0.0));
                for j in (i + 1)..4 {
                    let c = C64::new(next(), next());
                    m.set(i, j, c);
                    m.set(j, i, c.conj());
                }
            }
            m
        };
        let a = rand_herm(&mut next);
        let b = rand_herm(&mut next);
        let lhs = anticomm(&a, &b).unwrap();
        let rhs = a.mul(&b).add(&b.mul(&a));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        assert!(lhs.is_hermitian(1e-12));
    }

    #[test]
    fn expval_cases() {
        // maximally mixed vs traceless observable
        let rho = CMatrix::identity(2).scale(0.5);
        assert_abs_diff_eq!(expval(&rho, &sigma_z()).unwrap(), 0.0, epsilon = 1e-14);
        // |0><0| with sigma_z (convention sigma_z|0> = +|0>)
        let ket0 = CVector::basis(2, 0);
        let proj = CMatrix::outer(&ket0, &ket0);
        assert_abs_diff_eq!(expval(&proj, &sigma_z()).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expval_bloch_xy_state_along_z_is_zero() {
        // v = (1,1,0)/sqrt2: rho = (I + (x+y)/sqrt2 . sigma)/2, <sigma_z> = 0
        let s = 1.0 / 2f64.sqrt();
        let rho = CMatrix::from_row_slice(
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.5 * s, -0.5 * s),
                C64::new(0.5 * s, 0.5 * s),
                C64::new(0.5, 0.0),
            ],
        );
        assert_abs_diff_eq!(expval(&rho, &sigma_z()).unwrap(), 0.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(seed in 0u64..500, dim in 2usize..=5) {
            let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            let mut next = move || {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                (s as f64 / u64::MAX as f64) - 0.5
            };
            let mut m = CMatrix::zeros(dim);
            for i in 0..dim {
                m.set(i, i, C64::new(next(), 0.0));
                for j in (i + 1)..dim {
                    let c = C64::new(next(), next());
                    m.set(i, j, c);
                    m.set(j, i, c.conj());
                }
            }
            let es = herm_eig(&m).unwrap();
            // V^dagger V = 1
            let v = es.eigenvectors.clone();
            let gram = v.adjoint().mul(&v);
            prop_assert!(gram.max_abs_diff(&CMatrix::identity(dim)) < 1e-12);
            // reconstruction
            let rec = es.apply(|lam| C64::new(lam, 0.0));
            prop_assert!(rec.max_abs_diff(&m) < KERNEL_TOL);
            // residuals A v_k = lambda_k v_k
            for k in 0..dim {
                let vk = es.eigenvector(k);
                let res = m.mul_vec(&vk).sub(&vk.scale(C64::new(es.eigenvalues[k], 0.0)));
                prop_assert!(res.norm() < KERNEL_TOL);
            }
            // ascending order
            for k in 1..dim {
                prop_assert!(es.eigenvalues[k] >= es.eigenvalues[k - 1]);
            }
        }

        #[test]
        fn evolution_group_property(t1 in -6.0f64..6.0, t2 in -6.0f64..6.0) {
            let h = CMatrix::from_real_rows(2, &[0.0, 0.5, 0.5, 0.0]);
            let u1 = evolve_unitary(&h, t1).unwrap();
            let u2 = evolve_unitary(&h, t2).unwrap();
            let u12 = evolve_unitary(&h, t1 + t2).unwrap();
            prop_assert!(u1.mul(&u2).max_abs_diff(&u12) < KERNEL_TOL);
            // unitarity
            prop_assert!(u1.adjoint().mul(&u1).max_abs_diff(&CMatrix::identity(2)) < KERNEL_TOL);
        }

        #[test]
        fn expval_linear_and_normalized(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let rho = CMatrix::identity(2).scale(0.5); // valid state
            let m1 = CMatrix::diagonal(&[1.0, -1.0]);
            let m2 = CMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]);
            let lin = expval(&rho, &m1.scale(a).add(&m2.scale(b))).unwrap();
            let sum = a * expval(&rho, &m1).unwrap() + b * expval(&rho, &m2).unwrap();
            prop_assert!((lin - sum).abs() < 1e-12);
            prop_assert!((expval(&rho, &CMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        }
    }
}
