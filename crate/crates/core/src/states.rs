//! Initial-state constructors and validation.
//!
//! Three parameterizations: Bloch vectors for two-level states, the
//! 8-parameter three-level family, and the pure-state angle
//! parameterizations (cases 1..15) expressed in the spin-x Hamiltonian
//! eigenbasis.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{DensityViolation, DensityViolationKind, Error, Result};
use crate::numerics::{herm_eig, CMatrix, CVector, MatrixJson};

/// Hermiticity / trace / positivity tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Trace-one positive-semidefinite Hermitian state, dimension 2..=5.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate a raw matrix as a state. On failure every violated
    /// invariant is reported with its magnitude.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if !(2..=5).contains(&dim) {
            return Err(Error::BadDim { dim });
        }
        let mut violations = Vec::new();
        let herm = matrix.hermiticity_deviation();
        if herm > DENSITY_TOL {
            violations.push(DensityViolation {
                kind: DensityViolationKind::NotHermitian,
                magnitude: herm,
            });
        }
        let trace_err = (matrix.trace() - C64::new(1.0, 0.0)).norm();
        if trace_err > DENSITY_TOL {
            violations.push(DensityViolation {
                kind: DensityViolationKind::TraceNotOne,
                magnitude: trace_err,
            });
        }
        // eigenvalue floor rather than Cholesky, so boundary (pure) states pass
        let sym = matrix.add(&matrix.adjoint()).scale(0.5);
        let es = herm_eig(&sym).map_err(|_| Error::Internal {
            reason: "symmetrized matrix failed eigendecomposition".into(),
        })?;
        let min_eig = es.eigenvalues[0];
        if min_eig < -DENSITY_TOL {
            violations.push(DensityViolation {
                kind: DensityViolationKind::NotPsd,
                magnitude: -min_eig,
            });
        }
        if violations.is_empty() {
            Ok(Self { matrix })
        } else {
            Err(Error::InvalidDensity { violations })
        }
    }

    /// Pure state |psi><psi| from a unit ket.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: n });
        }
        Self::new(CMatrix::outer(psi, psi))
    }

    /// I/d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if !(2..=5).contains(&dim) {
            return Err(Error::BadDim { dim });
        }
        Ok(Self {
            matrix: CMatrix::identity(dim).scale(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Re tr(rho a).
    pub fn expval(&self, a: &CMatrix) -> Result<f64> {
        crate::numerics::expval(&self.matrix, a)
    }

    /// tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }
}

/// Bloch vector of a two-level state, |v| <= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub v: [f64; 3],
}

impl BlochVector {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1.0 + 1e-12 {
            return Err(Error::InvalidBloch { norm_sq: n2 });
        }
        Ok(Self { v })
    }

    pub fn norm_sq(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum()
    }
}

/// rho = (I + v . sigma)/2.
pub fn bloch_state(v: &BlochVector) -> Result<DensityMatrix> {
    let [x, y, z] = v.v;
    let m = CMatrix::from_row_slice(
        2,
        &[
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            C64::new(0.5 * (1.0 - z), 0.0),
        ],
    );
    DensityMatrix::new(m)
}

/// Real 8-parameter vector for the three-level state family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GellMannVector {
    pub a: [f64; 8],
}

impl GellMannVector {
    pub fn new(a: [f64; 8]) -> Result<Self> {
        let v = Self { a };
        v.check()?;
        Ok(v)
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }

    fn check(&self) -> Result<()> {
        let n2 = self.norm_sq();
        if n2 > 1.0 / 3.0 + 1e-12 {
            return Err(Error::InvalidState {
                reason: format!("a.a = {n2} exceeds 1/3"),
            });
        }
        let det = det3(&gellmann_matrix(&self.a));
        if det.re < -1e-10 {
            return Err(Error::InvalidState {
                reason: format!("det(rho) = {} is negative", det.re),
            });
        }
        Ok(())
    }
}

fn gellmann_matrix(a: &[f64; 8]) -> CMatrix {
    let s3 = 3f64.sqrt();
    let third = 1.0 / 3.0;
    CMatrix::from_row_slice(
        3,
        &[
            C64::new(third + a[2] + a[7] / s3, 0.0),
            C64::new(a[0], -a[1]),
            C64::new(a[3], -a[4]),
            C64::new(a[0], a[1]),
            C64::new(third - a[2] + a[7] / s3, 0.0),
            C64::new(a[5], -a[6]),
            C64::new(a[3], a[4]),
            C64::new(a[5], a[6]),
            C64::new(third - 2.0 * a[7] / s3, 0.0),
        ],
    )
}

fn det3(m: &CMatrix) -> C64 {
    let g = |i, j| m.get(i, j);
    g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
        - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
}

/// Three-level state with entries laid out exactly as the 8-parameter
/// family prescribes (affine in `a`; a = 0 gives I/3).
pub fn gellmann_state(a: &GellMannVector) -> Result<DensityMatrix> {
    a.check()?;
    DensityMatrix::new(gellmann_matrix(&a.a))
}

/// Angle parameters for the pure-state families, case 1..15.
///
/// Unused angles for a given dimension are ignored: dim 2 uses
/// (theta, phases[0]); dim 3 uses (theta, alpha, phases[0..2]); dim 4 uses
/// all of (theta, alpha, beta, phases[0..3]). Angles are unrestricted; the
/// trigonometric parameterization wraps them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureStateParams {
    pub case_id: u8,
    pub theta: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub phases: [f64; 3],
}

/// Dimension a case identifier belongs to (cases 1..2 -> 2, 3..5 -> 3,
/// 6..15 -> 4).
pub fn case_dim(case_id: u8) -> Result<usize> {
    match case_id {
        1..=2 => Ok(2),
        3..=5 => Ok(3),
        6..=15 => Ok(4),
        _ => Err(Error::BadCase { case_id, dim: 0 }),
    }
}

/// Eigenbasis amplitudes <E_n|psi> for the angle parameterization, with
/// eigenvectors ordered by descending eigenvalue. The tabulated quantities
/// are <psi|E_n>, so the ket amplitudes are their conjugates.
pub fn pure_state_amplitudes(dim: usize, p: &PureStateParams) -> Result<Vec<C64>> {
    let phase = |k: usize| C64::new(0.0, p.phases[k]).exp();
    let amps: Vec<C64> = match dim {
        2 => vec![C64::new(p.theta.cos(), 0.0), phase(0) * p.theta.sin()],
        3 => vec![
            C64::new(p.theta.cos(), 0.0),
            phase(0) * (p.theta.sin() * p.alpha.cos()),
            phase(1) * (p.theta.sin() * p.alpha.sin()),
        ],
        4 => vec![
            C64::new(p.theta.cos(), 0.0),
            phase(0) * (p.theta.sin() * p.alpha.cos()),
            phase(1) * (p.theta.sin() * p.alpha.sin() * p.beta.cos()),
            phase(2) * (p.theta.sin() * p.alpha.sin() * p.beta.sin()),
        ],
        d => return Err(Error::BadDim { dim: d }),
    };
    Ok(amps.into_iter().map(|a| a.conj()).collect())
}

/// Unit-norm ket in the Hamiltonian eigenbasis for a tabulated case.
///
/// Component k multiplies the eigenvector with the k-th largest eigenvalue.
pub fn pure_state(params: &PureStateParams, dim: usize) -> Result<CVector> {
    let case_d = case_dim(params.case_id)?;
    if case_d != dim {
        return Err(Error::BadCase {
            case_id: params.case_id,
            dim,
        });
    }
    let amps = pure_state_amplitudes(dim, params)?;
    Ok(CVector::from_slice(&amps))
}

/// Validate an arbitrary matrix as a density matrix.
pub fn validate_density(m: &CMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(m.clone())
}

/// How a serialized state was built, for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum StateProvenance {
    Bloch([f64; 3]),
    Gellmann([f64; 8]),
    PureCase(PureStateParams),
}

/// JSON form of a state: dense entries plus optional provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<StateProvenance>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix, provenance: Option<StateProvenance>) -> Self {
        Self {
            matrix: MatrixJson::from_matrix(rho.matrix()),
            provenance,
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.to_matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn bloch_zero_is_maximally_mixed() {
        let rho = bloch_state(&BlochVector::new([0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn bloch_z_is_ground_projector() {
        let rho = bloch_state(&BlochVector::new([0.0, 0.0, 1.0]).unwrap()).unwrap();
        let ket0 = CVector::basis(2, 0);
        assert!(rho.matrix().max_abs_diff(&CMatrix::outer(&ket0, &ket0)) < 1e-15);
    }

    #[test]
    fn bloch_xy_state_is_pure() {
        let s = 1.0 / 2f64.sqrt();
        let rho = bloch_state(&BlochVector::new([s, s, 0.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_rejects_long_vectors() {
        assert!(matches!(
            BlochVector::new([1.0, 0.2, 0.0]),
            Err(Error::InvalidBloch { .. })
        ));
    }

    #[test]
    fn gellmann_zero_is_maximally_mixed() {
        let rho = gellmann_state(&GellMannVector { a: [0.0; 8] }).unwrap();
        assert!(rho
            .matrix()
            .max_abs_diff(&CMatrix::identity(3).scale(1.0 / 3.0))
            < 1e-15);
    }

    #[test]
    fn gellmann_example_state_entries() {
        // a = (0,0,1,2,1,0,0,-1)/(3 sqrt 3)
        let s = 1.0 / (3.0 * 3f64.sqrt());
        let a = [0.0, 0.0, s, 2.0 * s, s, 0.0, 0.0, -s];
        let rho = gellmann_state(&GellMannVector::new(a).unwrap()).unwrap();
        let third = 1.0 / 3.0;
        let s3 = 3f64.sqrt();
        assert_abs_diff_eq!(rho.matrix().get(0, 0).re, third + s - s / s3, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix().get(0, 2).re, 2.0 * s, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix().get(0, 2).im, -s, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix().get(2, 2).re, third + 2.0 * s / s3, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix().get(1, 1).re, third - s - s / s3, epsilon = 1e-14);
    }

    #[test]
    fn gellmann_rejects_norm_bound() {
        // a.a = 0.34 > 1/3
        let x = (0.34f64 / 8.0).sqrt();
        assert!(matches!(
            GellMannVector::new([x; 8]),
            Err(Error::InvalidState { .. })
        ));
    }

    #[test]
    fn gellmann_affine_in_a() {
        let a1 = GellMannVector::new([0.05, -0.02, 0.1, 0.0, 0.03, 0.0, 0.01, -0.04]).unwrap();
        let a2 = GellMannVector::new([0.0, 0.04, -0.06, 0.02, 0.0, 0.05, 0.0, 0.08]).unwrap();
        let mid =
            GellMannVector::new(std::array::from_fn(|i| 0.5 * (a1.a[i] + a2.a[i]))).unwrap();
        let r1 = gellmann_state(&a1).unwrap();
        let r2 = gellmann_state(&a2).unwrap();
        let rm = gellmann_state(&mid).unwrap();
        let avg = r1.matrix().add(r2.matrix()).scale(0.5);
        assert!(rm.matrix().max_abs_diff(&avg) < 1e-14);
    }

    #[test]
    fn pure_state_theta_zero_is_top_eigenvector() {
        let p = PureStateParams {
            case_id: 1,
            theta: 0.0,
            alpha: 0.0,
            beta: 0.0,
            phases: [0.0; 3],
        };
        let psi = pure_state(&p, 2).unwrap();
        assert!(psi.max_abs_diff(&CVector::basis(2, 0)) < 1e-15);
    }

    #[test]
    fn pure_state_middle_branch_dim3() {
        // theta = pi/2, alpha = 0 puts all weight on the middle (zero-eigenvalue) slot
        let p = PureStateParams {
            case_id: 3,
            theta: std::f64::consts::FRAC_PI_2,
            alpha: 0.0,
            beta: 0.0,
            phases: [0.0; 3],
        };
        let psi = pure_state(&p, 3).unwrap();
        assert!(psi.max_abs_diff(&CVector::basis(3, 1)) < 1e-15);
    }

    #[test]
    fn pure_state_case_dim_mismatch() {
        let p = PureStateParams {
            case_id: 6,
            theta: 0.3,
            alpha: 0.1,
            beta: 0.2,
            phases: [0.0; 3],
        };
        assert!(matches!(pure_state(&p, 3), Err(Error::BadCase { .. })));
    }

    #[test]
    fn validate_density_cases() {
        assert!(validate_density(&CMatrix::identity(3).scale(1.0 / 3.0)).is_ok());
        let err = validate_density(&CMatrix::diagonal(&[1.5, -0.5])).unwrap_err();
        match err {
            Error::InvalidDensity { violations } => {
                assert!(violations
                    .iter()
                    .any(|v| v.kind == DensityViolationKind::NotPsd));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = validate_density(&CMatrix::diagonal(&[0.6, 0.6])).unwrap_err();
        match err {
            Error::InvalidDensity { violations } => {
                assert_eq!(violations.len(), 1);
                assert!(violations.iter().any(|v| v.kind == DensityViolationKind::TraceNotOne
                    && (v.magnitude - 0.2).abs() < 1e-12));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn state_json_round_trip() {
        let s = 1.0 / (3.0 * 3f64.sqrt());
        let a = [0.0, 0.0, s, 2.0 * s, s, 0.0, 0.0, -s];
        let rho = gellmann_state(&GellMannVector::new(a).unwrap()).unwrap();
        let js = StateJson::from_state(&rho, Some(StateProvenance::Gellmann(a)));
        let text = serde_json::to_string(&js).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let rho2 = back.to_state().unwrap();
        assert!(rho.matrix().max_abs_diff(rho2.matrix()) < 1e-15);
    }

    proptest! {
        #[test]
        fn bloch_purity_formula(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let n2 = x*x + y*y + z*z;
            prop_assume!(n2 <= 1.0);
            let rho = bloch_state(&BlochVector::new([x, y, z]).unwrap()).unwrap();
            prop_assert!((rho.purity() - (1.0 + n2) / 2.0).abs() < 1e-12);
        }

        // norm = 1 for every case family under arbitrary angle draws
        #[test]
        fn pure_state_unit_norm(case_id in 1u8..=15, theta in 0.0f64..7.0, alpha in 0.0f64..7.0,
                                beta in 0.0f64..7.0, p0 in 0.0f64..7.0, p1 in 0.0f64..7.0, p2 in 0.0f64..7.0) {
            let dim = case_dim(case_id).unwrap();
            let p = PureStateParams { case_id, theta, alpha, beta, phases: [p0, p1, p2] };
            let psi = pure_state(&p, dim).unwrap();
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}
