//! Measurement operators, spin Hamiltonians and Heisenberg evolution.
//!
//! Dichotomic observables are Hermitian involutions (Q^2 = 1) built from
//! one or two projectors; the trichotomic triple (Q, R, S) obeys
//! Q + R + S = -1. Hamiltonians are dimensionless (time arguments are
//! omega*t), with the spin-x generator's eigenvalues equal to the standard
//! spin projections.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{evolve_unitary, herm_eig, CMatrix, CVector, MatrixJson};
use crate::states::{case_dim, DensityMatrix, PureStateParams, StateJson};

/// Involution tolerance for dichotomic observables (Q^2 = 1, max norm).
pub const OBSERVABLE_TOL: f64 = 1e-10;

/// How a dichotomic observable was constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum DichotomicConstruction {
    /// Q = 1 - 2|A><A|
    SingleProjector(CVector),
    /// Q = 1 - 2|A><A| - 2|B><B| with <A|B> = 0
    TwoProjector(CVector, CVector),
    Explicit,
}

/// Hermitian operator with eigenvalues in {+1, -1}.
#[derive(Debug, Clone)]
pub struct DichotomicObservable {
    matrix: CMatrix,
    pub construction: DichotomicConstruction,
}

impl DichotomicObservable {
    /// Q = 1 - 2|A><A| for a unit ket.
    pub fn single_projector(a_ket: &CVector) -> Result<Self> {
        let n = a_ket.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: n });
        }
        let d = a_ket.dim();
        let m = CMatrix::identity(d).sub(&CMatrix::outer(a_ket, a_ket).scale(2.0));
        Ok(Self {
            matrix: m,
            construction: DichotomicConstruction::SingleProjector(a_ket.clone()),
        })
    }

    /// Q = 1 - 2|A><A| - 2|B><B| for orthonormal kets.
    pub fn two_projector(a_ket: &CVector, b_ket: &CVector) -> Result<Self> {
        for v in [a_ket, b_ket] {
            let n = v.norm();
            if (n - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { norm: n });
            }
        }
        let overlap = a_ket.dot(b_ket).norm();
        if overlap > 1e-10 {
            return Err(Error::NotOrthogonal { overlap });
        }
        let d = a_ket.dim();
        let m = CMatrix::identity(d)
            .sub(&CMatrix::outer(a_ket, a_ket).scale(2.0))
            .sub(&CMatrix::outer(b_ket, b_ket).scale(2.0));
        Ok(Self {
            matrix: m,
            construction: DichotomicConstruction::TwoProjector(a_ket.clone(), b_ket.clone()),
        })
    }

    /// Accept any Hermitian involution.
    pub fn explicit(matrix: CMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-12 {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let sq = matrix.mul(&matrix);
        let dev = sq.max_abs_diff(&CMatrix::identity(matrix.dim()));
        if dev > OBSERVABLE_TOL {
            return Err(Error::InvalidSpec {
                reason: format!("matrix does not square to identity (deviation {dev:.3e})"),
            });
        }
        Ok(Self {
            matrix,
            construction: DichotomicConstruction::Explicit,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Projectors (P_plus, P_minus) onto the +1 / -1 eigenspaces.
    pub fn projectors(&self) -> (CMatrix, CMatrix) {
        let id = CMatrix::identity(self.dim());
        (
            id.add(&self.matrix).scale(0.5),
            id.sub(&self.matrix).scale(0.5),
        )
    }
}

/// Trichotomic triple (Q, R, S) with Q + R + S = -1 and X^2 = 1 for each.
#[derive(Debug, Clone)]
pub struct TrichotomicTriple {
    pub q: CMatrix,
    pub r: CMatrix,
    pub s: CMatrix,
}

/// Which member of a trichotomic triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TriVar {
    Q,
    R,
    S,
}

impl TriVar {
    pub const ALL: [TriVar; 3] = [TriVar::Q, TriVar::R, TriVar::S];
}

impl std::fmt::Display for TriVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TriVar::Q => write!(f, "Q"),
            TriVar::R => write!(f, "R"),
            TriVar::S => write!(f, "S"),
        }
    }
}

impl TrichotomicTriple {
    pub fn member(&self, which: TriVar) -> &CMatrix {
        match which {
            TriVar::Q => &self.q,
            TriVar::R => &self.r,
            TriVar::S => &self.s,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }
}

/// Spin-x generator J_x for dimension 2..=5, eigenvalues = spin projections
/// (-j..j in integer steps, j = (dim-1)/2). Dimensionless: multiply by the
/// frequency to get an energy.
pub fn spin_x_hamiltonian(dim: usize) -> Result<CMatrix> {
    if !(2..=5).contains(&dim) {
        return Err(Error::BadDim { dim });
    }
    let j = (dim as f64 - 1.0) / 2.0;
    // ladder construction: <m+1|J+|m> = sqrt(j(j+1) - m(m+1)), basis ordered m = j..-j
    let mut m = CMatrix::zeros(dim);
    for k in 0..dim - 1 {
        let mm = j - (k + 1) as f64;
        let c = (j * (j + 1.0) - mm * (mm + 1.0)).sqrt() / 2.0;
        m.set(k, k + 1, C64::new(c, 0.0));
        m.set(k + 1, k, C64::new(c, 0.0));
    }
    Ok(m)
}

/// Five-level Hamiltonian whose unit-time evolution cycles the basis kets
/// downward: exp(-iH)|e_n> = |e_{n-1 mod 5}|. Eigenvalues 2*pi*k/5.
pub fn cyclic_hamiltonian_5() -> CMatrix {
    let mut h = CMatrix::zeros(5);
    for k in 0..5 {
        let ek = CVector::from_slice(
            &(0..5)
                .map(|n| C64::new(0.0, -TAU * (k * n) as f64 / 5.0).exp() / 5f64.sqrt())
                .collect::<Vec<_>>(),
        );
        h = h.add(&CMatrix::outer(&ek, &ek).scale(TAU * k as f64 / 5.0));
    }
    h
}

/// Q = 1 - 2|A><A|.
pub fn dichotomic_single(a_ket: &CVector) -> Result<DichotomicObservable> {
    DichotomicObservable::single_projector(a_ket)
}

/// Q = 1 - 2|A><A| - 2|B><B|.
pub fn dichotomic_double(a_ket: &CVector, b_ket: &CVector) -> Result<DichotomicObservable> {
    DichotomicObservable::two_projector(a_ket, b_ket)
}

/// The three-level triple built from the spin-x eigenvectors:
/// Q = -|E0><E0| - |E+><E-| - |E-><E+|, R flips the cross terms,
/// S = |E0><E0| - |E+><E+| - |E-><E-|. S commutes with the spin-x
/// generator; Q and R anticommute with it.
pub fn trichotomic_spin1() -> TrichotomicTriple {
    let r2 = 2f64.sqrt();
    let e_plus = CVector::from_real(&[0.5, r2 / 2.0, 0.5]);
    let e_zero = CVector::from_real(&[1.0 / r2, 0.0, -1.0 / r2]);
    let e_minus = CVector::from_real(&[0.5, -r2 / 2.0, 0.5]);
    let p0 = CMatrix::outer(&e_zero, &e_zero);
    let cross = CMatrix::outer(&e_plus, &e_minus).add(&CMatrix::outer(&e_minus, &e_plus));
    let q = p0.add(&cross).scale(-1.0);
    let r = cross.sub(&p0);
    let s = p0
        .sub(&CMatrix::outer(&e_plus, &e_plus))
        .sub(&CMatrix::outer(&e_minus, &e_minus));
    TrichotomicTriple { q, r, s }
}

/// Heisenberg picture: exp(iHt) obs exp(-iHt).
pub fn heisenberg(obs: &CMatrix, h: &CMatrix, t: f64) -> Result<CMatrix> {
    if obs.dim() != h.dim() {
        return Err(Error::DimMismatch {
            left: obs.dim(),
            right: h.dim(),
        });
    }
    let u = evolve_unitary(h, t)?;
    Ok(u.adjoint().mul(obs).mul(&u))
}

/// |v_i> = sum_n exp(-i E_n t_i) |E_n><E_n|A> for each time, via the
/// eigen-sum (not the unitary product, so the two routes can be compared).
pub fn v_vectors(h: &CMatrix, a_ket: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
    let n = a_ket.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: n });
    }
    let es = herm_eig(h)?;
    let d = h.dim();
    let overlaps: Vec<C64> = (0..d).map(|k| es.eigenvector(k).dot(a_ket)).collect();
    Ok(times
        .iter()
        .map(|&t| {
            let mut v = CVector::zeros(d);
            for k in 0..d {
                let phase = C64::new(0.0, -es.eigenvalues[k] * t).exp();
                v = v.add(&es.eigenvector(k).scale(phase * overlaps[k]));
            }
            v
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Tabulated observable cases: dims 2..4, sigma_z-basis kets |1>..|N|,
// single-projector cases 1..9 and two-projector cases 10..15.
// ---------------------------------------------------------------------------

/// Basis-ket content of a tabulated case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub id: u8,
    pub dim: usize,
    /// 0-based index of |A> in the sigma_z basis.
    pub a_index: usize,
    /// 0-based index of |B> for two-projector cases.
    pub b_index: Option<usize>,
}

/// Look up a case. Cases 1..2 live in dim 2 (A = |1>, |2>), 3..5 in dim 3,
/// 6..9 in dim 4, and 10..15 are the dim-4 two-projector pairs
/// (1,2), (1,3), (1,4), (2,3), (2,4), (3,4).
pub fn case_spec(case_id: u8) -> Result<CaseSpec> {
    let dim = case_dim(case_id)?;
    let (a, b) = match case_id {
        1..=2 => ((case_id - 1) as usize, None),
        3..=5 => ((case_id - 3) as usize, None),
        6..=9 => ((case_id - 6) as usize, None),
        10 => (0, Some(1)),
        11 => (0, Some(2)),
        12 => (0, Some(3)),
        13 => (1, Some(2)),
        14 => (1, Some(3)),
        15 => (2, Some(3)),
        _ => unreachable!("case_dim already validated"),
    };
    Ok(CaseSpec {
        id: case_id,
        dim,
        a_index: a,
        b_index: b,
    })
}

/// The time-zero observable for a tabulated case.
pub fn case_observable(case_id: u8) -> Result<DichotomicObservable> {
    let spec = case_spec(case_id)?;
    let a = CVector::basis(spec.dim, spec.a_index);
    match spec.b_index {
        None => dichotomic_single(&a),
        Some(b) => dichotomic_double(&a, &CVector::basis(spec.dim, b)),
    }
}

// ---------------------------------------------------------------------------
// Spin models
// ---------------------------------------------------------------------------

/// Observable half of a model.
#[derive(Debug, Clone)]
pub enum Observable {
    Dichotomic(DichotomicObservable),
    Trichotomic(TrichotomicTriple),
}

impl Observable {
    pub fn dim(&self) -> usize {
        match self {
            Observable::Dichotomic(o) => o.dim(),
            Observable::Trichotomic(t) => t.dim(),
        }
    }
}

/// Hamiltonian + observable family + initial state + measurement times
/// (dimensionless omega*t).
#[derive(Debug, Clone)]
pub struct SpinModel {
    pub dim: usize,
    pub hamiltonian: CMatrix,
    pub observable: Observable,
    pub initial: DensityMatrix,
    pub times: Vec<f64>,
}

impl SpinModel {
    pub fn new(
        hamiltonian: CMatrix,
        observable: Observable,
        initial: DensityMatrix,
        times: Vec<f64>,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        for (name, d) in [("observable", observable.dim()), ("state", initial.dim())] {
            if d != dim {
                return Err(Error::DimMismatch { left: dim, right: d });
            }
            let _ = name;
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: "times must be finite".into(),
            });
        }
        Ok(Self {
            dim,
            hamiltonian,
            observable,
            initial,
            times,
        })
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// Heisenberg-evolved dichotomic observable at time index `i`.
    pub fn dichotomic_at(&self, i: usize) -> Result<CMatrix> {
        match &self.observable {
            Observable::Dichotomic(o) => heisenberg(o.matrix(), &self.hamiltonian, self.times[i]),
            Observable::Trichotomic(_) => Err(Error::WrongKind {
                reason: "model carries a trichotomic observable".into(),
            }),
        }
    }

    /// Heisenberg-evolved trichotomic member at time index `i`.
    pub fn trichotomic_at(&self, which: TriVar, i: usize) -> Result<CMatrix> {
        match &self.observable {
            Observable::Trichotomic(t) => {
                heisenberg(t.member(which), &self.hamiltonian, self.times[i])
            }
            Observable::Dichotomic(_) => Err(Error::WrongKind {
                reason: "model carries a dichotomic observable".into(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Serializable model configuration
// ---------------------------------------------------------------------------

/// Hamiltonian choices in config files. `scale` multiplies the generator
/// (the three-level closed-form family conventionally runs at scale 1/2).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianConfig {
    SpinX {
        #[serde(default = "one")]
        scale: f64,
    },
    Cyclic5,
    Explicit { matrix: MatrixJson },
}

fn one() -> f64 {
    1.0
}

/// Observable choices in config files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableConfig {
    /// Tabulated basis-ket case (1..15).
    Case { case_id: u8 },
    /// Q = 1 - 2|A><A| with an explicit ket (re/im component lists).
    SingleProjector { a_re: Vec<f64>, a_im: Vec<f64> },
    /// Explicit Hermitian involution.
    Explicit { matrix: MatrixJson },
    /// The three-level triple.
    TrichotomicSpin1,
}

/// State choices in config files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateConfig {
    Bloch { v: [f64; 3] },
    Gellmann { a: [f64; 8] },
    PureCase(PureStateParams),
    MaximallyMixed,
    Explicit(StateJson),
}

/// Full model configuration: the JSON file format for models.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelConfig {
    pub dim: usize,
    pub hamiltonian: HamiltonianConfig,
    pub observable: ObservableConfig,
    pub state: StateConfig,
    pub times: Vec<f64>,
}

fn ket_from_parts(re: &[f64], im: &[f64]) -> Result<CVector> {
    if re.len() != im.len() {
        return Err(Error::InvalidSpec {
            reason: "ket re/im lengths differ".into(),
        });
    }
    Ok(CVector::from_slice(
        &re.iter()
            .zip(im)
            .map(|(&r, &i)| C64::new(r, i))
            .collect::<Vec<_>>(),
    ))
}

impl ModelConfig {
    pub fn build(&self) -> Result<SpinModel> {
        let dim = self.dim;
        let h = match &self.hamiltonian {
            HamiltonianConfig::SpinX { scale } => spin_x_hamiltonian(dim)?.scale(*scale),
            HamiltonianConfig::Cyclic5 => {
                if dim != 5 {
                    return Err(Error::BadDim { dim });
                }
                cyclic_hamiltonian_5()
            }
            HamiltonianConfig::Explicit { matrix } => {
                let m = matrix.to_matrix()?;
                let dev = m.hermiticity_deviation();
                if dev > 1e-12 {
                    return Err(Error::NotHermitian { deviation: dev });
                }
                m
            }
        };
        let obs = match &self.observable {
            ObservableConfig::Case { case_id } => Observable::Dichotomic(case_observable(*case_id)?),
            ObservableConfig::SingleProjector { a_re, a_im } => {
                Observable::Dichotomic(dichotomic_single(&ket_from_parts(a_re, a_im)?)?)
            }
            ObservableConfig::Explicit { matrix } => {
                Observable::Dichotomic(DichotomicObservable::explicit(matrix.to_matrix()?)?)
            }
            ObservableConfig::TrichotomicSpin1 => {
                if dim != 3 {
                    return Err(Error::BadDim { dim });
                }
                Observable::Trichotomic(trichotomic_spin1())
            }
        };
        let state = match &self.state {
            StateConfig::Bloch { v } => {
                crate::states::bloch_state(&crate::states::BlochVector::new(*v)?)?
            }
            StateConfig::Gellmann { a } => {
                crate::states::gellmann_state(&crate::states::GellMannVector::new(*a)?)?
            }
            StateConfig::PureCase(p) => {
                if !matches!(self.hamiltonian, HamiltonianConfig::SpinX { .. }) {
                    return Err(Error::InvalidSpec {
                        reason: "pure-case states are defined in the spin-x eigenbasis".into(),
                    });
                }
                let psi_eig = crate::states::pure_state(p, dim)?;
                let psi = spin_eigenbasis_ket(dim, &psi_eig)?;
                DensityMatrix::pure(&psi)?
            }
            StateConfig::MaximallyMixed => DensityMatrix::maximally_mixed(dim)?,
            StateConfig::Explicit(js) => js.to_state()?,
        };
        SpinModel::new(h, obs, state, self.times.clone())
    }
}

/// Spin-x eigenvectors for dims 2..4 in descending-eigenvalue order, with
/// the tabulated component signs (a generic eigensolver's phase convention
/// would flip some of them, which matters when a state is specified by its
/// eigenbasis amplitudes).
pub fn spin_eigenbasis(dim: usize) -> Result<Vec<CVector>> {
    let r2 = 2f64.sqrt();
    match dim {
        2 => Ok(vec![
            CVector::from_real(&[1.0 / r2, 1.0 / r2]),
            CVector::from_real(&[1.0 / r2, -1.0 / r2]),
        ]),
        3 => Ok(vec![
            CVector::from_real(&[0.5, r2 / 2.0, 0.5]),
            CVector::from_real(&[1.0 / r2, 0.0, -1.0 / r2]),
            CVector::from_real(&[0.5, -r2 / 2.0, 0.5]),
        ]),
        4 => {
            let s3 = 3f64.sqrt();
            let c = 1.0 / (2.0 * r2);
            Ok(vec![
                CVector::from_real(&[c, s3 * c, s3 * c, c]),
                CVector::from_real(&[-s3 * c, -c, c, s3 * c]),
                CVector::from_real(&[s3 * c, -c, -c, s3 * c]),
                CVector::from_real(&[-c, s3 * c, -s3 * c, c]),
            ])
        }
        d => Err(Error::BadDim { dim: d }),
    }
}

/// Computational-basis ket from descending-order eigenbasis amplitudes of
/// the spin-x generator, using the tabulated eigenvector signs.
pub fn spin_eigenbasis_ket(dim: usize, amps: &CVector) -> Result<CVector> {
    let basis = spin_eigenbasis(dim)?;
    if amps.dim() != dim {
        return Err(Error::DimMismatch {
            left: amps.dim(),
            right: dim,
        });
    }
    let mut out = CVector::zeros(dim);
    for (k, e) in basis.iter().enumerate() {
        out = out.add(&e.scale(amps.get(k)));
    }
    Ok(out)
}

/// Convert eigenbasis amplitudes (descending eigenvalue order) into a
/// computational-basis ket of the given Hamiltonian.
pub fn eigenbasis_to_computational(h: &CMatrix, amps: &CVector) -> Result<CVector> {
    let es = herm_eig(h)?;
    let d = h.dim();
    if amps.dim() != d {
        return Err(Error::DimMismatch {
            left: amps.dim(),
            right: d,
        });
    }
    let mut out = CVector::zeros(d);
    for k in 0..d {
        // amps are ordered by descending eigenvalue; herm_eig sorts ascending
        out = out.add(&es.eigenvector(d - 1 - k).scale(amps.get(k)));
    }
    Ok(out)
}
