//! Temporal correlators and measurement data sets.
//!
//! Correlators of projectively measured dichotomic observables take the
//! nested-anticommutator forms
//!
//! ```text
//! C_ij   = (1/2) <{Q_i, Q_j}>
//! D_ijk  = (1/4) <{Q_i, {Q_j, Q_k}}>
//! E_ijkl = (1/8) <{Q_i, {Q_j, {Q_k, Q_l}}}>
//! ```
//!
//! with time-ordered arguments (earliest outermost). [`seq_probs`] carries
//! the independent route: the joint outcome distribution of the actual
//! projector chain, whose signed moments reproduce the same correlators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{anticomm, expval, CMatrix, CVector};
use crate::observables::{Observable, SpinModel, TriVar};
use crate::states::DensityMatrix;

/// Entry-range slack: correlators of +-1 variables live in [-1, 1].
pub const ENTRY_TOL: f64 = 1e-9;

/// <Q_i>.
pub fn corr1(rho: &DensityMatrix, q_i: &CMatrix) -> Result<f64> {
    expval(rho.matrix(), q_i)
}

/// C_ij, symmetric under argument swap.
pub fn corr2(rho: &DensityMatrix, q_i: &CMatrix, q_j: &CMatrix) -> Result<f64> {
    let v = expval(rho.matrix(), &anticomm(q_i, q_j)?)? / 2.0;
    Ok(v)
}

/// D_ijk for time order t_i <= t_j <= t_k.
pub fn corr3(rho: &DensityMatrix, q_i: &CMatrix, q_j: &CMatrix, q_k: &CMatrix) -> Result<f64> {
    let inner = anticomm(q_j, q_k)?;
    Ok(expval(rho.matrix(), &anticomm(q_i, &inner)?)? / 4.0)
}

/// E_ijkl for time-ordered arguments.
pub fn corr4(
    rho: &DensityMatrix,
    q_i: &CMatrix,
    q_j: &CMatrix,
    q_k: &CMatrix,
    q_l: &CMatrix,
) -> Result<f64> {
    let inner = anticomm(q_k, q_l)?;
    let mid = anticomm(q_j, &inner)?;
    Ok(expval(rho.matrix(), &anticomm(q_i, &mid)?)? / 8.0)
}

// ---------------------------------------------------------------------------
// Sequential projective measurement (the oracle route)
// ---------------------------------------------------------------------------

/// Joint probability over +-1 outcome strings of a projector chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilityTable {
    pub n: usize,
    /// Entry for each sign vector; index bit k (from the most significant
    /// of the low n bits) is time k, bit set = outcome -1.
    pub entries: Vec<f64>,
}

impl JointProbabilityTable {
    /// Signs for a flat entry index, +1/-1 per time.
    pub fn signs(&self, index: usize) -> Vec<i8> {
        (0..self.n)
            .map(|k| {
                if index >> (self.n - 1 - k) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect()
    }

    pub fn prob(&self, signs: &[i8]) -> f64 {
        let mut idx = 0usize;
        for (k, &s) in signs.iter().enumerate() {
            if s < 0 {
                idx |= 1 << (self.n - 1 - k);
            }
        }
        self.entries[idx]
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Signed moment over a subset of time slots: E[prod_k s_k].
    pub fn signed_moment(&self, slots: &[usize]) -> f64 {
        self.entries
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let mut sign = 1.0;
                for &k in slots {
                    if idx >> (self.n - 1 - k) & 1 == 1 {
                        sign = -sign;
                    }
                }
                sign * p
            })
            .sum()
    }

    /// Table after summing out the last measurement; equals the table of
    /// the shorter chain.
    pub fn marginal_drop_last(&self) -> JointProbabilityTable {
        let m = self.n - 1;
        let entries = (0..1usize << m)
            .map(|idx| self.entries[idx << 1] + self.entries[(idx << 1) | 1])
            .collect();
        JointProbabilityTable { n: m, entries }
    }
}

fn check_projector_pair(pair: &(CMatrix, CMatrix), dim: usize) -> Result<()> {
    let (p, q) = pair;
    if p.dim() != dim || q.dim() != dim {
        return Err(Error::BadProjectors {
            reason: "projector dimension mismatch".into(),
        });
    }
    for m in [p, q] {
        if m.mul(m).max_abs_diff(m) > 1e-10 {
            return Err(Error::BadProjectors {
                reason: "not idempotent".into(),
            });
        }
    }
    if p.add(q).max_abs_diff(&CMatrix::identity(dim)) > 1e-10 {
        return Err(Error::BadProjectors {
            reason: "projectors do not sum to identity".into(),
        });
    }
    Ok(())
}

/// Outcome distribution of measuring the given (+1, -1) projector pairs in
/// sequence on `rho`, collapsing after each measurement.
pub fn seq_probs(
    rho: &DensityMatrix,
    projector_pairs: &[(CMatrix, CMatrix)],
) -> Result<JointProbabilityTable> {
    let dim = rho.dim();
    for pair in projector_pairs {
        check_projector_pair(pair, dim)?;
    }
    let n = projector_pairs.len();
    let mut entries = vec![0.0; 1 << n];
    // walk the collapse tree once; each node holds P...P rho P...P
    fn walk(
        state: &CMatrix,
        pairs: &[(CMatrix, CMatrix)],
        depth: usize,
        index: usize,
        entries: &mut [f64],
    ) {
        if depth == pairs.len() {
            entries[index] = state.trace().re;
            return;
        }
        let (pp, pm) = &pairs[depth];
        let plus = pp.mul(state).mul(pp);
        let minus = pm.mul(state).mul(pm);
        walk(&plus, pairs, depth + 1, index << 1, entries);
        walk(&minus, pairs, depth + 1, (index << 1) | 1, entries);
    }
    walk(rho.matrix(), projector_pairs, 0, 0, &mut entries);

    let table = JointProbabilityTable { n, entries };
    let total = table.sum();
    if (total - 1.0).abs() > 1e-10 || table.entries.iter().any(|&p| p < -1e-12) {
        return Err(Error::Internal {
            reason: format!("probability table invalid (sum {total})"),
        });
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Data sets
// ---------------------------------------------------------------------------

/// Which pairwise correlators a dataset carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelatorSubset {
    /// All i < j pairs.
    Full,
    /// Nearest-neighbour cycle (i, i+1) plus the closing pair (1, n).
    Cycle,
}

impl std::fmt::Display for CorrelatorSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelatorSubset::Full => write!(f, "full"),
            CorrelatorSubset::Cycle => write!(f, "cycle"),
        }
    }
}

/// Map-as-entry-list serialization: JSON carries 1-based time indices.
mod keyed {
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Entry<V> {
        indices: Vec<usize>,
        value: V,
    }

    pub trait Key: Ord + Sized + Copy {
        fn to_indices(self) -> Vec<usize>;
        fn from_indices(ix: &[usize]) -> Option<Self>;
    }

    impl Key for (usize, usize) {
        fn to_indices(self) -> Vec<usize> {
            vec![self.0 + 1, self.1 + 1]
        }
        fn from_indices(ix: &[usize]) -> Option<Self> {
            match ix {
                [i, j] if *i >= 1 && *j >= 1 => Some((i - 1, j - 1)),
                _ => None,
            }
        }
    }

    impl Key for (usize, usize, usize) {
        fn to_indices(self) -> Vec<usize> {
            vec![self.0 + 1, self.1 + 1, self.2 + 1]
        }
        fn from_indices(ix: &[usize]) -> Option<Self> {
            match ix {
                [i, j, k] if *i >= 1 && *j >= 1 && *k >= 1 => Some((i - 1, j - 1, k - 1)),
                _ => None,
            }
        }
    }

    impl Key for (usize, usize, usize, usize) {
        fn to_indices(self) -> Vec<usize> {
            vec![self.0 + 1, self.1 + 1, self.2 + 1, self.3 + 1]
        }
        fn from_indices(ix: &[usize]) -> Option<Self> {
            match ix {
                [i, j, k, l] if *i >= 1 && *j >= 1 && *k >= 1 && *l >= 1 => {
                    Some((i - 1, j - 1, k - 1, l - 1))
                }
                _ => None,
            }
        }
    }

    pub fn serialize<K: Key, V: Serialize + Copy, S: Serializer>(
        map: &BTreeMap<K, V>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry<V>> = map
            .iter()
            .map(|(&k, &v)| Entry {
                indices: k.to_indices(),
                value: v,
            })
            .collect();
        entries.serialize(ser)
    }

    pub fn deserialize<'de, K: Key, V: Deserialize<'de>, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<K, V>, D::Error> {
        let entries = Vec::<Entry<V>>::deserialize(de)?;
        let mut map = BTreeMap::new();
        for e in entries {
            let k = K::from_indices(&e.indices)
                .ok_or_else(|| D::Error::custom(format!("bad index tuple {:?}", e.indices)))?;
            map.insert(k, e.value);
        }
        Ok(map)
    }

    pub mod opt {
        use super::{Entry, Key};
        use serde::de::Error as DeError;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};
        use std::collections::BTreeMap;

        pub fn serialize<K: Key, V: Serialize + Copy, S: Serializer>(
            map: &Option<BTreeMap<K, V>>,
            ser: S,
        ) -> Result<S::Ok, S::Error> {
            let entries: Option<Vec<Entry<V>>> = map.as_ref().map(|m| {
                m.iter()
                    .map(|(&k, &v)| Entry {
                        indices: k.to_indices(),
                        value: v,
                    })
                    .collect()
            });
            entries.serialize(ser)
        }

        pub fn deserialize<'de, K: Key, V: Deserialize<'de>, D: Deserializer<'de>>(
            de: D,
        ) -> Result<Option<BTreeMap<K, V>>, D::Error> {
            let entries = Option::<Vec<Entry<V>>>::deserialize(de)?;
            entries
                .map(|es| {
                    let mut map = BTreeMap::new();
                    for e in es {
                        let k = K::from_indices(&e.indices).ok_or_else(|| {
                            D::Error::custom(format!("bad index tuple {:?}", e.indices))
                        })?;
                        map.insert(k, e.value);
                    }
                    Ok(map)
                })
                .transpose()
        }
    }
}

/// Dichotomic dataset entries. Keys are 0-based time indices, ascending.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DichotomicData {
    pub averages: Vec<f64>,
    #[serde(with = "keyed")]
    pub c2: BTreeMap<(usize, usize), f64>,
    #[serde(default, with = "keyed::opt", skip_serializing_if = "Option::is_none")]
    pub c3: Option<BTreeMap<(usize, usize, usize), f64>>,
    #[serde(default, with = "keyed::opt", skip_serializing_if = "Option::is_none")]
    pub c4: Option<BTreeMap<(usize, usize, usize, usize), f64>>,
}

/// Trichotomic dataset entries: the Q/R block is stored, S entries derive
/// from Q + R + S = -1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrichotomicData {
    pub q_averages: Vec<f64>,
    pub r_averages: Vec<f64>,
    /// (i, j) -> [<QiQj>, <QiRj>, <RiQj>, <RiRj>] for i < j.
    #[serde(with = "keyed")]
    pub c2_qr: BTreeMap<(usize, usize), [f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variable_kind", rename_all = "snake_case")]
pub enum DatasetBody {
    Dichotomic(DichotomicData),
    Trichotomic(TrichotomicData),
}

/// Measurement-time count, averages and correlators for one model run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MRDataset {
    pub n: usize,
    pub subset: CorrelatorSubset,
    #[serde(flatten)]
    pub body: DatasetBody,
}

impl MRDataset {
    pub fn is_dichotomic(&self) -> bool {
        matches!(self.body, DatasetBody::Dichotomic(_))
    }

    pub fn dichotomic(&self) -> Result<&DichotomicData> {
        match &self.body {
            DatasetBody::Dichotomic(d) => Ok(d),
            DatasetBody::Trichotomic(_) => Err(Error::WrongKind {
                reason: "dichotomic data requested from a trichotomic dataset".into(),
            }),
        }
    }

    pub fn trichotomic(&self) -> Result<&TrichotomicData> {
        match &self.body {
            DatasetBody::Trichotomic(t) => Ok(t),
            DatasetBody::Dichotomic(_) => Err(Error::WrongKind {
                reason: "trichotomic data requested from a dichotomic dataset".into(),
            }),
        }
    }

    /// Pairs required for the declared subset.
    pub fn expected_pairs(&self) -> Vec<(usize, usize)> {
        expected_pairs(self.n, self.subset)
    }

    /// All entries lie within [-1, 1] + tolerance and the declared subset
    /// structure is complete.
    pub fn check_invariants(&self) -> Result<()> {
        let within = |v: f64| v.abs() <= 1.0 + ENTRY_TOL;
        match &self.body {
            DatasetBody::Dichotomic(d) => {
                if d.averages.len() != self.n {
                    return Err(Error::MissingData {
                        what: format!("{} averages for n = {}", d.averages.len(), self.n),
                    });
                }
                for pair in self.expected_pairs() {
                    if !d.c2.contains_key(&pair) {
                        return Err(Error::MissingData {
                            what: format!("C{}{}", pair.0 + 1, pair.1 + 1),
                        });
                    }
                }
                let mut all = d.averages.clone();
                all.extend(d.c2.values());
                if let Some(c3) = &d.c3 {
                    all.extend(c3.values());
                }
                if let Some(c4) = &d.c4 {
                    all.extend(c4.values());
                }
                if let Some(bad) = all.iter().find(|&&v| !within(v)) {
                    return Err(Error::Internal {
                        reason: format!("dataset entry {bad} outside [-1, 1]"),
                    });
                }
            }
            DatasetBody::Trichotomic(t) => {
                if t.q_averages.len() != self.n || t.r_averages.len() != self.n {
                    return Err(Error::MissingData {
                        what: "per-time Q/R averages".into(),
                    });
                }
                for pair in self.expected_pairs() {
                    if !t.c2_qr.contains_key(&pair) {
                        return Err(Error::MissingData {
                            what: format!("QR block for pair {pair:?}"),
                        });
                    }
                }
                for i in 0..self.n {
                    for x in TriVar::ALL {
                        if !within(self.tri_average(x, i)?) {
                            return Err(Error::Internal {
                                reason: "trichotomic average outside [-1, 1]".into(),
                            });
                        }
                    }
                }
                let pairs: Vec<_> = t.c2_qr.keys().copied().collect();
                for (i, j) in pairs {
                    for x in TriVar::ALL {
                        for y in TriVar::ALL {
                            if !within(self.tri_c2(x, i, y, j)?) {
                                return Err(Error::Internal {
                                    reason: "trichotomic correlator outside [-1, 1]".into(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// <X_i> for any member, S derived from the stored Q/R entries.
    pub fn tri_average(&self, x: TriVar, i: usize) -> Result<f64> {
        let t = self.trichotomic()?;
        Ok(match x {
            TriVar::Q => t.q_averages[i],
            TriVar::R => t.r_averages[i],
            TriVar::S => -1.0 - t.q_averages[i] - t.r_averages[i],
        })
    }

    /// <X_i Y_j> for i < j; S rows/columns derived by linearity.
    pub fn tri_c2(&self, x: TriVar, i: usize, y: TriVar, j: usize) -> Result<f64> {
        let t = self.trichotomic()?;
        let block = t.c2_qr.get(&(i, j)).ok_or_else(|| Error::MissingData {
            what: format!("QR block for pair ({i}, {j})"),
        })?;
        let pick = |x: TriVar, y: TriVar| -> f64 {
            match (x, y) {
                (TriVar::Q, TriVar::Q) => block[0],
                (TriVar::Q, TriVar::R) => block[1],
                (TriVar::R, TriVar::Q) => block[2],
                (TriVar::R, TriVar::R) => block[3],
                _ => unreachable!(),
            }
        };
        Ok(match (x, y) {
            (TriVar::S, TriVar::S) => {
                1.0 + self.tri_average(TriVar::Q, i)?
                    + self.tri_average(TriVar::R, i)?
                    + self.tri_average(TriVar::Q, j)?
                    + self.tri_average(TriVar::R, j)?
                    + pick(TriVar::Q, TriVar::Q)
                    + pick(TriVar::Q, TriVar::R)
                    + pick(TriVar::R, TriVar::Q)
                    + pick(TriVar::R, TriVar::R)
            }
            (TriVar::S, y) => -self.tri_average(y, j)? - pick(TriVar::Q, y) - pick(TriVar::R, y),
            (x, TriVar::S) => -self.tri_average(x, i)? - pick(x, TriVar::Q) - pick(x, TriVar::R),
            (x, y) => pick(x, y),
        })
    }
}

/// Pairs required for a subset declaration over n times.
pub fn expected_pairs(n: usize, subset: CorrelatorSubset) -> Vec<(usize, usize)> {
    match subset {
        CorrelatorSubset::Full => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    v.push((i, j));
                }
            }
            v
        }
        CorrelatorSubset::Cycle => {
            let mut v: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            if n > 2 {
                v.push((0, n - 1));
            }
            v
        }
    }
}

/// Assemble the dataset of a model: averages always, higher orders as
/// requested (orders is a subset of {1, 2, 3, 4}).
pub fn dataset_from_model(model: &SpinModel, include_orders: &[usize]) -> Result<MRDataset> {
    if let Some(bad) = include_orders.iter().find(|&&o| !(1..=4).contains(&o)) {
        return Err(Error::InvalidSpec {
            reason: format!("unsupported correlator order {bad}"),
        });
    }
    let n = model.n_times();
    let rho = &model.initial;
    match &model.observable {
        Observable::Dichotomic(_) => {
            let qs: Vec<CMatrix> = (0..n)
                .map(|i| model.dichotomic_at(i))
                .collect::<Result<_>>()?;
            let averages = (0..n)
                .map(|i| corr1(rho, &qs[i]))
                .collect::<Result<Vec<_>>>()?;
            let mut c2 = BTreeMap::new();
            if include_orders.contains(&2) {
                for i in 0..n {
                    for j in (i + 1)..n {
                        c2.insert((i, j), corr2(rho, &qs[i], &qs[j])?);
                    }
                }
            }
            let c3 = if include_orders.contains(&3) && n >= 3 {
                let mut m = BTreeMap::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        for k in (j + 1)..n {
                            m.insert((i, j, k), corr3(rho, &qs[i], &qs[j], &qs[k])?);
                        }
                    }
                }
                Some(m)
            } else {
                None
            };
            let c4 = if include_orders.contains(&4) && n >= 4 {
                let mut m = BTreeMap::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        for k in (j + 1)..n {
                            for l in (k + 1)..n {
                                m.insert(
                                    (i, j, k, l),
                                    corr4(rho, &qs[i], &qs[j], &qs[k], &qs[l])?,
                                );
                            }
                        }
                    }
                }
                Some(m)
            } else {
                None
            };
            let ds = MRDataset {
                n,
                subset: CorrelatorSubset::Full,
                body: DatasetBody::Dichotomic(DichotomicData {
                    averages,
                    c2,
                    c3,
                    c4,
                }),
            };
            ds.check_invariants()?;
            Ok(ds)
        }
        Observable::Trichotomic(_) => {
            let q: Vec<CMatrix> = (0..n)
                .map(|i| model.trichotomic_at(TriVar::Q, i))
                .collect::<Result<_>>()?;
            let r: Vec<CMatrix> = (0..n)
                .map(|i| model.trichotomic_at(TriVar::R, i))
                .collect::<Result<_>>()?;
            let q_averages = (0..n).map(|i| corr1(rho, &q[i])).collect::<Result<_>>()?;
            let r_averages = (0..n).map(|i| corr1(rho, &r[i])).collect::<Result<_>>()?;
            let mut c2_qr = BTreeMap::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    c2_qr.insert(
                        (i, j),
                        [
                            corr2(rho, &q[i], &q[j])?,
                            corr2(rho, &q[i], &r[j])?,
                            corr2(rho, &r[i], &q[j])?,
                            corr2(rho, &r[i], &r[j])?,
                        ],
                    );
                }
            }
            let ds = MRDataset {
                n,
                subset: CorrelatorSubset::Full,
                body: DatasetBody::Trichotomic(TrichotomicData {
                    q_averages,
                    r_averages,
                    c2_qr,
                }),
            };
            ds.check_invariants()?;
            Ok(ds)
        }
    }
}

/// First- and second-order dataset from overlaps, for observables
/// Q_i = 1 - 2|v_i><v_i| (single projector) or
/// Q_i = 1 - 2|v_i><v_i| - 2|u_i><u_i| (two projectors, u_list given).
pub fn overlap_correlators(
    psi: &CVector,
    v_list: &[CVector],
    u_list: Option<&[CVector]>,
) -> Result<MRDataset> {
    let n_psi = psi.norm();
    if (n_psi - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: n_psi });
    }
    for v in v_list.iter().chain(u_list.into_iter().flatten()) {
        let nv = v.norm();
        if (nv - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm: nv });
        }
    }
    if let Some(us) = u_list {
        if us.len() != v_list.len() {
            return Err(Error::DimMismatch {
                left: v_list.len(),
                right: us.len(),
            });
        }
    }
    let n = v_list.len();
    // <psi|v_i>, <psi|u_i>
    let pv: Vec<_> = v_list.iter().map(|v| psi.dot(v)).collect();
    let pu: Option<Vec<_>> = u_list.map(|us| us.iter().map(|u| psi.dot(u)).collect());

    let averages: Vec<f64> = (0..n)
        .map(|i| {
            let mut a = 1.0 - 2.0 * pv[i].norm_sqr();
            if let Some(pu) = &pu {
                a -= 2.0 * pu[i].norm_sqr();
            }
            a
        })
        .collect();

    let mut c2 = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            // 4 Re(<psi|a_i><a_i|b_j><b_j|psi>) summed over projector pairs
            let cross = |ai: &CVector,
                         pai: num_complex::Complex64,
                         bj: &CVector,
                         pbj: num_complex::Complex64| {
                4.0 * (pai * ai.dot(bj) * pbj.conj()).re
            };
            let mut c = averages[i] + averages[j] - 1.0;
            c += cross(&v_list[i], pv[i], &v_list[j], pv[j]);
            if let (Some(us), Some(pu)) = (u_list, &pu) {
                c += cross(&v_list[i], pv[i], &us[j], pu[j]);
                c += cross(&us[i], pu[i], &v_list[j], pv[j]);
                c += cross(&us[i], pu[i], &us[j], pu[j]);
            }
            c2.insert((i, j), c);
        }
    }
    let ds = MRDataset {
        n,
        subset: CorrelatorSubset::Full,
        body: DatasetBody::Dichotomic(DichotomicData {
            averages,
            c2,
            c3: None,
            c4: None,
        }),
    };
    ds.check_invariants()?;
    Ok(ds)
}
