//! Macrorealism condition evaluators.
//!
//! Every evaluator takes a dataset and a tolerance epsilon and returns a
//! [`ConditionReport`] with the minimum value over the family's exhaustive
//! enumeration (sign vectors are at most 32, so no shortcuts). Reported
//! values follow the unnormalized convention: LG2/LG3/pentagon values are
//! the displayed left-hand sides, higher-order values are the 2^n * p
//! brackets, cycle values are (n-2) + sum of signed cycle correlators.

use serde::{Deserialize, Serialize};

use crate::correlators::{CorrelatorSubset, MRDataset};
use crate::error::{Error, Result};
use crate::observables::TriVar;

/// Default satisfaction tolerance: satisfied <=> min >= -epsilon.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Condition families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "LG2")]
    Lg2,
    #[serde(rename = "LG3")]
    Lg3,
    #[serde(rename = "LG4_cycle")]
    Lg4Cycle,
    #[serde(rename = "LG5_cycle")]
    Lg5Cycle,
    #[serde(rename = "HO3")]
    Ho3,
    #[serde(rename = "HO4")]
    Ho4,
    #[serde(rename = "NFULL")]
    NFull,
    #[serde(rename = "PI")]
    Pentagon,
    #[serde(rename = "TRI_LG2")]
    TriLg2,
    #[serde(rename = "TRI_LG3")]
    TriLg3,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Lg2,
        Family::Lg3,
        Family::Lg4Cycle,
        Family::Lg5Cycle,
        Family::Ho3,
        Family::Ho4,
        Family::NFull,
        Family::Pentagon,
        Family::TriLg2,
        Family::TriLg3,
    ];

    /// Standard-data-set families (the plain LGIs).
    pub fn is_standard(self) -> bool {
        matches!(
            self,
            Family::Lg2 | Family::Lg3 | Family::Lg4Cycle | Family::Lg5Cycle
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Lg2 => "LG2",
            Family::Lg3 => "LG3",
            Family::Lg4Cycle => "LG4_cycle",
            Family::Lg5Cycle => "LG5_cycle",
            Family::Ho3 => "HO3",
            Family::Ho4 => "HO4",
            Family::NFull => "NFULL",
            Family::Pentagon => "PI",
            Family::TriLg2 => "TRI_LG2",
            Family::TriLg3 => "TRI_LG3",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        Ok(match up.as_str() {
            "LG2" => Family::Lg2,
            "LG3" => Family::Lg3,
            "LG4_CYCLE" | "LG4" => Family::Lg4Cycle,
            "LG5_CYCLE" | "LG5" => Family::Lg5Cycle,
            "HO3" => Family::Ho3,
            "HO4" => Family::Ho4,
            "NFULL" => Family::NFull,
            "PI" | "PENTAGON" => Family::Pentagon,
            "TRI_LG2" => Family::TriLg2,
            "TRI_LG3" => Family::TriLg3,
            _ => {
                return Err(Error::UnknownFamily {
                    family: s.to_string(),
                })
            }
        })
    }
}

/// The assignment achieving a report's minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Argmin {
    /// Sign choice on a time subset (1-based times in serialized form
    /// handled by the io module; in memory these are 0-based).
    Signs { times: Vec<usize>, signs: Vec<i8> },
    /// Variable choice per time for trichotomic families.
    Variables {
        times: Vec<usize>,
        vars: Vec<TriVar>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        signs: Option<Vec<i8>>,
    },
}

/// Outcome of one family evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: Family,
    #[serde(rename = "min")]
    pub min_value: f64,
    pub argmin: Argmin,
    pub satisfied: bool,
    pub epsilon: f64,
    /// Reported values are unnormalized brackets (see module docs).
    #[serde(default = "bracket_convention")]
    pub value_convention: String,
}

impl ConditionReport {
    fn new(family: Family, min_value: f64, argmin: Argmin, eps: f64) -> Self {
        Self {
            family,
            min_value,
            argmin,
            satisfied: min_value >= -eps,
            epsilon: eps,
            value_convention: bracket_convention(),
        }
    }
}

fn bracket_convention() -> String {
    "bracket".to_string()
}

fn fold_min(
    family: Family,
    eps: f64,
    values: impl IntoIterator<Item = (f64, Argmin)>,
) -> Result<ConditionReport> {
    let mut best: Option<(f64, Argmin)> = None;
    for (v, a) in values {
        if best.as_ref().map(|(bv, _)| v < *bv).unwrap_or(true) {
            best = Some((v, a));
        }
    }
    let (v, a) = best.ok_or_else(|| Error::MissingData {
        what: format!("{family} has no evaluable instances"),
    })?;
    Ok(ConditionReport::new(family, v, a, eps))
}

fn sign_iter(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << n).map(move |mask| {
        (0..n)
            .map(|k| if mask >> (n - 1 - k) & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// Sign vectors with the first component fixed to +1 (one per global-flip
/// equivalence class).
fn half_sign_iter(n: usize) -> impl Iterator<Item = Vec<i8>> {
    sign_iter(n - 1).map(|mut tail| {
        let mut v = Vec::with_capacity(tail.len() + 1);
        v.push(1i8);
        v.append(&mut tail);
        v
    })
}

fn get_c2(ds: &MRDataset, i: usize, j: usize) -> Result<f64> {
    let d = ds.dichotomic()?;
    d.c2.get(&(i, j)).copied().ok_or_else(|| Error::MissingData {
        what: format!("C{}{}", i + 1, j + 1),
    })
}

/// Every two-time bracket 1 + s_i <Q_i> + s_j <Q_j> + s_i s_j C_ij over
/// stored pairs and all four sign choices.
pub fn lg2_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    let d = ds.dichotomic()?;
    let mut vals = Vec::new();
    for &(i, j) in d.c2.keys() {
        for si in [1i8, -1] {
            for sj in [1i8, -1] {
                let v = 1.0
                    + si as f64 * d.averages[i]
                    + sj as f64 * d.averages[j]
                    + (si * sj) as f64 * d.c2[&(i, j)];
                vals.push((
                    v,
                    Argmin::Signs {
                        times: vec![i, j],
                        signs: vec![si, sj],
                    },
                ));
            }
        }
    }
    Ok(vals)
}

/// Minimum two-time condition value.
pub fn lg2_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::Lg2, eps, lg2_values(ds)?)
}

/// Three-time conditions 1 + s1s2 C12 + s2s3 C23 + s1s3 C13 >= 0 over all
/// triples with complete pairs; global sign flips are redundant, so only
/// 4 of the 8 vectors are enumerated per triple.
pub fn lg3_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    let d = ds.dichotomic()?;
    let n = ds.n;
    let mut vals = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (cij, cjk, cik) = match (
                    d.c2.get(&(i, j)),
                    d.c2.get(&(j, k)),
                    d.c2.get(&(i, k)),
                ) {
                    (Some(&a), Some(&b), Some(&c)) => (a, b, c),
                    _ => continue,
                };
                for s in half_sign_iter(3) {
                    let v = 1.0
                        + (s[0] * s[1]) as f64 * cij
                        + (s[1] * s[2]) as f64 * cjk
                        + (s[0] * s[2]) as f64 * cik;
                    vals.push((
                        v,
                        Argmin::Signs {
                            times: vec![i, j, k],
                            signs: s,
                        },
                    ));
                }
            }
        }
    }
    Ok(vals)
}

/// Minimum three-time condition value.
pub fn lg3_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::Lg3, eps, lg3_values(ds)?)
}

/// Cycle LG inequalities over the n-cycle (1,2,..,n,1):
/// (n-2) + sum eps_i C_{i,i+1} >= 0 over the 2^(n-1) sign patterns eps
/// with an even number of -1 entries for odd n (these are exactly the
/// patterns eps_i = s_i s_{i+1}) and an odd number for even n (the
/// classic four-time forms). n = 3 reproduces the LG3 enumeration.
pub fn lgn_cycle_values(ds: &MRDataset, n_cycle: usize) -> Result<(Family, Vec<(f64, Argmin)>)> {
    if !(3..=5).contains(&n_cycle) || n_cycle != ds.n {
        return Err(Error::InvalidSpec {
            reason: format!("cycle length {n_cycle} does not match dataset n = {}", ds.n),
        });
    }
    let family = match n_cycle {
        3 => Family::Lg3,
        4 => Family::Lg4Cycle,
        _ => Family::Lg5Cycle,
    };
    let cycle: Vec<(usize, usize)> = (0..n_cycle - 1)
        .map(|i| (i, i + 1))
        .chain(std::iter::once((0, n_cycle - 1)))
        .collect();
    let cs: Vec<f64> = cycle
        .iter()
        .map(|&(i, j)| get_c2(ds, i, j))
        .collect::<Result<_>>()?;
    let want_odd_flips = n_cycle % 2 == 0;
    let mut vals = Vec::new();
    for pattern in sign_iter(n_cycle) {
        let flips = pattern.iter().filter(|&&e| e < 0).count();
        if (flips % 2 == 1) != want_odd_flips {
            continue;
        }
        let v = (n_cycle as f64 - 2.0)
            + pattern
                .iter()
                .zip(&cs)
                .map(|(&e, &c)| e as f64 * c)
                .sum::<f64>();
        vals.push((
            v,
            Argmin::Signs {
                times: (0..n_cycle).collect(),
                signs: pattern,
            },
        ));
    }
    Ok((family, vals))
}

/// Minimum cycle condition value.
pub fn lgn_cycle_min(ds: &MRDataset, n_cycle: usize, eps: f64) -> Result<ConditionReport> {
    let (family, vals) = lgn_cycle_values(ds, n_cycle)?;
    fold_min(family, eps, vals)
}

/// The 2^n * p brackets of the candidate joint probability at order 3 or 4
/// over every time subset of that size and all sign vectors.
pub fn higher_order_values(ds: &MRDataset, order: usize) -> Result<(Family, Vec<(f64, Argmin)>)> {
    let d = ds.dichotomic()?;
    let family = match order {
        3 => Family::Ho3,
        4 => Family::Ho4,
        _ => {
            return Err(Error::InvalidSpec {
                reason: format!("higher-order LGIs are defined for orders 3 and 4, got {order}"),
            })
        }
    };
    let c3 = d.c3.as_ref().ok_or_else(|| Error::MissingData {
        what: "third-order correlators".into(),
    })?;
    if order == 4 && d.c4.is_none() {
        return Err(Error::MissingData {
            what: "fourth-order correlators".into(),
        });
    }
    let n = ds.n;
    if n < order {
        return Err(Error::MissingData {
            what: format!("{order} measurement times"),
        });
    }
    let mut vals = Vec::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    subset_rec(n, order, 0, &mut Vec::new(), &mut subsets);
    for sub in subsets {
        for s in sign_iter(order) {
            let mut v = 1.0;
            for (a, &i) in sub.iter().enumerate() {
                v += s[a] as f64 * d.averages[i];
            }
            for a in 0..order {
                for b in (a + 1)..order {
                    v += (s[a] * s[b]) as f64 * get_c2(ds, sub[a], sub[b])?;
                }
            }
            for a in 0..order {
                for b in (a + 1)..order {
                    for c in (b + 1)..order {
                        let key = (sub[a], sub[b], sub[c]);
                        let d3 = c3.get(&key).copied().ok_or_else(|| Error::MissingData {
                            what: format!("D{}{}{}", key.0 + 1, key.1 + 1, key.2 + 1),
                        })?;
                        v += (s[a] * s[b] * s[c]) as f64 * d3;
                    }
                }
            }
            if order == 4 {
                let key = (sub[0], sub[1], sub[2], sub[3]);
                let e4 = d
                    .c4
                    .as_ref()
                    .unwrap()
                    .get(&key)
                    .copied()
                    .ok_or_else(|| Error::MissingData {
                        what: format!(
                            "E{}{}{}{}",
                            key.0 + 1,
                            key.1 + 1,
                            key.2 + 1,
                            key.3 + 1
                        ),
                    })?;
                v += (s[0] * s[1] * s[2] * s[3]) as f64 * e4;
            }
            vals.push((
                v,
                Argmin::Signs {
                    times: sub.clone(),
                    signs: s,
                },
            ));
        }
    }
    Ok((family, vals))
}

/// Minimum higher-order bracket.
pub fn higher_order_min(ds: &MRDataset, order: usize, eps: f64) -> Result<ConditionReport> {
    let (family, vals) = higher_order_values(ds, order)?;
    fold_min(family, eps, vals)
}

fn subset_rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subset_rec(n, k, i + 1, cur, out);
        cur.pop();
    }
}

fn require_full(ds: &MRDataset, family: Family) -> Result<()> {
    if ds.subset != CorrelatorSubset::Full {
        return Err(Error::WrongSubset {
            family: family.name().into(),
            found: ds.subset.to_string(),
            required: "full".into(),
        });
    }
    Ok(())
}

/// Full-set n-time conditions: n + 2 sum_{i<j} s_i s_j C_ij minus 1 (odd n)
/// or 0 (even n), minimized over 2^(n-1) distinct sign vectors. For n = 5
/// each value is twice the pentagon value.
pub fn nfull_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    require_full(ds, Family::NFull)?;
    let d = ds.dichotomic()?;
    let n = ds.n;
    if n < 3 {
        return Err(Error::MissingData {
            what: "at least three times".into(),
        });
    }
    let rhs = if n % 2 == 1 { 1.0 } else { 0.0 };
    let mut vals = Vec::new();
    for s in half_sign_iter(n) {
        let mut corr = 0.0;
        for (&(i, j), &c) in &d.c2 {
            corr += (s[i] * s[j]) as f64 * c;
        }
        vals.push((
            n as f64 + 2.0 * corr - rhs,
            Argmin::Signs {
                times: (0..n).collect(),
                signs: s,
            },
        ));
    }
    Ok(vals)
}

/// Minimum full-set n-time value.
pub fn nfull_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::NFull, eps, nfull_values(ds)?)
}

/// Pentagon conditions 2 + sum_{i<j} s_i s_j C_ij >= 0 over all ten
/// correlators of a five-time dataset, 16 distinct sign vectors.
pub fn pentagon_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    if ds.n != 5 {
        return Err(Error::WrongSubset {
            family: Family::Pentagon.name().into(),
            found: format!("n = {}", ds.n),
            required: "n = 5 with all ten correlators".into(),
        });
    }
    require_full(ds, Family::Pentagon)?;
    let d = ds.dichotomic()?;
    let mut vals = Vec::new();
    for s in half_sign_iter(5) {
        let mut corr = 0.0;
        for (&(i, j), &c) in &d.c2 {
            corr += (s[i] * s[j]) as f64 * c;
        }
        vals.push((
            2.0 + corr,
            Argmin::Signs {
                times: (0..5).collect(),
                signs: s,
            },
        ));
    }
    Ok(vals)
}

/// Minimum pentagon value.
pub fn pentagon_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::Pentagon, eps, pentagon_values(ds)?)
}

/// Trichotomic two-time conditions 1 + <X_i> + <Y_j> + <X_i Y_j> >= 0 over
/// every pair and the nine variable choices per pair.
pub fn tri_lg2_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    let t = ds.trichotomic()?;
    let mut vals = Vec::new();
    for &(i, j) in t.c2_qr.keys() {
        for x in TriVar::ALL {
            for y in TriVar::ALL {
                let v = 1.0
                    + ds.tri_average(x, i)?
                    + ds.tri_average(y, j)?
                    + ds.tri_c2(x, i, y, j)?;
                vals.push((
                    v,
                    Argmin::Variables {
                        times: vec![i, j],
                        vars: vec![x, y],
                        signs: None,
                    },
                ));
            }
        }
    }
    Ok(vals)
}

/// Minimum trichotomic two-time value.
pub fn tri_lg2_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::TriLg2, eps, tri_lg2_values(ds)?)
}

/// Trichotomic three-time conditions
/// 1 + <X_1 Y_2> + <Y_2 Z_3> + <X_1 Z_3> >= 0 over all triples and the 27
/// variable choices.
pub fn tri_lg3_values(ds: &MRDataset) -> Result<Vec<(f64, Argmin)>> {
    let t = ds.trichotomic()?;
    let n = ds.n;
    let mut vals = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if !t.c2_qr.contains_key(&(i, j))
                    || !t.c2_qr.contains_key(&(j, k))
                    || !t.c2_qr.contains_key(&(i, k))
                {
                    continue;
                }
                for x in TriVar::ALL {
                    for y in TriVar::ALL {
                        for z in TriVar::ALL {
                            let v = 1.0
                                + ds.tri_c2(x, i, y, j)?
                                + ds.tri_c2(y, j, z, k)?
                                + ds.tri_c2(x, i, z, k)?;
                            vals.push((
                                v,
                                Argmin::Variables {
                                    times: vec![i, j, k],
                                    vars: vec![x, y, z],
                                    signs: None,
                                },
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(vals)
}

/// Minimum trichotomic three-time value.
pub fn tri_lg3_min(ds: &MRDataset, eps: f64) -> Result<ConditionReport> {
    fold_min(Family::TriLg3, eps, tri_lg3_values(ds)?)
}

/// Quantum (projective-measurement) lower bound declared for a family.
pub fn quantum_bound(family: Family) -> Result<f64> {
    match family {
        Family::Lg2 | Family::Lg3 | Family::Pentagon => Ok(-0.5),
        Family::Ho3 => Ok(-1.0),
        Family::Ho4 => Ok(-2.0),
        other => Err(Error::UnknownFamily {
            family: other.name().into(),
        }),
    }
}

/// Result of checking a report against its family's quantum bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LudersCheck {
    pub bound: f64,
    /// min_value - bound; nonnegative (up to epsilon) when within bound.
    pub margin: f64,
    pub within_bound: bool,
}

/// Check a quantum-derived report against the family bound.
pub fn luders_check(report: &ConditionReport, eps: f64) -> Result<LudersCheck> {
    let bound = quantum_bound(report.family)?;
    let margin = report.min_value - bound;
    Ok(LudersCheck {
        bound,
        margin,
        within_bound: margin >= -eps,
    })
}

/// Regime classification of a set of reports from one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "ALL_SAT")]
    AllSatisfied,
    #[serde(rename = "STD_SAT_EXT_VIOL")]
    StandardSatisfiedExtendedViolated,
    #[serde(rename = "STD_VIOL")]
    StandardViolated,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::AllSatisfied => "ALL_SAT",
            Regime::StandardSatisfiedExtendedViolated => "STD_SAT_EXT_VIOL",
            Regime::StandardViolated => "STD_VIOL",
        })
    }
}

/// Per-family flags plus the regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub satisfied: std::collections::BTreeMap<Family, bool>,
    pub regime: Regime,
}

/// Classify: standard families all satisfied + some extended family
/// violated is the regime of interest; any standard violation dominates.
pub fn classify_regime(reports: &[ConditionReport], eps: f64) -> RegimeLabel {
    let mut flags = std::collections::BTreeMap::new();
    let mut std_viol = false;
    let mut ext_viol = false;
    for r in reports {
        let ok = r.min_value >= -eps;
        flags.insert(r.family, ok);
        if !ok {
            if r.family.is_standard() {
                std_viol = true;
            } else {
                ext_viol = true;
            }
        }
    }
    let regime = if std_viol {
        Regime::StandardViolated
    } else if ext_viol {
        Regime::StandardSatisfiedExtendedViolated
    } else {
        Regime::AllSatisfied
    };
    RegimeLabel {
        satisfied: flags,
        regime,
    }
}

/// Every family applicable to a dataset, in presentation order.
pub fn applicable_families(ds: &MRDataset) -> Vec<Family> {
    match &ds.body {
        crate::correlators::DatasetBody::Dichotomic(d) => {
            let mut fams = vec![Family::Lg2];
            if ds.n >= 3 {
                fams.push(Family::Lg3);
            }
            if ds.n == 4 && ds.subset == CorrelatorSubset::Cycle {
                fams.push(Family::Lg4Cycle);
            }
            if ds.n == 5 && ds.subset == CorrelatorSubset::Cycle {
                fams.push(Family::Lg5Cycle);
            }
            if d.c3.is_some() && ds.n >= 3 {
                fams.push(Family::Ho3);
            }
            if d.c4.is_some() && ds.n >= 4 {
                fams.push(Family::Ho4);
            }
            if ds.subset == CorrelatorSubset::Full && ds.n >= 3 {
                fams.push(Family::NFull);
            }
            if ds.subset == CorrelatorSubset::Full && ds.n == 5 {
                fams.push(Family::Pentagon);
            }
            fams
        }
        crate::correlators::DatasetBody::Trichotomic(_) => {
            let mut fams = vec![Family::TriLg2];
            if ds.n >= 3 {
                fams.push(Family::TriLg3);
            }
            fams
        }
    }
}

/// Full value enumeration for any family.
pub fn family_values(ds: &MRDataset, family: Family) -> Result<Vec<(f64, Argmin)>> {
    match family {
        Family::Lg2 => lg2_values(ds),
        Family::Lg3 => lg3_values(ds),
        Family::Lg4Cycle => lgn_cycle_values(ds, 4).map(|(_, v)| v),
        Family::Lg5Cycle => lgn_cycle_values(ds, 5).map(|(_, v)| v),
        Family::Ho3 => higher_order_values(ds, 3).map(|(_, v)| v),
        Family::Ho4 => higher_order_values(ds, 4).map(|(_, v)| v),
        Family::NFull => nfull_values(ds),
        Family::Pentagon => pentagon_values(ds),
        Family::TriLg2 => tri_lg2_values(ds),
        Family::TriLg3 => tri_lg3_values(ds),
    }
}

/// Evaluate one family on a dataset.
pub fn evaluate(ds: &MRDataset, family: Family, eps: f64) -> Result<ConditionReport> {
    match family {
        Family::Lg2 => lg2_min(ds, eps),
        Family::Lg3 => lg3_min(ds, eps),
        Family::Lg4Cycle => lgn_cycle_min(ds, 4, eps),
        Family::Lg5Cycle => lgn_cycle_min(ds, 5, eps),
        Family::Ho3 => higher_order_min(ds, 3, eps),
        Family::Ho4 => higher_order_min(ds, 4, eps),
        Family::NFull => nfull_min(ds, eps),
        Family::Pentagon => pentagon_min(ds, eps),
        Family::TriLg2 => tri_lg2_min(ds, eps),
        Family::TriLg3 => tri_lg3_min(ds, eps),
    }
}

/// Re-evaluate the bracket of a family at a fixed assignment; used to
/// verify that an argmin reproduces its reported minimum.
pub fn value_at(ds: &MRDataset, family: Family, argmin: &Argmin) -> Result<f64> {
    match (family, argmin) {
        (Family::Lg2, Argmin::Signs { times, signs }) => {
            let d = ds.dichotomic()?;
            let (i, j) = (times[0], times[1]);
            Ok(1.0
                + signs[0] as f64 * d.averages[i]
                + signs[1] as f64 * d.averages[j]
                + (signs[0] * signs[1]) as f64 * get_c2(ds, i, j)?)
        }
        (Family::Lg3, Argmin::Signs { times, signs }) => {
            let (i, j, k) = (times[0], times[1], times[2]);
            Ok(1.0
                + (signs[0] * signs[1]) as f64 * get_c2(ds, i, j)?
                + (signs[1] * signs[2]) as f64 * get_c2(ds, j, k)?
                + (signs[0] * signs[2]) as f64 * get_c2(ds, i, k)?)
        }
        (Family::Lg4Cycle | Family::Lg5Cycle, Argmin::Signs { times, signs }) => {
            let n = times.len();
            let mut v = n as f64 - 2.0;
            for i in 0..n {
                let j = (i + 1) % n;
                let (a, b) = (times[i].min(times[j]), times[i].max(times[j]));
                v += signs[i] as f64 * get_c2(ds, a, b)?;
            }
            Ok(v)
        }
        (Family::Ho3 | Family::Ho4, Argmin::Signs { times, signs }) => {
            let d = ds.dichotomic()?;
            let m = times.len();
            let mut v = 1.0;
            for a in 0..m {
                v += signs[a] as f64 * d.averages[times[a]];
            }
            for a in 0..m {
                for b in (a + 1)..m {
                    v += (signs[a] * signs[b]) as f64 * get_c2(ds, times[a], times[b])?;
                }
            }
            let c3 = d.c3.as_ref().ok_or_else(|| Error::MissingData {
                what: "third-order correlators".into(),
            })?;
            for a in 0..m {
                for b in (a + 1)..m {
                    for c in (b + 1)..m {
                        v += (signs[a] * signs[b] * signs[c]) as f64
                            * c3[&(times[a], times[b], times[c])];
                    }
                }
            }
            if m == 4 {
                let c4 = d.c4.as_ref().ok_or_else(|| Error::MissingData {
                    what: "fourth-order correlators".into(),
                })?;
                v += (signs[0] * signs[1] * signs[2] * signs[3]) as f64
                    * c4[&(times[0], times[1], times[2], times[3])];
            }
            Ok(v)
        }
        (Family::NFull, Argmin::Signs { signs, .. }) => {
            let d = ds.dichotomic()?;
            let n = ds.n;
            let rhs = if n % 2 == 1 { 1.0 } else { 0.0 };
            let mut corr = 0.0;
            for (&(i, j), &c) in &d.c2 {
                corr += (signs[i] * signs[j]) as f64 * c;
            }
            Ok(n as f64 + 2.0 * corr - rhs)
        }
        (Family::Pentagon, Argmin::Signs { signs, .. }) => {
            let d = ds.dichotomic()?;
            let mut corr = 0.0;
            for (&(i, j), &c) in &d.c2 {
                corr += (signs[i] * signs[j]) as f64 * c;
            }
            Ok(2.0 + corr)
        }
        (Family::TriLg2, Argmin::Variables { times, vars, .. }) => Ok(1.0
            + ds.tri_average(vars[0], times[0])?
            + ds.tri_average(vars[1], times[1])?
            + ds.tri_c2(vars[0], times[0], vars[1], times[1])?),
        (Family::TriLg3, Argmin::Variables { times, vars, .. }) => Ok(1.0
            + ds.tri_c2(vars[0], times[0], vars[1], times[1])?
            + ds.tri_c2(vars[1], times[1], vars[2], times[2])?
            + ds.tri_c2(vars[0], times[0], vars[2], times[2])?),
        _ => Err(Error::InvalidSpec {
            reason: "argmin shape does not match family".into(),
        }),
    }
}
