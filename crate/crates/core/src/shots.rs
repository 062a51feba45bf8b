//! Finite-statistics simulation of sequential projective measurements.
//!
//! A shot plan runs one experiment per dataset entry (time subset), the
//! way the correlators would actually be measured: no reuse of
//! earlier-time marginals across experiments. Each experiment gets its own
//! RNG stream derived from the master seed by a counter split, so adding
//! experiments never perturbs existing ones.
//!
//! [`sample_sequence`] implements the literal per-shot collapse chain.
//! [`estimate_dataset`] samples outcome-string counts from the exact
//! chain distribution (binomial splitting of the multinomial), which is
//! statistically identical and lets million-shot plans run in
//! milliseconds.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::conditions::{family_values, Argmin, ConditionReport, Family};
use crate::correlators::{
    expected_pairs, seq_probs, CorrelatorSubset, DatasetBody, DichotomicData, MRDataset,
};
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::observables::{ModelConfig, Observable, SpinModel};
use crate::states::DensityMatrix;

/// One experiment: measure at this subset of the model's time indices and
/// record the signed outcome product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub time_indices: Vec<usize>,
}

/// Plan: model, experiments, shots per experiment, master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub model: ModelConfig,
    pub experiments: Vec<Experiment>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotPlan {
    /// One experiment per time subset of each requested order, mirroring
    /// the separate-experiments protocol (seven experiments for three
    /// times at orders {1, 2, 3}).
    pub fn default_plan(model: ModelConfig, orders: &[usize], shots: u64, seed: u64) -> Result<Self> {
        let n = model.times.len();
        if shots == 0 {
            return Err(Error::InvalidSpec {
                reason: "shots must be >= 1".into(),
            });
        }
        let mut experiments = Vec::new();
        for &order in orders {
            if !(1..=4).contains(&order) || order > n {
                return Err(Error::InvalidSpec {
                    reason: format!("order {order} unsupported for {n} times"),
                });
            }
            let mut subs = Vec::new();
            subset_rec(n, order, 0, &mut Vec::new(), &mut subs);
            experiments.extend(subs.into_iter().map(|time_indices| Experiment { time_indices }));
        }
        Ok(Self {
            model,
            experiments,
            shots,
            seed,
        })
    }
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

/// Point estimates plus per-entry standard errors and shot counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedDataset {
    pub dataset: MRDataset,
    /// Standard error per entry, same keys as the dataset.
    pub stderr: DichotomicData,
    pub shots: u64,
}

/// Reference to one dichotomic dataset entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryRef {
    Avg(usize),
    C2(usize, usize),
    C3(usize, usize, usize),
    C4(usize, usize, usize, usize),
}

impl EstimatedDataset {
    pub fn stderr_of(&self, e: EntryRef) -> Result<f64> {
        let missing = || Error::MissingData {
            what: format!("{e:?} stderr"),
        };
        match e {
            EntryRef::Avg(i) => self.stderr.averages.get(i).copied().ok_or_else(missing),
            EntryRef::C2(i, j) => self.stderr.c2.get(&(i, j)).copied().ok_or_else(missing),
            EntryRef::C3(i, j, k) => self
                .stderr
                .c3
                .as_ref()
                .and_then(|m| m.get(&(i, j, k)).copied())
                .ok_or_else(missing),
            EntryRef::C4(i, j, k, l) => self
                .stderr
                .c4
                .as_ref()
                .and_then(|m| m.get(&(i, j, k, l)).copied())
                .ok_or_else(missing),
        }
    }
}

/// Evolved (+1, -1)-projector pairs for a subset of a model's times.
fn projector_chain(model: &SpinModel, time_indices: &[usize]) -> Result<Vec<(CMatrix, CMatrix)>> {
    match &model.observable {
        Observable::Dichotomic(_) => time_indices
            .iter()
            .map(|&i| {
                let q = model.dichotomic_at(i)?;
                let id = CMatrix::identity(model.dim);
                Ok((id.add(&q).scale(0.5), id.sub(&q).scale(0.5)))
            })
            .collect(),
        Observable::Trichotomic(_) => Err(Error::WrongKind {
            reason: "shot plans support dichotomic observables".into(),
        }),
    }
}

/// Sample one outcome string by collapsing through the projector chain.
pub fn sample_sequence(
    rho: &DensityMatrix,
    projector_pairs: &[(CMatrix, CMatrix)],
    rng: &mut impl Rng,
) -> Result<Vec<i8>> {
    let mut state = rho.matrix().clone();
    let mut outcome = Vec::with_capacity(projector_pairs.len());
    for (pp, pm) in projector_pairs {
        let collapsed_plus = pp.mul(&state).mul(pp);
        let p_plus = collapsed_plus.trace().re.clamp(0.0, 1.0);
        if rng.random_range(0.0..1.0) < p_plus {
            outcome.push(1i8);
            if p_plus <= 0.0 {
                return Err(Error::Internal {
                    reason: "collapse onto zero-probability branch".into(),
                });
            }
            state = collapsed_plus.scale(1.0 / p_plus);
        } else {
            outcome.push(-1i8);
            let collapsed_minus = pm.mul(&state).mul(pm);
            let p_minus = collapsed_minus.trace().re.max(0.0);
            if p_minus <= 0.0 {
                return Err(Error::Internal {
                    reason: "collapse onto zero-probability branch".into(),
                });
            }
            state = collapsed_minus.scale(1.0 / p_minus);
        }
    }
    Ok(outcome)
}

/// Multinomial counts over table outcomes via sequential binomial splits.
fn multinomial_counts(probs: &[f64], shots: u64, rng: &mut ChaCha12Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    for (k, &p) in probs.iter().enumerate() {
        if k == probs.len() - 1 {
            counts[k] = remaining;
            break;
        }
        if remaining == 0 {
            break;
        }
        let cond = if mass_left > 1e-15 {
            (p / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, cond)
            .map(|b| b.sample(rng))
            .unwrap_or(0);
        counts[k] = draw;
        remaining -= draw;
        mass_left -= p;
    }
    counts
}

/// Run a plan: per experiment, sample `shots` outcome strings from the
/// exact chain distribution and record the signed-product mean and its
/// standard error.
pub fn estimate_dataset(plan: &ShotPlan) -> Result<EstimatedDataset> {
    if plan.shots == 0 {
        return Err(Error::InvalidSpec {
            reason: "shots must be >= 1".into(),
        });
    }
    let model = plan.model.build()?;
    let n = model.n_times();

    struct Measured {
        key: EntryRef,
        value: f64,
        stderr: f64,
    }

    let results: Vec<Result<Measured>> = crate::maybe_par_map(
        plan.experiments.iter().cloned().enumerate().collect(),
        |(e_index, exp)| {
            let mut slots = exp.time_indices.clone();
            slots.sort_unstable();
            slots.dedup();
            if slots.len() != exp.time_indices.len() || slots.iter().any(|&i| i >= n) {
                return Err(Error::InvalidSpec {
                    reason: format!("experiment {e_index} has invalid time indices"),
                });
            }
            let key = match slots.as_slice() {
                [i] => EntryRef::Avg(*i),
                [i, j] => EntryRef::C2(*i, *j),
                [i, j, k] => EntryRef::C3(*i, *j, *k),
                [i, j, k, l] => EntryRef::C4(*i, *j, *k, *l),
                _ => {
                    return Err(Error::InvalidSpec {
                        reason: "experiments measure 1 to 4 times".into(),
                    })
                }
            };
            let pairs = projector_chain(&model, &slots)?;
            let table = seq_probs(&model.initial, &pairs)?;
            let mut rng = ChaCha12Rng::seed_from_u64(plan.seed);
            rng.set_stream(e_index as u64);
            let counts = multinomial_counts(&table.entries, plan.shots, &mut rng);
            // signed product of each outcome string
            let shots_f = plan.shots as f64;
            let mut mean = 0.0;
            for (idx, &c) in counts.iter().enumerate() {
                let sign: i32 = table.signs(idx).iter().map(|&s| s as i32).product();
                mean += sign as f64 * c as f64;
            }
            mean /= shots_f;
            // sample std of +-1 products: sum (x - mean)^2 = N (1 - mean^2)
            let stderr = if plan.shots > 1 {
                ((1.0 - mean * mean).max(0.0) / (shots_f - 1.0)).sqrt()
            } else {
                0.0
            };
            let stderr = stderr.max(1.0 / shots_f);
            Ok(Measured {
                key,
                value: mean,
                stderr,
            })
        },
    );

    let mut averages = vec![f64::NAN; n];
    let mut avg_err = vec![f64::NAN; n];
    let mut c2 = BTreeMap::new();
    let mut c2_err = BTreeMap::new();
    let mut c3 = BTreeMap::new();
    let mut c3_err = BTreeMap::new();
    let mut c4 = BTreeMap::new();
    let mut c4_err = BTreeMap::new();
    for r in results {
        let m = r?;
        match m.key {
            EntryRef::Avg(i) => {
                averages[i] = m.value;
                avg_err[i] = m.stderr;
            }
            EntryRef::C2(i, j) => {
                c2.insert((i, j), m.value);
                c2_err.insert((i, j), m.stderr);
            }
            EntryRef::C3(i, j, k) => {
                c3.insert((i, j, k), m.value);
                c3_err.insert((i, j, k), m.stderr);
            }
            EntryRef::C4(i, j, k, l) => {
                c4.insert((i, j, k, l), m.value);
                c4_err.insert((i, j, k, l), m.stderr);
            }
        }
    }
    if averages.iter().any(|v| v.is_nan()) {
        return Err(Error::MissingData {
            what: "an average for every time (singleton experiments)".into(),
        });
    }
    // subset tag from pair coverage
    let full = expected_pairs(n, CorrelatorSubset::Full);
    let cycle = expected_pairs(n, CorrelatorSubset::Cycle);
    let has = |pairs: &[(usize, usize)]| pairs.iter().all(|p| c2.contains_key(p));
    let subset = if has(&full) {
        CorrelatorSubset::Full
    } else if has(&cycle) {
        CorrelatorSubset::Cycle
    } else {
        return Err(Error::MissingData {
            what: "pair experiments covering the full or cycle correlator set".into(),
        });
    };
    let dataset = MRDataset {
        n,
        subset,
        body: DatasetBody::Dichotomic(DichotomicData {
            averages,
            c2,
            c3: (!c3.is_empty()).then_some(c3),
            c4: (!c4.is_empty()).then_some(c4),
        }),
    };
    Ok(EstimatedDataset {
        dataset,
        stderr: DichotomicData {
            averages: avg_err,
            c2: c2_err,
            c3: (!c3_err.is_empty()).then_some(c3_err),
            c4: (!c4_err.is_empty()).then_some(c4_err),
        },
        shots: plan.shots,
    })
}

/// Entries and their coefficients in one family bracket at a fixed
/// assignment; the bracket is linear in the entries.
fn gradient(family: Family, argmin: &Argmin, ds: &MRDataset) -> Result<Vec<(EntryRef, f64)>> {
    let (times, signs) = match argmin {
        Argmin::Signs { times, signs } => (times, signs),
        Argmin::Variables { .. } => {
            return Err(Error::WrongKind {
                reason: "error propagation covers dichotomic families".into(),
            })
        }
    };
    let s = |k: usize| signs[k] as f64;
    let mut grad = Vec::new();
    match family {
        Family::Lg2 => {
            grad.push((EntryRef::Avg(times[0]), s(0)));
            grad.push((EntryRef::Avg(times[1]), s(1)));
            grad.push((EntryRef::C2(times[0], times[1]), s(0) * s(1)));
        }
        Family::Lg3 => {
            grad.push((EntryRef::C2(times[0], times[1]), s(0) * s(1)));
            grad.push((EntryRef::C2(times[1], times[2]), s(1) * s(2)));
            grad.push((EntryRef::C2(times[0], times[2]), s(0) * s(2)));
        }
        Family::Lg4Cycle | Family::Lg5Cycle => {
            let n = times.len();
            for i in 0..n {
                let j = (i + 1) % n;
                let (a, b) = (times[i].min(times[j]), times[i].max(times[j]));
                grad.push((EntryRef::C2(a, b), s(i)));
            }
        }
        Family::Ho3 | Family::Ho4 => {
            let m = times.len();
            for a in 0..m {
                grad.push((EntryRef::Avg(times[a]), s(a)));
            }
            for a in 0..m {
                for b in (a + 1)..m {
                    grad.push((EntryRef::C2(times[a], times[b]), s(a) * s(b)));
                }
            }
            for a in 0..m {
                for b in (a + 1)..m {
                    for c in (b + 1)..m {
                        grad.push((
                            EntryRef::C3(times[a], times[b], times[c]),
                            s(a) * s(b) * s(c),
                        ));
                    }
                }
            }
            if m == 4 {
                grad.push((
                    EntryRef::C4(times[0], times[1], times[2], times[3]),
                    s(0) * s(1) * s(2) * s(3),
                ));
            }
        }
        Family::NFull => {
            for &(i, j) in ds.dichotomic()?.c2.keys() {
                grad.push((EntryRef::C2(i, j), 2.0 * s(i) * s(j)));
            }
        }
        Family::Pentagon => {
            for &(i, j) in ds.dichotomic()?.c2.keys() {
                grad.push((EntryRef::C2(i, j), s(i) * s(j)));
            }
        }
        Family::TriLg2 | Family::TriLg3 => {
            return Err(Error::WrongKind {
                reason: "error propagation covers dichotomic families".into(),
            })
        }
    }
    Ok(grad)
}

/// A condition report with shot noise propagated to the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyConditionReport {
    pub report: ConditionReport,
    /// First-order standard error of the minimum at the fixed minimizing
    /// assignment (the bracket is linear in the entries).
    pub stderr: f64,
    /// Set when another assignment's value lies within one propagated
    /// standard error of the minimum.
    pub near_degenerate_argmin: bool,
    /// min / stderr, negative when the condition is violated.
    pub significance: f64,
}

/// Evaluate a family on the point estimates and propagate the per-entry
/// errors into the minimum (sign assignment held fixed).
pub fn evaluate_with_errors(
    est: &EstimatedDataset,
    family: Family,
    eps: f64,
) -> Result<NoisyConditionReport> {
    let values = family_values(&est.dataset, family)?;
    let (min_value, argmin) = values
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(v, a)| (*v, a.clone()))
        .ok_or_else(|| Error::MissingData {
            what: format!("{family} has no evaluable instances"),
        })?;
    let grad = gradient(family, &argmin, &est.dataset)?;
    let mut var = 0.0;
    for (entry, coeff) in grad {
        let se = est.stderr_of(entry)?;
        var += coeff * coeff * se * se;
    }
    let stderr = var.sqrt();
    let second = values
        .iter()
        .filter(|(_, a)| *a != argmin)
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min);
    let near_degenerate_argmin = second - min_value <= stderr;
    let report = ConditionReport {
        family,
        min_value,
        argmin,
        satisfied: min_value >= -eps,
        epsilon: eps,
        value_convention: "bracket".to_string(),
    };
    Ok(NoisyConditionReport {
        report,
        stderr,
        near_degenerate_argmin,
        significance: if stderr > 0.0 {
            min_value / stderr
        } else {
            f64::INFINITY
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{HamiltonianConfig, ObservableConfig, StateConfig};
    use crate::search::construction5;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn spin_half_plan(shots: u64, seed: u64) -> ShotPlan {
        let s = 1.0 / 2f64.sqrt();
        let cfg = ModelConfig {
            dim: 2,
            hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
            observable: ObservableConfig::Case { case_id: 2 },
            state: StateConfig::Bloch { v: [s, s, 0.0] },
            times: vec![0.0, PI, 4.7],
        };
        ShotPlan::default_plan(cfg, &[1, 2, 3], shots, seed).unwrap()
    }

    #[test]
    fn default_plan_has_seven_experiments_for_three_times() {
        let plan = spin_half_plan(10, 1);
        assert_eq!(plan.experiments.len(), 7); // 3 + 3 + 1
    }

    #[test]
    fn sample_sequence_deterministic_alignment() {
        // state |0><0| measured with sigma_z projectors: always +1
        let rho = DensityMatrix::pure(&crate::numerics::CVector::basis(2, 0)).unwrap();
        let q = crate::observables::case_observable(2).unwrap();
        let pairs = vec![q.projectors(), q.projectors(), q.projectors()];
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let out = sample_sequence(&rho, &pairs, &mut rng).unwrap();
            assert_eq!(out, vec![1, 1, 1]);
        }
    }

    #[test]
    fn sample_sequence_matches_table_frequencies() {
        // two-time spin-half: empirical C12 within 5 sigma of cos(dt)
        let plan = spin_half_plan(1, 1);
        let model = plan.model.build().unwrap();
        let pairs = projector_chain(&model, &[0, 2]).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let shots = 40_000u64;
        let mut sum = 0.0;
        for _ in 0..shots {
            let out = sample_sequence(&model.initial, &pairs, &mut rng).unwrap();
            sum += (out[0] * out[1]) as f64;
        }
        let est = sum / shots as f64;
        let exact = 4.7f64.cos();
        let sigma = ((1.0 - exact * exact) / shots as f64).sqrt();
        assert!(
            (est - exact).abs() < 5.0 * sigma,
            "estimate {est} vs exact {exact} (sigma {sigma})"
        );
    }

    #[test]
    fn one_shot_entries_are_plus_minus_one() {
        let est = estimate_dataset(&spin_half_plan(1, 9)).unwrap();
        let d = est.dataset.dichotomic().unwrap();
        for &v in d.averages.iter().chain(d.c2.values()) {
            assert!(v == 1.0 || v == -1.0, "entry {v}");
        }
        for &e in est.stderr.averages.iter() {
            assert!(e > 0.0);
        }
    }

    #[test]
    fn same_seed_same_estimates() {
        let a = estimate_dataset(&spin_half_plan(5000, 77)).unwrap();
        let b = estimate_dataset(&spin_half_plan(5000, 77)).unwrap();
        assert_eq!(a, b);
        let c = estimate_dataset(&spin_half_plan(5000, 78)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn estimates_converge_to_exact() {
        let plan = spin_half_plan(200_000, 5);
        let est = estimate_dataset(&plan).unwrap();
        let model = plan.model.build().unwrap();
        let exact = crate::correlators::dataset_from_model(&model, &[1, 2, 3]).unwrap();
        let (de, dx) = (
            est.dataset.dichotomic().unwrap(),
            exact.dichotomic().unwrap(),
        );
        for i in 0..3 {
            let se = est.stderr.averages[i];
            assert!(
                (de.averages[i] - dx.averages[i]).abs() <= 5.0 * se,
                "avg {i}: {} vs {}",
                de.averages[i],
                dx.averages[i]
            );
        }
        for (k, v) in &de.c2 {
            let se = est.stderr.c2[k];
            assert!((v - dx.c2[k]).abs() <= 5.0 * se, "c2 {k:?}");
        }
        assert!(
            (de.c3.as_ref().unwrap()[&(0, 1, 2)] - dx.c3.as_ref().unwrap()[&(0, 1, 2)]).abs()
                <= 5.0 * est.stderr.c3.as_ref().unwrap()[&(0, 1, 2)]
        );
    }

    #[test]
    fn evaluate_with_errors_matches_exact_on_construction() {
        // construction dataset measured with many shots: pentagon minimum
        // near -1/2 and significantly violated
        let c = construction5(0.375).unwrap();
        let plan = ShotPlan::default_plan(
            c.hamiltonian_model.clone().unwrap(),
            &[1, 2],
            100_000,
            12345,
        )
        .unwrap();
        assert_eq!(plan.experiments.len(), 15); // 5 singles + 10 pairs
        let est = estimate_dataset(&plan).unwrap();
        let noisy = evaluate_with_errors(&est, Family::Pentagon, 1e-9).unwrap();
        assert!(
            (noisy.report.min_value + 0.5).abs() < 0.05,
            "pentagon estimate {}",
            noisy.report.min_value
        );
        assert!(noisy.stderr < 0.02);
        assert!(
            noisy.significance < -5.0,
            "violation not significant: {}",
            noisy.significance
        );
    }

    #[test]
    fn tiny_shot_counts_flag_wide_intervals() {
        let c = construction5(0.375).unwrap();
        let plan =
            ShotPlan::default_plan(c.hamiltonian_model.clone().unwrap(), &[1, 2], 10, 3).unwrap();
        let est = estimate_dataset(&plan).unwrap();
        let noisy = evaluate_with_errors(&est, Family::Pentagon, 1e-9).unwrap();
        // with 10 shots the interval is wide: |significance| small or the
        // argmin degenerate
        assert!(noisy.stderr > 0.05);
    }

    #[test]
    fn exact_dataset_zero_errors_matches_conditions() {
        // feed exact entries with zero stderr: evaluate_with_errors agrees
        // with the plain evaluator
        let model = spin_half_plan(1, 1).model.build().unwrap();
        let exact = crate::correlators::dataset_from_model(&model, &[1, 2, 3]).unwrap();
        let d = exact.dichotomic().unwrap().clone();
        let zeros = DichotomicData {
            averages: vec![0.0; 3],
            c2: d.c2.keys().map(|&k| (k, 0.0)).collect(),
            c3: d
                .c3
                .as_ref()
                .map(|m| m.keys().map(|&k| (k, 0.0)).collect()),
            c4: None,
        };
        let est = EstimatedDataset {
            dataset: exact.clone(),
            stderr: zeros,
            shots: u64::MAX,
        };
        let noisy = evaluate_with_errors(&est, Family::Ho3, 1e-9).unwrap();
        let plain = crate::conditions::higher_order_min(&exact, 3, 1e-9).unwrap();
        assert_abs_diff_eq!(noisy.report.min_value, plain.min_value, epsilon = 1e-14);
        assert_eq!(noisy.stderr, 0.0);
    }
}
