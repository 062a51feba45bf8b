//! Parameter scans, analytic constructions and randomized searches.
//!
//! Scans sweep one measurement time of a model template over a grid,
//! evaluate condition families per point and classify regime intervals.
//! The four- and five-level equal-overlap constructions are built here,
//! together with the overlap-target solver that picks their rotation
//! angle. Randomized searches draw models from the tabulated case
//! families and rank instances by a target family's minimum.

use serde::{Deserialize, Serialize};

use crate::conditions::{
    classify_regime, evaluate, ConditionReport, Family, Regime, DEFAULT_EPSILON,
};
use crate::correlators::{
    dataset_from_model, overlap_correlators, DatasetBody, DichotomicData, MRDataset,
};
use crate::error::{Error, Result};
use crate::numerics::{CVector, C64};
use crate::observables::{HamiltonianConfig, ModelConfig, Observable, ObservableConfig, SpinModel, StateConfig};
use crate::states::{PureStateParams, StateJson};

/// One free time parameter swept over an inclusive grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    /// Index into the model's `times` to replace per grid point (0-based).
    pub time_index: usize,
    pub start: f64,
    pub stop: f64,
    /// Number of grid points (both endpoints included).
    pub points: usize,
}

/// Scan specification: a model template plus the swept axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub model: ModelConfig,
    pub scan: ScanAxis,
    pub families: Vec<Family>,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
}

fn default_eps() -> f64 {
    DEFAULT_EPSILON
}

/// Maximal grid sub-range sharing one regime label. Boundaries against the
/// neighbouring interval are refined by bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeInterval {
    pub regime: Regime,
    pub start_index: usize,
    pub end_index: usize,
    pub start_param: f64,
    pub end_param: f64,
    /// Bisection-refined boundary toward the previous interval (absent for
    /// the first interval).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_start: Option<f64>,
}

/// Scan output: per-point minima per family plus regime intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub param_name: String,
    pub params: Vec<f64>,
    pub families: Vec<Family>,
    /// minima[f][k] is family `families[f]` at grid point k.
    pub minima: Vec<Vec<f64>>,
    pub regimes: Vec<Regime>,
    pub intervals: Vec<RegimeInterval>,
    pub epsilon: f64,
}

/// Correlator orders a family consumes.
fn orders_for(families: &[Family]) -> Vec<usize> {
    let mut orders = vec![1, 2];
    if families.contains(&Family::Ho3) || families.contains(&Family::Ho4) {
        orders.push(3);
    }
    if families.contains(&Family::Ho4) {
        orders.push(4);
    }
    orders
}

/// Dichotomic view of a trichotomic dataset: the Q-variable entries.
pub fn q_projection(ds: &MRDataset) -> Result<MRDataset> {
    let t = ds.trichotomic()?;
    let c2 = t
        .c2_qr
        .iter()
        .map(|(&k, block)| (k, block[0]))
        .collect();
    Ok(MRDataset {
        n: ds.n,
        subset: ds.subset,
        body: DatasetBody::Dichotomic(DichotomicData {
            averages: t.q_averages.clone(),
            c2,
            c3: None,
            c4: None,
        }),
    })
}

/// Evaluate a family mix on a model: trichotomic families on the full
/// dataset, dichotomic families on the model's dichotomic data (or the
/// Q-projection of a trichotomic model).
pub fn evaluate_model(model: &SpinModel, families: &[Family], eps: f64) -> Result<Vec<ConditionReport>> {
    let tri_requested = families
        .iter()
        .any(|f| matches!(f, Family::TriLg2 | Family::TriLg3));
    let dich_requested = families
        .iter()
        .any(|f| !matches!(f, Family::TriLg2 | Family::TriLg3));
    let (tri_ds, dich_ds) = match &model.observable {
        Observable::Trichotomic(_) => {
            let tri = dataset_from_model(model, &[1, 2])?;
            let dich = if dich_requested {
                Some(q_projection(&tri)?)
            } else {
                None
            };
            (Some(tri), dich)
        }
        Observable::Dichotomic(_) => {
            if tri_requested {
                return Err(Error::WrongKind {
                    reason: "trichotomic families need a trichotomic model".into(),
                });
            }
            (None, Some(dataset_from_model(model, &orders_for(families))?))
        }
    };
    families
        .iter()
        .map(|&fam| {
            let ds = match fam {
                Family::TriLg2 | Family::TriLg3 => tri_ds.as_ref().unwrap(),
                _ => dich_ds.as_ref().ok_or(Error::WrongKind {
                    reason: "no dichotomic data".into(),
                })?,
            };
            evaluate(ds, fam, eps)
        })
        .collect()
}

fn model_at(spec: &ScanSpec, value: f64) -> Result<SpinModel> {
    let mut cfg = spec.model.clone();
    if spec.scan.time_index >= cfg.times.len() {
        return Err(Error::InvalidSpec {
            reason: format!(
                "scan time_index {} out of range for {} times",
                spec.scan.time_index,
                cfg.times.len()
            ),
        });
    }
    cfg.times[spec.scan.time_index] = value;
    cfg.build()
}

/// Run a scan. The result is a pure function of the `ScanSpec`; grid
/// points evaluate independently (in parallel when enabled) and merge in
/// grid order.
pub fn scan(spec: &ScanSpec) -> Result<ScanResult> {
    if spec.scan.points < 2 {
        return Err(Error::InvalidSpec {
            reason: "grid needs at least 2 points".into(),
        });
    }
    if !(spec.scan.start.is_finite() && spec.scan.stop.is_finite()) {
        return Err(Error::InvalidSpec {
            reason: "scan range must be finite".into(),
        });
    }
    if spec.families.is_empty() {
        return Err(Error::InvalidSpec {
            reason: "no condition families requested".into(),
        });
    }
    // validate the template once up front
    model_at(spec, spec.scan.start)?;

    let pts = spec.scan.points;
    let step = (spec.scan.stop - spec.scan.start) / (pts - 1) as f64;
    let params: Vec<f64> = (0..pts).map(|k| spec.scan.start + step * k as f64).collect();

    let evals: Vec<Result<Vec<ConditionReport>>> = crate::maybe_par_map(params.clone(), |v| {
        let model = model_at(spec, v)?;
        evaluate_model(&model, &spec.families, spec.epsilon)
    });

    let mut minima = vec![Vec::with_capacity(pts); spec.families.len()];
    let mut regimes = Vec::with_capacity(pts);
    for reports in evals {
        let reports = reports?;
        for (f, r) in reports.iter().enumerate() {
            minima[f].push(r.min_value);
        }
        regimes.push(classify_regime(&reports, spec.epsilon).regime);
    }

    let intervals = build_intervals(spec, &params, &regimes)?;
    Ok(ScanResult {
        param_name: format!("omega_t{}", spec.scan.time_index + 1),
        params,
        families: spec.families.clone(),
        minima,
        regimes,
        intervals,
        epsilon: spec.epsilon,
    })
}

impl ScanResult {
    /// Grid points whose regime matches `want`.
    pub fn points_with_regime(&self, want: Regime) -> Vec<usize> {
        self.regimes
            .iter()
            .enumerate()
            .filter_map(|(k, &r)| (r == want).then_some(k))
            .collect()
    }
}

fn build_intervals(
    spec: &ScanSpec,
    params: &[f64],
    regimes: &[Regime],
) -> Result<Vec<RegimeInterval>> {
    let mut intervals: Vec<RegimeInterval> = Vec::new();
    for (k, &r) in regimes.iter().enumerate() {
        match intervals.last_mut() {
            Some(last) if last.regime == r => {
                last.end_index = k;
                last.end_param = params[k];
            }
            _ => intervals.push(RegimeInterval {
                regime: r,
                start_index: k,
                end_index: k,
                start_param: params[k],
                end_param: params[k],
                refined_start: None,
            }),
        }
    }
    // refine each interior boundary to 1e-6 in the scanned parameter
    for w in 1..intervals.len() {
        let left_regime = intervals[w - 1].regime;
        let mut lo = intervals[w - 1].end_param;
        let mut hi = intervals[w].start_param;
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            let model = model_at(spec, mid)?;
            let reports = evaluate_model(&model, &spec.families, spec.epsilon)?;
            if classify_regime(&reports, spec.epsilon).regime == left_regime {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        intervals[w].refined_start = Some(0.5 * (lo + hi));
    }
    Ok(intervals)
}

// ---------------------------------------------------------------------------
// Equal-overlap constructions (four and five levels)
// ---------------------------------------------------------------------------

/// Overlap between neighbouring construction vectors as a function of the
/// rotation angle theta at cross-phase phi.
pub fn overlap_formula(dim_case: usize, theta: f64, phi: f64) -> Result<f64> {
    match dim_case {
        5 => Ok(0.75 * theta.sin().powi(2) + 0.5 * (2.0 * theta).sin() * (2.0 * phi).cos()),
        4 => Ok(2.0 / 3.0 * theta.sin().powi(2)
            + (2.0 * theta).sin() * (2.0 * phi).cos() / 3f64.sqrt()),
        d => Err(Error::BadDim { dim: d }),
    }
}

/// Attainable overlap range for a construction family.
pub fn overlap_range(dim_case: usize) -> Result<(f64, f64)> {
    match dim_case {
        5 => Ok((-0.25, 1.0)),
        4 => Ok((-1.0 / 3.0, 1.0)),
        d => Err(Error::BadDim { dim: d }),
    }
}

/// Solve overlap(theta, phi) = target on the phi = 0 branch, which covers
/// the whole attainable range. Bisection between bracketing grid samples.
pub fn solve_alpha(target: f64, dim_case: usize) -> Result<(f64, f64)> {
    let (lo, hi) = overlap_range(dim_case)?;
    if !(lo - 1e-12..=hi + 1e-12).contains(&target) {
        return Err(Error::Unattainable {
            target,
            min: lo,
            max: hi,
        });
    }
    let f = |th: f64| overlap_formula(dim_case, th, 0.0).unwrap() - target;
    // bracket on a theta grid over one period
    let grid = 512;
    let mut bracket = None;
    let mut prev = f(0.0);
    for k in 1..=grid {
        let th = std::f64::consts::PI * k as f64 / grid as f64;
        let cur = f(th);
        if prev == 0.0 || prev * cur <= 0.0 {
            bracket = Some((std::f64::consts::PI * (k - 1) as f64 / grid as f64, th));
            break;
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket.ok_or(Error::Unattainable {
        target,
        min: lo,
        max: hi,
    })?;
    let mut fa = f(a);
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let theta = 0.5 * (a + b);
    let achieved = overlap_formula(dim_case, theta, 0.0)?;
    if (achieved - target).abs() > 1e-10 {
        return Err(Error::Internal {
            reason: format!("alpha solve residual {:.3e}", (achieved - target).abs()),
        });
    }
    Ok((theta, 0.0))
}

/// Five-level rotated-basis vectors: v_i = e^{i phi} cos(theta) |e_i> +
/// (1/2) e^{-i phi} sin(theta) sum_{j != i} |e_j>.
pub fn construction5_vectors(theta: f64, phi: f64) -> Vec<CVector> {
    let lead = C64::new(0.0, phi).exp() * theta.cos();
    let rest = C64::new(0.0, -phi).exp() * (0.5 * theta.sin());
    (0..5)
        .map(|i| {
            let mut v = CVector::from_slice(&[rest; 5]);
            v.set(i, lead);
            v
        })
        .collect()
}

/// Four-level analogue over four basis kets, off-diagonal weight
/// sin(theta)/sqrt 3.
pub fn construction4_vectors(theta: f64, phi: f64) -> Vec<CVector> {
    let lead = C64::new(0.0, phi).exp() * theta.cos();
    let rest = C64::new(0.0, -phi).exp() * (theta.sin() / 3f64.sqrt());
    (0..4)
        .map(|i| {
            let mut v = CVector::from_slice(&[rest; 4]);
            v.set(i, lead);
            v
        })
        .collect()
}

/// A fully assembled equal-correlator construction.
#[derive(Debug, Clone)]
pub struct Construction {
    pub dim: usize,
    pub alpha: f64,
    pub theta: f64,
    pub psi: CVector,
    pub v_list: Vec<CVector>,
    pub dataset: MRDataset,
    /// Time-evolution realization (five-level construction only).
    pub hamiltonian_model: Option<ModelConfig>,
}

/// Five-level construction at neighbour overlap `alpha`: all five
/// averages equal, all ten correlators equal, realizable with the cyclic
/// Hamiltonian at unit-spaced times.
pub fn construction5(alpha: f64) -> Result<Construction> {
    let (theta, phi) = solve_alpha(alpha, 5)?;
    let v_list = construction5_vectors(theta, phi);
    let psi = CVector::from_slice(&[C64::new(1.0 / 5f64.sqrt(), 0.0); 5]);
    let dataset = overlap_correlators(&psi, &v_list, None)?;
    let a = &v_list[0];
    let model = ModelConfig {
        dim: 5,
        hamiltonian: HamiltonianConfig::Cyclic5,
        observable: ObservableConfig::SingleProjector {
            a_re: a.iter().map(|c| c.re).collect(),
            a_im: a.iter().map(|c| c.im).collect(),
        },
        state: StateConfig::Explicit(StateJson::from_state(
            &crate::states::DensityMatrix::pure(&psi)?,
            None,
        )),
        times: vec![0.0, 1.0, 2.0, 3.0, 4.0],
    };
    Ok(Construction {
        dim: 5,
        alpha,
        theta,
        psi,
        v_list,
        dataset,
        hamiltonian_model: Some(model),
    })
}

/// Four-level construction at overlap `alpha`: four rotated vectors plus
/// their normalized mean as both the initial state and the first
/// measurement direction (five measurement labels in a four-level space).
pub fn construction4(alpha: f64) -> Result<Construction> {
    let (theta, phi) = solve_alpha(alpha, 4)?;
    let rest = construction4_vectors(theta, phi);
    let mut sum = CVector::zeros(4);
    for v in &rest {
        sum = sum.add(v);
    }
    let v1 = sum.scale(C64::new(1.0 / (2.0 * (1.0 + 3.0 * alpha).sqrt()), 0.0));
    let mut v_list = vec![v1.clone()];
    v_list.extend(rest);
    let psi = v1;
    let dataset = overlap_correlators(&psi, &v_list, None)?;
    Ok(Construction {
        dim: 4,
        alpha,
        theta,
        psi,
        v_list,
        dataset,
        hamiltonian_model: None,
    })
}

// ---------------------------------------------------------------------------
// Randomized search
// ---------------------------------------------------------------------------

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// What a random search optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGoal {
    /// Family whose minimum is driven as negative as possible.
    pub family: Family,
    /// Require LG2/LG3 on the same dataset to stay above -epsilon.
    #[serde(default)]
    pub require_standard_satisfied: bool,
}

/// One search hit; the model config re-validates from scratch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchHit {
    pub value: f64,
    pub dim: usize,
    pub iteration: u64,
    pub model: ModelConfig,
}

impl SearchHit {
    /// Rebuild the model and re-evaluate the goal family.
    pub fn revalidate(&self, goal: &SearchGoal, eps: f64) -> Result<f64> {
        let model = self.model.build()?;
        let reports = evaluate_model(&model, &[goal.family], eps)?;
        Ok(reports[0].min_value)
    }
}

fn times_needed(family: Family) -> usize {
    match family {
        Family::Lg2 | Family::Lg3 | Family::Ho3 | Family::TriLg2 | Family::TriLg3 => 3,
        Family::Ho4 | Family::Lg4Cycle => 4,
        Family::Lg5Cycle | Family::NFull | Family::Pentagon => 5,
    }
}

/// Random model draw for one dimension: tabulated case observables with
/// angle-parameterized pure states for dims 2..4 (Gell-Mann states for
/// trichotomic goals), Haar states and basis-ket projectors for dim 5,
/// plus the rotated-basis construction family when hunting pentagon
/// violations at dim 5.
pub fn sample_model(rng: &mut ChaCha12Rng, dim: usize, family: Family) -> Result<ModelConfig> {
    use std::f64::consts::TAU;
    let n_times = times_needed(family);
    let mut times: Vec<f64> = (0..n_times).map(|_| rng.random_range(0.0..TAU)).collect();
    times.sort_by(f64::total_cmp);

    if matches!(family, Family::TriLg2 | Family::TriLg3) {
        if dim != 3 {
            return Err(Error::BadDim { dim });
        }
        // rejection-sample inside the 8-parameter state bounds
        let a = loop {
            let cand: [f64; 8] = std::array::from_fn(|_| rng.random_range(-0.6..0.6));
            if crate::states::GellMannVector::new(cand).is_ok() {
                break cand;
            }
        };
        return Ok(ModelConfig {
            dim: 3,
            hamiltonian: HamiltonianConfig::SpinX { scale: 0.5 },
            observable: ObservableConfig::TrichotomicSpin1,
            state: StateConfig::Gellmann { a },
            times,
        });
    }

    if dim == 5 {
        let use_construction =
            matches!(family, Family::Pentagon | Family::NFull) && rng.random_bool(0.5);
        if use_construction {
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            let phi = rng.random_range(0.0..TAU);
            let v1 = &construction5_vectors(theta, phi)[0];
            let jitter: Vec<f64> = (0..5)
                .map(|k| k as f64 + rng.random_range(-0.05..0.05))
                .collect();
            return Ok(ModelConfig {
                dim: 5,
                hamiltonian: HamiltonianConfig::Cyclic5,
                observable: ObservableConfig::SingleProjector {
                    a_re: v1.iter().map(|c| c.re).collect(),
                    a_im: v1.iter().map(|c| c.im).collect(),
                },
                state: StateConfig::Explicit(StateJson::from_state(
                    &crate::states::DensityMatrix::pure(&CVector::from_slice(&[C64::new(
                        1.0 / 5f64.sqrt(),
                        0.0,
                    );
                        5]))?,
                    None,
                )),
                times: jitter,
            });
        }
        // Haar state via normalized Gaussian components
        let mut psi = CVector::zeros(5);
        for k in 0..5 {
            // Box-Muller pairs
            let u1: f64 = rng.random_range(1e-12..1.0);
            let u2: f64 = rng.random_range(0.0..TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            psi.set(k, C64::new(r * u2.cos(), r * u2.sin()));
        }
        let psi = psi.normalized();
        let a_index = rng.random_range(0..5usize);
        let mut a_re = vec![0.0; 5];
        a_re[a_index] = 1.0;
        return Ok(ModelConfig {
            dim: 5,
            hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
            observable: ObservableConfig::SingleProjector {
                a_re,
                a_im: vec![0.0; 5],
            },
            state: StateConfig::Explicit(StateJson::from_state(
                &crate::states::DensityMatrix::pure(&psi)?,
                None,
            )),
            times,
        });
    }

    // dims 2..4: pick a case for the dimension and a random angle state
    let case_id = match dim {
        2 => rng.random_range(1..=2u8),
        3 => rng.random_range(3..=5u8),
        4 => rng.random_range(6..=15u8),
        d => return Err(Error::BadDim { dim: d }),
    };
    let params = PureStateParams {
        case_id,
        theta: rng.random_range(0.0..TAU),
        alpha: rng.random_range(0.0..TAU),
        beta: rng.random_range(0.0..TAU),
        phases: [
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        ],
    };
    Ok(ModelConfig {
        dim,
        hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
        observable: ObservableConfig::Case { case_id },
        state: StateConfig::PureCase(params),
        times,
    })
}

/// Randomized search over model space. Reproducible: iteration k draws
/// from stream k of the master seed, so results are independent of
/// worker scheduling. Returns up to `top_k` hits sorted by value.
pub fn random_search(
    goal: &SearchGoal,
    dims: &[usize],
    iterations: u64,
    seed: u64,
    top_k: usize,
    eps: f64,
) -> Result<Vec<SearchHit>> {
    if iterations == 0 {
        return Err(Error::InvalidSpec {
            reason: "iterations must be >= 1".into(),
        });
    }
    for &d in dims {
        if !(2..=5).contains(&d) {
            return Err(Error::BadDim { dim: d });
        }
        if matches!(goal.family, Family::Pentagon | Family::NFull | Family::Lg5Cycle) && d < 2 {
            unreachable!();
        }
    }
    let mut fams = vec![goal.family];
    if goal.require_standard_satisfied {
        fams.push(Family::Lg2);
        fams.push(Family::Lg3);
    }
    let per_iter = |it: u64| -> Result<Vec<SearchHit>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(it);
        let mut hits = Vec::new();
        for &dim in dims {
            let cfg = sample_model(&mut rng, dim, goal.family)?;
            let model = cfg.build()?;
            let reports = evaluate_model(&model, &fams, eps)?;
            if goal.require_standard_satisfied
                && reports[1..].iter().any(|r| r.min_value < -eps)
            {
                continue;
            }
            hits.push(SearchHit {
                value: reports[0].min_value,
                dim,
                iteration: it,
                model: cfg,
            });
        }
        Ok(hits)
    };
    let batches: Vec<Result<Vec<SearchHit>>> =
        crate::maybe_par_map((0..iterations).collect(), per_iter);
    let mut all = Vec::new();
    for b in batches {
        all.extend(b?);
    }
    // stable order: by value, ties by iteration then dim
    all.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.iteration.cmp(&b.iteration))
            .then(a.dim.cmp(&b.dim))
    });
    all.truncate(top_k);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn solve_alpha_examples() {
        // five-level target 3/8
        let (theta, phi) = solve_alpha(0.375, 5).unwrap();
        assert_abs_diff_eq!(
            overlap_formula(5, theta, phi).unwrap(),
            0.375,
            epsilon = 1e-10
        );
        // four-level target 1/6
        let (theta, phi) = solve_alpha(1.0 / 6.0, 4).unwrap();
        assert_abs_diff_eq!(
            overlap_formula(4, theta, phi).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-10
        );
        // target zero has the trivial root
        let (theta, _) = solve_alpha(0.0, 5).unwrap();
        assert_abs_diff_eq!(overlap_formula(5, theta, 0.0).unwrap(), 0.0, epsilon = 1e-10);
        // out of range
        assert!(matches!(
            solve_alpha(1.5, 5),
            Err(Error::Unattainable { .. })
        ));
        assert!(matches!(
            solve_alpha(-0.3, 5),
            Err(Error::Unattainable { .. })
        ));
    }

    #[test]
    fn construction5_exact_values() {
        let c = construction5(0.375).unwrap();
        let d = c.dataset.dichotomic().unwrap();
        for &avg in &d.averages {
            assert_abs_diff_eq!(avg, 0.0, epsilon = 1e-9);
        }
        for &v in d.c2.values() {
            assert_abs_diff_eq!(v, -0.25, epsilon = 1e-9);
        }
        // general alpha: averages (3 - 8a)/5 and correlators 1 - (4/5)(1-a)(1+4a)
        let a = 0.3;
        let c = construction5(a).unwrap();
        let d = c.dataset.dichotomic().unwrap();
        assert_abs_diff_eq!(d.averages[2], (3.0 - 8.0 * a) / 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            d.c2[&(1, 4)],
            1.0 - 0.8 * (1.0 - a) * (1.0 + 4.0 * a),
            epsilon = 1e-9
        );
    }

    #[test]
    fn construction5_hamiltonian_realization_matches() {
        let c = construction5(0.375).unwrap();
        let model = c.hamiltonian_model.as_ref().unwrap().build().unwrap();
        let ds = dataset_from_model(&model, &[1, 2]).unwrap();
        let (da, db) = (
            c.dataset.dichotomic().unwrap(),
            ds.dichotomic().unwrap(),
        );
        for (x, y) in da.averages.iter().zip(&db.averages) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
        for (k, v) in &da.c2 {
            assert_abs_diff_eq!(v, &db.c2[k], epsilon = 1e-9);
        }
    }

    #[test]
    fn construction4_exact_values() {
        let c = construction4(1.0 / 6.0).unwrap();
        let d = c.dataset.dichotomic().unwrap();
        assert_abs_diff_eq!(d.averages[0], -1.0, epsilon = 1e-9);
        for &avg in &d.averages[1..] {
            assert_abs_diff_eq!(avg, 0.25, epsilon = 1e-9);
        }
        for &v in d.c2.values() {
            assert_abs_diff_eq!(v, -0.25, epsilon = 1e-9);
        }
        // psi has unit norm by construction
        assert_abs_diff_eq!(c.psi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scan_rejects_bad_specs() {
        let spec = ScanSpec {
            model: fig_template(),
            scan: ScanAxis {
                time_index: 7,
                start: 0.0,
                stop: 1.0,
                points: 4,
            },
            families: vec![Family::Lg2],
            epsilon: 1e-9,
        };
        assert!(matches!(scan(&spec), Err(Error::InvalidSpec { .. })));
        let spec = ScanSpec {
            model: fig_template(),
            scan: ScanAxis {
                time_index: 2,
                start: 0.0,
                stop: 1.0,
                points: 1,
            },
            families: vec![Family::Lg2],
            epsilon: 1e-9,
        };
        assert!(matches!(scan(&spec), Err(Error::InvalidSpec { .. })));
    }

    fn fig_template() -> ModelConfig {
        let s = 1.0 / 2f64.sqrt();
        ModelConfig {
            dim: 2,
            hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
            observable: ObservableConfig::Case { case_id: 2 },
            state: StateConfig::Bloch { v: [s, s, 0.0] },
            times: vec![0.0, PI, 0.0],
        }
    }

    #[test]
    fn scan_grid_values_match_single_shot() {
        let spec = ScanSpec {
            model: fig_template(),
            scan: ScanAxis {
                time_index: 2,
                start: 0.0,
                stop: 2.0 * PI,
                points: 21,
            },
            families: vec![Family::Lg2, Family::Lg3, Family::Ho3],
            epsilon: 1e-9,
        };
        let res = scan(&spec).unwrap();
        assert_eq!(res.params.len(), 21);
        // point 15 is omega_t3 = 1.5 pi: HO3 bracket -1/sqrt2
        let k = 15;
        assert_abs_diff_eq!(res.params[k], 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(
            res.minima[2][k],
            -1.0 / 2f64.sqrt(),
            epsilon = 1e-9
        );
        // re-evaluate one grid point from scratch
        let model = model_at(&spec, res.params[7]).unwrap();
        let reports = evaluate_model(&model, &spec.families, 1e-9).unwrap();
        for (f, r) in reports.iter().enumerate() {
            assert_abs_diff_eq!(res.minima[f][7], r.min_value, epsilon = 1e-12);
        }
        // intervals partition the grid
        let mut covered = 0usize;
        for iv in &res.intervals {
            covered += iv.end_index - iv.start_index + 1;
        }
        assert_eq!(covered, res.params.len());
    }

    #[test]
    fn random_search_deterministic() {
        let goal = SearchGoal {
            family: Family::Lg3,
            require_standard_satisfied: false,
        };
        let a = random_search(&goal, &[2], 200, 42, 5, 1e-9).unwrap();
        let b = random_search(&goal, &[2], 200, 42, 5, 1e-9).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.iteration, y.iteration);
            assert_eq!(x.model, y.model);
        }
        // hits re-validate from scratch
        for hit in a.iter().take(2) {
            let v = hit.revalidate(&goal, 1e-9).unwrap();
            assert_abs_diff_eq!(v, hit.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_search_finds_lg3_violations_dim2() {
        let goal = SearchGoal {
            family: Family::Lg3,
            require_standard_satisfied: false,
        };
        let hits = random_search(&goal, &[2], 2000, 7, 3, 1e-9).unwrap();
        assert!(hits[0].value < -0.3, "best {} not negative enough", hits[0].value);
    }
}
