//! Statistical regression for the finite-shot estimator: estimates land
//! within five standard errors of the exact correlators in at least 99%
//! of repeated seeded trials.

use std::f64::consts::PI;

use macroreal::correlators::dataset_from_model;
use macroreal::observables::{HamiltonianConfig, ModelConfig, ObservableConfig, StateConfig};
use macroreal::shots::{estimate_dataset, ShotPlan};

#[test]
fn estimates_within_five_sigma_in_99_percent_of_trials() {
    let s = 1.0 / 2f64.sqrt();
    let cfg = ModelConfig {
        dim: 2,
        hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
        observable: ObservableConfig::Case { case_id: 2 },
        state: StateConfig::Bloch { v: [s, s, 0.0] },
        times: vec![0.0, PI / 3.0, 4.4],
    };
    let exact = dataset_from_model(&cfg.build().unwrap(), &[1, 2, 3]).unwrap();
    let dx = exact.dichotomic().unwrap();

    let trials = 1000u64;
    let shots = 4000u64;
    let mut trials_ok = 0u32;
    for trial in 0..trials {
        let plan = ShotPlan::default_plan(cfg.clone(), &[1, 2, 3], shots, 0xBEEF + trial).unwrap();
        let est = estimate_dataset(&plan).unwrap();
        let de = est.dataset.dichotomic().unwrap();
        let mut ok = true;
        for i in 0..3 {
            if (de.averages[i] - dx.averages[i]).abs() > 5.0 * est.stderr.averages[i] {
                ok = false;
            }
        }
        for (k, v) in &de.c2 {
            if (v - dx.c2[k]).abs() > 5.0 * est.stderr.c2[k] {
                ok = false;
            }
        }
        let (kd, vd) = de.c3.as_ref().unwrap().iter().next().unwrap();
        if (vd - dx.c3.as_ref().unwrap()[kd]).abs() > 5.0 * est.stderr.c3.as_ref().unwrap()[kd] {
            ok = false;
        }
        if ok {
            trials_ok += 1;
        }
    }
    assert!(
        trials_ok * 100 >= trials as u32 * 99,
        "{trials_ok}/{trials} trials within 5 sigma"
    );
}
