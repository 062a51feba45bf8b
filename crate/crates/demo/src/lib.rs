//! Browser demo bindings: JSON-in/JSON-out functions over the core
//! library, exported through wasm-bindgen for the static page in `www/`.
//! Everything also compiles natively so the bindings stay unit-testable.

use wasm_bindgen::prelude::wasm_bindgen;

use macroreal::conditions::{evaluate, Family};
use macroreal::figures::{expectation_points, figure_preset, FigureId};
use macroreal::search::{construction4, construction5, overlap_range, scan};

fn err_json(e: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

/// Scan a bundled regime preset and return the curves as JSON:
/// `{param_name, params, series: [{family, values}], window: [indices]}`.
#[wasm_bindgen]
pub fn figure_scan(figure: &str, points: usize) -> String {
    let id: FigureId = match figure.parse() {
        Ok(id) => id,
        Err(e) => return err_json(e),
    };
    let (mut spec, expect) = figure_preset(id);
    if points >= 2 {
        spec.scan.points = points;
    }
    let res = match scan(&spec) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let window = expectation_points(&res, &expect, spec.epsilon);
    let series: Vec<serde_json::Value> = res
        .families
        .iter()
        .zip(&res.minima)
        .map(|(f, vals)| serde_json::json!({ "family": f.name(), "values": vals }))
        .collect();
    serde_json::json!({
        "figure": id.name(),
        "param_name": res.param_name,
        "params": res.params,
        "series": series,
        "window": window,
        "satisfied": expect.satisfied.iter().map(|f| f.name()).collect::<Vec<_>>(),
        "violated": expect.violated.iter().map(|f| f.name()).collect::<Vec<_>>(),
    })
    .to_string()
}

/// Sweep the equal-overlap construction (n = 4 or 5) over its attainable
/// overlap range and report per-alpha condition minima.
#[wasm_bindgen]
pub fn construction_sweep(n: usize, points: usize) -> String {
    let (lo, hi) = match overlap_range(n) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    // stay strictly inside the attainable range
    let pad = 1e-6;
    let (lo, hi) = (lo + pad, hi - pad);
    let pts = points.max(2);
    let mut alphas = Vec::with_capacity(pts);
    let mut avg = Vec::with_capacity(pts);
    let mut cij = Vec::with_capacity(pts);
    let mut lg2 = Vec::with_capacity(pts);
    let mut lg3 = Vec::with_capacity(pts);
    let mut pentagon = Vec::with_capacity(pts);
    for k in 0..pts {
        let a = lo + (hi - lo) * k as f64 / (pts - 1) as f64;
        let c = match if n == 5 {
            construction5(a)
        } else {
            construction4(a)
        } {
            Ok(c) => c,
            Err(e) => return err_json(e),
        };
        let d = match c.dataset.dichotomic() {
            Ok(d) => d,
            Err(e) => return err_json(e),
        };
        alphas.push(a);
        avg.push(d.averages[if n == 5 { 0 } else { 1 }]);
        cij.push(d.c2[&(1, 2)]);
        let e = |fam| evaluate(&c.dataset, fam, 1e-9).map(|r| r.min_value);
        match (e(Family::Lg2), e(Family::Lg3), e(Family::Pentagon)) {
            (Ok(a2), Ok(a3), Ok(p)) => {
                lg2.push(a2);
                lg3.push(a3);
                pentagon.push(p);
            }
            _ => return err_json("evaluation failed"),
        }
    }
    serde_json::json!({
        "n": n,
        "alphas": alphas,
        "average": avg,
        "correlator": cij,
        "lg2_min": lg2,
        "lg3_min": lg3,
        "pentagon_min": pentagon,
    })
    .to_string()
}

/// Detailed report for one construction point.
#[wasm_bindgen]
pub fn construction_point(n: usize, alpha: f64) -> String {
    let c = match if n == 5 {
        construction5(alpha)
    } else if n == 4 {
        construction4(alpha)
    } else {
        return err_json("n must be 4 or 5");
    } {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let mut reports = Vec::new();
    for fam in [Family::Lg2, Family::Lg3, Family::NFull, Family::Pentagon] {
        match evaluate(&c.dataset, fam, 1e-9) {
            Ok(r) => reports.push(serde_json::json!({
                "family": fam.name(),
                "min": r.min_value,
                "satisfied": r.satisfied,
            })),
            Err(e) => return err_json(e),
        }
    }
    serde_json::json!({
        "n": n,
        "alpha": alpha,
        "theta": c.theta,
        "dataset": c.dataset,
        "reports": reports,
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_scan_returns_series() {
        let out = figure_scan("2a", 64);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["figure"], "2a");
        assert_eq!(v["params"].as_array().unwrap().len(), 64);
        assert_eq!(v["series"].as_array().unwrap().len(), 3);
        assert!(v.get("error").is_none());
    }

    #[test]
    fn figure_scan_rejects_unknown_id() {
        let out = figure_scan("9z", 16);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }

    #[test]
    fn construction_sweep_shape() {
        let out = construction_sweep(5, 33);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["alphas"].as_array().unwrap().len(), 33);
        // pentagon dips to -1/2 somewhere on the sweep
        let pmin = v["pentagon_min"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(pmin < -0.49, "pentagon sweep min {pmin}");
    }

    #[test]
    fn construction_point_detail() {
        let out = construction_point(4, 1.0 / 6.0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let pi = v["reports"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["family"] == "PI")
            .unwrap();
        assert!((pi["min"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    }
}
