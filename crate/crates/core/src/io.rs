//! File formats: the versioned CSV schema and JSON helpers.
//!
//! All CSVs open with the comment line `# macroreal-schema v1`. Dataset
//! rows are `kind,indices,value` with 1-based, colon-separated time
//! indices (`c2,1:2,-0.25`); trichotomic entries prefix the variable
//! letter (`avg,Q1` / `c2,Q1:R2`). Estimated datasets append
//! `stderr,shots` columns. Scan exports carry one row per grid point.

use std::collections::BTreeMap;

use crate::conditions::Family;
use crate::correlators::{
    CorrelatorSubset, DatasetBody, DichotomicData, MRDataset, TrichotomicData,
};
use crate::error::{Error, Result};
use crate::observables::TriVar;
use crate::search::ScanResult;
use crate::shots::EstimatedDataset;

/// Schema marker written as the first line of every CSV.
pub const SCHEMA_HEADER: &str = "# macroreal-schema v1";

fn fmt_f64(v: f64) -> String {
    // shortest round-trip representation
    format!("{v}")
}

fn tri_name(x: TriVar, i: usize) -> String {
    format!("{x}{}", i + 1)
}

/// Dataset to CSV (kind, indices, value).
pub fn dataset_to_csv(ds: &MRDataset) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_HEADER);
    out.push('\n');
    out.push_str("kind,indices,value\n");
    match &ds.body {
        DatasetBody::Dichotomic(d) => {
            for (i, v) in d.averages.iter().enumerate() {
                out.push_str(&format!("avg,{},{}\n", i + 1, fmt_f64(*v)));
            }
            for (&(i, j), v) in &d.c2 {
                out.push_str(&format!("c2,{}:{},{}\n", i + 1, j + 1, fmt_f64(*v)));
            }
            if let Some(c3) = &d.c3 {
                for (&(i, j, k), v) in c3 {
                    out.push_str(&format!(
                        "c3,{}:{}:{},{}\n",
                        i + 1,
                        j + 1,
                        k + 1,
                        fmt_f64(*v)
                    ));
                }
            }
            if let Some(c4) = &d.c4 {
                for (&(i, j, k, l), v) in c4 {
                    out.push_str(&format!(
                        "c4,{}:{}:{}:{},{}\n",
                        i + 1,
                        j + 1,
                        k + 1,
                        l + 1,
                        fmt_f64(*v)
                    ));
                }
            }
        }
        DatasetBody::Trichotomic(t) => {
            for x in TriVar::ALL {
                for i in 0..ds.n {
                    let v = ds.tri_average(x, i).expect("trichotomic dataset");
                    out.push_str(&format!("avg,{},{}\n", tri_name(x, i), fmt_f64(v)));
                }
            }
            for &(i, j) in t.c2_qr.keys() {
                for x in TriVar::ALL {
                    for y in TriVar::ALL {
                        let v = ds.tri_c2(x, i, y, j).expect("trichotomic dataset");
                        out.push_str(&format!(
                            "c2,{}:{},{}\n",
                            tri_name(x, i),
                            tri_name(y, j),
                            fmt_f64(v)
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Estimated dataset to CSV with stderr and shots columns.
pub fn estimated_to_csv(est: &EstimatedDataset) -> String {
    let d = est
        .dataset
        .dichotomic()
        .expect("estimated datasets are dichotomic");
    let mut out = String::new();
    out.push_str(SCHEMA_HEADER);
    out.push('\n');
    out.push_str("kind,indices,value,stderr,shots\n");
    for (i, v) in d.averages.iter().enumerate() {
        out.push_str(&format!(
            "avg,{},{},{},{}\n",
            i + 1,
            fmt_f64(*v),
            fmt_f64(est.stderr.averages[i]),
            est.shots
        ));
    }
    for (&(i, j), v) in &d.c2 {
        out.push_str(&format!(
            "c2,{}:{},{},{},{}\n",
            i + 1,
            j + 1,
            fmt_f64(*v),
            fmt_f64(est.stderr.c2[&(i, j)]),
            est.shots
        ));
    }
    if let Some(c3) = &d.c3 {
        for (&(i, j, k), v) in c3 {
            out.push_str(&format!(
                "c3,{}:{}:{},{},{},{}\n",
                i + 1,
                j + 1,
                k + 1,
                fmt_f64(*v),
                fmt_f64(est.stderr.c3.as_ref().unwrap()[&(i, j, k)]),
                est.shots
            ));
        }
    }
    if let Some(c4) = &d.c4 {
        for (&(i, j, k, l), v) in c4 {
            out.push_str(&format!(
                "c4,{}:{}:{}:{},{},{},{}\n",
                i + 1,
                j + 1,
                k + 1,
                l + 1,
                fmt_f64(*v),
                fmt_f64(est.stderr.c4.as_ref().unwrap()[&(i, j, k, l)]),
                est.shots
            ));
        }
    }
    out
}

/// Scan result to CSV: param column, one min column per family, regime.
pub fn scan_to_csv(res: &ScanResult) -> String {
    let mut out = String::new();
    out.push_str(SCHEMA_HEADER);
    out.push('\n');
    out.push_str(&res.param_name);
    for f in &res.families {
        out.push_str(&format!(",{}_min", f.name().to_ascii_lowercase()));
    }
    out.push_str(",regime\n");
    for k in 0..res.params.len() {
        out.push_str(&fmt_f64(res.params[k]));
        for fvals in &res.minima {
            out.push(',');
            out.push_str(&fmt_f64(fvals[k]));
        }
        out.push_str(&format!(",{}\n", res.regimes[k]));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TriIndex {
    Plain(usize),
    Var(TriVar, usize),
}

fn parse_index_token(tok: &str) -> Result<TriIndex> {
    let bad = || Error::Csv {
        reason: format!("bad index token '{tok}'"),
    };
    let (var, rest) = match tok.chars().next() {
        Some('Q') => (Some(TriVar::Q), &tok[1..]),
        Some('R') => (Some(TriVar::R), &tok[1..]),
        Some('S') => (Some(TriVar::S), &tok[1..]),
        _ => (None, tok),
    };
    let idx: usize = rest.parse().map_err(|_| bad())?;
    if idx == 0 {
        return Err(bad());
    }
    Ok(match var {
        Some(v) => TriIndex::Var(v, idx - 1),
        None => TriIndex::Plain(idx - 1),
    })
}

/// Parse a dataset CSV (either the exact or the estimated column layout;
/// stderr/shots columns are ignored when auditing).
pub fn dataset_from_csv(text: &str) -> Result<MRDataset> {
    let mut avg: BTreeMap<usize, f64> = BTreeMap::new();
    let mut c2: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut c3: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    let mut c4: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
    let mut tri_avg: BTreeMap<(TriVar, usize), f64> = BTreeMap::new();
    let mut tri_c2: BTreeMap<(TriVar, usize, TriVar, usize), f64> = BTreeMap::new();

    let mut saw_rows = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == "kind" {
            continue; // header row
        }
        if fields.len() < 3 {
            return Err(Error::Csv {
                reason: format!("line {}: expected kind,indices,value", lineno + 1),
            });
        }
        let value: f64 = fields[2].parse().map_err(|_| Error::Csv {
            reason: format!("line {}: bad value '{}'", lineno + 1, fields[2]),
        })?;
        let toks: Vec<TriIndex> = fields[1]
            .split(':')
            .map(parse_index_token)
            .collect::<Result<_>>()?;
        saw_rows = true;
        match (fields[0], toks.as_slice()) {
            ("avg", [TriIndex::Plain(i)]) => {
                avg.insert(*i, value);
            }
            ("avg", [TriIndex::Var(x, i)]) => {
                tri_avg.insert((*x, *i), value);
            }
            ("c2", [TriIndex::Plain(i), TriIndex::Plain(j)]) => {
                c2.insert((*i, *j), value);
            }
            ("c2", [TriIndex::Var(x, i), TriIndex::Var(y, j)]) => {
                tri_c2.insert((*x, *i, *y, *j), value);
            }
            ("c3", [TriIndex::Plain(i), TriIndex::Plain(j), TriIndex::Plain(k)]) => {
                c3.insert((*i, *j, *k), value);
            }
            (
                "c4",
                [TriIndex::Plain(i), TriIndex::Plain(j), TriIndex::Plain(k), TriIndex::Plain(l)],
            ) => {
                c4.insert((*i, *j, *k, *l), value);
            }
            (kind, _) => {
                return Err(Error::Csv {
                    reason: format!("line {}: unsupported row kind '{kind}'", lineno + 1),
                });
            }
        }
    }
    if !saw_rows {
        return Err(Error::Csv {
            reason: "no data rows".into(),
        });
    }

    let trichotomic = !tri_avg.is_empty() || !tri_c2.is_empty();
    if trichotomic && (!avg.is_empty() || !c2.is_empty()) {
        return Err(Error::Csv {
            reason: "mixed dichotomic and trichotomic rows".into(),
        });
    }

    if trichotomic {
        let n = tri_avg
            .keys()
            .map(|&(_, i)| i + 1)
            .chain(tri_c2.keys().map(|&(_, _, _, j)| j + 1))
            .max()
            .unwrap_or(0);
        let mut q_averages = Vec::with_capacity(n);
        let mut r_averages = Vec::with_capacity(n);
        for i in 0..n {
            q_averages.push(*tri_avg.get(&(TriVar::Q, i)).ok_or(Error::MissingData {
                what: format!("avg Q{}", i + 1),
            })?);
            r_averages.push(*tri_avg.get(&(TriVar::R, i)).ok_or(Error::MissingData {
                what: format!("avg R{}", i + 1),
            })?);
        }
        let mut c2_qr = BTreeMap::new();
        for (&(x, i, y, j), &v) in &tri_c2 {
            if i >= j {
                return Err(Error::Csv {
                    reason: format!("trichotomic c2 indices must be ordered: {}{} vs {}{}", x, i + 1, y, j + 1),
                });
            }
            let block = c2_qr.entry((i, j)).or_insert([f64::NAN; 4]);
            match (x, y) {
                (TriVar::Q, TriVar::Q) => block[0] = v,
                (TriVar::Q, TriVar::R) => block[1] = v,
                (TriVar::R, TriVar::Q) => block[2] = v,
                (TriVar::R, TriVar::R) => block[3] = v,
                _ => {} // S rows are derivable; accepted and ignored
            }
        }
        for (k, b) in &c2_qr {
            if b.iter().any(|v| v.is_nan()) {
                return Err(Error::MissingData {
                    what: format!("full Q/R block for pair {:?}", (k.0 + 1, k.1 + 1)),
                });
            }
        }
        let ds = MRDataset {
            n,
            subset: subset_of(n, c2_qr.keys().copied())?,
            body: DatasetBody::Trichotomic(TrichotomicData {
                q_averages,
                r_averages,
                c2_qr,
            }),
        };
        ds.check_invariants()?;
        return Ok(ds);
    }

    let n = avg
        .keys()
        .map(|&i| i + 1)
        .chain(c2.keys().map(|&(_, j)| j + 1))
        .max()
        .unwrap_or(0);
    let mut averages = Vec::with_capacity(n);
    for i in 0..n {
        averages.push(*avg.get(&i).ok_or(Error::MissingData {
            what: format!("avg {}", i + 1),
        })?);
    }
    let ds = MRDataset {
        n,
        subset: subset_of(n, c2.keys().copied())?,
        body: DatasetBody::Dichotomic(DichotomicData {
            averages,
            c2,
            c3: (!c3.is_empty()).then_some(c3),
            c4: (!c4.is_empty()).then_some(c4),
        }),
    };
    ds.check_invariants()?;
    Ok(ds)
}

fn subset_of(n: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> Result<CorrelatorSubset> {
    use crate::correlators::expected_pairs;
    let have: std::collections::BTreeSet<_> = pairs.collect();
    let full: std::collections::BTreeSet<_> =
        expected_pairs(n, CorrelatorSubset::Full).into_iter().collect();
    let cycle: std::collections::BTreeSet<_> =
        expected_pairs(n, CorrelatorSubset::Cycle).into_iter().collect();
    if have == full {
        Ok(CorrelatorSubset::Full)
    } else if have == cycle {
        Ok(CorrelatorSubset::Cycle)
    } else {
        Err(Error::MissingData {
            what: "a full or cycle pairwise-correlator set".into(),
        })
    }
}

/// Condition-report JSON augmented with the family bound when declared.
pub fn report_json(report: &crate::conditions::ConditionReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    if let Ok(bound) = crate::conditions::quantum_bound(report.family) {
        v["bound"] = serde_json::json!(bound);
        v["margin"] = serde_json::json!(report.min_value - bound);
    }
    v
}

/// Families a parsed dataset supports, evaluated and serialized for audit.
pub fn audit_dataset(ds: &MRDataset, eps: f64) -> Result<serde_json::Value> {
    let fams: Vec<Family> = crate::conditions::applicable_families(ds);
    let mut reports = Vec::new();
    for f in &fams {
        reports.push(crate::conditions::evaluate(ds, *f, eps)?);
    }
    let label = crate::conditions::classify_regime(&reports, eps);
    Ok(serde_json::json!({
        "n": ds.n,
        "subset": ds.subset.to_string(),
        "epsilon": eps,
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        "regime": label,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::dataset_from_model;
    use crate::observables::{
        spin_x_hamiltonian, trichotomic_spin1, Observable, SpinModel,
    };
    use crate::states::{bloch_state, BlochVector, DensityMatrix};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sample_ds() -> MRDataset {
        let s = 1.0 / 2f64.sqrt();
        let rho = bloch_state(&BlochVector::new([s, s, 0.0]).unwrap()).unwrap();
        let h = spin_x_hamiltonian(2).unwrap();
        let q = crate::observables::case_observable(2).unwrap();
        let model =
            SpinModel::new(h, Observable::Dichotomic(q), rho, vec![0.0, PI, 4.4]).unwrap();
        dataset_from_model(&model, &[1, 2, 3]).unwrap()
    }

    #[test]
    fn dataset_csv_round_trip() {
        let ds = sample_ds();
        let text = dataset_to_csv(&ds);
        assert!(text.starts_with(SCHEMA_HEADER));
        let back = dataset_from_csv(&text).unwrap();
        assert_eq!(ds.n, back.n);
        let (a, b) = (ds.dichotomic().unwrap(), back.dichotomic().unwrap());
        for (x, y) in a.averages.iter().zip(&b.averages) {
            assert_abs_diff_eq!(x, y, epsilon = 0.0);
        }
        assert_eq!(a.c2, b.c2);
        assert_eq!(a.c3, b.c3);
    }

    #[test]
    fn trichotomic_csv_round_trip() {
        let h = spin_x_hamiltonian(3).unwrap().scale(0.5);
        let model = SpinModel::new(
            h,
            Observable::Trichotomic(trichotomic_spin1()),
            DensityMatrix::maximally_mixed(3).unwrap(),
            vec![0.0, 1.0, 2.2],
        )
        .unwrap();
        let ds = dataset_from_model(&model, &[1, 2]).unwrap();
        let text = dataset_to_csv(&ds);
        let back = dataset_from_csv(&text).unwrap();
        let (a, b) = (ds.trichotomic().unwrap(), back.trichotomic().unwrap());
        for (x, y) in a.q_averages.iter().zip(&b.q_averages) {
            assert_abs_diff_eq!(x, y, epsilon = 0.0);
        }
        for (k, blk) in &a.c2_qr {
            for (x, y) in blk.iter().zip(&b.c2_qr[k]) {
                assert_abs_diff_eq!(x, y, epsilon = 0.0);
            }
        }
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(dataset_from_csv("").is_err());
        assert!(dataset_from_csv("kind,indices,value\nwhat,1,0.5\n").is_err());
        assert!(dataset_from_csv("kind,indices,value\navg,0,0.5\n").is_err());
        // incomplete pair set
        let text = "kind,indices,value\navg,1,0.0\navg,2,0.0\navg,3,0.0\nc2,1:2,0.1\n";
        assert!(dataset_from_csv(text).is_err());
    }

    #[test]
    fn audit_all_zero_dataset_is_all_sat() {
        let mut rows = String::from("kind,indices,value\n");
        for i in 1..=3 {
            rows.push_str(&format!("avg,{i},0\n"));
        }
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            rows.push_str(&format!("c2,{i}:{j},0\n"));
        }
        let ds = dataset_from_csv(&rows).unwrap();
        let audit = audit_dataset(&ds, 1e-9).unwrap();
        assert_eq!(audit["regime"]["regime"], "ALL_SAT");
    }

    #[test]
    fn scan_csv_shape() {
        use crate::search::{scan, ScanAxis, ScanSpec};
        let s = 1.0 / 2f64.sqrt();
        let spec = ScanSpec {
            model: crate::observables::ModelConfig {
                dim: 2,
                hamiltonian: crate::observables::HamiltonianConfig::SpinX { scale: 1.0 },
                observable: crate::observables::ObservableConfig::Case { case_id: 2 },
                state: crate::observables::StateConfig::Bloch { v: [s, s, 0.0] },
                times: vec![0.0, PI, 0.0],
            },
            scan: ScanAxis {
                time_index: 2,
                start: 0.0,
                stop: 2.0 * PI,
                points: 5,
            },
            families: vec![Family::Lg2, Family::Ho3],
            epsilon: 1e-9,
        };
        let res = scan(&spec).unwrap();
        let text = scan_to_csv(&res);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCHEMA_HEADER);
        assert_eq!(lines[1], "omega_t3,lg2_min,ho3_min,regime");
        assert_eq!(lines.len(), 2 + 5);
    }
}
