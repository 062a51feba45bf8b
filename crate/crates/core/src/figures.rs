//! Bundled regime presets (figures 2a, 2b, 2c, 3 and 4).
//!
//! Each preset fixes a model, sweeps one measurement time over [0, 2pi]
//! and names the condition families whose satisfied/violated pattern
//! defines the regime of interest. Presets 2b and 2c use 1001 grid points
//! so the grid lands exactly on the multiples of pi/2 where their minima
//! touch the boundary.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::conditions::Family;
use crate::error::{Error, Result};
use crate::observables::{HamiltonianConfig, ModelConfig, ObservableConfig, StateConfig};
use crate::search::{ScanAxis, ScanResult, ScanSpec};
use crate::states::PureStateParams;

/// Identifier of a bundled preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    #[serde(rename = "2a")]
    F2a,
    #[serde(rename = "2b")]
    F2b,
    #[serde(rename = "2c")]
    F2c,
    #[serde(rename = "3")]
    F3,
    #[serde(rename = "4")]
    F4,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F2c,
        FigureId::F3,
        FigureId::F4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F2c => "2c",
            FigureId::F3 => "3",
            FigureId::F4 => "4",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "2a" => FigureId::F2a,
            "2b" => FigureId::F2b,
            "2c" => FigureId::F2c,
            "3" => FigureId::F3,
            "4" => FigureId::F4,
            other => {
                return Err(Error::InvalidSpec {
                    reason: format!("unknown figure id '{other}' (expected 2a|2b|2c|3|4)"),
                })
            }
        })
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The regime a preset is expected to exhibit somewhere on its grid:
/// every family in `satisfied` at or above -epsilon while every family in
/// `violated` is below -epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeExpectation {
    pub satisfied: Vec<Family>,
    pub violated: Vec<Family>,
}

/// Scan spec + expected regime for a preset.
pub fn figure_preset(id: FigureId) -> (ScanSpec, RegimeExpectation) {
    let s = 1.0 / 2f64.sqrt();
    match id {
        FigureId::F2a => (
            ScanSpec {
                model: ModelConfig {
                    dim: 2,
                    hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
                    observable: ObservableConfig::Case { case_id: 2 },
                    state: StateConfig::Bloch { v: [s, s, 0.0] },
                    times: vec![0.0, PI, 0.0],
                },
                scan: ScanAxis {
                    time_index: 2,
                    start: 0.0,
                    stop: TAU,
                    points: 1000,
                },
                families: vec![Family::Lg2, Family::Lg3, Family::Ho3],
                epsilon: 1e-9,
            },
            RegimeExpectation {
                satisfied: vec![Family::Lg2, Family::Lg3],
                violated: vec![Family::Ho3],
            },
        ),
        FigureId::F2b => (
            ScanSpec {
                model: ModelConfig {
                    dim: 2,
                    hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
                    observable: ObservableConfig::Case { case_id: 2 },
                    state: StateConfig::Bloch { v: [s, 0.0, s] },
                    times: vec![0.0, PI / 2.0, PI, 0.0],
                },
                scan: ScanAxis {
                    time_index: 3,
                    start: 0.0,
                    stop: TAU,
                    points: 1001,
                },
                families: vec![Family::Lg2, Family::Lg3, Family::Ho4],
                epsilon: 1e-9,
            },
            RegimeExpectation {
                satisfied: vec![Family::Lg2, Family::Lg3],
                violated: vec![Family::Ho4],
            },
        ),
        FigureId::F2c => (
            ScanSpec {
                model: ModelConfig {
                    dim: 2,
                    hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
                    observable: ObservableConfig::Case { case_id: 2 },
                    state: StateConfig::Bloch { v: [1.0, 0.0, 0.0] },
                    times: vec![0.0, PI / 2.0, PI, 0.0],
                },
                scan: ScanAxis {
                    time_index: 3,
                    start: 0.0,
                    stop: TAU,
                    points: 1001,
                },
                families: vec![Family::Ho3, Family::Ho4],
                epsilon: 1e-9,
            },
            RegimeExpectation {
                satisfied: vec![Family::Ho3],
                violated: vec![Family::Ho4],
            },
        ),
        FigureId::F3 => (
            ScanSpec {
                model: ModelConfig {
                    dim: 4,
                    hamiltonian: HamiltonianConfig::SpinX { scale: 1.0 },
                    observable: ObservableConfig::Case { case_id: 7 },
                    state: StateConfig::PureCase(PureStateParams {
                        case_id: 7,
                        theta: 9.0 * PI / 5.0,
                        alpha: 9.0 * PI / 5.0,
                        beta: 0.0,
                        phases: [3.0 * PI / 5.0, 6.0 * PI / 5.0, 9.0 * PI / 5.0],
                    }),
                    times: vec![0.0, PI / 5.0, 2.0 * PI / 5.0, 3.0 * PI / 5.0, 0.0],
                },
                scan: ScanAxis {
                    time_index: 4,
                    start: 0.0,
                    stop: TAU,
                    points: 1000,
                },
                families: vec![Family::Lg3, Family::Pentagon],
                epsilon: 1e-9,
            },
            RegimeExpectation {
                satisfied: vec![Family::Lg3],
                violated: vec![Family::Pentagon],
            },
        ),
        FigureId::F4 => {
            let g = 1.0 / (3.0 * 3f64.sqrt());
            (
                ScanSpec {
                    model: ModelConfig {
                        dim: 3,
                        // the three-level closed-form family evolves at half rate
                        hamiltonian: HamiltonianConfig::SpinX { scale: 0.5 },
                        observable: ObservableConfig::TrichotomicSpin1,
                        state: StateConfig::Gellmann {
                            a: [0.0, 0.0, g, 2.0 * g, g, 0.0, 0.0, -g],
                        },
                        times: vec![0.0, 3.0 * PI / 4.0, 0.0],
                    },
                    scan: ScanAxis {
                        time_index: 2,
                        start: 0.0,
                        stop: TAU,
                        points: 1000,
                    },
                    families: vec![Family::Lg2, Family::Lg3, Family::TriLg3],
                    epsilon: 1e-9,
                },
                RegimeExpectation {
                    satisfied: vec![Family::Lg2, Family::Lg3],
                    violated: vec![Family::TriLg3],
                },
            )
        }
    }
}

/// Grid indices where the expectation holds.
pub fn expectation_points(
    res: &ScanResult,
    expect: &RegimeExpectation,
    eps: f64,
) -> Vec<usize> {
    let col = |fam: Family| res.families.iter().position(|&f| f == fam);
    let mut out = Vec::new();
    'point: for k in 0..res.params.len() {
        for fam in &expect.satisfied {
            match col(*fam) {
                Some(c) if res.minima[c][k] >= -eps => {}
                _ => continue 'point,
            }
        }
        for fam in &expect.violated {
            match col(*fam) {
                Some(c) if res.minima[c][k] < -eps => {}
                _ => continue 'point,
            }
        }
        out.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_parse() {
        for id in FigureId::ALL {
            let back: FigureId = id.name().parse().unwrap();
            assert_eq!(back, id);
        }
        assert!("5".parse::<FigureId>().is_err());
    }

    // regime existence for every preset is covered by the acceptance
    // suite; here just check grid alignment for the boundary presets
    #[test]
    fn boundary_presets_hit_half_pi_multiples() {
        for id in [FigureId::F2b, FigureId::F2c] {
            let (spec, _) = figure_preset(id);
            let step = (spec.scan.stop - spec.scan.start) / (spec.scan.points - 1) as f64;
            let k = (3.0 * PI / 2.0 / step).round() as usize;
            let t = spec.scan.start + step * k as f64;
            assert!((t - 3.0 * PI / 2.0).abs() < 1e-12);
        }
    }
}
