//! Experiment configuration: a TOML file with sections, overridden by flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nsc_core::conditions::{ConditionParams, Route, TailMode};
use nsc_core::large_data::{fitted_lattice, LogLogFloor};
use nsc_core::quadrature::QuadratureOptions;
use nsc_core::solver::{geometric_schedule, SolverConfig};
use nsc_core::spectral::{Advection, FrequencyLattice};
use serde::{Deserialize, Serialize};

use crate::eps;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for randomly generated fields.
    pub seed: u64,
    /// Worker threads for sweeps; 0 picks the rayon default.
    pub threads: usize,
    pub lattice: LatticeSection,
    pub data: DataSection,
    pub norms: NormsSection,
    pub solver: SolverSection,
    pub conditions: ConditionsSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            threads: 0,
            lattice: LatticeSection::default(),
            data: DataSection::default(),
            norms: NormsSection::default(),
            solver: SolverSection::default(),
            conditions: ConditionsSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Frequency lattice. When neither `spacing` nor `periods` is given the
/// spacing is the finest whose dealiased region still contains the datum:
/// `supp û₀(ε)` for large data, the ball `|ξ| ≤ random_r_max` for random data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub counts: [usize; 3],
    pub spacing: Option<[f64; 3]>,
    pub periods: Option<[f64; 3]>,
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection {
            counts: [64, 64, 256],
            spacing: None,
            periods: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// The ε-family concentrated in one dyadic block.
    Large,
    /// Seeded random band-limited divergence-free field.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub kind: DataKind,
    pub eps: String,
    pub eps_list: String,
    pub loglog_floor: bool,
    pub loglog_floor_value: f64,
    /// Multiplies the datum.
    pub scale: f64,
    pub random_r_min: f64,
    pub random_r_max: f64,
    /// Quadrature intervals per profile axis in the separable sweep.
    pub quadrature_resolution: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            kind: DataKind::Large,
            eps: "1/8".into(),
            eps_list: "2^-4..2^-14".into(),
            loglog_floor: true,
            loglog_floor_value: 0.1,
            scale: 1.0,
            random_r_min: 1.0,
            random_r_max: 2.0,
            quadrature_resolution: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsSection {
    /// `[s, p, r]` triples; `inf` is accepted for `p` and `r`.
    pub params: Vec<[f64; 3]>,
}

impl Default for NormsSection {
    fn default() -> Self {
        NormsSection {
            params: vec![[-1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.5, 1.0]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub omega: f64,
    /// Rotation rates for `check-bounds`.
    pub omegas: Vec<f64>,
    /// Evaluation times for `check-bounds` and `linear-evolve`.
    pub times: Vec<f64>,
    pub t_final: f64,
    pub dt0: f64,
    pub cfl: f64,
    pub nonlinear: bool,
    pub advection: Advection,
    pub blowup_factor: f64,
    /// Geometric snapshot count in `[snapshot_first, T]`; 0 disables.
    pub snapshots: usize,
    pub snapshot_first: f64,
    pub write_snapshots: bool,
    pub monitor: bool,
    pub eta: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            omega: 1.0,
            omegas: vec![1.0, 10.0],
            times: vec![0.1, 1.0, 10.0],
            t_final: 5.0,
            dt0: 0.125,
            cfl: 0.5,
            nonlinear: true,
            advection: Advection::Conservative,
            blowup_factor: 1e6,
            snapshots: 0,
            snapshot_first: 0.01,
            write_snapshots: false,
            monitor: false,
            eta: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionsSection {
    pub c: f64,
    pub delta: f64,
    pub t_max: f64,
    pub tail: TailMode,
    pub paper_route: bool,
    pub rel_tol: f64,
    pub budget: usize,
}

impl Default for ConditionsSection {
    fn default() -> Self {
        let q = QuadratureOptions::default();
        let p = ConditionParams::default();
        ConditionsSection {
            c: p.c,
            delta: p.delta,
            t_max: p.t_max,
            tail: p.tail,
            paper_route: false,
            rel_tol: q.rel_tol,
            budget: q.budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn eps(&self) -> Result<f64, String> {
        eps::parse_single(&self.data.eps)
    }

    pub fn eps_list(&self) -> Result<Vec<f64>, String> {
        eps::parse_list(&self.data.eps_list)
    }

    pub fn floor(&self) -> LogLogFloor {
        LogLogFloor {
            enabled: self.data.loglog_floor,
            value: self.data.loglog_floor_value,
        }
    }

    pub fn lattice(&self) -> Result<Arc<FrequencyLattice>, String> {
        let l = &self.lattice;
        let lat = match (l.spacing, l.periods) {
            (Some(_), Some(_)) => return Err("give either lattice.spacing or lattice.periods, not both".into()),
            (Some(s), None) => FrequencyLattice::with_spacing(s, l.counts),
            (None, Some(p)) => FrequencyLattice::new(p, l.counts),
            (None, None) => match self.data.kind {
                DataKind::Large => return fitted_lattice(self.eps()?, l.counts).map_err(|e| e.to_string()),
                DataKind::Random => {
                    let r = self.data.random_r_max;
                    FrequencyLattice::with_spacing(l.counts.map(|n| r / (n.saturating_sub(1) / 3).max(1) as f64), l.counts)
                }
            },
        };
        lat.map(Arc::new).map_err(|e| e.to_string())
    }

    pub fn condition_params(&self) -> ConditionParams {
        let c = &self.conditions;
        ConditionParams {
            c: c.c,
            delta: c.delta,
            t_max: c.t_max,
            tail: c.tail,
            quadrature: QuadratureOptions {
                rel_tol: c.rel_tol,
                budget: c.budget,
                ..QuadratureOptions::default()
            },
        }
    }

    pub fn route(&self) -> Route {
        if self.conditions.paper_route {
            Route::Embedding
        } else {
            Route::Direct
        }
    }

    pub fn solver_config(&self) -> Result<SolverConfig, String> {
        let s = &self.solver;
        let snapshot_times = if s.snapshots > 0 {
            geometric_schedule(s.snapshot_first, s.t_final, s.snapshots).map_err(|e| e.to_string())?
        } else {
            Vec::new()
        };
        let cfg = SolverConfig {
            omega: s.omega,
            t_final: s.t_final,
            dt0: s.dt0,
            cfl: s.cfl,
            snapshot_times,
            dealias: true,
            nonlinear: s.nonlinear,
            track_linear: s.monitor,
            advection: s.advection,
            blowup_factor: s.blowup_factor,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}
