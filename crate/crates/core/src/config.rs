//! JSON run configuration.
//!
//! ```json
//! {
//!   "grid": { "dimension": 1, "extents": [0.0, 1.0], "n": 100 },
//!   "species": [
//!     { "name": "c", "charge": 1.0, "initial": { "kind": "constant", "value": 1.0 } }
//!   ],
//!   "boundary": { "sigma_a": -1.0, "sigma_b": 0.0 },
//!   "time": { "t_final": 0.5, "k": "auto" },
//!   "cfl": { "policy": "auto", "safety": 0.9 },
//!   "output": { "snapshot_every": 1000 },
//!   "tolerances": { "compatibility": 1e-10 }
//! }
//! ```
//!
//! Steady-state runs replace `t_final` with `"steady_state": true` and an
//! optional `max_time`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostics::SteadyTolerances;
use crate::error::{PnpError, Result};
use crate::poisson::DEFAULT_COMPAT_TOL;
use crate::scheme::{CflPolicy, SpeciesState};
use crate::setup::{BoundarySpec, ProblemSetup, SpeciesSpec};
use crate::simulation::Domain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellCount {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub extents: Vec<f64>,
    pub n: CellCount,
}

impl GridSpec {
    pub fn cells(&self) -> Vec<usize> {
        match &self.n {
            CellCount::Uniform(n) => vec![*n; self.dimension],
            CellCount::PerAxis(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Fixed(f64),
    Named(StepKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKeyword {
    Auto,
}

impl Default for StepSpec {
    fn default() -> Self {
        StepSpec::Named(StepKeyword::Auto)
    }
}

impl StepSpec {
    pub fn requested(&self) -> Option<f64> {
        match self {
            StepSpec::Fixed(k) => Some(*k),
            StepSpec::Named(StepKeyword::Auto) => None,
        }
    }
}

pub const DEFAULT_MAX_TIME: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub steady_state: bool,
    /// Safety stop for steady-state runs.
    #[serde(default)]
    pub max_time: Option<f64>,
    #[serde(default)]
    pub k: StepSpec,
}

impl TimeSpec {
    /// Fixed horizon with the automatic step.
    pub fn until(t_final: f64) -> Self {
        TimeSpec {
            t_final: Some(t_final),
            steady_state: false,
            max_time: None,
            k: StepSpec::default(),
        }
    }

    /// Run to steady state, giving up at `max_time`.
    pub fn steady(max_time: f64) -> Self {
        TimeSpec {
            t_final: None,
            steady_state: true,
            max_time: Some(max_time),
            k: StepSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CflSpec {
    #[serde(default)]
    pub policy: CflPolicy,
    #[serde(default = "default_safety")]
    pub safety: f64,
}

fn default_safety() -> f64 {
    0.9
}

impl Default for CflSpec {
    fn default() -> Self {
        CflSpec {
            policy: CflPolicy::Auto,
            safety: default_safety(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub directory: Option<PathBuf>,
    /// Write a field snapshot every this many steps; 0 keeps only the
    /// initial and final snapshots.
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_compat")]
    pub compatibility: f64,
    #[serde(default = "default_residual")]
    pub steady_residual: f64,
    #[serde(default = "default_flatness")]
    pub steady_g_flatness: f64,
}

fn default_compat() -> f64 {
    DEFAULT_COMPAT_TOL
}

fn default_residual() -> f64 {
    SteadyTolerances::default().residual
}

fn default_flatness() -> f64 {
    SteadyTolerances::default().g_flatness
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            compatibility: default_compat(),
            steady_residual: default_residual(),
            steady_g_flatness: default_flatness(),
        }
    }
}

impl Tolerances {
    pub fn steady(&self) -> SteadyTolerances {
        SteadyTolerances {
            residual: self.steady_residual,
            g_flatness: self.steady_g_flatness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub species: Vec<SpeciesSpec>,
    pub boundary: BoundarySpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub cfl: CflSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SimConfig {
    /// Config for `setup` on `n` cells per axis, with defaults elsewhere.
    pub fn for_setup(setup: &ProblemSetup, n: usize, time: TimeSpec) -> Self {
        SimConfig {
            grid: GridSpec {
                dimension: setup.dimension(),
                extents: setup.extents.clone(),
                n: CellCount::Uniform(n),
            },
            species: setup.species.clone(),
            boundary: setup.boundary.clone(),
            time,
            cfl: CflSpec::default(),
            output: OutputSpec::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn setup(&self) -> ProblemSetup {
        ProblemSetup {
            extents: self.grid.extents.clone(),
            species: self.species.clone(),
            boundary: self.boundary.clone(),
        }
    }

    pub fn build(&self) -> Result<(Domain, Vec<SpeciesState>)> {
        let (domain, states) = self.setup().build(&self.grid.cells())?;
        Ok((domain.with_tolerance(self.tolerances.compatibility), states))
    }

    /// Signed compatibility defect of the declared initial data.
    pub fn compatibility_defect(&self) -> Result<f64> {
        let (domain, states) = self.build()?;
        domain.compatibility_defect(&states)
    }

    fn validate(&self) -> Result<()> {
        if self.grid.extents.len() != 2 * self.grid.dimension {
            return Err(PnpError::Config(format!(
                "grid.extents needs {} entries for dimension {}",
                2 * self.grid.dimension,
                self.grid.dimension
            )));
        }
        if !(1..=2).contains(&self.grid.dimension) {
            return Err(PnpError::Config(format!("unsupported dimension {}", self.grid.dimension)));
        }
        if self.grid.cells().len() != self.grid.dimension {
            return Err(PnpError::Config("grid.n must give one count per axis".into()));
        }
        match (self.time.t_final, self.time.steady_state) {
            (Some(_), true) => return Err(PnpError::Config("time: set either t_final or steady_state, not both".into())),
            (None, false) => return Err(PnpError::Config("time: one of t_final or steady_state is required".into())),
            (Some(t), false) if !(t >= 0.0) => return Err(PnpError::Config(format!("t_final must be >= 0, got {t}"))),
            _ => {}
        }
        if let StepSpec::Fixed(k) = self.time.k {
            if !(k > 0.0) {
                return Err(PnpError::Config(format!("time.k must be positive, got {k}")));
            }
        }
        if !(self.cfl.safety > 0.0 && self.cfl.safety <= 1.0) {
            return Err(PnpError::Config(format!("cfl.safety must lie in (0, 1], got {}", self.cfl.safety)));
        }
        self.setup().validate()
    }
}

/// Parses and validates a configuration, including the compatibility of
/// the initial charge with the boundary data.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let cfg: SimConfig = serde_json::from_str(text).map_err(|e| PnpError::Config(e.to_string()))?;
    cfg.validate()?;
    let defect = cfg.compatibility_defect()?;
    if !(defect.abs() <= cfg.tolerances.compatibility) {
        return Err(PnpError::Incompatible {
            defect,
            tolerance: cfg.tolerances.compatibility,
        });
    }
    Ok(cfg)
}
