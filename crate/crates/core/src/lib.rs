//! Structure-preserving finite differences for Poisson-Nernst-Planck
//! systems with zero-flux concentrations and Neumann potential data.
//!
//! Each step solves the pinned Neumann Poisson problem for the current net
//! charge, then moves every species by forward Euler with Slotboom-form
//! fluxes. The update conserves each species' mass exactly, keeps
//! concentrations nonnegative under `k <= h² λ`, and dissipates the
//! discrete free energy.
//!
//! ```
//! use pnp::{BoundaryData1D, CflPolicy, Domain, Grid1D, Simulation, SpeciesState};
//!
//! let grid = Grid1D::new(0.0, 1.0, 40).unwrap();
//! let domain = Domain::line(grid, BoundaryData1D::new(-1.0, 0.0));
//! let mut sim = Simulation::new(domain, vec![SpeciesState::new(vec![1.0; 40], 1.0)], CflPolicy::Strict).unwrap();
//! let k = 0.9 * sim.step_bound();
//! let f0 = sim.energy().free_energy;
//! sim.advance_to(0.1, k, |_, _| Ok(())).unwrap();
//! assert!(sim.energy().free_energy < f0);
//! assert!((sim.masses()[0] - 1.0).abs() < 1e-13);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod poisson;
pub mod run;
pub mod scheme;
pub mod setup;
pub mod simulation;

pub use config::{parse_config, SimConfig};
pub use diagnostics::{EnergyReport, SteadyStateReport, SteadyTolerances};
pub use error::{PnpError, Result};
pub use grid::{Grid1D, Grid2D};
pub use poisson::{
    check_compatibility_1d, check_compatibility_2d, potential_increments_1d, solve_poisson_1d, solve_poisson_2d,
    BoundaryData1D, BoundaryData2D, ChargeSource, Poisson1d, Poisson2d, PotentialField,
};
pub use run::{converge, run, RunRecord, StudyTarget, Termination};
pub use scheme::{cfl_2d, cfl_lambda0, cfl_multi, CflBound, CflPolicy, SpeciesState, StepReport};
pub use setup::{BoundarySpec, InitialCondition, ProblemSetup, SpeciesSpec};
pub use simulation::{Domain, Simulation};
