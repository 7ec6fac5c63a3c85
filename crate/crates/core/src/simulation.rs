//! Time loop shared by the 1D and 2D discretizations.

use crate::diagnostics::{self, EnergyReport, SteadyStateReport, SteadyTolerances};
use crate::error::{PnpError, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::poisson::{BoundaryData1D, BoundaryData2D, Poisson1d, Poisson2d, PotentialField};
use crate::scheme::{self, charge_source, CflPolicy, SpeciesState, StepReport};

/// Grid, boundary data and the matching Poisson solver.
#[derive(Debug, Clone)]
pub enum Domain {
    Line(Poisson1d),
    Plane(Poisson2d),
}

impl Domain {
    pub fn line(grid: Grid1D, bc: BoundaryData1D) -> Self {
        Domain::Line(Poisson1d::new(grid, bc))
    }

    pub fn plane(grid: Grid2D, bc: BoundaryData2D) -> Result<Self> {
        Ok(Domain::Plane(Poisson2d::new(grid, bc)?))
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        match self {
            Domain::Line(p) => Domain::Line(p.with_tolerance(tol)),
            Domain::Plane(p) => Domain::Plane(p.with_tolerance(tol)),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Line(_) => 1,
            Domain::Plane(_) => 2,
        }
    }

    pub fn h(&self) -> f64 {
        match self {
            Domain::Line(p) => p.grid().h(),
            Domain::Plane(p) => p.grid().h(),
        }
    }

    pub fn cells(&self) -> usize {
        match self {
            Domain::Line(p) => p.grid().len(),
            Domain::Plane(p) => p.grid().len(),
        }
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dimension() as i32)
    }

    /// Cell-center coordinates, one `Vec` per axis, in storage order.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        match self {
            Domain::Line(p) => vec![p.grid().centers()],
            Domain::Plane(p) => {
                let g = p.grid();
                let (xs, ys) = (g.xs(), g.ys());
                let x = xs.iter().flat_map(|&x| std::iter::repeat_n(x, ys.len())).collect();
                let y = (0..xs.len()).flat_map(|_| ys.iter().copied()).collect();
                vec![x, y]
            }
        }
    }

    pub fn compatibility_defect(&self, states: &[SpeciesState]) -> Result<f64> {
        let src = charge_source(states, self.cells())?;
        Ok(match self {
            Domain::Line(p) => crate::poisson::check_compatibility_1d(&src, p.bc(), p.grid()),
            Domain::Plane(p) => crate::poisson::check_compatibility_2d(&src, p.bc(), p.grid()),
        })
    }

    pub fn solve_potential(&self, states: &[SpeciesState]) -> Result<PotentialField> {
        let src = charge_source(states, self.cells())?;
        match self {
            Domain::Line(p) => p.solve(&src),
            Domain::Plane(p) => p.solve(&src),
        }
    }

    pub fn rhs(&self, state: &SpeciesState, psi: &[f64]) -> Vec<f64> {
        match self {
            Domain::Line(p) => scheme::semi_discrete_rhs_1d(state, psi, p.grid()),
            Domain::Plane(p) => scheme::semi_discrete_rhs_2d(state, psi, p.grid()),
        }
    }

    /// Mesh ratio `λ` such that `k <= h² λ` keeps concentrations nonnegative.
    pub fn mesh_ratio(&self, states: &[SpeciesState]) -> f64 {
        match self {
            Domain::Line(p) => scheme::cfl_multi(states, p.bc(), p.grid()).lambda_multi,
            Domain::Plane(p) => scheme::cfl_2d(p.bc(), p.grid().h()),
        }
    }

    pub fn step_bound(&self, states: &[SpeciesState]) -> f64 {
        let h = self.h();
        h * h * self.mesh_ratio(states)
    }

    pub fn energy(&self, states: &[SpeciesState], psi: &[f64]) -> EnergyReport {
        match self {
            Domain::Line(p) => diagnostics::free_energy_1d(states, psi, p.bc(), p.grid()),
            Domain::Plane(p) => diagnostics::free_energy_2d(states, psi, p.bc(), p.grid()),
        }
    }

    pub fn g_flatness(&self, states: &[SpeciesState], psi: &[f64]) -> f64 {
        match self {
            Domain::Line(_) => diagnostics::g_flatness_1d(states, psi),
            Domain::Plane(p) => diagnostics::g_flatness_2d(states, psi, p.grid()),
        }
    }
}

/// Concentrations, their potential and the clock.
///
/// The cached potential always belongs to the current concentrations.
#[derive(Debug, Clone)]
pub struct Simulation {
    domain: Domain,
    states: Vec<SpeciesState>,
    psi: PotentialField,
    time: f64,
    steps: usize,
    policy: CflPolicy,
}

impl Simulation {
    pub fn new(domain: Domain, states: Vec<SpeciesState>, policy: CflPolicy) -> Result<Self> {
        let n = domain.cells();
        if let Some(bad) = states.iter().position(|s| s.c.len() != n) {
            return Err(PnpError::Shape(format!(
                "species {bad} has {} values on {n} cells",
                states[bad].c.len()
            )));
        }
        if let Some(bad) = states.iter().position(|s| s.c.iter().any(|&c| !(c >= 0.0) || !c.is_finite())) {
            return Err(PnpError::Config(format!("species {bad} has negative or non-finite initial values")));
        }
        let psi = domain.solve_potential(&states)?;
        Ok(Simulation {
            domain,
            states,
            psi,
            time: 0.0,
            steps: 0,
            policy,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn states(&self) -> &[SpeciesState] {
        &self.states
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn policy(&self) -> CflPolicy {
        self.policy
    }

    pub fn energy(&self) -> EnergyReport {
        self.domain.energy(&self.states, &self.psi)
    }

    pub fn step_bound(&self) -> f64 {
        self.domain.step_bound(&self.states)
    }

    pub fn masses(&self) -> Vec<f64> {
        let v = self.domain.cell_volume();
        self.states.iter().map(|s| s.mass(v)).collect()
    }

    /// Advances by `k`, or lands exactly on `t_end` when given.
    pub fn step(&mut self, k: f64) -> Result<StepReport> {
        self.step_to(k, None)
    }

    pub(crate) fn step_to(&mut self, k: f64, land_on: Option<f64>) -> Result<StepReport> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(PnpError::Config(format!("time step must be positive, got {k}")));
        }
        for i in 0..self.states.len() {
            let rhs = self.domain.rhs(&self.states[i], &self.psi);
            scheme::apply_update(i, &mut self.states[i], &rhs, k, self.policy)?;
        }
        self.psi = self.domain.solve_potential(&self.states)?;
        self.time = land_on.unwrap_or(self.time + k);
        self.steps += 1;
        Ok(scheme::report(&self.states, self.time, k, self.domain.cell_volume()))
    }

    /// Steps with `k` until `t_final`, shortening the last step so the
    /// final time is hit exactly. `observe` sees every completed step.
    pub fn advance_to<F>(&mut self, t_final: f64, k: f64, mut observe: F) -> Result<()>
    where
        F: FnMut(&Simulation, &StepReport) -> Result<()>,
    {
        while self.time < t_final {
            let remaining = t_final - self.time;
            let (dt, land) = if remaining <= k * (1.0 + 1e-9) {
                (remaining, Some(t_final))
            } else {
                (k, None)
            };
            let rep = self.step_to(dt, land)?;
            observe(self, &rep)?;
        }
        Ok(())
    }

    /// Steps until the steady-state test passes or `max_time` is reached.
    /// Returns the report of the last step taken.
    pub fn run_to_steady<F>(
        &mut self,
        k: f64,
        max_time: f64,
        tol: &SteadyTolerances,
        mut observe: F,
    ) -> Result<Option<SteadyStateReport>>
    where
        F: FnMut(&Simulation, &StepReport) -> Result<()>,
    {
        let mut last = None;
        while self.time < max_time {
            let prev = self.states.clone();
            let rep = self.step(k)?;
            observe(self, &rep)?;
            let steady = diagnostics::steady_report(
                diagnostics::time_residual(&prev, &self.states, rep.dt_used),
                self.domain.g_flatness(&self.states, &self.psi),
                tol,
            );
            last = Some(steady);
            if steady.converged {
                break;
            }
        }
        Ok(last)
    }
}
