//! Explicit update for the Nernst-Planck part.
//!
//! Fluxes use the Slotboom form `e^{-qψ_{j+1/2}} (g_{j+1} - g_j) / h` with
//! `g = c e^{qψ}`, evaluated through potential increments so no `e^{±ψ}`
//! is ever formed:
//!
//! ```text
//! F_{j+1/2} = (c_{j+1} e^{q A_j / 2} - c_j e^{-q A_j / 2}) / h,   A_j = ψ_{j+1} - ψ_j
//! ```
//!
//! Boundary faces carry zero flux. With forward Euler the update of cell `j`
//! is a convex combination of its neighbours as long as `k <= h² λ`, where
//! `λ` comes from [`cfl_lambda0`] (one species) or [`cfl_multi`].

use log::warn;

use crate::error::{PnpError, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::poisson::{BoundaryData1D, BoundaryData2D, ChargeSource, Poisson1d};

/// Concentration of one ionic species and its signed charge.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesState {
    pub c: Vec<f64>,
    pub charge: f64,
}

impl SpeciesState {
    pub fn new(c: Vec<f64>, charge: f64) -> Self {
        SpeciesState { c, charge }
    }

    /// Discrete mass `cell_volume * Σ c`.
    pub fn mass(&self, cell_volume: f64) -> f64 {
        cell_volume * self.c.iter().sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Net charge density of a species list.
pub fn charge_source(states: &[SpeciesState], cells: usize) -> Result<ChargeSource> {
    ChargeSource::from_species(cells, states.iter().map(|s| (s.charge, s.c.as_slice())))
}

/// Mesh-ratio bounds for positivity. The admissible step is `k <= h² λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflBound {
    pub lambda0: f64,
    pub lambda_multi: f64,
    /// Total initial charge carried by negatively charged species (<= 0).
    pub c_minus: f64,
    /// Total initial charge carried by positively charged species (>= 0).
    pub c_plus: f64,
}

impl CflBound {
    pub fn max_step(&self, h: f64) -> f64 {
        h * h * self.lambda_multi
    }
}

/// `1 / (e^{-h σ_b / 2} + e^{-h σ_a / 2})`.
pub fn cfl_lambda0(bc: &BoundaryData1D, h: f64) -> f64 {
    1.0 / ((-h * bc.sigma_b / 2.0).exp() + (-h * bc.sigma_a / 2.0).exp())
}

/// Multi-species bound `e^{h C⁻ / 2} λ₀`.
///
/// The bound on the potential increments behind it assumes `|q_i| <= 1`;
/// larger valences make it optimistic and the positivity check is the
/// backstop.
pub fn cfl_multi(species: &[SpeciesState], bc: &BoundaryData1D, grid: &Grid1D) -> CflBound {
    let h = grid.h();
    let lambda0 = cfl_lambda0(bc, h);
    let (mut c_plus, mut c_minus) = (0.0, 0.0);
    for s in species {
        let charge = s.charge * s.mass(h);
        if s.charge > 0.0 {
            c_plus += charge;
        } else if s.charge < 0.0 {
            c_minus += charge;
        }
    }
    CflBound {
        lambda0,
        lambda_multi: (h * c_minus / 2.0).exp() * lambda0,
        c_minus,
        c_plus,
    }
}

/// Conservative stand-in for a 2D mesh ratio: `1 / (4 e^{h σ_max / 2})`.
/// It assumes every face increment stays within `h σ_max` in magnitude.
pub fn cfl_2d(bc: &BoundaryData2D, h: f64) -> f64 {
    1.0 / (4.0 * (h * bc.max_abs() / 2.0).exp())
}

/// Positivity policy for explicit steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CflPolicy {
    /// Reject steps above the bound and negative outputs.
    Strict,
    /// Log and continue.
    Warn,
    /// Clamp the step to `safety * bound`; negative outputs are logged.
    #[default]
    Auto,
}

impl CflPolicy {
    /// Picks the step actually taken. `requested = None` means "auto".
    pub fn choose_step(self, requested: Option<f64>, bound: f64, safety: f64) -> Result<f64> {
        let auto = safety * bound;
        match (self, requested) {
            (_, None) => Ok(auto),
            (CflPolicy::Auto, Some(k)) => Ok(k.min(auto)),
            (CflPolicy::Strict, Some(k)) if k > bound => Err(PnpError::CflViolation { k, bound }),
            (CflPolicy::Warn, Some(k)) if k > bound => {
                warn!("time step {k:e} exceeds positivity bound {bound:e}");
                Ok(k)
            }
            (_, Some(k)) => Ok(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub time: f64,
    pub dt_used: f64,
    pub min_c: f64,
    pub mass: Vec<f64>,
}

#[inline]
fn face_flux(c_left: f64, c_right: f64, q_increment: f64, h: f64) -> f64 {
    let half = 0.5 * q_increment;
    (c_right * half.exp() - c_left * (-half).exp()) / h
}

/// `Q_j = (F_{j+1/2} - F_{j-1/2}) / h` with zero boundary fluxes.
pub fn semi_discrete_rhs_1d(state: &SpeciesState, psi: &[f64], grid: &Grid1D) -> Vec<f64> {
    let n = state.c.len();
    let h = grid.h();
    let q = state.charge;
    let mut rhs = vec![0.0; n];
    let mut left_flux = 0.0;
    for j in 0..n {
        let right_flux = if j + 1 < n {
            face_flux(state.c[j], state.c[j + 1], q * (psi[j + 1] - psi[j]), h)
        } else {
            0.0
        };
        rhs[j] = (right_flux - left_flux) / h;
        left_flux = right_flux;
    }
    rhs
}

/// Dimension-by-dimension analogue of [`semi_discrete_rhs_1d`].
pub fn semi_discrete_rhs_2d(state: &SpeciesState, psi: &[f64], grid: &Grid2D) -> Vec<f64> {
    let (nx, ny, h) = (grid.nx(), grid.ny(), grid.h());
    let q = state.charge;
    let c = &state.c;
    let mut rhs = vec![0.0; grid.len()];
    for i in 0..nx {
        for j in 0..ny {
            let r = grid.index(i, j);
            let flux_to = |other: usize| face_flux(c[r], c[other], q * (psi[other] - psi[r]), h);
            let east = if i + 1 < nx { flux_to(grid.index(i + 1, j)) } else { 0.0 };
            let west = if i > 0 { -flux_to(grid.index(i - 1, j)) } else { 0.0 };
            let north = if j + 1 < ny { flux_to(grid.index(i, j + 1)) } else { 0.0 };
            let south = if j > 0 { -flux_to(grid.index(i, j - 1)) } else { 0.0 };
            rhs[r] = ((east - west) + (north - south)) / h;
        }
    }
    rhs
}

/// Applies `c += k Q` to one species and reports the first negative cell.
pub(crate) fn apply_update(
    species_index: usize,
    state: &mut SpeciesState,
    rhs: &[f64],
    k: f64,
    policy: CflPolicy,
) -> Result<()> {
    let mut first_negative = None;
    for (j, (cj, qj)) in state.c.iter_mut().zip(rhs).enumerate() {
        *cj += k * qj;
        if *cj < 0.0 && first_negative.is_none() {
            first_negative = Some((j, *cj));
        }
    }
    if let Some((cell, value)) = first_negative {
        let err = PnpError::Positivity {
            species: species_index,
            cell,
            value,
        };
        if policy == CflPolicy::Strict {
            return Err(err);
        }
        warn!("{err}");
    }
    Ok(())
}

pub(crate) fn report(states: &[SpeciesState], time: f64, dt: f64, cell_volume: f64) -> StepReport {
    StepReport {
        time,
        dt_used: dt,
        min_c: states.iter().map(SpeciesState::min).fold(f64::INFINITY, f64::min),
        mass: states.iter().map(|s| s.mass(cell_volume)).collect(),
    }
}

/// One forward-Euler step of every species against a fixed potential.
///
/// `time` is the time level of the input; the report carries `time + k`.
pub fn euler_step_1d(
    states: &mut [SpeciesState],
    psi: &[f64],
    grid: &Grid1D,
    k: f64,
    time: f64,
    policy: CflPolicy,
) -> Result<StepReport> {
    if !(k > 0.0) {
        return Err(PnpError::Config(format!("time step must be positive, got {k}")));
    }
    for (i, s) in states.iter_mut().enumerate() {
        let rhs = semi_discrete_rhs_1d(s, psi, grid);
        apply_update(i, s, &rhs, k, policy)?;
    }
    Ok(report(states, time + k, k, grid.h()))
}

pub fn euler_step_2d(
    states: &mut [SpeciesState],
    psi: &[f64],
    grid: &Grid2D,
    k: f64,
    time: f64,
    policy: CflPolicy,
) -> Result<StepReport> {
    if !(k > 0.0) {
        return Err(PnpError::Config(format!("time step must be positive, got {k}")));
    }
    for (i, s) in states.iter_mut().enumerate() {
        let rhs = semi_discrete_rhs_2d(s, psi, grid);
        apply_update(i, s, &rhs, k, policy)?;
    }
    Ok(report(states, time + k, k, grid.h() * grid.h()))
}

/// Full cycle in 1D: potential from the current concentrations, then an
/// Euler step of each species. Returns the potential that drove the step.
pub fn step_coupled_1d(
    states: &mut [SpeciesState],
    poisson: &Poisson1d,
    k: f64,
    time: f64,
    policy: CflPolicy,
) -> Result<(Vec<f64>, StepReport)> {
    let grid = *poisson.grid();
    let psi = poisson.solve(&charge_source(states, grid.len())?)?.into_inner();
    let report = euler_step_1d(states, &psi, &grid, k, time, policy)?;
    Ok((psi, report))
}
