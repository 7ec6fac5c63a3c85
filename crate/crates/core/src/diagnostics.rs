//! Free energy, its dissipation rate and steady-state checks.
//!
//! For a single interval with species `c^i` of charge `q_i`:
//!
//! ```text
//! F = Σ_i Σ_j (c ln c + ½ q_i c ψ_j) h + ½ σ_a ψ_1 + ½ σ_b ψ_N
//! dF/dt = -(1/h) Σ_i Σ_j e^{-q_i (ψ_j + ψ_{j+1})/2} (ln g_{j+1} - ln g_j)(g_{j+1} - g_j)
//! ```
//!
//! with `g = c e^{qψ}` and `0 ln 0 = 0`. On a rectangle the boundary term is
//! `(h/2) Σ_faces σ ψ_adjacent` and the dissipation sums over all interior
//! faces without the `1/h` prefactor.

use crate::grid::{Grid1D, Grid2D};
use crate::poisson::{BoundaryData1D, BoundaryData2D};
use crate::scheme::SpeciesState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub free_energy: f64,
    /// `None` when some concentration is zero and `ln g` is undefined.
    pub dissipation: Option<f64>,
    pub entropy_part: f64,
    pub potential_part: f64,
    pub boundary_part: f64,
}

fn entropy_density(c: f64) -> f64 {
    if c > 0.0 {
        c * c.ln()
    } else {
        0.0
    }
}

fn bulk_parts(states: &[SpeciesState], psi: &[f64], cell_volume: f64) -> (f64, f64) {
    let mut entropy = 0.0;
    let mut potential = 0.0;
    for s in states {
        entropy += cell_volume * s.c.iter().map(|&c| entropy_density(c)).sum::<f64>();
        potential += cell_volume * 0.5 * s.charge * s.c.iter().zip(psi).map(|(c, p)| c * p).sum::<f64>();
    }
    (entropy, potential)
}

/// Contribution of one face to the dissipation sum, before the sign and
/// the dimension-dependent prefactor. `None` if either side is empty.
#[inline]
fn face_dissipation(c_left: f64, c_right: f64, q_increment: f64) -> Option<f64> {
    if !(c_left > 0.0 && c_right > 0.0) {
        return None;
    }
    let dlng = c_right.ln() - c_left.ln() + q_increment;
    let half = 0.5 * q_increment;
    let weighted_dg = c_right * half.exp() - c_left * (-half).exp();
    Some(dlng * weighted_dg)
}

pub fn dissipation_rate_1d(states: &[SpeciesState], psi: &[f64], grid: &Grid1D) -> Option<f64> {
    let mut sum = 0.0;
    for s in states {
        for j in 0..s.c.len().saturating_sub(1) {
            sum += face_dissipation(s.c[j], s.c[j + 1], s.charge * (psi[j + 1] - psi[j]))?;
        }
    }
    Some(-sum / grid.h())
}

pub fn dissipation_rate_2d(states: &[SpeciesState], psi: &[f64], grid: &Grid2D) -> Option<f64> {
    let mut sum = 0.0;
    for s in states {
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let r = grid.index(i, j);
                if i + 1 < grid.nx() {
                    let e = grid.index(i + 1, j);
                    sum += face_dissipation(s.c[r], s.c[e], s.charge * (psi[e] - psi[r]))?;
                }
                if j + 1 < grid.ny() {
                    let nb = grid.index(i, j + 1);
                    sum += face_dissipation(s.c[r], s.c[nb], s.charge * (psi[nb] - psi[r]))?;
                }
            }
        }
    }
    Some(-sum)
}

pub fn free_energy_1d(states: &[SpeciesState], psi: &[f64], bc: &BoundaryData1D, grid: &Grid1D) -> EnergyReport {
    let (entropy_part, potential_part) = bulk_parts(states, psi, grid.h());
    let boundary_part = match (psi.first(), psi.last()) {
        (Some(first), Some(last)) => 0.5 * bc.sigma_a * first + 0.5 * bc.sigma_b * last,
        _ => 0.0,
    };
    EnergyReport {
        free_energy: entropy_part + potential_part + boundary_part,
        dissipation: dissipation_rate_1d(states, psi, grid),
        entropy_part,
        potential_part,
        boundary_part,
    }
}

pub fn free_energy_2d(states: &[SpeciesState], psi: &[f64], bc: &BoundaryData2D, grid: &Grid2D) -> EnergyReport {
    let h = grid.h();
    let (entropy_part, potential_part) = bulk_parts(states, psi, h * h);
    let boundary_part = 0.5 * h * bc.faces().map(|(cell, sigma)| sigma * psi[cell]).sum::<f64>();
    EnergyReport {
        free_energy: entropy_part + potential_part + boundary_part,
        dissipation: dissipation_rate_2d(states, psi, grid),
        entropy_part,
        potential_part,
        boundary_part,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyTolerances {
    pub residual: f64,
    pub g_flatness: f64,
}

impl Default for SteadyTolerances {
    fn default() -> Self {
        SteadyTolerances {
            residual: 1e-8,
            g_flatness: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    pub residual: f64,
    pub g_flatness: f64,
    pub converged: bool,
}

/// `max |c_next - c_prev| / k` over all species and cells.
pub fn time_residual(prev: &[SpeciesState], next: &[SpeciesState], k: f64) -> f64 {
    prev.iter()
        .zip(next)
        .flat_map(|(a, b)| a.c.iter().zip(&b.c).map(|(x, y)| (y - x).abs()))
        .fold(0.0, f64::max)
        / k
}

/// `g = c e^{qψ}` rescaled so its largest entry is 1.
fn normalized_g(state: &SpeciesState, psi: &[f64]) -> Vec<f64> {
    let log_g: Vec<f64> = state
        .c
        .iter()
        .zip(psi)
        .map(|(&c, &p)| if c > 0.0 { c.ln() + state.charge * p } else { f64::NEG_INFINITY })
        .collect();
    let top = log_g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return vec![0.0; log_g.len()];
    }
    log_g.into_iter().map(|l| (l - top).exp()).collect()
}

/// `max |g_{j+1} - g_j| / max g`, worst over species. Zero at `c = Z e^{-qψ}`.
pub fn g_flatness_1d(states: &[SpeciesState], psi: &[f64]) -> f64 {
    states
        .iter()
        .map(|s| {
            normalized_g(s, psi)
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

pub fn g_flatness_2d(states: &[SpeciesState], psi: &[f64], grid: &Grid2D) -> f64 {
    let mut worst: f64 = 0.0;
    for s in states {
        let g = normalized_g(s, psi);
        for i in 0..grid.nx() {
            for j in 0..grid.ny() {
                let r = grid.index(i, j);
                if i + 1 < grid.nx() {
                    worst = worst.max((g[grid.index(i + 1, j)] - g[r]).abs());
                }
                if j + 1 < grid.ny() {
                    worst = worst.max((g[grid.index(i, j + 1)] - g[r]).abs());
                }
            }
        }
    }
    worst
}

pub fn steady_report(residual: f64, g_flatness: f64, tol: &SteadyTolerances) -> SteadyStateReport {
    SteadyStateReport {
        residual,
        g_flatness,
        converged: residual < tol.residual && g_flatness < tol.g_flatness,
    }
}

/// Steady-state test on an interval; `psi` must belong to `next`.
pub fn detect_steady_1d(
    prev: &[SpeciesState],
    next: &[SpeciesState],
    psi: &[f64],
    k: f64,
    tol: &SteadyTolerances,
) -> SteadyStateReport {
    steady_report(time_residual(prev, next, k), g_flatness_1d(next, psi), tol)
}

pub fn detect_steady_2d(
    prev: &[SpeciesState],
    next: &[SpeciesState],
    psi: &[f64],
    grid: &Grid2D,
    k: f64,
    tol: &SteadyTolerances,
) -> SteadyStateReport {
    steady_report(time_residual(prev, next, k), g_flatness_2d(next, psi, grid), tol)
}

/// Per-step increase allowed when checking monotone decay.
pub const ENERGY_STEP_TOL: f64 = 1e-10;
/// Allowed drift of F after the steady state was reached.
pub const ENERGY_PLATEAU_TOL: f64 = 1e-4;

/// True if `energies` never rise by more than [`ENERGY_STEP_TOL`] and, when
/// a steady-state index is given, the final value is within
/// [`ENERGY_PLATEAU_TOL`] of the value there.
pub fn long_time_energy_stability(energies: &[f64], steady_index: Option<usize>) -> bool {
    let monotone = energies.windows(2).all(|w| w[1] <= w[0] + ENERGY_STEP_TOL);
    let plateau = match (steady_index, energies.last()) {
        (Some(i), Some(last)) if i < energies.len() => (last - energies[i]).abs() <= ENERGY_PLATEAU_TOL,
        (Some(_), _) => false,
        (None, _) => true,
    };
    monotone && plateau
}
