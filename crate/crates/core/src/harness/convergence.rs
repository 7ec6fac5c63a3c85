//! Grid-refinement studies against a fine-grid reference solution.
//!
//! Every run uses `k = k_factor * h² λ` with the run's own positivity ratio
//! `λ`, so the Euler error shrinks like `h²` together with the spatial
//! error. The reference is carried to the coarse cell centers with
//! not-a-knot cubic splines, which stay fourth-order accurate in the end
//! intervals. Potentials are compared after re-pinning the interpolated
//! reference to zero in the coarse grid's first cell, since each grid pins
//! its own first cell. That cell is a corner in 2D, so an end-interval
//! interpolation error there would shift the whole compared field.

use std::io::Write;

use serde::Serialize;

use crate::error::{PnpError, Result};
use crate::harness::cases::TestCase;
use crate::harness::spline::{cubic_spline_eval_with, spline_grid_2d, SplineEnd};
use crate::scheme::CflPolicy;
use crate::setup::ProblemSetup;
use crate::simulation::{Domain, Simulation};

/// Default fraction of the positivity bound used as the time step.
pub const DEFAULT_K_FACTOR: f64 = 0.4;

/// End condition of the splines carrying the reference to coarse grids.
pub const TRANSFER_END: SplineEnd = SplineEnd::NotAKnot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error_c: f64,
    pub order_c: Option<f64>,
    pub error_psi: f64,
    pub order_psi: Option<f64>,
}

/// `max_i |a_i - b_i|`.
pub fn linf_error(field: &[f64], reference: &[f64]) -> f64 {
    field
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn order(coarse: f64, fine: f64) -> Option<f64> {
    if fine > 0.0 && coarse > 0.0 {
        Some((coarse / fine).log2())
    } else {
        None
    }
}

/// Fills `order = log2(e_{k-1} / e_k)` for every row after the first.
pub fn observed_orders(rows: &[ConvergenceRow]) -> Vec<ConvergenceRow> {
    let mut out = rows.to_vec();
    if let Some(first) = out.first_mut() {
        first.order_c = None;
        first.order_psi = None;
    }
    for k in 1..out.len() {
        out[k].order_c = order(rows[k - 1].error_c, rows[k].error_c);
        out[k].order_psi = order(rows[k - 1].error_psi, rows[k].error_psi);
    }
    out
}

/// Runs `setup` at width `h` up to `t_final` with `k = k_factor h² λ`.
pub fn solve_at(setup: &ProblemSetup, h: f64, t_final: f64, k_factor: f64) -> Result<Simulation> {
    let (domain, states) = setup.build_with_h(h)?;
    let mut sim = Simulation::new(domain, states, CflPolicy::Strict)?;
    let k = k_factor * sim.step_bound();
    sim.advance_to(t_final, k, |_, _| Ok(()))?;
    Ok(sim)
}

/// Reference concentrations (per species) and re-pinned potential on the
/// cell centers of `coarse`.
fn transfer(reference: &Simulation, coarse: &Domain) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let fine_axes = axes(reference.domain());
    let coarse_axes = axes(coarse);
    let interp = |values: &[f64]| -> Result<Vec<f64>> {
        match (fine_axes.as_slice(), coarse_axes.as_slice()) {
            ([xf], [xc]) => cubic_spline_eval_with(xf, values, xc, TRANSFER_END),
            ([xf, yf], [xc, yc]) => spline_grid_2d(xf, yf, values, xc, yc, TRANSFER_END),
            _ => Err(PnpError::Shape("reference and coarse grids differ in dimension".into())),
        }
    };
    let c = reference
        .states()
        .iter()
        .map(|s| interp(&s.c))
        .collect::<Result<Vec<_>>>()?;
    let mut psi = interp(reference.psi())?;
    let pin = psi[0];
    psi.iter_mut().for_each(|p| *p -= pin);
    Ok((c, psi))
}

fn axes(domain: &Domain) -> Vec<Vec<f64>> {
    match domain {
        Domain::Line(p) => vec![p.grid().centers()],
        Domain::Plane(p) => vec![p.grid().xs(), p.grid().ys()],
    }
}

/// Error of one coarse solution against the reference.
pub fn compare(coarse: &Simulation, reference: &Simulation) -> Result<ConvergenceRow> {
    let (c_ref, psi_ref) = transfer(reference, coarse.domain())?;
    let error_c = coarse
        .states()
        .iter()
        .zip(&c_ref)
        .map(|(s, r)| linf_error(&s.c, r))
        .fold(0.0, f64::max);
    Ok(ConvergenceRow {
        h: coarse.domain().h(),
        error_c,
        order_c: None,
        error_psi: linf_error(coarse.psi(), &psi_ref),
        order_psi: None,
    })
}

/// Error table for the widths `h_list` against a reference at `h_ref`.
/// Runs are independent and execute on scoped threads.
pub fn run_convergence_study_setup(
    setup: &ProblemSetup,
    h_list: &[f64],
    h_ref: f64,
    t_final: f64,
    k_factor: f64,
) -> Result<Vec<ConvergenceRow>> {
    if let Some(&bad) = h_list.iter().find(|&&h| h <= h_ref) {
        return Err(PnpError::Config(format!("h = {bad} is not coarser than h_ref = {h_ref}")));
    }
    let results: Vec<Result<Simulation>> = std::thread::scope(|scope| {
        let handles: Vec<_> = std::iter::once(h_ref)
            .chain(h_list.iter().copied())
            .map(|h| scope.spawn(move || solve_at(setup, h, t_final, k_factor)))
            .collect();
        handles
            .into_iter()
            .map(|hd| hd.join().expect("convergence run panicked"))
            .collect()
    });
    let mut results = results.into_iter();
    let reference = results.next().expect("reference run")?;
    let rows = results
        .map(|run| compare(&run?, &reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(observed_orders(&rows))
}

pub fn run_convergence_study(case: &TestCase, h_list: &[f64], h_ref: f64, t_final: f64) -> Result<Vec<ConvergenceRow>> {
    run_convergence_study_setup(&case.setup, h_list, h_ref, t_final, DEFAULT_K_FACTOR)
}

/// CSV with header `h,error_c,order_c,error_psi,order_psi`; missing orders
/// are empty cells.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "error_c", "order_c", "error_psi", "order_psi"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.h.to_string(),
            r.error_c.to_string(),
            opt(r.order_c),
            r.error_psi.to_string(),
            opt(r.order_psi),
        ])?;
    }
    w.flush()?;
    Ok(())
}
