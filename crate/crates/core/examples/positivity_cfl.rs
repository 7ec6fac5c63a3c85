// The explicit step stays nonnegative below `k = h² λ`. A concentrated
// spike shows what happens above it, with the strict policy turning the
// negative value into an error.
//
// ```text
// cargo run --example positivity_cfl
// ```

use pnp::poisson::BoundaryData1D;
use pnp::{cfl_multi, CflPolicy, Domain, Grid1D, PnpError, Simulation, SpeciesState};

pub struct Outcome {
    pub bound: f64,
    pub min_below: f64,
    pub caught_above: bool,
}

pub fn run_example(n: usize) -> pnp::Result<Outcome> {
    let grid = Grid1D::new(0.0, 1.0, n)?;
    let h = grid.h();
    let bc = BoundaryData1D::new(-1.0, 0.0);
    let mut spike = vec![0.0; n];
    spike[n / 2] = 1.0 / h;
    let states = vec![SpeciesState::new(spike, 1.0)];
    let cfl = cfl_multi(&states, &bc, &grid);
    let bound = cfl.max_step(h);
    println!("h = {h}, lambda0 = {:.5}, step bound h^2 lambda = {bound:.3e}", cfl.lambda0);

    let mut below = Simulation::new(Domain::line(grid, bc), states.clone(), CflPolicy::Strict)?;
    let mut min_below = f64::INFINITY;
    for _ in 0..200 {
        min_below = min_below.min(below.step(0.99 * bound)?.min_c);
    }
    println!("200 steps at 0.99 x bound: min c = {min_below:.3e}");

    let mut above = Simulation::new(Domain::line(grid, bc), states, CflPolicy::Strict)?;
    let caught_above = match above.step(1.5 * bound) {
        Err(e @ PnpError::Positivity { .. }) => {
            println!("one step at 1.5 x bound: {e}");
            true
        }
        Err(e) => return Err(e),
        Ok(rep) => {
            println!("one step at 1.5 x bound stayed nonnegative (min c = {:.3e})", rep.min_c);
            false
        }
    };
    Ok(Outcome { bound, min_below, caught_above })
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    run_example(16)?;
    Ok(())
}
