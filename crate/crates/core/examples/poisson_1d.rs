// Pinned Neumann Poisson problem on an interval, and the potential
// increments that drive the fluxes.
//
// ```text
// cargo run --example poisson_1d
// ```

use pnp::poisson::{potential_increments_1d, BoundaryData1D, ChargeSource, Poisson1d};
use pnp::Grid1D;

/// Returns `(ψ, A)` for unit charge density on `n` cells with `σ_a = -1`, `σ_b = 0`.
pub fn run_example(n: usize) -> pnp::Result<(Vec<f64>, Vec<f64>)> {
    let grid = Grid1D::new(0.0, 1.0, n)?;
    let bc = BoundaryData1D::new(-1.0, 0.0);
    let solver = Poisson1d::new(grid, bc);
    let psi = solver.solve(&ChargeSource::single(&vec![1.0; n]))?;
    let increments = potential_increments_1d(&psi, &bc, &grid);

    println!("{:>8} {:>12}", "x", "psi");
    for (x, p) in grid.centers().iter().zip(psi.iter()) {
        println!("{x:>8.4} {p:>12.6}");
    }
    println!("increments A_j (non-increasing for nonnegative charge): {increments:.4?}");
    Ok((psi.into_inner(), increments))
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    run_example(10)?;
    Ok(())
}
