// Five-point Poisson solve on the unit square. The band factorization is
// built once and reused for every right-hand side.
//
// ```text
// cargo run --example poisson_2d
// ```

use pnp::poisson::{BoundaryData2D, ChargeSource, Poisson2d};
use pnp::Grid2D;

/// Solves `-Δψ = 4`, `∂ψ/∂n = -1` on an `n × n` grid and returns ψ together
/// with the largest deviation from symmetry under `x ↔ y`.
pub fn run_example(n: usize) -> pnp::Result<(Vec<f64>, f64)> {
    let grid = Grid2D::square(1.0, n)?;
    let solver = Poisson2d::new(grid, BoundaryData2D::uniform(&grid, -1.0))?;
    let psi = solver.solve(&ChargeSource::single(&vec![4.0; grid.len()]))?;

    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asymmetry = asymmetry.max((psi[grid.index(i, j)] - psi[grid.index(j, i)]).abs());
        }
    }
    let centre = psi[grid.index(n / 2, n / 2)];
    println!("{n}x{n} grid: psi(centre) = {centre:.6}, transpose asymmetry = {asymmetry:.2e}");
    for j in (0..n).rev() {
        let row: Vec<String> = (0..n).map(|i| format!("{:7.4}", psi[grid.index(i, j)])).collect();
        println!("{}", row.join(" "));
    }
    Ok((psi.into_inner(), asymmetry))
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    run_example(8)?;
    Ok(())
}
