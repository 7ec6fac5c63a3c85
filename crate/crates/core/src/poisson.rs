//! Discrete Neumann Poisson problem `-Δψ = Σ q_i c_i`, `∂ψ/∂n = σ`, with the
//! potential pinned to zero in the first cell.
//!
//! In 1D the outward normal derivative at the left end is `σ_a`, i.e.
//! `ψ_x(a) = -σ_a`, and at the right end `ψ_x(b) = σ_b`. Ghost values are
//! eliminated from the boundary rows, which leaves a singular Neumann matrix;
//! the first row is then replaced by `ψ_0 = 0`. The dropped row still holds
//! whenever the compatibility condition does.

use std::ops::Deref;

use crate::error::{PnpError, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::linalg::{solve_tridiagonal, BandLu, BandMatrix};

/// Default absolute tolerance on the compatibility defect.
pub const DEFAULT_COMPAT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData1D {
    pub sigma_a: f64,
    pub sigma_b: f64,
}

impl BoundaryData1D {
    pub fn new(sigma_a: f64, sigma_b: f64) -> Self {
        BoundaryData1D { sigma_a, sigma_b }
    }
}

/// Neumann data for every boundary face of a rectangle.
///
/// `left`/`right` hold one value per face on `x = ax`/`x = bx` (length `ny`),
/// `bottom`/`top` one per face on `y = ay`/`y = by` (length `nx`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData2D {
    left: Vec<f64>,
    right: Vec<f64>,
    bottom: Vec<f64>,
    top: Vec<f64>,
}

impl BoundaryData2D {
    pub fn uniform(grid: &Grid2D, sigma: f64) -> Self {
        Self::edges(grid, sigma, sigma, sigma, sigma)
    }

    /// One constant per edge.
    pub fn edges(grid: &Grid2D, left: f64, right: f64, bottom: f64, top: f64) -> Self {
        BoundaryData2D {
            left: vec![left; grid.ny()],
            right: vec![right; grid.ny()],
            bottom: vec![bottom; grid.nx()],
            top: vec![top; grid.nx()],
        }
    }

    pub fn from_faces(
        grid: &Grid2D,
        left: Vec<f64>,
        right: Vec<f64>,
        bottom: Vec<f64>,
        top: Vec<f64>,
    ) -> Result<Self> {
        if left.len() != grid.ny()
            || right.len() != grid.ny()
            || bottom.len() != grid.nx()
            || top.len() != grid.nx()
        {
            return Err(PnpError::Shape(format!(
                "face data for a {}x{} grid needs {} left/right and {} bottom/top values",
                grid.nx(),
                grid.ny(),
                grid.ny(),
                grid.nx()
            )));
        }
        Ok(BoundaryData2D {
            left,
            right,
            bottom,
            top,
        })
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn bottom(&self) -> &[f64] {
        &self.bottom
    }

    pub fn top(&self) -> &[f64] {
        &self.top
    }

    pub fn fits(&self, grid: &Grid2D) -> bool {
        self.left.len() == grid.ny() && self.bottom.len() == grid.nx()
    }

    pub fn max_abs(&self) -> f64 {
        self.faces().map(|(_, s)| s.abs()).fold(0.0, f64::max)
    }

    /// Every boundary face as `(adjacent cell index, σ)`, in a fixed order:
    /// left, right, bottom, top.
    pub fn faces(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let ny = self.left.len();
        let nx = self.bottom.len();
        let left = self.left.iter().enumerate().map(|(j, &s)| (j, s));
        let right = self
            .right
            .iter()
            .enumerate()
            .map(move |(j, &s)| ((nx - 1) * ny + j, s));
        let bottom = self.bottom.iter().enumerate().map(move |(i, &s)| (i * ny, s));
        let top = self
            .top
            .iter()
            .enumerate()
            .map(move |(i, &s)| (i * ny + ny - 1, s));
        left.chain(right).chain(bottom).chain(top)
    }
}

/// Potential at cell centers; the pinned cell holds exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField(Vec<f64>);

impl PotentialField {
    pub fn zeros(n: usize) -> Self {
        PotentialField(vec![0.0; n])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        PotentialField(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PotentialField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Net charge density `s_j = Σ_i q_i c^i_j` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSource {
    density: Vec<f64>,
}

impl ChargeSource {
    pub fn zeros(n: usize) -> Self {
        ChargeSource {
            density: vec![0.0; n],
        }
    }

    /// Single species with unit charge.
    pub fn single(c: &[f64]) -> Self {
        ChargeSource { density: c.to_vec() }
    }

    /// Accumulates `q * c` into the density.
    pub fn add_species(&mut self, charge: f64, c: &[f64]) -> Result<()> {
        if c.len() != self.density.len() {
            return Err(PnpError::Shape(format!(
                "species of length {} on a source of length {}",
                c.len(),
                self.density.len()
            )));
        }
        for (s, &cj) in self.density.iter_mut().zip(c) {
            *s += charge * cj;
        }
        Ok(())
    }

    pub fn from_species<'a>(n: usize, species: impl IntoIterator<Item = (f64, &'a [f64])>) -> Result<Self> {
        let mut src = Self::zeros(n);
        for (q, c) in species {
            src.add_species(q, c)?;
        }
        Ok(src)
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }
}

/// Discrete `∫σ ds + ∫ s dx` on an interval. Zero for a solvable problem.
pub fn check_compatibility_1d(source: &ChargeSource, bc: &BoundaryData1D, grid: &Grid1D) -> f64 {
    bc.sigma_a + bc.sigma_b + grid.h() * source.density.iter().sum::<f64>()
}

/// Discrete `∫σ ds + ∫ s dx` on a rectangle.
pub fn check_compatibility_2d(source: &ChargeSource, bc: &BoundaryData2D, grid: &Grid2D) -> f64 {
    let h = grid.h();
    let flux: f64 = bc.faces().map(|(_, s)| s).sum();
    h * flux + h * h * source.density.iter().sum::<f64>()
}

fn ensure_compatible(defect: f64, tolerance: f64) -> Result<()> {
    if defect.abs() > tolerance || !defect.is_finite() {
        Err(PnpError::Incompatible { defect, tolerance })
    } else {
        Ok(())
    }
}

/// 1D pinned Neumann solver. Stateless apart from its configuration.
#[derive(Debug, Clone)]
pub struct Poisson1d {
    grid: Grid1D,
    bc: BoundaryData1D,
    tolerance: f64,
}

impl Poisson1d {
    pub fn new(grid: Grid1D, bc: BoundaryData1D) -> Self {
        Poisson1d {
            grid,
            bc,
            tolerance: DEFAULT_COMPAT_TOL,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn bc(&self) -> &BoundaryData1D {
        &self.bc
    }

    pub fn solve(&self, source: &ChargeSource) -> Result<PotentialField> {
        let n = self.grid.len();
        if source.len() != n {
            return Err(PnpError::Shape(format!("source of length {} on {n} cells", source.len())));
        }
        ensure_compatible(check_compatibility_1d(source, &self.bc, &self.grid), self.tolerance)?;

        let h2 = self.grid.h() * self.grid.h();
        let mut lower = vec![1.0; n];
        let mut diag = vec![-2.0; n];
        let mut upper = vec![1.0; n];
        let mut rhs: Vec<f64> = source.density.iter().map(|s| -s * h2).collect();
        // pin
        lower[0] = 0.0;
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = 0.0;
        diag[n - 1] = -1.0;
        upper[n - 1] = 0.0;
        rhs[n - 1] -= self.bc.sigma_b * self.grid.h();

        solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        rhs[0] = 0.0;
        Ok(PotentialField(rhs))
    }
}

pub fn solve_poisson_1d(source: &ChargeSource, bc: &BoundaryData1D, grid: &Grid1D) -> Result<PotentialField> {
    Poisson1d::new(*grid, *bc).solve(source)
}

/// Edge increments `A_j = ψ_{j+1} - ψ_j` for all `n + 1` faces, with the
/// boundary faces closed by `A_0 = -h σ_a` and `A_n = h σ_b`.
pub fn potential_increments_1d(psi: &[f64], bc: &BoundaryData1D, grid: &Grid1D) -> Vec<f64> {
    let n = psi.len();
    let h = grid.h();
    let mut inc = Vec::with_capacity(n + 1);
    inc.push(-h * bc.sigma_a);
    inc.extend(psi.windows(2).map(|w| w[1] - w[0]));
    inc.push(h * bc.sigma_b);
    inc
}

/// 2D pinned Neumann solver. The five-point matrix is fixed for a grid, so
/// it is assembled and factored once; only the right-hand side depends on
/// the charge.
#[derive(Debug, Clone)]
pub struct Poisson2d {
    grid: Grid2D,
    bc: BoundaryData2D,
    lu: BandLu,
    boundary_rhs: Vec<f64>,
    tolerance: f64,
}

impl Poisson2d {
    pub fn new(grid: Grid2D, bc: BoundaryData2D) -> Result<Self> {
        if !bc.fits(&grid) {
            return Err(PnpError::Shape("boundary data does not match grid".into()));
        }
        let lu = assemble_pinned_laplacian_2d(&grid).factor()?;
        let h = grid.h();
        let mut boundary_rhs = vec![0.0; grid.len()];
        for (cell, sigma) in bc.faces() {
            boundary_rhs[cell] -= sigma * h;
        }
        boundary_rhs[0] = 0.0;
        Ok(Poisson2d {
            grid,
            bc,
            lu,
            boundary_rhs,
            tolerance: DEFAULT_COMPAT_TOL,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn bc(&self) -> &BoundaryData2D {
        &self.bc
    }

    pub fn solve(&self, source: &ChargeSource) -> Result<PotentialField> {
        if source.len() != self.grid.len() {
            return Err(PnpError::Shape(format!(
                "source of length {} on {} cells",
                source.len(),
                self.grid.len()
            )));
        }
        ensure_compatible(check_compatibility_2d(source, &self.bc, &self.grid), self.tolerance)?;
        let h2 = self.grid.h() * self.grid.h();
        let mut rhs: Vec<f64> = source
            .density
            .iter()
            .zip(&self.boundary_rhs)
            .map(|(s, b)| b - s * h2)
            .collect();
        rhs[0] = 0.0;
        self.lu.solve_in_place(&mut rhs);
        rhs[0] = 0.0;
        Ok(PotentialField(rhs))
    }
}

pub fn solve_poisson_2d(source: &ChargeSource, bc: &BoundaryData2D, grid: &Grid2D) -> Result<PotentialField> {
    Poisson2d::new(*grid, bc.clone())?.solve(source)
}

/// Five-point Neumann Laplacian (scaled by h²) with the first row replaced
/// by the gauge pin. Edge cells carry -3 and corners -2 on the diagonal.
fn assemble_pinned_laplacian_2d(grid: &Grid2D) -> BandMatrix {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut m = BandMatrix::zeros(grid.len(), ny);
    for i in 0..nx {
        for j in 0..ny {
            let r = grid.index(i, j);
            if r == 0 {
                m.set(0, 0, 1.0);
                continue;
            }
            let mut neighbors = [None; 4];
            if i > 0 {
                neighbors[0] = Some(grid.index(i - 1, j));
            }
            if i + 1 < nx {
                neighbors[1] = Some(grid.index(i + 1, j));
            }
            if j > 0 {
                neighbors[2] = Some(grid.index(i, j - 1));
            }
            if j + 1 < ny {
                neighbors[3] = Some(grid.index(i, j + 1));
            }
            for c in neighbors.into_iter().flatten() {
                m.set(r, c, 1.0);
                m.add(r, r, -1.0);
            }
        }
    }
    m
}
