//! Uniform cell-centered grids.
//!
//! Cells are indexed from zero in code. Cell `j` of a [`Grid1D`] has its
//! center at `a + h (j + 1/2)`, so the faces sit at `a + h j` and the first
//! and last faces coincide with the domain ends. Boundary data always
//! attaches to faces.

use crate::error::{PnpError, Result};

const WIDTH_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(PnpError::InvalidGrid(format!(
                "interval [{a}, {b}] has non-positive length"
            )));
        }
        if n < 2 {
            return Err(PnpError::InvalidGrid(format!(
                "need at least 2 cells, got {n}"
            )));
        }
        Ok(Grid1D {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn center(&self, j: usize) -> f64 {
        self.a + self.h * (j as f64 + 0.5)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }
}

/// Rectangle `[ax, bx] x [ay, by]` split into square cells of width `h`.
///
/// Storage is row-major along x: cell `(i, j)` lives at `i * ny + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    nx: usize,
    ny: usize,
    h: f64,
}

impl Grid2D {
    pub fn new(ax: f64, bx: f64, ay: f64, by: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(bx > ax && by > ay) || ![ax, bx, ay, by].iter().all(|v| v.is_finite()) {
            return Err(PnpError::InvalidGrid(format!(
                "rectangle [{ax}, {bx}] x [{ay}, {by}] is degenerate"
            )));
        }
        if nx == 0 || ny == 0 || nx * ny < 2 {
            return Err(PnpError::InvalidGrid(format!(
                "need at least 2 cells, got {nx} x {ny}"
            )));
        }
        let hx = (bx - ax) / nx as f64;
        let hy = (by - ay) / ny as f64;
        if (hx - hy).abs() > WIDTH_RTOL * hx.max(hy) {
            return Err(PnpError::InvalidGrid(format!(
                "cell widths differ: hx = {hx}, hy = {hy}"
            )));
        }
        Ok(Grid2D {
            ax,
            bx,
            ay,
            by,
            nx,
            ny,
            h: hx,
        })
    }

    /// Unit-width square `[0, len]^2` with `n x n` cells.
    pub fn square(len: f64, n: usize) -> Result<Self> {
        Self::new(0.0, len, 0.0, len, n, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn extents(&self) -> [f64; 4] {
        [self.ax, self.bx, self.ay, self.by]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        i * self.ny + j
    }

    pub fn x(&self, i: usize) -> f64 {
        self.ax + self.h * (i as f64 + 0.5)
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ay + self.h * (j as f64 + 0.5)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }
}
