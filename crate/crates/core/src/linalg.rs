//! Direct solvers for the narrow-band systems that show up here.

use crate::error::{PnpError, Result};

/// Thomas sweep for a tridiagonal system, no pivoting.
///
/// `lower[i]` couples row `i` to `i - 1` (`lower[0]` unused), `upper[i]`
/// couples row `i` to `i + 1` (last entry unused). The solution overwrites `rhs`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    if lower.len() != n || diag.len() != n || upper.len() != n {
        return Err(PnpError::Shape(format!(
            "tridiagonal bands of length {}/{}/{} for {n} unknowns",
            lower.len(),
            diag.len(),
            upper.len()
        )));
    }
    if n == 0 {
        return Ok(());
    }
    let mut sweep = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(PnpError::Singular { row: 0 });
    }
    rhs[0] /= pivot;
    for i in 1..n {
        sweep[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i] * sweep[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(PnpError::Singular { row: i });
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= sweep[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Square matrix with `bw` sub- and super-diagonals, stored row by row.
///
/// Entry `(r, c)` with `|r - c| <= bw` lives at `r * (2 bw + 1) + (c + bw - r)`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        debug_assert!(r.abs_diff(c) <= self.bw, "({r}, {c}) outside band {}", self.bw);
        r * (2 * self.bw + 1) + (c + self.bw - r)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r.abs_diff(c) > self.bw {
            0.0
        } else {
            self.data[self.slot(r, c)]
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c);
        self.data[s] = v;
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.bw);
                let hi = (r + self.bw).min(self.n - 1);
                (lo..=hi).map(|c| self.get(r, c) * x[c]).sum()
            })
            .collect()
    }

    /// In-place LU without pivoting. Suitable for the diagonally dominant
    /// pinned Laplacians assembled by the Poisson module.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(PnpError::Singular { row: k });
            }
            let last = (k + bw).min(n - 1);
            for r in k + 1..=last {
                let sr = self.slot(r, k);
                let m = self.data[sr] / pivot;
                if m == 0.0 {
                    continue;
                }
                self.data[sr] = m;
                for c in k + 1..=last {
                    let kc = self.data[self.slot(k, c)];
                    if kc != 0.0 {
                        let s = self.slot(r, c);
                        self.data[s] -= m * kc;
                    }
                }
            }
        }
        Ok(BandLu { lu: self })
    }
}

/// Factored band matrix; immutable and reusable across solves.
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
}

impl BandLu {
    pub fn size(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.lu.n, self.lu.bw);
        debug_assert_eq!(x.len(), n);
        for r in 0..n {
            let lo = r.saturating_sub(bw);
            let mut acc = x[r];
            for (c, xc) in x.iter().enumerate().take(r).skip(lo) {
                acc -= self.lu.data[self.lu.slot(r, c)] * xc;
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let hi = (r + bw).min(n - 1);
            let mut acc = x[r];
            for (c, xc) in x.iter().enumerate().take(hi + 1).skip(r + 1) {
                acc -= self.lu.data[self.lu.slot(r, c)] * xc;
            }
            x[r] = acc / self.lu.data[self.lu.slot(r, r)];
        }
    }
}
