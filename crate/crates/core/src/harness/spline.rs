//! Cubic splines for transferring fine-grid solutions onto coarse grids.
//! Queries outside the knot range continue the end polynomial.

use crate::error::{PnpError, Result};
use crate::linalg::solve_tridiagonal;

/// End condition closing the spline system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplineEnd {
    /// Zero second derivative at both end knots.
    #[default]
    Natural,
    /// Continuous third derivative across the second and second-to-last knots.
    NotAKnot,
}

#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    curvature: Vec<f64>,
}

impl CubicSpline {
    pub fn new(knots: &[f64], values: &[f64]) -> Result<Self> {
        Self::with_end(knots, values, SplineEnd::Natural)
    }

    pub fn with_end(knots: &[f64], values: &[f64], end: SplineEnd) -> Result<Self> {
        let n = knots.len();
        if n < 4 || values.len() != n {
            return Err(PnpError::Shape(format!(
                "spline needs >= 4 knots with matching values, got {n} knots and {} values",
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(PnpError::Shape("spline knots must be strictly increasing".into()));
        }
        let widths: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n - 2;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for r in 0..m {
            let (hl, hr) = (widths[r], widths[r + 1]);
            lower[r] = hl;
            diag[r] = 2.0 * (hl + hr);
            upper[r] = hr;
            rhs[r] = 6.0 * ((values[r + 2] - values[r + 1]) / hr - (values[r + 1] - values[r]) / hl);
        }
        if end == SplineEnd::NotAKnot {
            // eliminate M_0 = M_1 + (h_0/h_1)(M_1 - M_2) and its mirror image
            let (h0, h1) = (widths[0], widths[1]);
            diag[0] += h0 + h0 * h0 / h1;
            upper[0] -= h0 * h0 / h1;
            let (ha, hb) = (widths[n - 2], widths[n - 3]);
            diag[m - 1] += ha + ha * ha / hb;
            lower[m - 1] -= ha * ha / hb;
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        let (first, last) = match end {
            SplineEnd::Natural => (0.0, 0.0),
            SplineEnd::NotAKnot => {
                let (h0, h1) = (widths[0], widths[1]);
                let (ha, hb) = (widths[n - 2], widths[n - 3]);
                (
                    rhs[0] + h0 / h1 * (rhs[0] - rhs[1]),
                    rhs[m - 1] + ha / hb * (rhs[m - 1] - rhs[m - 2]),
                )
            }
        };
        let mut curvature = Vec::with_capacity(n);
        curvature.push(first);
        curvature.extend(rhs);
        curvature.push(last);
        Ok(CubicSpline {
            knots: knots.to_vec(),
            values: values.to_vec(),
            curvature,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.knots.len() - 2;
        // index of the segment containing x, clamped to the end segments
        let seg = self.knots[1..=last].partition_point(|&k| k <= x);
        let (x0, x1) = (self.knots[seg], self.knots[seg + 1]);
        let (y0, y1) = (self.values[seg], self.values[seg + 1]);
        let (m0, m1) = (self.curvature[seg], self.curvature[seg + 1]);
        let w = x1 - x0;
        let a = (x1 - x) / w;
        let b = (x - x0) / w;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * w * w / 6.0
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// One-shot evaluation of the natural spline through `(knots, values)`.
pub fn cubic_spline_eval(knots: &[f64], values: &[f64], queries: &[f64]) -> Result<Vec<f64>> {
    cubic_spline_eval_with(knots, values, queries, SplineEnd::Natural)
}

pub fn cubic_spline_eval_with(knots: &[f64], values: &[f64], queries: &[f64], end: SplineEnd) -> Result<Vec<f64>> {
    Ok(CubicSpline::with_end(knots, values, end)?.eval_many(queries))
}

/// Tensor-product spline on a cell-centered rectangle. `values` is stored
/// x-major (`i * ys.len() + j`); the result uses the same layout on the
/// query axes.
pub fn spline_grid_2d(
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
    qx: &[f64],
    qy: &[f64],
    end: SplineEnd,
) -> Result<Vec<f64>> {
    if values.len() != xs.len() * ys.len() {
        return Err(PnpError::Shape("grid values do not match axes".into()));
    }
    // along y for every fine x-row
    let mut partial = vec![0.0; xs.len() * qy.len()];
    for (i, row) in values.chunks(ys.len()).enumerate() {
        let s = CubicSpline::with_end(ys, row, end)?;
        for (jq, &y) in qy.iter().enumerate() {
            partial[i * qy.len() + jq] = s.eval(y);
        }
    }
    // then along x for every query column
    let mut out = vec![0.0; qx.len() * qy.len()];
    let mut column = vec![0.0; xs.len()];
    for jq in 0..qy.len() {
        for (i, c) in column.iter_mut().enumerate() {
            *c = partial[i * qy.len() + jq];
        }
        let s = CubicSpline::with_end(xs, &column, end)?;
        for (iq, &x) in qx.iter().enumerate() {
            out[iq * qy.len() + jq] = s.eval(x);
        }
    }
    Ok(out)
}
