//! Declarative problem descriptions: domain extents, species with initial
//! profiles and Neumann data. Shared by the JSON config and the builtin
//! test cases.

use serde::{Deserialize, Serialize};

use crate::error::{PnpError, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::poisson::{BoundaryData1D, BoundaryData2D};
use crate::scheme::SpeciesState;
use crate::simulation::Domain;

/// Initial concentration profile, sampled at cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialCondition {
    Constant {
        value: f64,
    },
    /// `value + slope_x x + slope_y y`.
    Linear {
        value: f64,
        #[serde(default)]
        slope_x: f64,
        #[serde(default)]
        slope_y: f64,
    },
    /// `right` where the coordinate along `axis` is `>= at`, `left` elsewhere.
    Step {
        at: f64,
        left: f64,
        right: f64,
        #[serde(default)]
        axis: Axis,
    },
    /// `mean + amplitude cos(wavenumber π (x - x0))` along x.
    Cosine {
        mean: f64,
        amplitude: f64,
        wavenumber: f64,
        #[serde(default)]
        x0: f64,
    },
    /// `f(x) g(y)` with both factors given as one-dimensional profiles.
    Product {
        x: Box<InitialCondition>,
        y: Box<InitialCondition>,
    },
    /// Explicit values in storage order; only valid on one resolution.
    Values {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    X,
    Y,
}

impl InitialCondition {
    fn at(&self, x: f64, y: f64) -> Result<f64> {
        Ok(match self {
            InitialCondition::Constant { value } => *value,
            InitialCondition::Linear { value, slope_x, slope_y } => value + slope_x * x + slope_y * y,
            InitialCondition::Step { at, left, right, axis } => {
                let coord = match axis {
                    Axis::X => x,
                    Axis::Y => y,
                };
                if coord >= *at {
                    *right
                } else {
                    *left
                }
            }
            InitialCondition::Cosine {
                mean,
                amplitude,
                wavenumber,
                x0,
            } => mean + amplitude * (wavenumber * std::f64::consts::PI * (x - x0)).cos(),
            InitialCondition::Product { x: fx, y: fy } => fx.at(x, 0.0)? * fy.at(y, 0.0)?,
            InitialCondition::Values { .. } => {
                return Err(PnpError::Config("tabulated values cannot be evaluated pointwise".into()))
            }
        })
    }

    /// Samples the profile at the given cell centers (`ys` empty in 1D).
    pub fn sample(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
        let expected = xs.len() * ys.len().max(1);
        if let InitialCondition::Values { values } = self {
            if values.len() != expected {
                return Err(PnpError::Config(format!(
                    "tabulated initial condition has {} values, grid has {expected} cells",
                    values.len()
                )));
            }
            return Ok(values.clone());
        }
        let mut out = Vec::with_capacity(expected);
        for &x in xs {
            if ys.is_empty() {
                out.push(self.at(x, 0.0)?);
            } else {
                for &y in ys {
                    out.push(self.at(x, y)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSpec {
    pub name: String,
    pub charge: f64,
    pub initial: InitialCondition,
}

/// Neumann data `∂ψ/∂n = σ` with the outward normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Interval { sigma_a: f64, sigma_b: f64 },
    Rectangle { left: f64, right: f64, bottom: f64, top: f64 },
}

/// Everything needed to build a simulation except the resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSetup {
    /// `[a, b]` or `[ax, bx, ay, by]`.
    pub extents: Vec<f64>,
    pub species: Vec<SpeciesSpec>,
    pub boundary: BoundarySpec,
}

impl ProblemSetup {
    pub fn dimension(&self) -> usize {
        self.extents.len() / 2
    }

    pub fn validate(&self) -> Result<()> {
        match (self.extents.len(), &self.boundary) {
            (2, BoundarySpec::Interval { .. }) | (4, BoundarySpec::Rectangle { .. }) => {}
            (2, _) => return Err(PnpError::Config("1D problems need sigma_a/sigma_b boundary data".into())),
            (4, _) => return Err(PnpError::Config("2D problems need left/right/bottom/top boundary data".into())),
            (n, _) => return Err(PnpError::Config(format!("extents must have 2 or 4 entries, got {n}"))),
        }
        let mut names: Vec<&str> = self.species.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(PnpError::Config("species names must be unique".into()));
        }
        Ok(())
    }

    /// Cell counts for a target width `h` (rounded to the nearest integer).
    pub fn cells_for(&self, h: f64) -> Vec<usize> {
        self.extents
            .chunks(2)
            .map(|e| ((e[1] - e[0]) / h).round().max(1.0) as usize)
            .collect()
    }

    pub fn build(&self, cells: &[usize]) -> Result<(Domain, Vec<SpeciesState>)> {
        self.validate()?;
        let e = &self.extents;
        let (domain, xs, ys) = match (&self.boundary, cells) {
            (BoundarySpec::Interval { sigma_a, sigma_b }, [n]) => {
                let grid = Grid1D::new(e[0], e[1], *n)?;
                let xs = grid.centers();
                (Domain::line(grid, BoundaryData1D::new(*sigma_a, *sigma_b)), xs, Vec::new())
            }
            (BoundarySpec::Rectangle { left, right, bottom, top }, [nx, ny]) => {
                let grid = Grid2D::new(e[0], e[1], e[2], e[3], *nx, *ny)?;
                let bc = BoundaryData2D::edges(&grid, *left, *right, *bottom, *top);
                let (xs, ys) = (grid.xs(), grid.ys());
                (Domain::plane(grid, bc)?, xs, ys)
            }
            _ => {
                return Err(PnpError::Config(format!(
                    "{} cell counts given for a {}D problem",
                    cells.len(),
                    self.dimension()
                )))
            }
        };
        let states = self
            .species
            .iter()
            .map(|s| Ok(SpeciesState::new(s.initial.sample(&xs, &ys)?, s.charge)))
            .collect::<Result<Vec<_>>>()?;
        Ok((domain, states))
    }

    pub fn build_with_h(&self, h: f64) -> Result<(Domain, Vec<SpeciesState>)> {
        self.build(&self.cells_for(h))
    }
}
