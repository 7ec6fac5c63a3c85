use thiserror::Error;

/// Errors raised by the solver, the configuration layer and the driver.
#[derive(Debug, Error)]
pub enum PnpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The Neumann problem has no solution because boundary flux and charge do not balance.
    #[error("incompatible charge and boundary data: defect {defect:e} exceeds tolerance {tolerance:e}")]
    Incompatible { defect: f64, tolerance: f64 },

    #[error("singular linear system at row {row}")]
    Singular { row: usize },

    #[error("time step {k:e} exceeds the positivity bound h^2*lambda = {bound:e}")]
    CflViolation { k: f64, bound: f64 },

    #[error("negative concentration {value:e} in species {species} at cell {cell}")]
    Positivity {
        species: usize,
        cell: usize,
        value: f64,
    },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PnpError {
    /// Process exit status used by the `pnp` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            PnpError::Config(_) | PnpError::InvalidGrid(_) | PnpError::Shape(_) => 2,
            PnpError::Incompatible { .. } => 3,
            PnpError::CflViolation { .. } | PnpError::Positivity { .. } => 4,
            PnpError::Singular { .. } | PnpError::Io(_) | PnpError::Csv(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, PnpError>;
