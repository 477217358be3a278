use thiserror::Error;

/// Failures of the gas-property and psychrometric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropertyError {
    #[error("temperature {t} K outside validity window [{min}, {max}] K")]
    TemperatureOutOfRange { t: f64, min: f64, max: f64 },
    #[error("mole fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("relative humidity {0} outside [0, 1]")]
    InvalidRelativeHumidity(f64),
    #[error("invalid gas state: {0}")]
    InvalidState(String),
    #[error("supersaturated: water-vapor mole fraction would be {x}")]
    Supersaturation { x: f64 },
    #[error("species data: {0}")]
    SpeciesData(String),
}

/// Failures while building a simulation domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid geometry: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("resolution too coarse: {cells} cells per layer, at least {min} required")]
    ResolutionTooCoarse { cells: usize, min: usize },
    #[error("materials file: {0}")]
    MaterialData(String),
}

/// Failures of the transient solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(
        "Picard iteration did not converge at t = {time} s after {} iterations (last change {:.3e} K)",
        .history.len(),
        .history.last().copied().unwrap_or(f64::NAN)
    )]
    NonConvergence { time: f64, history: Vec<f64> },
    #[error("probe location ({x}, {z}) m lies outside the domain")]
    OutOfDomain { x: f64, z: f64 },
    #[error("linear system is singular or not positive definite at row {0}")]
    SingularSystem(usize),
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Failures of the virtual experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("target temperature {target} K unreachable: {evidence}")]
    TargetUnreachable { target: f64, evidence: String },
    #[error("need at least {needed} points in range, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("invalid experiment input: {0}")]
    InvalidInput(String),
}
