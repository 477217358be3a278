//! Implicit transient 2D heat conduction with temperature-dependent
//! properties and an electro-thermally coupled heater film.
//!
//! Cell-centered finite volumes on the structured mesh from
//! [`crate::device`], harmonic-mean face conductances, backward Euler in
//! time and Picard iteration on the property and resistance nonlinearity.
//! The heater film is a row of zero-capacity nodes on the substrate
//! surface. Gas conducts only: no convection, and radiation only through
//! the optional linearized film term.

mod banded;
mod boundary;
mod drive;
mod solver;
mod trace;

pub use banded::{BandedCholesky, BandedMatrix};
pub use boundary::{BoundaryCondition, FaceBoundaries, PropertyMode};
pub use drive::{electro_thermal_source, DriveMode, DrivePulse};
pub use solver::{
    probe, simulate_transient, Solver, SolverSettings, StepOutcome, MIN_STEPS_PER_PULSE,
};
pub use trace::{energy_balance_residual, field_to_text, Trace, TraceSample, TransientState};
