//! Simulation toolkit for dual-chamber thermal-conductivity humidity
//! sensors built in LTCC technology.
//!
//! A heated Pt film sits on a thin ceramic substrate under a cap. One
//! element sees the ambient humid air through a perforated cap; the other
//! is sealed in dry air. Water vapor changes the gas conductivity, so the
//! two elements reach different temperatures during a current pulse, and
//! that difference is the humidity signal.
//!
//! - [`gasmix`]: pure-gas and humid-air properties, humidity conversions
//! - [`device`]: geometry, materials, heater model, meshing
//! - [`thermsolve`]: implicit transient heat conduction with Joule heating
//! - [`bench`]: virtual experiments and sensor metrics

pub mod bench;
pub mod device;
pub mod error;
pub mod gasmix;
pub mod thermsolve;

pub use error::{ExperimentError, GeometryError, PropertyError, SolverError};
pub use gasmix::{HumidAirModel, HumidAirState};
