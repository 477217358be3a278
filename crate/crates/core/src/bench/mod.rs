//! Virtual experiments on a sensor pair: differential pulse response,
//! characteristic curves, pulse-power solving, parameter sweeps and the
//! sensitivity metrics used to judge a design.
//!
//! The reference element sits in dry air at ambient temperature and 1 atm.
//! Sealing would raise the pressure on heating; that is neglected, all gas
//! properties are taken at constant pressure.

mod csv;
mod experiment;
mod metrics;

pub use csv::{curve_csv, sweep_csv, trace_csv};
pub use experiment::{
    Bench, CharacteristicCurve, CurvePoint, DifferentialSample, DifferentialTrace, DrivePolicy,
    SweepParameter, SweepRow, MAX_PULSE_POWER_W, POWER_TOLERANCE_K,
};
pub use metrics::{linear_fit, sensitivity_and_linearity, FitRange, HumidityAxis, LinearFit};
