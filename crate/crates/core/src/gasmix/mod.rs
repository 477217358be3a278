//! Thermophysical properties of dry air, water vapor and humid air, plus
//! psychrometric conversions between humidity representations.

mod mixture;
mod psychro;
mod species;

pub use mixture::{HumidAirModel, POLAR_PAIR_FACTOR};
pub use psychro::{
    abs_humidity_to_mole_fraction, mole_fraction_to_abs_humidity, mole_fraction_to_rh,
    rh_to_mole_fraction, saturation_pressure, HumidAirState, SaturationModel, GAS_CONSTANT,
    SATURATION_T_MAX, SATURATION_T_MIN, STANDARD_PRESSURE, WATER_MOLAR_MASS,
};
pub use species::{Polynomial, Species, SpeciesKind, SpeciesSet, PROPERTY_T_MAX, PROPERTY_T_MIN};
