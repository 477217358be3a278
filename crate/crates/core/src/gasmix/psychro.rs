//! Humidity conversions: saturation pressure, relative humidity, mole
//! fraction and absolute humidity.

use serde::{Deserialize, Serialize};

use crate::error::PropertyError;

/// Molar gas constant [J/(mol K)].
pub const GAS_CONSTANT: f64 = 8.314_462_618;
/// Default ambient pressure [Pa].
pub const STANDARD_PRESSURE: f64 = 101_325.0;
/// Molar mass of water [kg/mol], used by the humidity conversions.
pub const WATER_MOLAR_MASS: f64 = 0.018_015_28;

pub const SATURATION_T_MIN: f64 = 253.0;
pub const SATURATION_T_MAX: f64 = 373.15;

const KELVIN: f64 = 273.15;

/// Saturation vapor pressure correlation over liquid water.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationModel {
    /// Buck (1996) modified Magnus form; within 0.1 % of steam tables from
    /// -20 to 100 degC.
    #[default]
    Buck,
    /// Classic Magnus form 611.2 exp(17.62 t / (243.12 + t)); drifts to
    /// +2.5 % at the boiling point.
    Magnus,
}

impl SaturationModel {
    pub fn pressure(self, t: f64) -> Result<f64, PropertyError> {
        if !(SATURATION_T_MIN..=SATURATION_T_MAX).contains(&t) {
            return Err(PropertyError::TemperatureOutOfRange {
                t,
                min: SATURATION_T_MIN,
                max: SATURATION_T_MAX,
            });
        }
        let c = t - KELVIN;
        Ok(match self {
            Self::Buck => 611.21 * ((18.678 - c / 234.5) * (c / (257.14 + c))).exp(),
            Self::Magnus => 611.2 * (17.62 * c / (243.12 + c)).exp(),
        })
    }
}

/// Saturation vapor pressure [Pa] with the default correlation.
pub fn saturation_pressure(t: f64) -> Result<f64, PropertyError> {
    SaturationModel::default().pressure(t)
}

fn check_tp(t: f64, p: f64) -> Result<(), PropertyError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(PropertyError::InvalidState(format!(
            "temperature {t} K must be positive"
        )));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(PropertyError::InvalidState(format!(
            "pressure {p} Pa must be positive"
        )));
    }
    Ok(())
}

fn check_fraction(x: f64) -> Result<(), PropertyError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(PropertyError::InvalidFraction(x))
    }
}

/// Water-vapor mole fraction from relative humidity (0..1).
pub fn rh_to_mole_fraction(rh: f64, t: f64, p: f64) -> Result<f64, PropertyError> {
    if !(0.0..=1.0).contains(&rh) {
        return Err(PropertyError::InvalidRelativeHumidity(rh));
    }
    check_tp(t, p)?;
    let x = rh * saturation_pressure(t)? / p;
    if x > 1.0 {
        return Err(PropertyError::Supersaturation { x });
    }
    Ok(x)
}

/// Relative humidity (0..1, may exceed 1 for supersaturated inputs) of a
/// given mole fraction.
pub fn mole_fraction_to_rh(x: f64, t: f64, p: f64) -> Result<f64, PropertyError> {
    check_fraction(x)?;
    check_tp(t, p)?;
    Ok(x * p / saturation_pressure(t)?)
}

/// Absolute humidity (vapor mass concentration) [kg/m^3].
pub fn mole_fraction_to_abs_humidity(x: f64, t: f64, p: f64) -> Result<f64, PropertyError> {
    check_fraction(x)?;
    check_tp(t, p)?;
    Ok(x * p * WATER_MOLAR_MASS / (GAS_CONSTANT * t))
}

/// Inverse of [`mole_fraction_to_abs_humidity`].
pub fn abs_humidity_to_mole_fraction(rho_v: f64, t: f64, p: f64) -> Result<f64, PropertyError> {
    check_tp(t, p)?;
    if !(rho_v >= 0.0) {
        return Err(PropertyError::InvalidState(format!(
            "absolute humidity {rho_v} kg/m^3 must be non-negative"
        )));
    }
    let x = rho_v * GAS_CONSTANT * t / (p * WATER_MOLAR_MASS);
    check_fraction(x)?;
    Ok(x)
}

/// Gas condition at a point or in a chamber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumidAirState {
    /// Temperature [K].
    pub t: f64,
    /// Pressure [Pa].
    pub p: f64,
    /// Water-vapor mole fraction.
    pub x: f64,
}

impl HumidAirState {
    pub fn new(t: f64, p: f64, x: f64) -> Result<Self, PropertyError> {
        check_tp(t, p)?;
        check_fraction(x)?;
        Ok(Self { t, p, x })
    }

    pub fn dry(t: f64) -> Result<Self, PropertyError> {
        Self::new(t, STANDARD_PRESSURE, 0.0)
    }

    /// Builds a state from relative humidity; the vapor partial pressure
    /// never exceeds saturation.
    pub fn from_rh(t: f64, p: f64, rh: f64) -> Result<Self, PropertyError> {
        let x = rh_to_mole_fraction(rh, t, p)?;
        let sat = saturation_pressure(t)?;
        if x * p > sat * (1.0 + 1e-9) {
            return Err(PropertyError::Supersaturation { x });
        }
        Self::new(t, p, x)
    }

    pub fn from_abs_humidity(t: f64, p: f64, rho_v: f64) -> Result<Self, PropertyError> {
        Self::new(t, p, abs_humidity_to_mole_fraction(rho_v, t, p)?)
    }

    pub fn with_x(self, x: f64) -> Result<Self, PropertyError> {
        Self::new(self.t, self.p, x)
    }

    pub fn rh(&self) -> Result<f64, PropertyError> {
        mole_fraction_to_rh(self.x, self.t, self.p)
    }

    pub fn abs_humidity(&self) -> Result<f64, PropertyError> {
        mole_fraction_to_abs_humidity(self.x, self.t, self.p)
    }
}
