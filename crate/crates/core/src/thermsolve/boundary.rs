use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::gasmix::{PROPERTY_T_MAX, PROPERTY_T_MIN};

/// Thermal condition on one outer face of a domain. Ambient-referenced
/// variants take the simulation's ambient temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    FixedAmbient,
    FixedTemperature(f64),
    /// Film coefficient h [W/(m^2 K)] to ambient.
    Convective {
        h: f64,
    },
    Adiabatic,
}

impl BoundaryCondition {
    pub(crate) fn validate(&self) -> Result<(), SolverError> {
        match *self {
            Self::Convective { h } if !(h >= 0.0) => Err(SolverError::InvalidInput(format!(
                "film coefficient {h} must be non-negative"
            ))),
            Self::FixedTemperature(t) if !(t > 0.0) => Err(SolverError::InvalidInput(format!(
                "boundary temperature {t} K must be positive"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceBoundaries {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
}

impl FaceBoundaries {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self {
            left: bc,
            right: bc,
            bottom: bc,
            top: bc,
        }
    }
}

/// How thermophysical properties are evaluated during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PropertyMode {
    /// Every property frozen at `t_ref` [K].
    ConstantAtReference { t_ref: f64 },
    /// Properties follow the local cell temperature.
    TemperatureDependent,
}

impl PropertyMode {
    pub fn validate(&self) -> Result<(), SolverError> {
        match *self {
            Self::ConstantAtReference { t_ref }
                if !(PROPERTY_T_MIN..=PROPERTY_T_MAX).contains(&t_ref) =>
            {
                Err(SolverError::InvalidInput(format!(
                    "reference temperature {t_ref} K outside [{PROPERTY_T_MIN}, {PROPERTY_T_MAX}] K"
                )))
            }
            _ => Ok(()),
        }
    }
}
