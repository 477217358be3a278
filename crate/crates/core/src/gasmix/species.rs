//! Pure-component data for dry air and water vapor.

use serde::{Deserialize, Serialize};

use crate::error::PropertyError;

/// Lower edge of the gas-property validity window [K].
pub const PROPERTY_T_MIN: f64 = 270.0;
/// Upper edge of the gas-property validity window [K].
pub const PROPERTY_T_MAX: f64 = 900.0;

const SPECIES_SCHEMA_VERSION: u32 = 1;
const DEFAULT_SPECIES_TOML: &str = include_str!("../../data/species.toml");

/// Polynomial in ascending powers of its argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesKind {
    Air,
    WaterVapor,
}

/// One gas component: molar mass, Sutherland viscosity data and property
/// correlations for conductivity and heat capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub name: SpeciesKind,
    pub molar_mass_kg_mol: f64,
    pub sutherland_s_k: f64,
    pub mu_ref_pa_s: f64,
    pub t_ref_mu_k: f64,
    pub lambda_coeffs: Polynomial,
    pub cp_coeffs: Polynomial,
}

pub(crate) fn check_window(t: f64) -> Result<(), PropertyError> {
    if (PROPERTY_T_MIN..=PROPERTY_T_MAX).contains(&t) {
        Ok(())
    } else {
        Err(PropertyError::TemperatureOutOfRange {
            t,
            min: PROPERTY_T_MIN,
            max: PROPERTY_T_MAX,
        })
    }
}

impl Species {
    /// Thermal conductivity [W/(m K)].
    pub fn lambda(&self, t: f64) -> Result<f64, PropertyError> {
        check_window(t)?;
        Ok(self.lambda_coeffs.eval(t))
    }

    /// Dynamic viscosity [Pa s] from Sutherland's law.
    pub fn mu(&self, t: f64) -> Result<f64, PropertyError> {
        check_window(t)?;
        Ok(self.sutherland_mu(t))
    }

    /// Isobaric specific heat [J/(kg K)].
    pub fn cp(&self, t: f64) -> Result<f64, PropertyError> {
        check_window(t)?;
        Ok(self.cp_coeffs.eval(t))
    }

    pub(crate) fn sutherland_mu(&self, t: f64) -> f64 {
        let s = self.sutherland_s_k;
        let t0 = self.t_ref_mu_k;
        self.mu_ref_pa_s * (t / t0).powf(1.5) * (t0 + s) / (t + s)
    }

    fn validate(&self) -> Result<(), PropertyError> {
        let bad = |msg: &str| {
            Err(PropertyError::SpeciesData(format!(
                "{:?}: {msg}",
                self.name
            )))
        };
        if !(self.molar_mass_kg_mol > 0.0) {
            return bad("molar_mass_kg_mol must be positive");
        }
        if !(self.sutherland_s_k > 0.0) {
            return bad("sutherland_s_k must be positive");
        }
        if !(self.mu_ref_pa_s > 0.0 && self.t_ref_mu_k > 0.0) {
            return bad("viscosity reference pair must be positive");
        }
        if self.lambda_coeffs.0.is_empty() || self.cp_coeffs.0.is_empty() {
            return bad("property polynomials must have at least one coefficient");
        }
        // positivity over the window, checked on a 1 K lattice
        let mut t = PROPERTY_T_MIN;
        while t <= PROPERTY_T_MAX {
            if !(self.lambda_coeffs.eval(t) > 0.0) {
                return bad(&format!("conductivity not positive at {t} K"));
            }
            if !(self.cp_coeffs.eval(t) > 0.0) {
                return bad(&format!("heat capacity not positive at {t} K"));
            }
            t += 1.0;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct SpeciesFile {
    schema_version: u32,
    species: Vec<Species>,
}

/// The two components of humid air.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSet {
    pub air: Species,
    pub water_vapor: Species,
}

impl SpeciesSet {
    /// Parses a species data file (TOML with `schema_version` and one
    /// `[[species]]` record per component).
    pub fn from_toml_str(text: &str) -> Result<Self, PropertyError> {
        let file: SpeciesFile =
            toml::from_str(text).map_err(|e| PropertyError::SpeciesData(e.to_string()))?;
        if file.schema_version != SPECIES_SCHEMA_VERSION {
            return Err(PropertyError::SpeciesData(format!(
                "unsupported schema_version {} (expected {SPECIES_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let mut air = None;
        let mut water = None;
        for sp in file.species {
            sp.validate()?;
            let slot = match sp.name {
                SpeciesKind::Air => &mut air,
                SpeciesKind::WaterVapor => &mut water,
            };
            if slot.replace(sp).is_some() {
                return Err(PropertyError::SpeciesData(
                    "duplicate species record".into(),
                ));
            }
        }
        match (air, water) {
            (Some(air), Some(water_vapor)) => Ok(Self { air, water_vapor }),
            _ => Err(PropertyError::SpeciesData(
                "both air and water_vapor records are required".into(),
            )),
        }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, PropertyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PropertyError::SpeciesData(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn get(&self, kind: SpeciesKind) -> &Species {
        match kind {
            SpeciesKind::Air => &self.air,
            SpeciesKind::WaterVapor => &self.water_vapor,
        }
    }
}

impl Default for SpeciesSet {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_SPECIES_TOML).expect("bundled species data is valid")
    }
}
