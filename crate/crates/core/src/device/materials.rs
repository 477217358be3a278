use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::gasmix::{Polynomial, PROPERTY_T_MAX, PROPERTY_T_MIN};

const MATERIALS_SCHEMA_VERSION: u32 = 1;
const DEFAULT_MATERIALS_TOML: &str = include_str!("../../data/materials.toml");

/// Conductivity given as a constant or as a polynomial in T [K].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Conductivity {
    Constant(f64),
    Polynomial(Polynomial),
}

impl Conductivity {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Polynomial(p) => p.eval(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolidMaterial {
    pub name: String,
    pub lambda_w_mk: Conductivity,
    pub rho_kg_m3: f64,
    pub cp_j_kgk: f64,
}

impl SolidMaterial {
    pub fn volumetric_heat_capacity(&self) -> f64 {
        self.rho_kg_m3 * self.cp_j_kgk
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let err = |m: &str| Err(GeometryError::MaterialData(format!("{}: {m}", self.name)));
        if !(self.rho_kg_m3 > 0.0) || !(self.cp_j_kgk > 0.0) {
            return err("rho and cp must be positive");
        }
        let mut t = PROPERTY_T_MIN;
        while t <= PROPERTY_T_MAX {
            if !(self.lambda_w_mk.at(t) > 0.0) {
                return err(&format!("conductivity not positive at {t} K"));
            }
            t += 1.0;
        }
        Ok(())
    }
}

/// Solid materials of the sensor stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Materials {
    pub substrate: SolidMaterial,
    pub cap_ceramic: SolidMaterial,
}

#[derive(Deserialize)]
struct MaterialsFile {
    schema_version: u32,
    substrate: SolidMaterial,
    cap_ceramic: SolidMaterial,
}

impl Materials {
    pub fn from_toml_str(text: &str) -> Result<Self, GeometryError> {
        let file: MaterialsFile =
            toml::from_str(text).map_err(|e| GeometryError::MaterialData(e.to_string()))?;
        if file.schema_version != MATERIALS_SCHEMA_VERSION {
            return Err(GeometryError::MaterialData(format!(
                "unsupported schema_version {}",
                file.schema_version
            )));
        }
        file.substrate.validate()?;
        file.cap_ceramic.validate()?;
        Ok(Self {
            substrate: file.substrate,
            cap_ceramic: file.cap_ceramic,
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, GeometryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeometryError::MaterialData(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

impl Default for Materials {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_MATERIALS_TOML).expect("bundled materials data is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults() {
        let m = Materials::default();
        assert_eq!(m.substrate.lambda_w_mk.at(500.0), 3.0);
        assert_eq!(m.substrate.volumetric_heat_capacity(), 3100.0 * 900.0);
    }

    #[test]
    fn polynomial_conductivity_parses() {
        let text =
            DEFAULT_MATERIALS_TOML.replacen("lambda_w_mk = 3.0", "lambda_w_mk = [3.5, -1.0e-3]", 1);
        let m = Materials::from_toml_str(&text).unwrap();
        assert!((m.substrate.lambda_w_mk.at(500.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_values() {
        let text = DEFAULT_MATERIALS_TOML.replacen("rho_kg_m3 = 3100.0", "rho_kg_m3 = 0.0", 1);
        assert!(Materials::from_toml_str(&text).is_err());
        let text =
            DEFAULT_MATERIALS_TOML.replacen("lambda_w_mk = 3.0", "lambda_w_mk = [1.0, -0.01]", 1);
        assert!(Materials::from_toml_str(&text).is_err());
    }
}
