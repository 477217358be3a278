//! Wassiljewa mixing rule with Lindsay-Bromley interaction coefficients.

use serde::{Deserialize, Serialize};

use super::psychro::{HumidAirState, GAS_CONSTANT};
use super::species::{check_window, SpeciesKind, SpeciesSet};
use crate::error::PropertyError;

/// Cross Sutherland constant factor for a polar/nonpolar pair.
pub const POLAR_PAIR_FACTOR: f64 = 0.733;

/// Humid-air property model: species data plus the pair factor `C` in
/// `S_ij = C * sqrt(S_i * S_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumidAirModel {
    pub species: SpeciesSet,
    pub pair_factor: f64,
}

impl Default for HumidAirModel {
    fn default() -> Self {
        Self {
            species: SpeciesSet::default(),
            pair_factor: POLAR_PAIR_FACTOR,
        }
    }
}

fn check_fraction(x: f64) -> Result<(), PropertyError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(PropertyError::InvalidFraction(x))
    }
}

impl HumidAirModel {
    pub fn new(species: SpeciesSet) -> Self {
        Self {
            species,
            pair_factor: POLAR_PAIR_FACTOR,
        }
    }

    /// Replaces the pair factor; 1.0 gives the plain geometric-mean rule.
    pub fn with_pair_factor(mut self, c: f64) -> Self {
        self.pair_factor = c;
        self
    }

    pub fn lambda_pure(&self, kind: SpeciesKind, t: f64) -> Result<f64, PropertyError> {
        self.species.get(kind).lambda(t)
    }

    pub fn mu_pure(&self, kind: SpeciesKind, t: f64) -> Result<f64, PropertyError> {
        self.species.get(kind).mu(t)
    }

    /// Lindsay-Bromley coefficient `A_ij`; exactly 1 on the diagonal.
    pub fn interaction_coefficient(
        &self,
        i: SpeciesKind,
        j: SpeciesKind,
        t: f64,
    ) -> Result<f64, PropertyError> {
        check_window(t)?;
        if i == j {
            return Ok(1.0);
        }
        let (si, sj) = (self.species.get(i), self.species.get(j));
        Ok(Self::coefficient(
            si,
            sj,
            si.sutherland_mu(t),
            sj.sutherland_mu(t),
            self.pair_factor,
            t,
        ))
    }

    fn coefficient(
        si: &super::Species,
        sj: &super::Species,
        mu_i: f64,
        mu_j: f64,
        pair_factor: f64,
        t: f64,
    ) -> f64 {
        let (s_i, s_j) = (si.sutherland_s_k, sj.sutherland_s_k);
        let s_ij = pair_factor * (s_i * s_j).sqrt();
        let ratio = (mu_i / mu_j)
            * (sj.molar_mass_kg_mol / si.molar_mass_kg_mol).powf(0.75)
            * (1.0 + s_i / t)
            / (1.0 + s_j / t);
        let root = 1.0 + ratio.sqrt();
        0.25 * root * root * (1.0 + s_ij / t) / (1.0 + s_i / t)
    }

    /// Mixture conductivity [W/(m K)] at water-vapor mole fraction `x`.
    pub fn lambda_mixture(&self, x: f64, t: f64) -> Result<f64, PropertyError> {
        check_fraction(x)?;
        check_window(t)?;
        let (air, water) = (&self.species.air, &self.species.water_vapor);
        let (la, lw) = (air.lambda_coeffs.eval(t), water.lambda_coeffs.eval(t));
        let (mu_a, mu_w) = (air.sutherland_mu(t), water.sutherland_mu(t));
        let a_aw = Self::coefficient(air, water, mu_a, mu_w, self.pair_factor, t);
        let a_wa = Self::coefficient(water, air, mu_w, mu_a, self.pair_factor, t);
        let (xa, xw) = (1.0 - x, x);
        let mut lambda = 0.0;
        if xa > 0.0 {
            lambda += xa * la / (xa + xw * a_aw);
        }
        if xw > 0.0 {
            lambda += xw * lw / (xw + xa * a_wa);
        }
        Ok(lambda)
    }

    /// Mean molar mass [kg/mol].
    pub fn molar_mass(&self, x: f64) -> f64 {
        x * self.species.water_vapor.molar_mass_kg_mol
            + (1.0 - x) * self.species.air.molar_mass_kg_mol
    }

    /// Ideal-gas density [kg/m^3].
    pub fn density(&self, state: &HumidAirState) -> Result<f64, PropertyError> {
        check_fraction(state.x)?;
        Ok(state.p * self.molar_mass(state.x) / (GAS_CONSTANT * state.t))
    }

    /// Mass-weighted isobaric specific heat [J/(kg K)].
    pub fn cp_mixture(&self, x: f64, t: f64) -> Result<f64, PropertyError> {
        check_fraction(x)?;
        let (air, water) = (&self.species.air, &self.species.water_vapor);
        let w = x * water.molar_mass_kg_mol / self.molar_mass(x);
        Ok(w * water.cp(t)? + (1.0 - w) * air.cp(t)?)
    }

    /// Volumetric heat capacity rho * c_p [J/(m^3 K)].
    pub fn volumetric_heat_capacity(&self, state: &HumidAirState) -> Result<f64, PropertyError> {
        Ok(self.density(state)? * self.cp_mixture(state.x, state.t)?)
    }
}
