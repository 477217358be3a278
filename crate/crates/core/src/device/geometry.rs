use serde::{Deserialize, Serialize};

/// Heated Pt film resistor with a linear resistance-temperature law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaterElement {
    /// Resistance at `t0_k` [Ohm].
    pub r0_ohm: f64,
    pub t0_k: f64,
    /// Temperature coefficient of resistance [1/K].
    pub tcr_per_k: f64,
    pub footprint_width_m: f64,
    pub footprint_depth_m: f64,
}

impl Default for HeaterElement {
    fn default() -> Self {
        Self {
            r0_ohm: 6.0,
            t0_k: 293.0,
            tcr_per_k: 0.0028,
            footprint_width_m: 2.0e-3,
            footprint_depth_m: 2.0e-3,
        }
    }
}

impl HeaterElement {
    pub fn resistance(&self, t: f64) -> f64 {
        self.r0_ohm * (1.0 + self.tcr_per_k * (t - self.t0_k))
    }

    /// Inverts the R(T) law; used to turn a measured resistance back into a
    /// film temperature.
    pub fn temperature_from_resistance(&self, r: f64) -> f64 {
        self.t0_k + (r / self.r0_ohm - 1.0) / self.tcr_per_k
    }
}

/// Thermal condition on the outer face of the cap coversheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapBoundary {
    /// Natural convection to ambient; the cap warms during a pulse.
    FreeCap,
    /// Cap outer face pinned at the ambient temperature.
    HeatSink,
}

/// Thermal condition on the lateral ends of the modeled cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateralBoundary {
    /// Held at ambient by the surrounding package.
    HeatSink,
    Convective,
    Adiabatic,
}

/// Natural-convection film coefficient for exposed package faces [W/(m^2 K)].
pub const FREE_CONVECTION_H: f64 = 10.0;

pub const MIN_CAP_CLEARANCE: f64 = 20e-6;
pub const MAX_CAP_CLEARANCE: f64 = 2e-3;

/// Parametric description of one sensor element and its cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorGeometry {
    /// Fired substrate thickness [m].
    pub substrate_thickness_m: f64,
    /// Gap between substrate and cap coversheet [m].
    pub cap_clearance_m: f64,
    pub coversheet_thickness_m: f64,
    /// Inner lateral width of one cap cavity [m].
    pub chamber_width_m: f64,
    /// Cap frame wall thickness on each side of the cavity [m].
    pub frame_wall_m: f64,
    pub heater: HeaterElement,
    pub cap_boundary: CapBoundary,
    pub lateral_boundary: LateralBoundary,
    /// Out-of-plane extent of the 2D cross-section [m].
    pub out_of_plane_depth_m: f64,
    /// Model a mirrored cap under the substrate (only the upper half is
    /// meshed, with a symmetry plane at the substrate mid-plane).
    pub mirror: bool,
}

impl Default for SensorGeometry {
    fn default() -> Self {
        let heater = HeaterElement::default();
        Self {
            substrate_thickness_m: 120e-6,
            cap_clearance_m: 240e-6,
            coversheet_thickness_m: 480e-6,
            chamber_width_m: 3.0e-3,
            frame_wall_m: 1.0e-3,
            out_of_plane_depth_m: heater.footprint_depth_m,
            heater,
            cap_boundary: CapBoundary::FreeCap,
            lateral_boundary: LateralBoundary::HeatSink,
            mirror: true,
        }
    }
}

fn positive(v: f64, name: &str, errs: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{name} must be positive"));
    }
}

/// Checks every geometric invariant and returns all violations.
pub fn validate_geometry(geom: &SensorGeometry) -> Result<(), Vec<String>> {
    let mut errs = Vec::new();
    positive(geom.substrate_thickness_m, "substrate_thickness", &mut errs);
    positive(geom.cap_clearance_m, "cap_clearance", &mut errs);
    positive(
        geom.coversheet_thickness_m,
        "coversheet_thickness",
        &mut errs,
    );
    positive(geom.chamber_width_m, "chamber_width", &mut errs);
    positive(geom.frame_wall_m, "frame_wall", &mut errs);
    positive(geom.out_of_plane_depth_m, "out_of_plane_depth", &mut errs);
    let h = &geom.heater;
    positive(h.r0_ohm, "heater r0", &mut errs);
    positive(h.tcr_per_k, "heater tcr", &mut errs);
    positive(h.t0_k, "heater t0", &mut errs);
    positive(h.footprint_width_m, "heater footprint_width", &mut errs);
    positive(h.footprint_depth_m, "heater footprint_depth", &mut errs);
    if geom.cap_clearance_m > 0.0
        && !(MIN_CAP_CLEARANCE..=MAX_CAP_CLEARANCE).contains(&geom.cap_clearance_m)
    {
        errs.push(format!(
            "cap_clearance {:.1} um outside supported range [{:.0}, {:.0}] um",
            geom.cap_clearance_m * 1e6,
            MIN_CAP_CLEARANCE * 1e6,
            MAX_CAP_CLEARANCE * 1e6
        ));
    }
    if geom.chamber_width_m < h.footprint_width_m {
        errs.push(format!(
            "chamber_width ({:.3} mm) must be at least heater footprint_width ({:.3} mm)",
            geom.chamber_width_m * 1e3,
            h.footprint_width_m * 1e3
        ));
    }
    // resistance must stay positive down to the bottom of the property window
    if h.r0_ohm > 0.0 && h.resistance(crate::gasmix::PROPERTY_T_MIN) <= 0.0 {
        errs.push("heater resistance not positive over the operating range".into());
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry_is_valid() {
        let g = SensorGeometry::default();
        assert_eq!(g.substrate_thickness_m, 120e-6);
        assert_eq!(g.cap_clearance_m, 240e-6);
        assert_eq!(g.coversheet_thickness_m, 480e-6);
        assert_eq!(validate_geometry(&g), Ok(()));
    }

    #[test]
    fn zero_substrate_is_reported() {
        let g = SensorGeometry {
            substrate_thickness_m: 0.0,
            ..Default::default()
        };
        let errs = validate_geometry(&g).unwrap_err();
        assert_eq!(
            errs,
            vec!["substrate_thickness must be positive".to_string()]
        );
    }

    #[test]
    fn narrow_chamber_names_both_fields() {
        let g = SensorGeometry {
            chamber_width_m: 1.5e-3,
            ..Default::default()
        };
        let errs = validate_geometry(&g).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("chamber_width") && errs[0].contains("footprint_width"));
    }

    #[test]
    fn collects_every_violation() {
        let mut g = SensorGeometry {
            cap_clearance_m: 5e-3,
            coversheet_thickness_m: -1.0,
            ..Default::default()
        };
        g.heater.tcr_per_k = 0.0;
        assert_eq!(validate_geometry(&g).unwrap_err().len(), 3);
    }

    #[test]
    fn resistance_law() {
        let h = HeaterElement::default();
        assert_eq!(h.resistance(293.0), 6.0);
        assert!((h.resistance(793.0) - 6.0 * 2.4).abs() < 1e-12);
        assert!((h.temperature_from_resistance(h.resistance(612.5)) - 612.5).abs() < 1e-9);
    }
}
