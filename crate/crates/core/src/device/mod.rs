//! Sensor geometry, solid materials, heater model and meshing of the
//! cross-section into a structured simulation domain.
//!
//! The chamber width and frame wall thickness defaults (3 mm, 1 mm) are
//! placeholders: the device drawings do not give them.

mod domain;
mod geometry;
mod materials;

pub use domain::{
    build_domain, build_domain_unchecked, ChamberTag, DiscretizedDomain, Film, MaterialId,
    Resolution, MIN_CELLS_PER_LAYER,
};
pub use geometry::{
    validate_geometry, CapBoundary, HeaterElement, LateralBoundary, SensorGeometry,
    FREE_CONVECTION_H, MAX_CAP_CLEARANCE, MIN_CAP_CLEARANCE,
};
pub use materials::{Conductivity, Materials, SolidMaterial};
