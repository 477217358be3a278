use serde::{Deserialize, Serialize};

use super::geometry::{
    validate_geometry, CapBoundary, LateralBoundary, SensorGeometry, FREE_CONVECTION_H,
};
use super::materials::Materials;
use crate::error::GeometryError;
use crate::thermsolve::{BoundaryCondition, FaceBoundaries};

/// Minimum number of cells across each layer thickness.
pub const MIN_CELLS_PER_LAYER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialId {
    Substrate,
    CapCeramic,
    Gas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChamberTag {
    Reference,
    Ambient,
    None,
}

/// Mesh density: cells across every layer thickness. Lateral zones get
/// `cells_per_layer` cells per frame wall and side gap and twice that under
/// the heater.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub cells_per_layer: usize,
}

impl Resolution {
    pub const fn new(cells_per_layer: usize) -> Self {
        Self { cells_per_layer }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::new(8)
    }
}

/// Zero-thickness heater film lying on the horizontal face `face_row`
/// (index into `z_faces`). Every column carries a film-plane node so the
/// unknown layout stays structured; only `heater_columns` receive Joule heat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Film {
    pub face_row: usize,
    pub heater_columns: std::ops::Range<usize>,
}

/// Structured 2D cross-section: tensor-product cells with one material per
/// cell, boundary conditions per outer face and an optional heater film.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedDomain {
    pub x_faces: Vec<f64>,
    pub z_faces: Vec<f64>,
    /// Cell materials, column-major: index `i * nz + k`.
    pub materials: Vec<MaterialId>,
    pub chamber: ChamberTag,
    pub boundaries: FaceBoundaries,
    pub film: Option<Film>,
    pub solids: Materials,
    /// Out-of-plane depth [m]; every 2D flux is multiplied by it.
    pub depth_m: f64,
    /// Fraction of the device heating power dissipated inside this domain.
    pub power_share: f64,
}

fn push_zone(faces: &mut Vec<f64>, width: f64, cells: usize) {
    let start = *faces.last().expect("faces start at the origin");
    for c in 1..=cells {
        faces.push(start + width * c as f64 / cells as f64);
    }
}

impl DiscretizedDomain {
    pub fn nx(&self) -> usize {
        self.x_faces.len() - 1
    }

    pub fn nz(&self) -> usize {
        self.z_faces.len() - 1
    }

    pub fn cell_count(&self) -> usize {
        self.nx() * self.nz()
    }

    pub fn cell_index(&self, i: usize, k: usize) -> usize {
        i * self.nz() + k
    }

    pub fn material(&self, i: usize, k: usize) -> MaterialId {
        self.materials[self.cell_index(i, k)]
    }

    /// Chamber tag of a cell: the domain's chamber for gas, `None` for solids.
    pub fn chamber_of(&self, i: usize, k: usize) -> ChamberTag {
        match self.material(i, k) {
            MaterialId::Gas => self.chamber,
            _ => ChamberTag::None,
        }
    }

    pub fn dx(&self, i: usize) -> f64 {
        self.x_faces[i + 1] - self.x_faces[i]
    }

    pub fn dz(&self, k: usize) -> f64 {
        self.z_faces[k + 1] - self.z_faces[k]
    }

    pub fn x_center(&self, i: usize) -> f64 {
        0.5 * (self.x_faces[i] + self.x_faces[i + 1])
    }

    pub fn z_center(&self, k: usize) -> f64 {
        0.5 * (self.z_faces[k] + self.z_faces[k + 1])
    }

    /// Cross-sectional area [m^2] occupied by one material.
    pub fn material_area(&self, id: MaterialId) -> f64 {
        let mut area = 0.0;
        for i in 0..self.nx() {
            for k in 0..self.nz() {
                if self.material(i, k) == id {
                    area += self.dx(i) * self.dz(k);
                }
            }
        }
        area
    }

    /// Total lateral width of the heater source cells [m].
    pub fn heater_width(&self) -> f64 {
        self.film
            .as_ref()
            .map(|f| f.heater_columns.clone().map(|i| self.dx(i)).sum())
            .unwrap_or(0.0)
    }

    /// Same mesh with a different gas chamber tag.
    pub fn with_chamber(&self, chamber: ChamberTag) -> Self {
        Self {
            chamber,
            ..self.clone()
        }
    }

    /// Uniform single-material slab, `nx` by `nz` cells, no heater film.
    pub fn slab(
        width: f64,
        height: f64,
        nx: usize,
        nz: usize,
        material: MaterialId,
        solids: Materials,
        boundaries: FaceBoundaries,
    ) -> Self {
        let mut x_faces = vec![0.0];
        push_zone(&mut x_faces, width, nx);
        let mut z_faces = vec![0.0];
        push_zone(&mut z_faces, height, nz);
        Self {
            x_faces,
            z_faces,
            materials: vec![material; nx * nz],
            chamber: ChamberTag::None,
            boundaries,
            film: None,
            solids,
            depth_m: 1.0,
            power_share: 1.0,
        }
    }
}

/// Meshes the sensor cross-section: substrate (half of it when mirrored),
/// gas clearance between the frame walls, and the coversheet on top.
pub fn build_domain(
    geom: &SensorGeometry,
    materials: &Materials,
    resolution: Resolution,
    chamber: ChamberTag,
) -> Result<DiscretizedDomain, GeometryError> {
    if resolution.cells_per_layer < MIN_CELLS_PER_LAYER {
        return Err(GeometryError::ResolutionTooCoarse {
            cells: resolution.cells_per_layer,
            min: MIN_CELLS_PER_LAYER,
        });
    }
    build_domain_unchecked(geom, materials, resolution.cells_per_layer, chamber)
}

/// [`build_domain`] without the resolution floor, for robustness studies on
/// deliberately coarse meshes. Geometry is still validated.
pub fn build_domain_unchecked(
    geom: &SensorGeometry,
    materials: &Materials,
    cells_per_layer: usize,
    chamber: ChamberTag,
) -> Result<DiscretizedDomain, GeometryError> {
    validate_geometry(geom).map_err(GeometryError::Invalid)?;
    let n = cells_per_layer.max(1);

    let side_gap = 0.5 * (geom.chamber_width_m - geom.heater.footprint_width_m);
    let mut x_faces = vec![0.0];
    push_zone(&mut x_faces, geom.frame_wall_m, n);
    let frame_left_end = x_faces.len() - 1;
    if side_gap > 0.0 {
        push_zone(&mut x_faces, side_gap, n);
    }
    let heater_start = x_faces.len() - 1;
    push_zone(&mut x_faces, geom.heater.footprint_width_m, 2 * n);
    let heater_end = x_faces.len() - 1;
    if side_gap > 0.0 {
        push_zone(&mut x_faces, side_gap, n);
    }
    let frame_right_start = x_faces.len() - 1;
    push_zone(&mut x_faces, geom.frame_wall_m, n);

    let substrate = if geom.mirror {
        0.5 * geom.substrate_thickness_m
    } else {
        geom.substrate_thickness_m
    };
    let mut z_faces = vec![0.0];
    push_zone(&mut z_faces, substrate, n);
    let film_row = z_faces.len() - 1;
    push_zone(&mut z_faces, geom.cap_clearance_m, n);
    let gas_end = z_faces.len() - 1;
    push_zone(&mut z_faces, geom.coversheet_thickness_m, n);

    let nx = x_faces.len() - 1;
    let nz = z_faces.len() - 1;
    let mut cells = Vec::with_capacity(nx * nz);
    for i in 0..nx {
        let in_cavity = i >= frame_left_end && i < frame_right_start;
        for k in 0..nz {
            cells.push(if k < film_row {
                MaterialId::Substrate
            } else if k < gas_end && in_cavity {
                MaterialId::Gas
            } else {
                MaterialId::CapCeramic
            });
        }
    }

    let exposed = BoundaryCondition::Convective {
        h: FREE_CONVECTION_H,
    };
    let top = match geom.cap_boundary {
        CapBoundary::FreeCap => exposed,
        CapBoundary::HeatSink => BoundaryCondition::FixedAmbient,
    };
    let lateral = match geom.lateral_boundary {
        LateralBoundary::HeatSink => BoundaryCondition::FixedAmbient,
        LateralBoundary::Convective => exposed,
        LateralBoundary::Adiabatic => BoundaryCondition::Adiabatic,
    };
    let bottom = if geom.mirror {
        BoundaryCondition::Adiabatic
    } else {
        exposed
    };

    Ok(DiscretizedDomain {
        x_faces,
        z_faces,
        materials: cells,
        chamber,
        boundaries: FaceBoundaries {
            left: lateral,
            right: lateral,
            bottom,
            top,
        },
        film: Some(Film {
            face_row: film_row,
            heater_columns: heater_start..heater_end,
        }),
        solids: materials.clone(),
        depth_m: geom.out_of_plane_depth_m,
        power_share: if geom.mirror { 0.5 } else { 1.0 },
    })
}
