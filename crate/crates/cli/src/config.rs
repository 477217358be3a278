//! Run configuration: a TOML document of fixed blocks, checked against a
//! key schema before typed decoding, plus flat `--key value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thermohygro_core::bench::Bench;
use thermohygro_core::device::{
    CapBoundary, HeaterElement, LateralBoundary, Materials, Resolution, SensorGeometry,
};
use thermohygro_core::thermsolve::{PropertyMode, SolverSettings};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Bool,
    Str,
    FloatList,
}

/// Every accepted `(block, key)` and its value type.
pub const SCHEMA: &[(&str, &str, Kind)] = &[
    ("geometry", "substrate_thickness_um", Kind::Float),
    ("geometry", "cap_clearance_um", Kind::Float),
    ("geometry", "coversheet_thickness_um", Kind::Float),
    ("geometry", "chamber_width_mm", Kind::Float),
    ("geometry", "frame_wall_mm", Kind::Float),
    ("geometry", "depth_mm", Kind::Float),
    ("geometry", "heater_r0_ohm", Kind::Float),
    ("geometry", "heater_t0_k", Kind::Float),
    ("geometry", "heater_tcr_per_k", Kind::Float),
    ("geometry", "heater_width_mm", Kind::Float),
    ("geometry", "cap_boundary", Kind::Str),
    ("geometry", "lateral_boundary", Kind::Str),
    ("geometry", "mirror", Kind::Bool),
    ("materials", "path", Kind::Str),
    ("drive", "kind", Kind::Str),
    ("drive", "current_a", Kind::Float),
    ("drive", "power_w", Kind::Float),
    ("drive", "target_k", Kind::Float),
    ("drive", "pulse_ms", Kind::Float),
    ("drive", "total_ms", Kind::Float),
    ("drive", "measuring_current_ma", Kind::Float),
    ("ambient", "t_k", Kind::Float),
    ("ambient", "p_pa", Kind::Float),
    ("ambient", "x", Kind::Float),
    ("ambient", "rh", Kind::Float),
    ("ambient", "abs_g_m3", Kind::Float),
    ("mode", "kind", Kind::Str),
    ("mode", "t_ref_k", Kind::Float),
    ("resolution", "cells_per_layer", Kind::Int),
    ("resolution", "time_step_ms", Kind::Float),
    ("resolution", "readout_ms", Kind::Float),
    ("humidity", "x_list", Kind::FloatList),
    ("humidity", "rh_list", Kind::FloatList),
    ("humidity", "abs_list_g_m3", Kind::FloatList),
    ("sweep", "parameter", Kind::Str),
    ("sweep", "values_um", Kind::FloatList),
    ("selfheat", "current_ma", Kind::Float),
    ("output", "dir", Kind::Str),
];

/// Short override names.
const ALIASES: &[(&str, &str)] = &[
    ("T", "ambient.t_k"),
    ("p", "ambient.p_pa"),
    ("X", "ambient.x"),
];

const HUMIDITY_KEYS: [&str; 3] = ["x", "rh", "abs_g_m3"];
const HUMIDITY_LIST_KEYS: [&str; 3] = ["x_list", "rh_list", "abs_list_g_m3"];

/// Resolves an override name to its `(block, key)` entry.
pub fn resolve_key(name: &str) -> Result<(&'static str, &'static str, Kind), CliError> {
    let name = ALIASES
        .iter()
        .find(|a| a.0 == name)
        .map(|a| a.1)
        .unwrap_or(name);
    if let Some((block, key)) = name.split_once('.') {
        return SCHEMA
            .iter()
            .find(|e| e.0 == block && e.1 == key)
            .copied()
            .ok_or_else(|| CliError::UnknownKey(name.to_string()));
    }
    let hits: Vec<_> = SCHEMA.iter().filter(|e| e.1 == name).collect();
    match hits.as_slice() {
        [one] => Ok(**one),
        [] => Err(CliError::UnknownKey(name.to_string())),
        many => Err(CliError::UnknownKey(format!(
            "{name} is ambiguous, use one of {}",
            many.iter()
                .map(|e| format!("{}.{}", e.0, e.1))
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

fn parse_value(kind: Kind, key: &str, raw: &str) -> Result<toml::Value, CliError> {
    let bad = || CliError::Config(format!("override {key}: cannot read {raw:?} as {kind:?}"));
    let float = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    Ok(match kind {
        Kind::Float => toml::Value::Float(float(raw)?),
        Kind::Int => toml::Value::Integer(raw.trim().parse().map_err(|_| bad())?),
        Kind::Bool => toml::Value::Boolean(raw.trim().parse().map_err(|_| bad())?),
        Kind::Str => toml::Value::String(raw.to_string()),
        Kind::FloatList => toml::Value::Array(
            raw.split(',')
                .map(|s| float(s).map(toml::Value::Float))
                .collect::<Result<_, _>>()?,
        ),
    })
}

/// Checks every key of a raw document against the schema.
fn check_schema(doc: &toml::Table) -> Result<(), CliError> {
    for (block, body) in doc {
        let table = body
            .as_table()
            .ok_or_else(|| CliError::Config(format!("{block} must be a [block]")))?;
        for key in table.keys() {
            if !SCHEMA.iter().any(|e| e.0 == block && e.1 == key) {
                return Err(CliError::UnknownKey(format!("{block}.{key}")));
            }
        }
    }
    Ok(())
}

/// Sets `block.key`. An override of one humidity representation drops the
/// others of the same block.
pub fn apply_override(doc: &mut toml::Table, name: &str, raw: &str) -> Result<(), CliError> {
    let (block, key, kind) = resolve_key(name)?;
    let value = parse_value(kind, name, raw)?;
    let table = doc
        .entry(block)
        .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        .as_table_mut()
        .expect("schema-checked block");
    for group in [&HUMIDITY_KEYS[..], &HUMIDITY_LIST_KEYS[..]] {
        if group.contains(&key) {
            for other in group {
                table.remove(*other);
            }
        }
    }
    // integers are fine wherever floats are expected
    let value = match (kind, value) {
        (Kind::Float, toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    table.insert(key.to_string(), value);
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub substrate_thickness_um: Option<f64>,
    pub cap_clearance_um: Option<f64>,
    pub coversheet_thickness_um: Option<f64>,
    pub chamber_width_mm: Option<f64>,
    pub frame_wall_mm: Option<f64>,
    pub depth_mm: Option<f64>,
    pub heater_r0_ohm: Option<f64>,
    pub heater_t0_k: Option<f64>,
    pub heater_tcr_per_k: Option<f64>,
    pub heater_width_mm: Option<f64>,
    pub cap_boundary: Option<CapBoundary>,
    pub lateral_boundary: Option<LateralBoundary>,
    pub mirror: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsBlock {
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveKind {
    Current,
    Power,
    PowerToTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveBlock {
    pub kind: DriveKind,
    pub current_a: Option<f64>,
    pub power_w: Option<f64>,
    pub target_k: Option<f64>,
    pub pulse_ms: Option<f64>,
    pub total_ms: Option<f64>,
    pub measuring_current_ma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientBlock {
    pub t_k: Option<f64>,
    pub p_pa: Option<f64>,
    pub x: Option<f64>,
    pub rh: Option<f64>,
    pub abs_g_m3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Simplified,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeBlock {
    pub kind: ModeKind,
    pub t_ref_k: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionBlock {
    pub cells_per_layer: Option<usize>,
    pub time_step_ms: Option<f64>,
    pub readout_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumidityBlock {
    pub x_list: Option<Vec<f64>>,
    pub rh_list: Option<Vec<f64>>,
    pub abs_list_g_m3: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    SubstrateThickness,
    CapClearance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepKind,
    pub values_um: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfheatBlock {
    pub current_ma: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

/// Decoded configuration after overrides. Blocks a command does not need
/// may be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<GeometryBlock>,
    pub materials: Option<MaterialsBlock>,
    pub drive: Option<DriveBlock>,
    pub ambient: Option<AmbientBlock>,
    pub mode: Option<ModeBlock>,
    pub resolution: Option<ResolutionBlock>,
    pub humidity: Option<HumidityBlock>,
    pub sweep: Option<SweepBlock>,
    pub selfheat: Option<SelfheatBlock>,
    pub output: Option<OutputBlock>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Reads `path` (if any), applies `overrides` in order and decodes.
pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig, CliError> {
    let (mut doc, base_dir) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            let doc: toml::Table = toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (doc, base)
        }
        None => (toml::Table::new(), PathBuf::from(".")),
    };
    check_schema(&doc)?;
    for (k, v) in overrides {
        apply_override(&mut doc, k, v)?;
    }
    let mut cfg: RunConfig = toml::Value::Table(doc)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.base_dir = base_dir;
    Ok(cfg)
}

fn missing(block: &str) -> CliError {
    CliError::Config(format!("config is missing the [{block}] block"))
}

fn one_of(block: &str, present: &[(&str, bool)]) -> Result<Option<String>, CliError> {
    let set: Vec<&str> = present.iter().filter(|p| p.1).map(|p| p.0).collect();
    match set.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some(one.to_string())),
        many => Err(CliError::Config(format!(
            "[{block}] gives {} humidity representations ({}); give exactly one",
            many.len(),
            many.join(", ")
        ))),
    }
}

/// Humidity of the ambient block as one representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Humidity {
    X(f64),
    Rh(f64),
    AbsGm3(f64),
}

/// A humidity axis given as one list.
#[derive(Debug, Clone, PartialEq)]
pub enum HumidityList {
    X(Vec<f64>),
    Rh(Vec<f64>),
    AbsGm3(Vec<f64>),
}

impl RunConfig {
    pub fn geometry(&self) -> Result<SensorGeometry, CliError> {
        let g = self.geometry.as_ref().ok_or_else(|| missing("geometry"))?;
        let d = SensorGeometry::default();
        let h = HeaterElement::default();
        let um = |v: Option<f64>, dflt: f64| v.map(|v| v * 1e-6).unwrap_or(dflt);
        let mm = |v: Option<f64>, dflt: f64| v.map(|v| v * 1e-3).unwrap_or(dflt);
        let heater = HeaterElement {
            r0_ohm: g.heater_r0_ohm.unwrap_or(h.r0_ohm),
            t0_k: g.heater_t0_k.unwrap_or(h.t0_k),
            tcr_per_k: g.heater_tcr_per_k.unwrap_or(h.tcr_per_k),
            footprint_width_m: mm(g.heater_width_mm, h.footprint_width_m),
            footprint_depth_m: mm(g.depth_mm, h.footprint_depth_m),
        };
        Ok(SensorGeometry {
            substrate_thickness_m: um(g.substrate_thickness_um, d.substrate_thickness_m),
            cap_clearance_m: um(g.cap_clearance_um, d.cap_clearance_m),
            coversheet_thickness_m: um(g.coversheet_thickness_um, d.coversheet_thickness_m),
            chamber_width_m: mm(g.chamber_width_mm, d.chamber_width_m),
            frame_wall_m: mm(g.frame_wall_mm, d.frame_wall_m),
            out_of_plane_depth_m: mm(g.depth_mm, d.out_of_plane_depth_m),
            heater,
            cap_boundary: g.cap_boundary.unwrap_or(d.cap_boundary),
            lateral_boundary: g.lateral_boundary.unwrap_or(d.lateral_boundary),
            mirror: g.mirror.unwrap_or(d.mirror),
        })
    }

    pub fn materials_path(&self) -> Option<PathBuf> {
        let p = self.materials.as_ref()?.path.as_ref()?;
        Some(self.base_dir.join(p))
    }

    pub fn materials(&self) -> Result<Materials, CliError> {
        match self.materials_path() {
            Some(p) => {
                if !p.is_file() {
                    return Err(CliError::Config(format!(
                        "materials file {} does not exist",
                        p.display()
                    )));
                }
                Materials::from_file(&p).map_err(|e| CliError::Config(e.to_string()))
            }
            None => Ok(Materials::default()),
        }
    }

    pub fn mode(&self) -> Result<PropertyMode, CliError> {
        let m = self.mode.as_ref().ok_or_else(|| missing("mode"))?;
        Ok(match m.kind {
            ModeKind::Simplified => PropertyMode::ConstantAtReference {
                t_ref: m.t_ref_k.unwrap_or(773.0),
            },
            ModeKind::Nonlinear => PropertyMode::TemperatureDependent,
        })
    }

    pub fn ambient_block(&self) -> Result<&AmbientBlock, CliError> {
        self.ambient.as_ref().ok_or_else(|| missing("ambient"))
    }

    pub fn ambient_t(&self) -> Result<f64, CliError> {
        self.ambient_block()?
            .t_k
            .ok_or_else(|| CliError::Config("[ambient] needs t_k".into()))
    }

    pub fn pressure(&self) -> Result<f64, CliError> {
        Ok(self
            .ambient_block()?
            .p_pa
            .unwrap_or(thermohygro_core::gasmix::STANDARD_PRESSURE))
    }

    /// The single humidity representation of `[ambient]`, if any.
    pub fn humidity(&self) -> Result<Option<Humidity>, CliError> {
        let a = self.ambient_block()?;
        let which = one_of(
            "ambient",
            &[
                ("x", a.x.is_some()),
                ("rh", a.rh.is_some()),
                ("abs_g_m3", a.abs_g_m3.is_some()),
            ],
        )?;
        Ok(match which.as_deref() {
            Some("x") => a.x.map(Humidity::X),
            Some("rh") => a.rh.map(Humidity::Rh),
            Some(_) => a.abs_g_m3.map(Humidity::AbsGm3),
            None => None,
        })
    }

    pub fn humidity_list(&self) -> Result<HumidityList, CliError> {
        let h = self.humidity.as_ref().ok_or_else(|| missing("humidity"))?;
        let which = one_of(
            "humidity",
            &[
                ("x_list", h.x_list.is_some()),
                ("rh_list", h.rh_list.is_some()),
                ("abs_list_g_m3", h.abs_list_g_m3.is_some()),
            ],
        )?;
        match which.as_deref() {
            Some("x_list") => Ok(HumidityList::X(h.x_list.clone().unwrap_or_default())),
            Some("rh_list") => Ok(HumidityList::Rh(h.rh_list.clone().unwrap_or_default())),
            Some(_) => Ok(HumidityList::AbsGm3(
                h.abs_list_g_m3.clone().unwrap_or_default(),
            )),
            None => Err(CliError::Config(
                "[humidity] needs one of x_list, rh_list, abs_list_g_m3".into(),
            )),
        }
    }

    pub fn drive_block(&self) -> Result<&DriveBlock, CliError> {
        self.drive.as_ref().ok_or_else(|| missing("drive"))
    }

    pub fn bench(&self) -> Result<Bench, CliError> {
        let r = self.resolution.clone().unwrap_or_default();
        let defaults = Bench::default();
        Ok(Bench {
            materials: self.materials()?,
            resolution: r
                .cells_per_layer
                .map(Resolution::new)
                .unwrap_or(defaults.resolution),
            time_step_s: r.time_step_ms.map(|v| v * 1e-3),
            readout_time_s: r
                .readout_ms
                .map(|v| v * 1e-3)
                .unwrap_or(defaults.readout_time_s),
            pressure_pa: match &self.ambient {
                Some(a) => a.p_pa.unwrap_or(defaults.pressure_pa),
                None => defaults.pressure_pa,
            },
            solver: SolverSettings::default(),
            ..defaults
        })
    }

    pub fn output_dir(&self, cli_out: Option<&Path>) -> PathBuf {
        if let Some(p) = cli_out {
            return p.to_path_buf();
        }
        if let Some(d) = self.output.as_ref().and_then(|o| o.dir.as_ref()) {
            return self.base_dir.join(d);
        }
        std::env::var_os("THERMOHYGRO_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Canonical TOML of the decoded configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
