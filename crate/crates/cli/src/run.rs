use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use thermohygro_core::bench::{
    curve_csv, sweep_csv, trace_csv, Bench, CharacteristicCurve, DrivePolicy, SweepParameter,
};
use thermohygro_core::device::SensorGeometry;
use thermohygro_core::gasmix::{abs_humidity_to_mole_fraction, rh_to_mole_fraction, HumidAirState};
use thermohygro_core::thermsolve::{DrivePulse, PropertyMode};
use thermohygro_core::{ExperimentError, PropertyError};

use crate::config::{DriveKind, Humidity, HumidityList, RunConfig, SweepKind};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Humid-air properties at the ambient state.
    Props,
    /// Differential pulse response at the ambient humidity (trace.csv).
    Pulse,
    /// Characteristic curve over the [humidity] list (curve.csv).
    Curve,
    /// Substrate-thickness or cap-clearance sweep (sweep.csv).
    Sweep,
    /// Pulse power that heats the reference element to the drive target (power.csv).
    Power,
    /// Free cap against heat-sink cap (curve_free_cap.csv, curve_heat_sink.csv).
    Boundary,
    /// Steady self-heating by the measuring current (selfheat.csv).
    Selfheat,
}

/// Files to write and text to print.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub stdout: String,
    /// Model objects the run was built from, for the manifest.
    pub resolved: String,
}

#[derive(Serialize)]
struct Resolved<'a> {
    geometry: Option<&'a SensorGeometry>,
    mode: Option<PropertyMode>,
    drive: Option<DrivePulse>,
    bench: &'a Bench,
}

fn prop(e: PropertyError) -> CliError {
    CliError::Experiment(ExperimentError::Property(e))
}

fn to_x(h: Humidity, t: f64, p: f64) -> Result<f64, CliError> {
    match h {
        Humidity::X(x) => Ok(x),
        Humidity::Rh(rh) => rh_to_mole_fraction(rh, t, p).map_err(prop),
        Humidity::AbsGm3(a) => abs_humidity_to_mole_fraction(a * 1e-3, t, p).map_err(prop),
    }
}

fn list_to_x(list: HumidityList, t: f64, p: f64) -> Result<Vec<f64>, CliError> {
    match list {
        HumidityList::X(v) => Ok(v),
        HumidityList::Rh(v) => v.into_iter().map(|h| to_x(Humidity::Rh(h), t, p)).collect(),
        HumidityList::AbsGm3(v) => v
            .into_iter()
            .map(|h| to_x(Humidity::AbsGm3(h), t, p))
            .collect(),
    }
}

fn required_humidity(cfg: &RunConfig) -> Result<Humidity, CliError> {
    cfg.humidity()?
        .ok_or_else(|| CliError::Config("[ambient] needs one of x, rh, abs_g_m3".into()))
}

struct DriveTiming {
    pulse_s: f64,
    total_s: f64,
    measuring_a: f64,
}

fn timing(cfg: &RunConfig) -> Result<DriveTiming, CliError> {
    let d = cfg.drive_block()?;
    Ok(DriveTiming {
        pulse_s: d.pulse_ms.unwrap_or(200.0) * 1e-3,
        total_s: d.total_ms.unwrap_or(300.0) * 1e-3,
        measuring_a: d.measuring_current_ma.unwrap_or(0.0) * 1e-3,
    })
}

fn need(v: Option<f64>, what: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("[drive] needs {what}")))
}

/// The drive of the run; `power_to_target` is solved on `geom` first.
fn resolve_drive(
    cfg: &RunConfig,
    bench: &Bench,
    geom: &SensorGeometry,
    mode: PropertyMode,
    ambient_t: f64,
) -> Result<DrivePulse, CliError> {
    let d = cfg.drive_block()?;
    let t = timing(cfg)?;
    let drive = match d.kind {
        DriveKind::Current => {
            DrivePulse::constant_current(need(d.current_a, "current_a")?, t.pulse_s, t.total_s)
        }
        DriveKind::Power => {
            DrivePulse::constant_power(need(d.power_w, "power_w")?, t.pulse_s, t.total_s)
        }
        DriveKind::PowerToTarget => {
            let target = d.target_k.unwrap_or(773.0);
            let p = bench.required_pulse_power(geom, mode, ambient_t, target, t.pulse_s)?;
            DrivePulse::constant_power(p, t.pulse_s, t.total_s)
        }
    };
    Ok(drive.with_measuring_current(t.measuring_a))
}

fn resolved(
    geom: Option<&SensorGeometry>,
    mode: Option<PropertyMode>,
    drive: Option<DrivePulse>,
    bench: &Bench,
) -> String {
    toml::to_string(&Resolved {
        geometry: geom,
        mode,
        drive,
        bench,
    })
    .unwrap_or_else(|e| format!("# not representable as TOML: {e}\n"))
}

fn curve_summary(out: &mut String, label: &str, c: &CharacteristicCurve) {
    let (imax, max) = c
        .points
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
            if p.dt_k > acc.1 {
                (i, p.dt_k)
            } else {
                acc
            }
        });
    let _ = writeln!(
        out,
        "{label}: {} points, max dT {max:.6} K at X = {}",
        c.points.len(),
        c.points[imax].x
    );
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let bench = cfg.bench()?;
    let mut report = Report::default();
    if command == Command::Props {
        let t = cfg.ambient_t()?;
        let p = cfg.pressure()?;
        let x = to_x(required_humidity(cfg)?, t, p)?;
        let state = HumidAirState::new(t, p, x).map_err(prop)?;
        let lambda = bench.gas.lambda_mixture(x, t).map_err(prop)?;
        let rho_cp = bench.gas.volumetric_heat_capacity(&state).map_err(prop)?;
        let rh = state.rh().ok();
        let abs = state.abs_humidity().map_err(prop)? * 1e3;
        let rh_text = rh.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(report.stdout, "T_K = {t}\np_Pa = {p}\nX = {x}");
        let _ = writeln!(
            report.stdout,
            "lambda_mix_W_mK = {lambda}\nrho_cp_J_m3K = {rho_cp}"
        );
        let _ = writeln!(
            report.stdout,
            "rh = {}\nabs_humidity_g_m3 = {abs}",
            if rh_text.is_empty() { "n/a" } else { &rh_text }
        );
        report.files.push((
            "props.csv".into(),
            format!("T_K,p_Pa,X,rh,abs_humidity_g_m3,lambda_W_mK,rho_cp_J_m3K\n{t},{p},{x},{rh_text},{abs},{lambda},{rho_cp}\n"),
        ));
        report.resolved = resolved(None, None, None, &bench);
        return Ok(report);
    }

    let geom = cfg.geometry()?;
    let mode = cfg.mode()?;
    let t_amb = cfg.ambient_t()?;
    let p = cfg.pressure()?;
    let mut used_drive = None;
    match command {
        Command::Props => unreachable!(),
        Command::Pulse => {
            let x = to_x(required_humidity(cfg)?, t_amb, p)?;
            let drive = resolve_drive(cfg, &bench, &geom, mode, t_amb)?;
            let trace = bench.pulse_response(&geom, &drive, mode, t_amb, x)?;
            let at = bench.readout_time_s;
            if let Some(dt) = trace.dt_at(at) {
                let _ = writeln!(report.stdout, "dT at {at} s = {dt} K");
            }
            report.files.push(("trace.csv".into(), trace_csv(&trace)));
            used_drive = Some(drive);
        }
        Command::Curve => {
            let xs = list_to_x(cfg.humidity_list()?, t_amb, p)?;
            let drive = resolve_drive(cfg, &bench, &geom, mode, t_amb)?;
            let curve = bench.characteristic_curve(
                &geom,
                &drive,
                mode,
                t_amb,
                &xs,
                bench.readout_time_s,
            )?;
            curve_summary(&mut report.stdout, "curve", &curve);
            report.files.push(("curve.csv".into(), curve_csv(&curve)));
            used_drive = Some(drive);
        }
        Command::Boundary => {
            let xs = list_to_x(cfg.humidity_list()?, t_amb, p)?;
            let drive = resolve_drive(cfg, &bench, &geom, mode, t_amb)?;
            let (free, sink) = bench.boundary_study(&geom, &drive, mode, t_amb, &xs)?;
            curve_summary(&mut report.stdout, "free_cap", &free);
            curve_summary(&mut report.stdout, "heat_sink", &sink);
            let scale = free
                .points
                .iter()
                .chain(&sink.points)
                .map(|q| q.dt_k.abs())
                .fold(0.0, f64::max);
            let dev = free
                .points
                .iter()
                .zip(&sink.points)
                .map(|(a, b)| (a.dt_k - b.dt_k).abs())
                .fold(0.0, f64::max);
            if scale > 0.0 {
                let _ = writeln!(
                    report.stdout,
                    "max |dT_free - dT_sink| / max dT = {}",
                    dev / scale
                );
            }
            report
                .files
                .push(("curve_free_cap.csv".into(), curve_csv(&free)));
            report
                .files
                .push(("curve_heat_sink.csv".into(), curve_csv(&sink)));
            used_drive = Some(drive);
        }
        Command::Sweep => {
            let s = cfg
                .sweep
                .as_ref()
                .ok_or_else(|| CliError::Config("config is missing the [sweep] block".into()))?;
            let x = to_x(required_humidity(cfg)?, t_amb, p)?;
            let parameter = match s.parameter {
                SweepKind::SubstrateThickness => SweepParameter::SubstrateThickness,
                SweepKind::CapClearance => SweepParameter::CapClearance,
            };
            let values: Vec<f64> = s.values_um.iter().map(|v| v * 1e-6).collect();
            let d = cfg.drive_block()?;
            let t = timing(cfg)?;
            let policy = match d.kind {
                DriveKind::PowerToTarget => DrivePolicy::PowerToTarget {
                    target_k: d.target_k.unwrap_or(773.0),
                    pulse_duration_s: t.pulse_s,
                    total_sim_time_s: t.total_s,
                },
                _ => {
                    let drive = resolve_drive(cfg, &bench, &geom, mode, t_amb)?;
                    used_drive = Some(drive);
                    DrivePolicy::Fixed(drive)
                }
            };
            let rows = bench.sweep(&geom, parameter, &values, mode, t_amb, x, policy)?;
            for r in &rows {
                let _ = writeln!(
                    report.stdout,
                    "{:.3} um: power {} W, dT {} K, {}",
                    r.value * 1e6,
                    r.required_power_w
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or("-".into()),
                    r.dt_k.map(|v| format!("{v:.6}")).unwrap_or("-".into()),
                    r.status
                );
            }
            report.files.push(("sweep.csv".into(), sweep_csv(&rows)));
        }
        Command::Power => {
            let d = cfg.drive_block()?;
            let target = d.target_k.unwrap_or(773.0);
            let pulse = timing(cfg)?.pulse_s;
            let power = bench.required_pulse_power(&geom, mode, t_amb, target, pulse)?;
            let _ = writeln!(report.stdout, "required_power_W = {power}");
            report.files.push((
                "power.csv".into(),
                format!("target_K,pulse_s,required_power_W\n{target},{pulse},{power}\n"),
            ));
        }
        Command::Selfheat => {
            let i = cfg
                .selfheat
                .as_ref()
                .ok_or_else(|| CliError::Config("config is missing the [selfheat] block".into()))?
                .current_ma
                * 1e-3;
            let rise = bench.measuring_current_self_heating(&geom, mode, t_amb, i)?;
            let _ = writeln!(report.stdout, "steady rise at {i} A = {rise} K");
            report.files.push((
                "selfheat.csv".into(),
                format!("I_meas_A,rise_K\n{i},{rise}\n"),
            ));
        }
    }
    report.resolved = resolved(Some(&geom), Some(mode), used_drive, &bench);
    Ok(report)
}
