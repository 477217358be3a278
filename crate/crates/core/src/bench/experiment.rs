use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{
    build_domain, CapBoundary, ChamberTag, DiscretizedDomain, Materials, Resolution, SensorGeometry,
};
use crate::error::{ExperimentError, PropertyError, SolverError};
use crate::gasmix::{
    mole_fraction_to_abs_humidity, mole_fraction_to_rh, HumidAirModel, HumidAirState,
    STANDARD_PRESSURE,
};
use crate::thermsolve::{
    energy_balance_residual, DriveMode, DrivePulse, PropertyMode, Solver, SolverSettings, Trace,
};

/// Upper end of the power bracket searched by [`Bench::required_pulse_power`] [W].
pub const MAX_PULSE_POWER_W: f64 = 200.0;
/// Accepted miss of the target heater temperature [K].
pub const POWER_TOLERANCE_K: f64 = 1.0;

/// Steps per pulse when no explicit time step is set.
const DEFAULT_STEPS_PER_PULSE: f64 = 200.0;

/// Shared settings of every virtual experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bench {
    pub materials: Materials,
    pub gas: HumidAirModel,
    pub resolution: Resolution,
    /// Time step bound [s]; `None` takes 1/200 of the pulse.
    pub time_step_s: Option<f64>,
    /// Instant at which dT is read as the humidity signal [s].
    pub readout_time_s: f64,
    pub pressure_pa: f64,
    pub solver: SolverSettings,
}

impl Default for Bench {
    fn default() -> Self {
        Self {
            materials: Materials::default(),
            gas: HumidAirModel::default(),
            resolution: Resolution::default(),
            time_step_s: None,
            readout_time_s: 0.3,
            pressure_pa: STANDARD_PRESSURE,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentialSample {
    pub t: f64,
    pub t_ref: f64,
    pub t_amb: f64,
    pub dt: f64,
    pub r_ref: f64,
    pub r_amb: f64,
    pub v_ref: f64,
    pub v_amb: f64,
}

/// Time courses of both elements under the same drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialTrace {
    pub samples: Vec<DifferentialSample>,
    pub reference: HumidAirState,
    pub ambient: HumidAirState,
    pub drive: DrivePulse,
    /// Worse energy-balance residual of the two runs.
    pub energy_residual: f64,
}

impl DifferentialTrace {
    /// dT at `t`: the exact sample when one lands within 1e-12 s,
    /// otherwise linear interpolation.
    pub fn dt_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        let hi = s.partition_point(|p| p.t < t - 1e-12);
        if hi >= s.len() {
            return None;
        }
        if (s[hi].t - t).abs() <= 1e-12 {
            return Some(s[hi].dt);
        }
        if hi == 0 {
            return None;
        }
        let (a, b) = (&s[hi - 1], &s[hi]);
        Some(a.dt + (t - a.t) / (b.t - a.t) * (b.dt - a.dt))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    /// Relative humidity, absent where saturation is undefined.
    pub rh: Option<f64>,
    pub abs_humidity_g_m3: f64,
    pub dt_k: f64,
    pub t_ref_k: f64,
    pub t_amb_k: f64,
}

/// dT at the readout instant against ambient humidity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCurve {
    pub points: Vec<CurvePoint>,
    pub readout_time_s: f64,
    pub ambient_t_k: f64,
    pub pressure_pa: f64,
    pub geometry: SensorGeometry,
    pub drive: DrivePulse,
    pub mode: PropertyMode,
    /// Worst energy-balance residual over all runs behind the curve.
    pub energy_residual: f64,
}

impl CharacteristicCurve {
    pub fn dt_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.dt_k).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    SubstrateThickness,
    CapClearance,
}

impl SweepParameter {
    /// Copy of `template` with the parameter set to `value` [m].
    pub fn apply(self, template: &SensorGeometry, value: f64) -> SensorGeometry {
        let mut g = template.clone();
        match self {
            Self::SubstrateThickness => g.substrate_thickness_m = value,
            Self::CapClearance => g.cap_clearance_m = value,
        }
        g
    }
}

/// How each sweep point is driven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivePolicy {
    Fixed(DrivePulse),
    /// Constant power solved per point so the reference element reaches
    /// `target_k` at the end of the pulse.
    PowerToTarget {
        target_k: f64,
        pulse_duration_s: f64,
        total_sim_time_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Parameter value [m].
    pub value: f64,
    pub required_power_w: Option<f64>,
    pub dt_k: Option<f64>,
    /// `ok` or the error that stopped this point.
    pub status: String,
}

impl Bench {
    pub fn time_step(&self, drive: &DrivePulse) -> f64 {
        self.time_step_s.unwrap_or_else(|| {
            let span = if drive.pulse_duration_s > 0.0 {
                drive.pulse_duration_s
            } else {
                drive.total_sim_time_s
            };
            span / DEFAULT_STEPS_PER_PULSE
        })
    }

    pub fn state(&self, t: f64, x: f64) -> Result<HumidAirState, PropertyError> {
        HumidAirState::new(t, self.pressure_pa, x)
    }

    fn domain(
        &self,
        geom: &SensorGeometry,
        tag: ChamberTag,
    ) -> Result<DiscretizedDomain, ExperimentError> {
        Ok(build_domain(geom, &self.materials, self.resolution, tag)?)
    }

    fn simulate(
        &self,
        geom: &SensorGeometry,
        domain: &DiscretizedDomain,
        drive: &DrivePulse,
        mode: PropertyMode,
        gas_state: HumidAirState,
        readouts: &[f64],
    ) -> Result<Trace, SolverError> {
        Solver::new(
            domain,
            &self.gas,
            &geom.heater,
            *drive,
            mode,
            gas_state,
            self.solver,
        )?
        .run(self.time_step(drive), readouts)
    }

    fn readout_marks(&self, drive: &DrivePulse, readout: f64) -> Vec<f64> {
        if readout > 0.0 && readout <= drive.total_sim_time_s {
            vec![readout]
        } else {
            Vec::new()
        }
    }

    /// Both elements pulsed by `drive`: the reference in dry air, the other
    /// in air of water-vapor mole fraction `x`, both at `ambient_t`.
    pub fn pulse_response(
        &self,
        geom: &SensorGeometry,
        drive: &DrivePulse,
        mode: PropertyMode,
        ambient_t: f64,
        x: f64,
    ) -> Result<DifferentialTrace, ExperimentError> {
        self.differential(
            geom,
            drive,
            mode,
            self.state(ambient_t, 0.0)?,
            self.state(ambient_t, x)?,
        )
    }

    /// [`Self::pulse_response`] with free choice of both chamber gases.
    pub fn differential(
        &self,
        geom: &SensorGeometry,
        drive: &DrivePulse,
        mode: PropertyMode,
        reference: HumidAirState,
        ambient: HumidAirState,
    ) -> Result<DifferentialTrace, ExperimentError> {
        let marks = self.readout_marks(drive, self.readout_time_s);
        let ref_trace = self.simulate(
            geom,
            &self.domain(geom, ChamberTag::Reference)?,
            drive,
            mode,
            reference,
            &marks,
        )?;
        let amb_trace = self.simulate(
            geom,
            &self.domain(geom, ChamberTag::Ambient)?,
            drive,
            mode,
            ambient,
            &marks,
        )?;
        Ok(merge(
            geom, drive, reference, ambient, &ref_trace, &amb_trace,
        ))
    }

    /// One differential run per mole fraction in `xs` (strictly increasing),
    /// dT read at `readout_time`. Points run in parallel; order follows `xs`.
    pub fn characteristic_curve(
        &self,
        geom: &SensorGeometry,
        drive: &DrivePulse,
        mode: PropertyMode,
        ambient_t: f64,
        xs: &[f64],
        readout_time: f64,
    ) -> Result<CharacteristicCurve, ExperimentError> {
        if xs.is_empty() || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ExperimentError::InvalidInput(
                "humidity values must be strictly increasing".into(),
            ));
        }
        if !(readout_time > 0.0 && readout_time <= drive.total_sim_time_s) {
            return Err(ExperimentError::InvalidInput(format!(
                "readout time {readout_time} s outside (0, {}] s",
                drive.total_sim_time_s
            )));
        }
        let marks = [readout_time];
        let reference = self.state(ambient_t, 0.0)?;
        let ref_domain = self.domain(geom, ChamberTag::Reference)?;
        let amb_domain = self.domain(geom, ChamberTag::Ambient)?;
        let ref_trace = self.simulate(geom, &ref_domain, drive, mode, reference, &marks)?;
        let t_ref = ref_trace
            .heater_temperature_at(readout_time)
            .expect("readout sampled");
        let ref_residual = energy_balance_residual(&ref_trace);
        let points = xs
            .par_iter()
            .map(|&x| {
                let state = self.state(ambient_t, x)?;
                let trace = self.simulate(geom, &amb_domain, drive, mode, state, &marks)?;
                let t_amb = trace
                    .heater_temperature_at(readout_time)
                    .expect("readout sampled");
                let point = CurvePoint {
                    x,
                    rh: mole_fraction_to_rh(x, ambient_t, self.pressure_pa).ok(),
                    abs_humidity_g_m3: mole_fraction_to_abs_humidity(
                        x,
                        ambient_t,
                        self.pressure_pa,
                    )? * 1e3,
                    dt_k: t_ref - t_amb,
                    t_ref_k: t_ref,
                    t_amb_k: t_amb,
                };
                Ok((point, energy_balance_residual(&trace)))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let energy_residual = points.iter().map(|p| p.1).fold(ref_residual, f64::max);
        let points = points.into_iter().map(|p| p.0).collect();
        Ok(CharacteristicCurve {
            points,
            readout_time_s: readout_time,
            ambient_t_k: ambient_t,
            pressure_pa: self.pressure_pa,
            geometry: geom.clone(),
            drive: *drive,
            mode,
            energy_residual,
        })
    }

    /// Constant pulse power that brings the reference element (dry air at
    /// `ambient_t`) to `target_t` at the end of a pulse of `pulse_duration`.
    pub fn required_pulse_power(
        &self,
        geom: &SensorGeometry,
        mode: PropertyMode,
        ambient_t: f64,
        target_t: f64,
        pulse_duration: f64,
    ) -> Result<f64, ExperimentError> {
        self.required_pulse_power_in(
            geom,
            mode,
            self.state(ambient_t, 0.0)?,
            target_t,
            pulse_duration,
        )
    }

    /// [`Self::required_pulse_power`] for an element in any gas. Bracketing
    /// by doubling, then Illinois false position; the end temperature rises
    /// strictly with power, and a run that leaves the property window is
    /// counted as overshoot.
    pub fn required_pulse_power_in(
        &self,
        geom: &SensorGeometry,
        mode: PropertyMode,
        gas_state: HumidAirState,
        target_t: f64,
        pulse_duration: f64,
    ) -> Result<f64, ExperimentError> {
        if !(pulse_duration > 0.0) {
            return Err(ExperimentError::InvalidInput(
                "pulse duration must be positive".into(),
            ));
        }
        let ambient_t = gas_state.t;
        if target_t == ambient_t {
            return Ok(0.0);
        }
        if !(target_t > ambient_t) {
            return Err(ExperimentError::TargetUnreachable {
                target: target_t,
                evidence: format!("below ambient {ambient_t} K"),
            });
        }
        let domain = self.domain(geom, ChamberTag::Reference)?;
        let end_temperature = |p: f64| -> Result<Option<f64>, ExperimentError> {
            let drive = DrivePulse::constant_power(p, pulse_duration, pulse_duration);
            match self.simulate(geom, &domain, &drive, mode, gas_state, &[]) {
                Ok(trace) => Ok(trace.heater_temperature_at(pulse_duration)),
                Err(SolverError::Property(PropertyError::TemperatureOutOfRange { .. })) => Ok(None),
                Err(e) => Err(e.into()),
            }
        };
        let half_tol = 0.25 * POWER_TOLERANCE_K;

        let (mut lo, mut f_lo) = (0.0, ambient_t - target_t);
        let mut hi = 1.0;
        let mut f_hi = loop {
            match end_temperature(hi)? {
                Some(t) if t < target_t - half_tol => {
                    lo = hi;
                    f_lo = t - target_t;
                    hi *= 2.0;
                    if hi > MAX_PULSE_POWER_W {
                        return Err(ExperimentError::TargetUnreachable {
                            target: target_t,
                            evidence: format!("{lo} W reaches only {t} K"),
                        });
                    }
                }
                Some(t) if t <= target_t + half_tol => return Ok(hi),
                Some(t) => break Some(t - target_t),
                None => break None,
            }
        };
        let mut side = 0i8;
        for _ in 0..100 {
            let mut p = match f_hi {
                Some(fh) => (lo * fh - hi * f_lo) / (fh - f_lo),
                None => 0.5 * (lo + hi),
            };
            if !(p > lo && p < hi) {
                p = 0.5 * (lo + hi);
            }
            match end_temperature(p)? {
                Some(t) if (t - target_t).abs() <= half_tol => return Ok(p),
                Some(t) if t < target_t => {
                    lo = p;
                    f_lo = t - target_t;
                    if side == -1 {
                        f_hi = f_hi.map(|f| 0.5 * f);
                    }
                    side = -1;
                }
                other => {
                    hi = p;
                    f_hi = other.map(|t| t - target_t);
                    if side == 1 {
                        f_lo *= 0.5;
                    }
                    side = 1;
                }
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        Err(ExperimentError::TargetUnreachable {
            target: target_t,
            evidence: format!("bracket [{lo}, {hi}] W did not resolve the target"),
        })
    }

    /// One row per value: rebuild the geometry, solve the drive if the
    /// policy asks for it, then read dT at the readout time. A failing point
    /// is recorded in its row and the sweep goes on.
    #[allow(clippy::too_many_arguments)]
    pub fn sweep(
        &self,
        template: &SensorGeometry,
        parameter: SweepParameter,
        values: &[f64],
        mode: PropertyMode,
        ambient_t: f64,
        x: f64,
        policy: DrivePolicy,
    ) -> Result<Vec<SweepRow>, ExperimentError> {
        if values.len() < 2 {
            return Err(ExperimentError::InsufficientPoints {
                needed: 2,
                got: values.len(),
            });
        }
        let rows = values
            .par_iter()
            .map(|&value| {
                let geom = parameter.apply(template, value);
                let mut row = SweepRow {
                    value,
                    required_power_w: None,
                    dt_k: None,
                    status: "ok".into(),
                };
                let drive = match policy {
                    DrivePolicy::Fixed(d) => d,
                    DrivePolicy::PowerToTarget {
                        target_k,
                        pulse_duration_s,
                        total_sim_time_s,
                    } => {
                        match self.required_pulse_power(
                            &geom,
                            mode,
                            ambient_t,
                            target_k,
                            pulse_duration_s,
                        ) {
                            Ok(p) => {
                                row.required_power_w = Some(p);
                                DrivePulse::constant_power(p, pulse_duration_s, total_sim_time_s)
                            }
                            Err(e) => {
                                row.status = e.to_string();
                                return row;
                            }
                        }
                    }
                };
                let readout = self.readout_time_s;
                match self.pulse_response(&geom, &drive, mode, ambient_t, x) {
                    Ok(trace) => match trace.dt_at(readout) {
                        Some(dt) => row.dt_k = Some(dt),
                        None => {
                            row.status = format!("readout {readout} s outside the simulated span")
                        }
                    },
                    Err(e) => row.status = e.to_string(),
                }
                row
            })
            .collect();
        Ok(rows)
    }

    /// The same curve once with a free cap and once with the cap held at
    /// ambient.
    pub fn boundary_study(
        &self,
        geom: &SensorGeometry,
        drive: &DrivePulse,
        mode: PropertyMode,
        ambient_t: f64,
        xs: &[f64],
    ) -> Result<(CharacteristicCurve, CharacteristicCurve), ExperimentError> {
        let with = |cap: CapBoundary| {
            let g = SensorGeometry {
                cap_boundary: cap,
                ..geom.clone()
            };
            self.characteristic_curve(&g, drive, mode, ambient_t, xs, self.readout_time_s)
        };
        Ok((with(CapBoundary::FreeCap)?, with(CapBoundary::HeatSink)?))
    }

    /// Steady rise of the reference element above ambient with only the
    /// measuring current flowing [K].
    pub fn measuring_current_self_heating(
        &self,
        geom: &SensorGeometry,
        mode: PropertyMode,
        ambient_t: f64,
        i_meas: f64,
    ) -> Result<f64, ExperimentError> {
        if !(i_meas >= 0.0) {
            return Err(ExperimentError::InvalidInput(format!(
                "measuring current {i_meas} A must be non-negative"
            )));
        }
        let drive = DrivePulse {
            mode: DriveMode::ConstantCurrent(0.0),
            pulse_duration_s: 0.0,
            measuring_current_a: i_meas,
            total_sim_time_s: 1.0,
        };
        let domain = self.domain(geom, ChamberTag::Reference)?;
        let mut solver = Solver::new(
            &domain,
            &self.gas,
            &geom.heater,
            drive,
            mode,
            self.state(ambient_t, 0.0)?,
            self.solver,
        )?;
        let steady = solver.steady_state(drive.total_sim_time_s)?;
        Ok(steady.heater_temperature - ambient_t)
    }
}

/// Heater current at one sample: the measuring current after the pulse,
/// the pulse current (or the current implied by constant power) before.
fn heater_current(drive: &DrivePulse, t: f64, power: f64, r: f64) -> f64 {
    if t > drive.pulse_duration_s + 1e-12 || drive.pulse_duration_s == 0.0 {
        return drive.measuring_current_a;
    }
    match drive.mode {
        DriveMode::ConstantCurrent(i) => i + drive.measuring_current_a,
        DriveMode::ConstantPower(_) => (power / r).sqrt(),
    }
}

fn merge(
    geom: &SensorGeometry,
    drive: &DrivePulse,
    reference: HumidAirState,
    ambient: HumidAirState,
    ref_trace: &Trace,
    amb_trace: &Trace,
) -> DifferentialTrace {
    let heater = &geom.heater;
    let samples = ref_trace
        .samples
        .iter()
        .zip(&amb_trace.samples)
        .map(|(a, b)| {
            let (r_ref, r_amb) = (
                heater.resistance(a.heater_temperature),
                heater.resistance(b.heater_temperature),
            );
            DifferentialSample {
                t: a.time,
                t_ref: a.heater_temperature,
                t_amb: b.heater_temperature,
                dt: a.heater_temperature - b.heater_temperature,
                r_ref,
                r_amb,
                v_ref: heater_current(drive, a.time, a.power_w, r_ref) * r_ref,
                v_amb: heater_current(drive, b.time, b.power_w, r_amb) * r_amb,
            }
        })
        .collect();
    DifferentialTrace {
        samples,
        reference,
        ambient,
        drive: *drive,
        energy_residual: energy_balance_residual(ref_trace).max(energy_balance_residual(amb_trace)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Bench {
        Bench {
            resolution: Resolution::new(4),
            ..Bench::default()
        }
    }

    fn simplified() -> PropertyMode {
        PropertyMode::ConstantAtReference { t_ref: 773.0 }
    }

    fn single_sided() -> SensorGeometry {
        SensorGeometry {
            mirror: false,
            substrate_thickness_m: 100e-6,
            cap_clearance_m: 100e-6,
            ..Default::default()
        }
    }

    #[test]
    fn zero_contrast_gives_zero_difference() {
        let b = quick();
        let drive = DrivePulse::constant_current(0.55, 0.2, 0.3);
        let tr = b
            .pulse_response(
                &SensorGeometry::default(),
                &drive,
                simplified(),
                343.15,
                0.0,
            )
            .unwrap();
        assert!(tr.samples.iter().all(|s| s.dt.abs() < 1e-9));
    }

    #[test]
    fn vapor_cools_the_exposed_element() {
        let b = quick();
        let drive = DrivePulse::constant_current(0.55, 0.2, 0.3);
        let nl = PropertyMode::TemperatureDependent;
        let g = SensorGeometry::default();
        let d1 = b
            .pulse_response(&g, &drive, nl, 343.15, 0.1)
            .unwrap()
            .dt_at(0.3)
            .unwrap();
        let d2 = b
            .pulse_response(&g, &drive, nl, 343.15, 0.2)
            .unwrap()
            .dt_at(0.3)
            .unwrap();
        assert!(d1 > 0.0 && d2 > d1, "{d1} {d2}");
    }

    #[test]
    fn voltages_follow_measuring_current_after_pulse() {
        let b = quick();
        let drive = DrivePulse::constant_current(0.55, 0.2, 0.3).with_measuring_current(0.025);
        let tr = b
            .pulse_response(
                &SensorGeometry::default(),
                &drive,
                simplified(),
                343.15,
                0.2,
            )
            .unwrap();
        for s in tr.samples.iter().filter(|s| s.t > 0.2 + 1e-9) {
            assert!((s.v_ref - 0.025 * s.r_ref).abs() < 1e-15);
            assert!((s.v_amb - 0.025 * s.r_amb).abs() < 1e-15);
            assert_eq!(s.dt, s.t_ref - s.t_amb);
        }
        let during = tr.samples.iter().find(|s| s.t > 0.1).unwrap();
        assert!((during.v_ref - 0.575 * during.r_ref).abs() < 1e-12);
    }

    #[test]
    fn chamber_swap_negates_difference() {
        let b = quick();
        let drive = DrivePulse::constant_power(2.0, 0.2, 0.3);
        let g = SensorGeometry::default();
        let dry = b.state(343.15, 0.0).unwrap();
        let wet = b.state(343.15, 0.25).unwrap();
        let nl = PropertyMode::TemperatureDependent;
        let a = b.differential(&g, &drive, nl, dry, wet).unwrap();
        let c = b.differential(&g, &drive, nl, wet, dry).unwrap();
        for (p, q) in a.samples.iter().zip(&c.samples) {
            assert_eq!(p.dt, -q.dt);
        }
    }

    #[test]
    fn curve_matches_pulse_response_at_readout() {
        let b = quick();
        let drive = DrivePulse::constant_power(2.0, 0.2, 0.3);
        let g = SensorGeometry::default();
        let curve = b
            .characteristic_curve(&g, &drive, simplified(), 343.15, &[0.1, 0.2], 0.3)
            .unwrap();
        assert_eq!(curve.points.len(), 2);
        for p in &curve.points {
            let single = b
                .pulse_response(&g, &drive, simplified(), 343.15, p.x)
                .unwrap();
            assert_eq!(single.dt_at(0.3).unwrap(), p.dt_k);
        }
        let one = b
            .characteristic_curve(&g, &drive, simplified(), 343.15, &[0.2], 0.3)
            .unwrap();
        assert_eq!(one.points[0].dt_k, curve.points[1].dt_k);
    }

    #[test]
    fn curve_rejects_bad_inputs() {
        let b = quick();
        let drive = DrivePulse::constant_power(2.0, 0.2, 0.3);
        let g = SensorGeometry::default();
        assert!(b
            .characteristic_curve(&g, &drive, simplified(), 343.15, &[0.2, 0.1], 0.3)
            .is_err());
        assert!(b
            .characteristic_curve(&g, &drive, simplified(), 343.15, &[0.1], 0.5)
            .is_err());
    }

    #[test]
    fn required_power_round_trips() {
        let b = quick();
        let g = single_sided();
        let nl = PropertyMode::TemperatureDependent;
        let p = b.required_pulse_power(&g, nl, 293.0, 773.0, 0.2).unwrap();
        let drive = DrivePulse::constant_power(p, 0.2, 0.3);
        let d = build_domain(&g, &b.materials, b.resolution, ChamberTag::Reference).unwrap();
        let tr = b
            .simulate(&g, &d, &drive, nl, b.state(293.0, 0.0).unwrap(), &[0.3])
            .unwrap();
        let t = tr.heater_temperature_at(0.2).unwrap();
        assert!((t - 773.0).abs() < POWER_TOLERANCE_K, "{t}");
        assert_eq!(
            b.required_pulse_power(&g, nl, 293.0, 293.0, 0.2).unwrap(),
            0.0
        );
    }

    #[test]
    fn unreachable_target_reports_evidence() {
        let b = quick();
        let g = single_sided();
        let err = b
            .required_pulse_power(&g, simplified(), 293.0, 250.0, 0.2)
            .unwrap_err();
        assert!(matches!(err, ExperimentError::TargetUnreachable { .. }));
        // constant properties never leave the window, so a huge target runs out of bracket
        let err = b
            .required_pulse_power(&g, simplified(), 293.0, 1e6, 0.2)
            .unwrap_err();
        match err {
            ExperimentError::TargetUnreachable { evidence, .. } => {
                assert!(evidence.contains("reaches only"))
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn sweep_keeps_order_and_records_failures() {
        let b = quick();
        let policy = DrivePolicy::PowerToTarget {
            target_k: 773.0,
            pulse_duration_s: 0.2,
            total_sim_time_s: 0.3,
        };
        // 10 um clearance fails geometry validation
        let rows = b
            .sweep(
                &single_sided(),
                SweepParameter::CapClearance,
                &[240e-6, 10e-6, 120e-6],
                simplified(),
                343.15,
                1.0,
                policy,
            )
            .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.value).collect::<Vec<_>>(),
            vec![240e-6, 10e-6, 120e-6]
        );
        assert_eq!(rows[0].status, "ok");
        assert_ne!(rows[1].status, "ok");
        assert!(rows[1].dt_k.is_none());
        assert!(rows[2].required_power_w.unwrap() > rows[0].required_power_w.unwrap());
        assert!(b
            .sweep(
                &single_sided(),
                SweepParameter::CapClearance,
                &[1e-4],
                simplified(),
                343.15,
                1.0,
                policy
            )
            .is_err());
    }

    #[test]
    fn identical_boundaries_give_identical_curves() {
        let b = quick();
        let drive = DrivePulse::constant_power(2.0, 0.2, 0.3);
        let g = single_sided();
        let xs = [0.0, 0.5, 1.0];
        let c1 = b
            .characteristic_curve(&g, &drive, simplified(), 293.0, &xs, 0.3)
            .unwrap();
        let c2 = b
            .characteristic_curve(&g, &drive, simplified(), 293.0, &xs, 0.3)
            .unwrap();
        assert_eq!(c1, c2);
        let (free, sink) = b
            .boundary_study(&g, &drive, simplified(), 293.0, &xs)
            .unwrap();
        for (f, s) in free.points.iter().zip(&sink.points) {
            assert!(s.t_amb_k <= f.t_amb_k && s.t_ref_k <= f.t_ref_k);
        }
    }

    #[test]
    fn self_heating_scales_with_current_squared() {
        let b = quick();
        let g = SensorGeometry::default();
        let nl = PropertyMode::TemperatureDependent;
        assert_eq!(
            b.measuring_current_self_heating(&g, nl, 293.0, 0.0)
                .unwrap(),
            0.0
        );
        let r1 = b
            .measuring_current_self_heating(&g, nl, 293.0, 0.0125)
            .unwrap();
        let r2 = b
            .measuring_current_self_heating(&g, nl, 293.0, 0.025)
            .unwrap();
        let ratio = r2 / r1;
        assert!(r1 > 0.0 && (3.8..=4.2).contains(&ratio), "{r1} {r2}");
    }
}
