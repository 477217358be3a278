use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::device::DiscretizedDomain;

/// Full solver state at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransientState {
    pub time: f64,
    /// Nodal temperatures [K] in solver layout (cells plus film plane).
    pub field: Vec<f64>,
    pub heater_temperature: f64,
    /// Joule power of the whole heater element [W].
    pub instantaneous_power: f64,
}

/// Scalar record of one accepted step. Energies are those of the meshed
/// domain only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub time: f64,
    pub heater_temperature: f64,
    pub power_w: f64,
    pub energy_in_j: f64,
    pub energy_stored_j: f64,
    pub energy_out_j: f64,
    pub picard_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// One sample per step, starting with the initial state at t = 0.
    pub samples: Vec<TraceSample>,
    /// Field snapshots at the pulse end, every readout time and the final time.
    pub snapshots: Vec<TransientState>,
    pub pulse_end: f64,
}

impl Trace {
    pub(crate) fn new(initial: &TransientState, pulse_end: f64) -> Self {
        Self {
            samples: vec![TraceSample {
                time: initial.time,
                heater_temperature: initial.heater_temperature,
                power_w: initial.instantaneous_power,
                energy_in_j: 0.0,
                energy_stored_j: 0.0,
                energy_out_j: 0.0,
                picard_iterations: 0,
            }],
            snapshots: Vec::new(),
            pulse_end,
        }
    }

    /// Heater temperature at `t`: the exact sample when one lands within
    /// 1e-12 s, otherwise linear interpolation between neighbours.
    pub fn heater_temperature_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        let hi = s.partition_point(|p| p.time < t - 1e-12);
        if hi >= s.len() {
            return None;
        }
        if (s[hi].time - t).abs() <= 1e-12 {
            return Some(s[hi].heater_temperature);
        }
        if hi == 0 {
            return None;
        }
        let (a, b) = (&s[hi - 1], &s[hi]);
        let f = (t - a.time) / (b.time - a.time);
        Some(a.heater_temperature + f * (b.heater_temperature - a.heater_temperature))
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&TransientState> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= 1e-12)
    }

    pub fn final_state(&self) -> Option<&TransientState> {
        self.snapshots.last()
    }

    /// `time_s,T_heater_K,P_W` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,T_heater_K,P_W\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{}", s.time, s.heater_temperature, s.power_w);
        }
        out
    }
}

/// Relative mismatch between electrical energy input and the sum of stored
/// energy change and boundary outflow. Zero by convention for a run with no
/// input.
pub fn energy_balance_residual(trace: &Trace) -> f64 {
    let (mut input, mut stored, mut out) = (0.0, 0.0, 0.0);
    for s in &trace.samples {
        input += s.energy_in_j;
        stored += s.energy_stored_j;
        out += s.energy_out_j;
    }
    if input == 0.0 {
        return 0.0;
    }
    (input - stored - out).abs() / input
}

/// Text grid export of one snapshot:
///
/// ```text
/// # thermohygro field v1
/// time_s <t>
/// nx <nx> nz <nz>
/// x_m <nx cell-center coordinates>
/// z_m <nz cell-center coordinates>
/// film_z_m <z of the film plane, or none>
/// values_K
/// <nz rows bottom to top, nx values each>
/// film_K <nx values, or none>
/// ```
pub fn field_to_text(domain: &DiscretizedDomain, state: &TransientState) -> String {
    let (nx, nz) = (domain.nx(), domain.nz());
    let film_row = domain.film.as_ref().map(|f| f.face_row);
    let slots = nz + film_row.is_some() as usize;
    let slot = |k: usize| k + matches!(film_row, Some(f) if k >= f) as usize;
    let join =
        |v: &mut dyn Iterator<Item = f64>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::from("# thermohygro field v1\n");
    let _ = writeln!(out, "time_s {}", state.time);
    let _ = writeln!(out, "nx {nx} nz {nz}");
    let _ = writeln!(
        out,
        "x_m {}",
        join(&mut (0..nx).map(|i| domain.x_center(i)))
    );
    let _ = writeln!(
        out,
        "z_m {}",
        join(&mut (0..nz).map(|k| domain.z_center(k)))
    );
    match film_row {
        Some(f) => {
            let _ = writeln!(out, "film_z_m {}", domain.z_faces[f]);
        }
        None => out.push_str("film_z_m none\n"),
    }
    out.push_str("values_K\n");
    for k in 0..nz {
        let _ = writeln!(
            out,
            "{}",
            join(&mut (0..nx).map(|i| state.field[i * slots + slot(k)]))
        );
    }
    match film_row {
        Some(f) => {
            let _ = writeln!(
                out,
                "film_K {}",
                join(&mut (0..nx).map(|i| state.field[i * slots + f]))
            );
        }
        None => out.push_str("film_K none\n"),
    }
    out
}
