use serde::{Deserialize, Serialize};

use crate::device::HeaterElement;
use crate::error::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveMode {
    /// Pulse current [A], added to the measuring current while the pulse is on.
    ConstantCurrent(f64),
    /// Pulse power [W] dissipated in the film while the pulse is on.
    ConstantPower(f64),
}

/// Electrical excitation of one heater element. The pulse starts at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePulse {
    pub mode: DriveMode,
    pub pulse_duration_s: f64,
    /// Current that flows at all times [A].
    pub measuring_current_a: f64,
    pub total_sim_time_s: f64,
}

impl DrivePulse {
    pub fn constant_current(amps: f64, pulse_duration_s: f64, total_sim_time_s: f64) -> Self {
        Self {
            mode: DriveMode::ConstantCurrent(amps),
            pulse_duration_s,
            measuring_current_a: 0.0,
            total_sim_time_s,
        }
    }

    pub fn constant_power(watts: f64, pulse_duration_s: f64, total_sim_time_s: f64) -> Self {
        Self {
            mode: DriveMode::ConstantPower(watts),
            pulse_duration_s,
            measuring_current_a: 0.0,
            total_sim_time_s,
        }
    }

    pub fn with_measuring_current(mut self, amps: f64) -> Self {
        self.measuring_current_a = amps;
        self
    }

    pub fn is_active(&self, t: f64) -> bool {
        (0.0..self.pulse_duration_s).contains(&t)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidInput(m));
        let amplitude = match self.mode {
            DriveMode::ConstantCurrent(a) | DriveMode::ConstantPower(a) => a,
        };
        if !(amplitude >= 0.0) || !(self.measuring_current_a >= 0.0) {
            return bad("drive amplitudes must be non-negative".into());
        }
        if !(self.pulse_duration_s >= 0.0) || !(self.total_sim_time_s > 0.0) {
            return bad("pulse duration and total time must be positive".into());
        }
        if self.pulse_duration_s > self.total_sim_time_s {
            return bad(format!(
                "pulse duration {} s exceeds total simulation time {} s",
                self.pulse_duration_s, self.total_sim_time_s
            ));
        }
        if let DriveMode::ConstantCurrent(i) = self.mode {
            if i > 0.0 && self.measuring_current_a > 0.1 * i {
                return bad(format!(
                    "measuring current {} A is not small against the pulse current {i} A",
                    self.measuring_current_a
                ));
            }
        }
        Ok(())
    }
}

/// Joule power [W] in the whole heater element at film temperature
/// `t_heater` and time `t`.
pub fn electro_thermal_source(
    drive: &DrivePulse,
    heater: &HeaterElement,
    t_heater: f64,
    t: f64,
) -> f64 {
    let r = heater.resistance(t_heater);
    let meas = drive.measuring_current_a;
    let on = drive.is_active(t);
    match drive.mode {
        DriveMode::ConstantCurrent(i_pulse) => {
            let i = if on { i_pulse + meas } else { meas };
            i * i * r
        }
        DriveMode::ConstantPower(p) => (if on { p } else { 0.0 }) + meas * meas * r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_power_examples() {
        let heater = HeaterElement::default();
        let drive = DrivePulse::constant_current(0.55, 0.2, 0.3);
        let p = electro_thermal_source(&drive, &heater, 293.0, 0.1);
        assert!((p - 1.815).abs() < 1e-12, "{p}");
        let p = electro_thermal_source(&drive, &heater, 793.0, 0.1);
        assert!((p - 0.3025 * 6.0 * 2.4).abs() < 1e-12);
        assert!((p - 4.36).abs() < 0.005);
        let off = DrivePulse::constant_current(0.0, 0.2, 0.3);
        assert_eq!(electro_thermal_source(&off, &heater, 500.0, 0.1), 0.0);
    }

    #[test]
    fn measuring_current_after_pulse() {
        let heater = HeaterElement::default();
        let drive = DrivePulse::constant_current(0.55, 0.2, 0.3).with_measuring_current(0.025);
        let during = electro_thermal_source(&drive, &heater, 293.0, 0.0);
        assert!((during - 0.575 * 0.575 * 6.0).abs() < 1e-12);
        let after = electro_thermal_source(&drive, &heater, 293.0, 0.2);
        assert!((after - 0.025 * 0.025 * 6.0).abs() < 1e-15);
        let cp = DrivePulse::constant_power(2.2, 0.2, 0.3).with_measuring_current(0.025);
        assert!((electro_thermal_source(&cp, &heater, 293.0, 0.1) - 2.2 - 0.00375).abs() < 1e-12);
        assert!((electro_thermal_source(&cp, &heater, 293.0, 0.25) - 0.00375).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(DrivePulse::constant_current(0.55, 0.2, 0.3)
            .validate()
            .is_ok());
        assert!(DrivePulse::constant_current(-0.1, 0.2, 0.3)
            .validate()
            .is_err());
        assert!(DrivePulse::constant_power(2.2, 0.4, 0.3)
            .validate()
            .is_err());
        assert!(DrivePulse::constant_current(0.1, 0.2, 0.3)
            .with_measuring_current(0.05)
            .validate()
            .is_err());
    }
}
