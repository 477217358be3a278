use serde::{Deserialize, Serialize};

use super::experiment::{CharacteristicCurve, CurvePoint};
use crate::error::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumidityAxis {
    MoleFraction,
    RelativeHumidity,
    /// Grams of vapor per cubic meter.
    AbsoluteHumidity,
}

impl HumidityAxis {
    pub fn value(self, p: &CurvePoint) -> Option<f64> {
        match self {
            Self::MoleFraction => Some(p.x),
            Self::RelativeHumidity => p.rh,
            Self::AbsoluteHumidity => Some(p.abs_humidity_g_m3),
        }
    }
}

/// Closed humidity interval on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRange {
    pub axis: HumidityAxis,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    /// dT per axis unit; K per (g/m^3) on the absolute-humidity axis.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Largest |dT - fit| over the fitted points [K].
    pub max_linear_deviation: f64,
    pub points: usize,
}

impl LinearFit {
    /// Slope rescaled from K per (g/m^3) to K per (kg/m^3).
    pub fn slope_per_kg_m3(&self) -> f64 {
        self.slope * 1e3
    }
}

/// Ordinary least squares of `y` on `x`. A flat exact response has r^2 = 1.
pub fn linear_fit(pts: &[(f64, f64)]) -> Result<LinearFit, ExperimentError> {
    if pts.len() < 3 {
        return Err(ExperimentError::InsufficientPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(ExperimentError::InvalidInput(
            "fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let max_linear_deviation = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
        max_linear_deviation,
        points: pts.len(),
    })
}

/// Least-squares line of dT against humidity over the points of `curve`
/// that fall inside `range`.
pub fn sensitivity_and_linearity(
    curve: &CharacteristicCurve,
    range: FitRange,
) -> Result<LinearFit, ExperimentError> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| range.axis.value(p).map(|h| (h, p.dt_k)))
        .filter(|&(h, _)| h >= range.lo && h <= range.hi)
        .collect();
    linear_fit(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::SensorGeometry;
    use crate::thermsolve::{DrivePulse, PropertyMode};
    use proptest::prelude::*;

    fn curve(points: Vec<CurvePoint>) -> CharacteristicCurve {
        CharacteristicCurve {
            points,
            readout_time_s: 0.3,
            ambient_t_k: 343.15,
            pressure_pa: 101_325.0,
            geometry: SensorGeometry::default(),
            drive: DrivePulse::constant_power(1.0, 0.2, 0.3),
            mode: PropertyMode::TemperatureDependent,
            energy_residual: 0.0,
        }
    }

    fn point(abs: f64, dt: f64) -> CurvePoint {
        CurvePoint {
            x: abs / 1000.0,
            rh: None,
            abs_humidity_g_m3: abs,
            dt_k: dt,
            t_ref_k: 700.0,
            t_amb_k: 700.0 - dt,
        }
    }

    #[test]
    fn exact_line() {
        let c = curve(
            (0..8)
                .map(|i| point(20.0 * i as f64, 0.5 + 0.023 * 20.0 * i as f64))
                .collect(),
        );
        let fit = sensitivity_and_linearity(
            &c,
            FitRange {
                axis: HumidityAxis::AbsoluteHumidity,
                lo: 40.0,
                hi: 120.0,
            },
        )
        .unwrap();
        assert!((fit.slope - 0.023).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.max_linear_deviation < 1e-12);
        assert_eq!(fit.points, 5);
        assert!((fit.slope_per_kg_m3() - 23.0).abs() < 1e-10);
    }

    #[test]
    fn too_few_points() {
        let c = curve(vec![point(10.0, 1.0), point(20.0, 2.0), point(30.0, 3.0)]);
        let err = sensitivity_and_linearity(
            &c,
            FitRange {
                axis: HumidityAxis::AbsoluteHumidity,
                lo: 15.0,
                hi: 35.0,
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::InsufficientPoints { needed: 3, got: 2 }
        ));
        // points without a relative humidity are skipped on that axis
        let err = sensitivity_and_linearity(
            &c,
            FitRange {
                axis: HumidityAxis::RelativeHumidity,
                lo: 0.0,
                hi: 1.0,
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::InsufficientPoints { got: 0, .. }
        ));
    }

    #[test]
    fn curvature_lowers_r_squared() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i as f64).powi(2))).collect();
        let fit = linear_fit(&pts).unwrap();
        assert!(fit.r_squared < 0.99 && fit.max_linear_deviation > 1.0);
    }

    proptest! {
        #[test]
        fn recovers_any_line(s in -10.0f64..10.0, c in -5.0f64..5.0, n in 3usize..20) {
            let pts: Vec<(f64, f64)> = (0..n).map(|i| (i as f64 * 0.7, c + s * i as f64 * 0.7)).collect();
            let fit = linear_fit(&pts).unwrap();
            prop_assert!((fit.slope - s).abs() < 1e-9);
            prop_assert!((fit.intercept - c).abs() < 1e-9);
            prop_assert!(fit.r_squared > 1.0 - 1e-9);
        }
    }
}
