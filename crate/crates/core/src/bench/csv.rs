//! CSV renderings: `.` decimals, shortest round-trip floats, header row
//! first. Missing values are left empty.

use super::experiment::{CharacteristicCurve, DifferentialTrace, SweepRow};

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn render<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn curve_csv(curve: &CharacteristicCurve) -> String {
    render(
        ["X", "rh", "abs_humidity_g_m3", "dT_K"],
        curve.points.iter().map(|p| {
            [
                p.x.to_string(),
                opt(p.rh),
                p.abs_humidity_g_m3.to_string(),
                p.dt_k.to_string(),
            ]
        }),
    )
}

/// Parameter values are written in meters.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    render(
        ["param_value", "required_power_W", "dT_K", "status"],
        rows.iter().map(|r| {
            [
                r.value.to_string(),
                opt(r.required_power_w),
                opt(r.dt_k),
                r.status.clone(),
            ]
        }),
    )
}

pub fn trace_csv(trace: &DifferentialTrace) -> String {
    render(
        ["t_s", "T_ref_K", "T_amb_K", "dT_K", "V_ref_V", "V_amb_V"],
        trace
            .samples
            .iter()
            .map(|s| [s.t, s.t_ref, s.t_amb, s.dt, s.v_ref, s.v_amb].map(|v| v.to_string())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_rows_quote_messages() {
        let rows = vec![
            SweepRow {
                value: 1e-4,
                required_power_w: Some(2.5),
                dt_k: Some(0.75),
                status: "ok".into(),
            },
            SweepRow {
                value: 1e-5,
                required_power_w: None,
                dt_k: None,
                status: "bad, \"thin\"".into(),
            },
        ];
        let text = sweep_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "param_value,required_power_W,dT_K,status");
        assert_eq!(lines[1], "0.0001,2.5,0.75,ok");
        assert_eq!(lines[2], "0.00001,,,\"bad, \"\"thin\"\"\"");
    }
}
