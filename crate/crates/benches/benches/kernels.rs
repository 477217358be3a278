use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thermohygro_core::bench::Bench;
use thermohygro_core::device::{build_domain, ChamberTag, Materials, Resolution, SensorGeometry};
use thermohygro_core::gasmix::HumidAirState;
use thermohygro_core::thermsolve::{simulate_transient, DrivePulse, PropertyMode, SolverSettings};
use thermohygro_core::HumidAirModel;

fn mixture(c: &mut Criterion) {
    let gas = HumidAirModel::default();
    c.bench_function("lambda_mixture", |b| {
        b.iter(|| {
            gas.lambda_mixture(black_box(0.2), black_box(773.0))
                .unwrap()
        })
    });
}

fn transient(c: &mut Criterion) {
    let geom = SensorGeometry::default();
    let gas = HumidAirModel::default();
    let ambient = HumidAirState::new(343.15, 101_325.0, 0.2).unwrap();
    let drive = DrivePulse::constant_power(3.8, 0.2, 0.3);
    let mut group = c.benchmark_group("pulse");
    group.sample_size(10);
    for (name, mode) in [
        (
            "simplified_n8",
            PropertyMode::ConstantAtReference { t_ref: 773.0 },
        ),
        ("nonlinear_n8", PropertyMode::TemperatureDependent),
    ] {
        let domain = build_domain(
            &geom,
            &Materials::default(),
            Resolution::new(8),
            ChamberTag::Ambient,
        )
        .unwrap();
        group.bench_function(name, |b| {
            b.iter(|| {
                simulate_transient(
                    &domain,
                    &gas,
                    &geom.heater,
                    &drive,
                    mode,
                    ambient,
                    1e-3,
                    &[0.3],
                    SolverSettings::default(),
                )
                .unwrap()
            })
        });
    }
    let bench = Bench {
        resolution: Resolution::new(4),
        ..Bench::default()
    };
    group.bench_function("required_power_n4", |b| {
        b.iter(|| {
            bench
                .required_pulse_power(
                    &geom,
                    PropertyMode::TemperatureDependent,
                    343.15,
                    773.0,
                    0.2,
                )
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, mixture, transient);
criterion_main!(benches);
