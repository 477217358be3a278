use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermohygro"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_CURVE: &str = r#"
[geometry]
substrate_thickness_um = 100
cap_clearance_um = 100
mirror = false

[mode]
kind = "simplified"

[drive]
kind = "power"
power_w = 2.2

[ambient]
t_k = 293

[humidity]
x_list = [0.0, 0.5, 1.0]

[resolution]
cells_per_layer = 4
"#;

#[test]
fn props_at_saturation() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "props",
        "--T",
        "343.15",
        "--X",
        "0.3",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{key} = ")))
            .unwrap();
        line.split(" = ").nth(1).unwrap().parse().unwrap()
    };
    assert!((value("rh") - 1.0).abs() < 0.05, "{text}");
    assert!(value("lambda_mix_W_mK") > 0.02 && value("lambda_mix_W_mK") < 0.04);
    assert!(value("rho_cp_J_m3K") > 0.0);
    assert!(value("abs_humidity_g_m3") > 150.0 && value("abs_humidity_g_m3") < 250.0);
}

#[test]
fn curve_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_CURVE);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "curve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("curve.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "X,rh,abs_humidity_g_m3,dT_K");
    assert_eq!(lines.len(), 4);
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.starts_with(&format!("thermohygro {}", env!("CARGO_PKG_VERSION"))));
    assert!(manifest.contains("generated = "));
    assert!(manifest.contains("x_list = [0.0, 0.5, 1.0]"));
    assert!(manifest.contains("[bench.resolution]"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_CURVE);
    let mut bodies = Vec::new();
    for (i, jobs) in ["1", "2", "1"].iter().enumerate() {
        let out_dir = dir.path().join(format!("out{i}"));
        let out = run(&[
            "boundary",
            "--config",
            cfg.to_str().unwrap(),
            "--jobs",
            jobs,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        bodies.push((
            std::fs::read(out_dir.join("curve_free_cap.csv")).unwrap(),
            std::fs::read(out_dir.join("curve_heat_sink.csv")).unwrap(),
        ));
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_CURVE);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "curve",
        "--config",
        cfg.to_str().unwrap(),
        "--x_list",
        "0.2,0.4",
        "--geometry.cap_clearance_um=120",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("cap_clearance_um = 120.0"));
    assert!(manifest.contains("overrides = --x_list 0.2,0.4 --geometry.cap_clearance_um 120"));
}

#[test]
fn missing_geometry_block_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "[mode]\nkind = \"nonlinear\"\n[ambient]\nt_k = 293\n",
    );
    let out = run(&[
        "curve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[geometry]"));
}

#[test]
fn malformed_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "[geometry\nmirror = ");
    let out = run(&["curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "curve",
        "--config",
        dir.path().join("absent.cfg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_keys_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_CURVE);
    let out = run(&[
        "curve",
        "--config",
        cfg.to_str().unwrap(),
        "--clearance",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clearance"));
    let cfg = write_cfg(
        dir.path(),
        &format!("{SMALL_CURVE}\n[output]\nfolder = \"x\"\n"),
    );
    let out = run(&["curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_CURVE);
    let out = run(&[
        "power",
        "--config",
        cfg.to_str().unwrap(),
        "--target_k",
        "250",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_documents_exit_codes() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["Exit codes", "unknown config key", "--jobs", "selfheat"] {
        assert!(text.contains(needle), "{needle}");
    }
}

#[test]
fn shipped_figure_configs_run() {
    let dir = tempfile::tempdir().unwrap();
    for (name, command, artifact) in [
        ("fig3", "boundary", "curve_free_cap.csv"),
        ("fig4", "sweep", "sweep.csv"),
        ("fig5", "sweep", "sweep.csv"),
        ("fig8", "curve", "curve.csv"),
        ("fig11", "pulse", "trace.csv"),
        ("fig12", "curve", "curve.csv"),
    ] {
        let cfg = configs_dir().join(format!("{name}.cfg"));
        let out_dir = dir.path().join(name);
        let out = run(&[
            command,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let csv = std::fs::read_to_string(out_dir.join(artifact)).unwrap();
        assert!(csv.lines().count() > 2, "{name}");
        assert!(!csv.contains("NaN") && !csv.contains("inf"), "{name}");
        if command == "sweep" {
            assert!(
                csv.lines().skip(1).all(|l| l.ends_with(",ok")),
                "{name}: {csv}"
            );
        }
        assert!(out_dir.join("manifest.txt").is_file());
    }
}
