mod common;

use std::process::Command;

use ratesplit_swipt::experiments::{read_json, RowStatus, CSV_COLUMNS};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratesplit-swipt"))
}

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"{
    "total_power": "10dBm", "noise_power_ir": "-30dBm",
    "energy_threshold_uw": 35, "rate_weights": [1, 1],
    "channel": {"type": "paper", "gamma": 1, "theta": "4pi/9", "beta": "2pi/9"},
    "sweep": {"energy_grid_uw": [10, 41], "weight_grid": [0.5, 2], "point_thetas": ["4pi/9"]}
}"#;

#[test]
fn point_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = bin()
        .args(["point", "--strategy", "mulp", "--seeds", "1", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        &row[..4],
        &[
            "point",
            &format!("{:?}", 4.0 * std::f64::consts::PI / 9.0),
            "MULP",
            "ok"
        ]
    );
    assert!(String::from_utf8(out.stderr).unwrap().contains("P_ER"));
}

#[test]
fn tradeoff_reports_infeasible_points_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let json = dir.path().join("out.json");
    let status = bin()
        .args([
            "tradeoff",
            "--strategy",
            "mulp",
            "--seeds",
            "0",
            "--quiet",
            "--config",
        ])
        .arg(&config)
        .arg("--out")
        .arg(&json)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let result = read_json(std::fs::File::open(&json).unwrap()).unwrap();
    let statuses: Vec<(f64, RowStatus)> = result
        .rows
        .iter()
        .map(|r| (r.coordinate, r.status))
        .collect();
    assert_eq!(
        statuses,
        vec![(10.0, RowStatus::Ok), (41.0, RowStatus::Infeasible)]
    );
}

#[test]
fn region_with_explicit_format() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("region.txt");
    let status = bin()
        .args([
            "region",
            "--strategy",
            "rs",
            "--seeds",
            "0",
            "--quiet",
            "--format",
            "csv",
            "--config",
        ])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.starts_with("region,") && l.contains(",RS,ok,")));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = bin()
        .args(["point", "--config"])
        .arg(&missing)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let three = r#"{
        "num_tx_antennas": 3, "total_power": 1.0, "noise_power_ir": "0dBm",
        "energy_threshold_uw": 0, "rate_weights": [1, 1, 1],
        "channel": {"type": "random", "num_irs": 3, "num_ers": 0, "seed": 1}
    }"#;
    let config = write_config(dir.path(), three);
    let out = bin()
        .args(["point", "--strategy", "scsic", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bundled_configs_parse() {
    for name in [
        "point.json",
        "tradeoff.json",
        "region_equal_gain.json",
        "region_weak_ir2.json",
    ] {
        let file =
            ratesplit_swipt::experiments::ScenarioFile::load(&common::config_path(name)).unwrap();
        file.scenario().unwrap();
    }
}
