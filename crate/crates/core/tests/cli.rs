use std::fs;
use std::process::{Command, Output};

use ionx::netlist::{parse_netlist, ElementCounts};
use ionx::{build_reference_grid, DimensionlessSystem, DriveMode, DriveSignal};

const SMALL: [&str; 6] = [
    "--set",
    "grid=scaled",
    "--set",
    "system.d=25",
    "--set",
    "system.delta=20",
];

fn ionx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionx")).args(args).output().unwrap()
}

#[test]
fn unknown_scenario_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = ionx(&["run", "--scenario", "fig42", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fig42") && err.contains("fig10"));
}

#[test]
fn bad_override_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for bad in ["system.X=-2", "tau_end=soon", "no.such.key=1", "drive=ramp(3)"] {
        let out = ionx(&["run", "--scenario", "custom", "--out", d, "--set", bad]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{bad}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn custom_run_writes_listed_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut args = vec![
        "run",
        "--scenario",
        "custom",
        "--out",
        d,
        "--set",
        "tau_end=2",
        "--set",
        "drive=step(2)",
    ];
    args.extend(SMALL);
    let out = ionx(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listed: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(listed.len(), 2);
    let series = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert_eq!(series.lines().next(), Some("tau,J_exit,I_total"));
    assert_eq!(series.lines().count(), 22);
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("drive=step(2.0)"));
}

#[test]
fn config_file_and_set_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(
        &cfg,
        "# small run\ngrid=scaled\nsystem.d=25\nsystem.delta=20\ntau_end=1\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = ionx(&[
        "run",
        "--scenario",
        "custom",
        "--out",
        out_dir.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "tau_end=0.5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series = fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 7);
}

#[test]
fn grid_summary_and_dump() {
    let out = ionx(&["grid"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("480 compartments"));
    let dump = ionx(&["grid", "--dump"]);
    let csv = String::from_utf8(dump.stdout).unwrap();
    assert_eq!(csv.lines().count(), 481);
}

#[test]
fn netlist_command_matches_closed_form_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pot.cir");
    let out = ionx(&["netlist", "--mode", "potentiostatic", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    let net = parse_netlist(&text).unwrap();
    assert_eq!(net.to_string(), text);
    let system = DimensionlessSystem::default();
    let expected = ElementCounts::expected(
        build_reference_grid().len(),
        system.species_count(),
        &DriveMode::Potentiostatic(DriveSignal::step(5.0)),
    );
    assert_eq!(ElementCounts::of(&net), expected);
    assert!(net.find("VA").is_some() && net.find("IA").is_none());
}

#[test]
fn small_channel_and_noise_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let d7 = dir.path().join("fig7");
    let mut args = vec![
        "run",
        "--scenario",
        "fig7",
        "--out",
        d7.to_str().unwrap(),
        "--set",
        "sweep=3,5",
        "--set",
        "tau_end=50",
    ];
    args.extend(SMALL);
    assert!(ionx(&args).status.success());
    let peak = |v: &str| -> f64 {
        fs::read_to_string(d7.join(format!("channel_V{v}.csv")))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    assert!(peak("5") > peak("3"));

    let d10 = dir.path().join("fig10");
    let mut args = vec![
        "run",
        "--scenario",
        "fig10",
        "--out",
        d10.to_str().unwrap(),
        "--set",
        "sweep=1,2,3",
    ];
    args.extend(SMALL);
    assert!(ionx(&args).status.success());
    let table = fs::read_to_string(d10.join("snr_vs_v.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("V,J_ss,S_J0,SNR,SNR_dB"));
    assert_eq!(table.lines().count(), 4);
}
