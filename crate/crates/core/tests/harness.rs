use std::process::{Command, Stdio};

use trainlink::harness::{
    read_csv, run_experiment, run_experiment_report, write_csv, write_metadata, ExperimentSpec, Scheme, SweepKind,
    SweepRow,
};

fn small(kind: SweepKind) -> ExperimentSpec {
    let mut spec = ExperimentSpec::preset(kind);
    spec.trials = 4;
    spec
}

#[test]
fn same_spec_gives_identical_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small(SweepKind::BlockedCount);
    spec.trials = 1;
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_csv(&run_experiment(&spec).unwrap(), &a).unwrap();
    write_csv(&run_experiment(&spec).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_shapes_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    write_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "sweep,scheme,value,mean_flows,mean_throughput_bps,trials\n");

    let row = SweepRow {
        sweep: SweepKind::SinrMin,
        scheme: Scheme::Ra,
        value: 7e4,
        mean_flows: 14.23,
        mean_throughput_bps: 1.25e9,
        trials: 100,
    };
    write_csv(std::slice::from_ref(&row), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("sinr_min,RA,"));
    assert_eq!(read_csv(&path).unwrap(), vec![row]);

    let rows = run_experiment(&small(SweepKind::OracleCompare)).unwrap();
    write_csv(&rows, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), rows);
}

#[test]
fn rows_are_ordered_and_bounded() {
    let spec = small(SweepKind::FlowCount);
    let rows = run_experiment(&spec).unwrap();
    assert_eq!(rows.len(), spec.sweep_values.len() * 3);
    for (chunk, &v) in rows.chunks(3).zip(&spec.sweep_values) {
        let schemes: Vec<Scheme> = chunk.iter().map(|r| r.scheme).collect();
        assert_eq!(schemes, [Scheme::Umra, Scheme::Mra, Scheme::Ra]);
        for r in chunk {
            assert_eq!(r.value, v);
            assert!(r.mean_flows <= v && r.mean_throughput_bps >= 0.0);
            assert_eq!(r.trials, 4);
        }
    }
}

#[test]
fn oracle_rows_dominate() {
    let report = run_experiment_report(&small(SweepKind::OracleCompare)).unwrap();
    for chunk in report.rows.chunks(4) {
        let os = chunk.iter().find(|r| r.scheme == Scheme::Os).unwrap().mean_flows;
        for r in chunk {
            assert!(os >= r.mean_flows, "{r:?}");
        }
        assert!(chunk[0].mean_flows >= chunk[1].mean_flows, "UMRA below MRA: {chunk:?}");
    }
    let d = report.oracle_deviation.unwrap();
    assert!((0.0..=1.0).contains(&d));
    assert_eq!(report.stderr_flows.len(), report.rows.len());
}

#[test]
fn per_seed_monotone_in_sinr_threshold() {
    // Parametric sweeps reuse each trial's instance, so a higher threshold
    // can only remove options from every trial.
    let report = run_experiment_report(&small(SweepKind::SinrMin)).unwrap();
    for trial in 0..4 {
        for scheme in 0..3 {
            let counts: Vec<usize> = report.scores.iter().map(|p| p[trial][scheme].flows).collect();
            assert!(counts.windows(2).all(|w| w[0] >= w[1]), "trial {trial} scheme {scheme}: {counts:?}");
        }
    }
}

#[test]
fn metadata_records_resolved_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small(SweepKind::BlockedCount);
    let report = run_experiment_report(&spec).unwrap();
    let path = dir.path().join("meta.json");
    write_metadata(&spec, &spec.base.radio, Some(&report), &path).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(meta["resolved_params"]["transceiver_efficiency"], 1.0);
    assert_eq!(meta["spec"]["base"]["bs_offset_m"], 50.0);
    assert_eq!(meta["spec"]["demand"]["total_slots"], 2400);
    assert!(meta["rules"]["relay_tie_break"].as_str().unwrap().contains("left"));
    assert_eq!(meta["stderr_flows"].as_array().unwrap().len(), report.rows.len());
}

fn simulate() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_simulate"));
    cmd.stdout(Stdio::null()).stderr(Stdio::null());
    cmd
}

#[test]
fn cli_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = simulate()
        .args(["--experiment", "sinr_min", "--seed", "9", "--trials", "2", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_csv(&dir.path().join("sinr_min.csv")).unwrap();
    assert_eq!(rows.len(), 14 * 3);
    let meta = std::fs::read_to_string(dir.path().join("sinr_min.metadata.json")).unwrap();
    assert!(meta.contains("\"seed\": 9"));
}

#[test]
fn cli_reads_spec_and_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("short.json");
    std::fs::write(&spec, r#"{"sweep_kind": "uav_position", "sweep_values": [0, 100], "trials": 2}"#).unwrap();
    let config = dir.path().join("scenario.json");
    std::fs::write(&config, r#"{"mr_count": 16, "uav_height_m": 80}"#).unwrap();
    let out = dir.path().join("out");
    let status = simulate()
        .arg("--experiment")
        .arg(&spec)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read_csv(&out.join("short.csv")).unwrap().len(), 6);
    let meta = std::fs::read_to_string(out.join("short.metadata.json")).unwrap();
    assert!(meta.contains("\"uav_height_m\": 80.0"));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"mr_count": "many"}"#).unwrap();
    let code = |args: &[&std::ffi::OsStr]| simulate().args(args).arg("--out").arg(dir.path()).status().unwrap().code();

    assert_eq!(code(&["--config".as_ref(), bad.as_os_str()]), Some(2));
    assert_eq!(code(&["--experiment".as_ref(), "no_such_sweep".as_ref()]), Some(2));
    assert_eq!(code(&["--trials".as_ref(), "0".as_ref()]), Some(2));

    let big = dir.path().join("big.json");
    std::fs::write(
        &big,
        r#"{"sweep_kind": "oracle_compare", "base": {"mr_count": 16}, "demand": {"flow_count": 16}}"#,
    )
    .unwrap();
    assert_eq!(code(&["--experiment".as_ref(), big.as_os_str()]), Some(3));
}
