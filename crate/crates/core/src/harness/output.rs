use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::experiment::{ExperimentReport, ExperimentSpec, SweepRow};
use crate::error::{Error, Result};
use crate::scenario::RadioParams;

pub const CSV_HEADER: [&str; 6] = ["sweep", "scheme", "value", "mean_flows", "mean_throughput_bps", "trials"];

/// Writes rows as CSV. The header is written even when `rows` is empty.
pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidInput(format!("unexpected CSV header in {}", path.display())));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Modeling choices the numbers depend on, stated once per run.
#[derive(Debug, Clone, Serialize)]
struct Rules {
    relay_tie_break: &'static str,
    schedule_order: &'static str,
    oracle_tie_break: &'static str,
    random_relay: &'static str,
    throughput: &'static str,
    trial_seeds: &'static str,
}

const RULES: Rules = Rules {
    relay_tie_break: "highest combined rate; equal rates go to left, then right, then UAV",
    schedule_order: "ascending slot count, then flow id; serial service",
    oracle_tie_break: "completed flows, then throughput, then first assignment in mode order (direct, left, right, UAV, abandoned)",
    random_relay: "uniform over the modes allowed by the blockage graph and the train ends, direct included; abandoned if thresholds fail",
    throughput: "bits sent in all served slots divided by the superframe duration",
    trial_seeds: "structural sweeps: hash(seed, value, trial); parametric sweeps: hash(seed, trial)",
};

#[derive(Serialize)]
struct Metadata<'a> {
    crate_version: &'static str,
    spec: &'a ExperimentSpec,
    resolved_params: &'a RadioParams,
    rules: Rules,
    stderr_flows: &'a [f64],
    oracle_deviation: Option<f64>,
}

/// Writes the fully resolved spec, radio parameters and modeling rules as
/// pretty-printed JSON.
pub fn write_metadata(
    spec: &ExperimentSpec,
    resolved_params: &RadioParams,
    report: Option<&ExperimentReport>,
    path: &Path,
) -> Result<()> {
    let meta = Metadata {
        crate_version: env!("CARGO_PKG_VERSION"),
        spec,
        resolved_params,
        rules: RULES,
        stderr_flows: report.map_or(&[], |r| &r.stderr_flows),
        oracle_deviation: report.and_then(|r| r.oracle_deviation),
    };
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
