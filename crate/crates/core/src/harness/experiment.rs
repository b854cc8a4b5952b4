use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{average_deviation, exhaustive_optimal, mra, ra, OracleOptions};
use crate::error::{Error, Result};
use crate::pipeline::{prepare, umra_prepared};
use crate::scenario::{build_scenario, sample_instance, DemandConfig, ScenarioConfig};

/// The quantity an experiment varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    BlockedCount,
    FlowCount,
    UavPosition,
    SlotBudget,
    SinrMin,
    /// Blocked count with the exhaustive optimum on a smaller train.
    OracleCompare,
}

impl SweepKind {
    pub const ALL: [SweepKind; 6] = [
        SweepKind::BlockedCount,
        SweepKind::FlowCount,
        SweepKind::UavPosition,
        SweepKind::SlotBudget,
        SweepKind::SinrMin,
        SweepKind::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::BlockedCount => "blocked_count",
            SweepKind::FlowCount => "flow_count",
            SweepKind::UavPosition => "uav_position",
            SweepKind::SlotBudget => "slot_budget",
            SweepKind::SinrMin => "sinr_min",
            SweepKind::OracleCompare => "oracle_compare",
        }
    }

    /// Sweeps that change the random draw itself. The others reuse the
    /// same instances at every point so their curves differ only through
    /// the swept parameter.
    pub fn is_structural(self) -> bool {
        matches!(self, SweepKind::BlockedCount | SweepKind::FlowCount | SweepKind::OracleCompare)
    }

    fn integral(self) -> bool {
        !matches!(self, SweepKind::UavPosition | SweepKind::SinrMin)
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "UMRA")]
    Umra,
    #[serde(rename = "MRA")]
    Mra,
    #[serde(rename = "RA")]
    Ra,
    #[serde(rename = "OS")]
    Os,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Umra => "UMRA",
            Scheme::Mra => "MRA",
            Scheme::Ra => "RA",
            Scheme::Os => "OS",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub sweep_kind: SweepKind,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub base: ScenarioConfig,
    /// Demand at every point before the swept field is overridden.
    pub demand: DemandConfig,
    pub include_oracle: bool,
    pub oracle: OracleOptions,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec::preset(SweepKind::BlockedCount)
    }
}

fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

impl ExperimentSpec {
    /// Default setup of each sweep: 16 MRs on a 200 m train, QoS drawn from
    /// 10 to 40 Mbit/s, 2400 slots and an SINR threshold of 7e4. Sweeps
    /// other than the blocked count hold 8 MRs blocked.
    pub fn preset(kind: SweepKind) -> Self {
        let mut spec = ExperimentSpec {
            sweep_kind: kind,
            sweep_values: Vec::new(),
            trials: 100,
            seed: 1,
            base: ScenarioConfig::default(),
            demand: DemandConfig::default(),
            include_oracle: false,
            oracle: OracleOptions::default(),
        };
        match kind {
            SweepKind::BlockedCount => spec.sweep_values = range(0.0, 16.0, 1.0),
            SweepKind::FlowCount => {
                spec.sweep_values = range(1.0, 16.0, 1.0);
                spec.demand.blocked_count = 8;
            }
            SweepKind::UavPosition => {
                spec.sweep_values = range(0.0, 200.0, 20.0);
                spec.demand.blocked_count = 8;
            }
            SweepKind::SlotBudget => {
                spec.sweep_values = vec![
                    1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 20.0, 25.0, 50.0, 100.0, 200.0, 400.0, 800.0,
                    1200.0, 1600.0, 2000.0, 2400.0, 2800.0,
                ];
                spec.demand.blocked_count = 8;
            }
            SweepKind::SinrMin => {
                spec.sweep_values = range(0.0, 1.3e5, 1e4);
                spec.demand.blocked_count = 8;
            }
            SweepKind::OracleCompare => {
                spec.sweep_values = range(0.0, 10.0, 1.0);
                spec.trials = 50;
                spec.base.mr_count = 10;
                spec.demand.flow_count = 10;
                spec.demand.total_slots = 1400;
                spec.include_oracle = true;
            }
        }
        spec
    }

    /// Reads a spec from JSON. Missing keys take the blocked-count preset,
    /// or the preset of `sweep_kind` when that key is given.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("cannot parse experiment: {e}")))?;
        let kind = match value.get("sweep_kind") {
            Some(k) => serde_json::from_value::<SweepKind>(k.clone())
                .map_err(|e| Error::InvalidConfig(format!("bad sweep_kind: {e}")))?,
            None => SweepKind::BlockedCount,
        };
        let mut merged = serde_json::to_value(ExperimentSpec::preset(kind))?;
        merge(&mut merged, value);
        serde_json::from_value(merged).map_err(|e| Error::InvalidConfig(format!("bad experiment: {e}")))
    }

    pub fn schemes(&self) -> Vec<Scheme> {
        let mut s = vec![Scheme::Umra, Scheme::Mra, Scheme::Ra];
        if self.include_oracle {
            s.push(Scheme::Os);
        }
        s
    }

    /// Scenario and demand at one sweep point.
    pub fn point(&self, value: f64) -> Result<(ScenarioConfig, DemandConfig)> {
        let kind = self.sweep_kind;
        if !value.is_finite() || (kind.integral() && (value < 0.0 || value.fract() != 0.0)) {
            return Err(Error::InvalidConfig(format!("{kind} value {value} is not valid")));
        }
        let (mut config, mut demand) = (self.base.clone(), self.demand.clone());
        match kind {
            SweepKind::BlockedCount | SweepKind::OracleCompare => demand.blocked_count = value as usize,
            SweepKind::FlowCount => demand.flow_count = value as usize,
            SweepKind::UavPosition => config.uav_ahead_m = value,
            SweepKind::SlotBudget => demand.total_slots = value as u64,
            SweepKind::SinrMin => demand.sinr_min = value,
        }
        Ok((config, demand))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidConfig("sweep_values must not be empty".into()));
        }
        for &v in &self.sweep_values {
            let (config, demand) = self.point(v)?;
            let mrs = config.mr_count;
            build_scenario(&config)?;
            if demand.flow_count > mrs || demand.blocked_count > mrs {
                return Err(Error::InvalidConfig(format!(
                    "{} flows and {} blocked MRs do not fit on {mrs} MRs",
                    demand.flow_count, demand.blocked_count
                )));
            }
            if self.include_oracle && demand.flow_count > self.oracle.flow_limit && !self.oracle.allow_oversize {
                return Err(Error::SizeGuard {
                    flows: demand.flow_count,
                    limit: self.oracle.flow_limit,
                });
            }
        }
        Ok(())
    }
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes the parts into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c908, |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Seed of one trial. Structural sweeps draw fresh instances per point;
/// parametric sweeps reuse the trial's instance at every point.
pub fn trial_seed(spec: &ExperimentSpec, value: f64, trial: usize) -> u64 {
    if spec.sweep_kind.is_structural() {
        derive_seed(&[spec.seed, value.to_bits(), trial as u64])
    } else {
        derive_seed(&[spec.seed, trial as u64])
    }
}

/// Per-scheme means at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep: SweepKind,
    pub scheme: Scheme,
    pub value: f64,
    pub mean_flows: f64,
    pub mean_throughput_bps: f64,
    pub trials: usize,
}

/// Completed flows and throughput of one scheme in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub flows: usize,
    pub throughput_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<SweepRow>,
    /// Standard error of `mean_flows`, parallel to `rows`.
    pub stderr_flows: Vec<f64>,
    /// Mean relative gap of UMRA from the optimum over the sweep points.
    pub oracle_deviation: Option<f64>,
    /// Raw scores indexed by point, then trial, then scheme.
    pub scores: Vec<Vec<Vec<TrialScore>>>,
}

fn run_trial(spec: &ExperimentSpec, point: &(ScenarioConfig, DemandConfig), value: f64, trial: usize) -> Result<Vec<TrialScore>> {
    let (config, demand) = point;
    let scenario = build_scenario(config)?;
    let seed = trial_seed(spec, value, trial);
    let instance = sample_instance(&scenario, demand, seed)?;
    let prepared = prepare(&instance)?;
    let params = &instance.scenario.params;
    let m = instance.total_slots;
    let score = |s: &crate::scheduler::ScheduleResult| TrialScore {
        flows: s.flows_completed,
        throughput_bps: s.throughput_bps(m, params),
    };
    let (u, _) = umra_prepared(&instance, &prepared);
    let mr = mra(&instance, &prepared.evaluations)?;
    let r = ra(&instance, &prepared.graph, &prepared.evaluations, derive_seed(&[seed, 0x5241]));
    let mut scores = vec![score(&u.schedule), score(&mr.schedule), score(&r.schedule)];
    if spec.include_oracle {
        let os = exhaustive_optimal(&instance, &prepared.graph, &prepared.evaluations, spec.oracle)?;
        scores.push(TrialScore {
            flows: os.best_count,
            throughput_bps: os.best_throughput_bits / params.superframe_s(m),
        });
    }
    Ok(scores)
}

fn mean_and_stderr(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every trial of every sweep point and aggregates per scheme.
///
/// Trials run in parallel; results do not depend on the thread count.
pub fn run_experiment_report(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let points = spec
        .sweep_values
        .iter()
        .map(|&v| spec.point(v))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let flat = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(spec, &points[p], spec.sweep_values[p], t))
        .collect::<Result<Vec<_>>>()?;
    let scores: Vec<Vec<Vec<TrialScore>>> = flat.chunks(spec.trials).map(<[_]>::to_vec).collect();

    let schemes = spec.schemes();
    let mut rows = Vec::new();
    let mut stderr_flows = Vec::new();
    for (p, &value) in spec.sweep_values.iter().enumerate() {
        for (k, &scheme) in schemes.iter().enumerate() {
            let trials = &scores[p];
            let (mean_flows, se) = mean_and_stderr(trials.iter().map(|t| t[k].flows as f64));
            let (mean_tp, _) = mean_and_stderr(trials.iter().map(|t| t[k].throughput_bps));
            rows.push(SweepRow {
                sweep: spec.sweep_kind,
                scheme,
                value,
                mean_flows,
                mean_throughput_bps: mean_tp,
                trials: spec.trials,
            });
            stderr_flows.push(se);
        }
        log::info!("{} = {value}: done", spec.sweep_kind);
    }

    let oracle_deviation = if spec.include_oracle {
        let pick = |s: Scheme| -> Vec<f64> { rows.iter().filter(|r| r.scheme == s).map(|r| r.mean_flows).collect() };
        Some(average_deviation(&pick(Scheme::Os), &pick(Scheme::Umra))?)
    } else {
        None
    };
    Ok(ExperimentReport {
        rows,
        stderr_flows,
        oracle_deviation,
        scores,
    })
}

/// Rows of [`run_experiment_report`], ordered by sweep value, then scheme.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    Ok(run_experiment_report(spec)?.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for kind in SweepKind::ALL {
            let spec = ExperimentSpec::preset(kind);
            spec.validate().unwrap();
            assert_eq!(kind.name().parse::<SweepKind>().unwrap(), kind);
        }
        assert_eq!(ExperimentSpec::preset(SweepKind::BlockedCount).sweep_values.len(), 17);
        assert_eq!(ExperimentSpec::preset(SweepKind::SinrMin).sweep_values.last(), Some(&1.3e5));
    }

    #[test]
    fn partial_json_fills_from_preset() {
        let spec = ExperimentSpec::from_json(r#"{"sweep_kind": "slot_budget", "trials": 3, "base": {"mr_count": 12}}"#)
            .unwrap();
        assert_eq!(spec.trials, 3);
        assert_eq!(spec.base.mr_count, 12);
        assert_eq!(spec.base.train_length_m, 200.0);
        assert_eq!(spec.sweep_values[0], 1.0);
        assert!(ExperimentSpec::from_json(r#"{"sweep_kind": "nope"}"#).is_err());
        assert!(ExperimentSpec::from_json("[").is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = ExperimentSpec::preset(SweepKind::BlockedCount);
        spec.trials = 0;
        assert!(matches!(spec.validate(), Err(Error::InvalidConfig(_))));
        let mut spec = ExperimentSpec::preset(SweepKind::BlockedCount);
        spec.sweep_values = vec![17.0];
        assert!(matches!(spec.validate(), Err(Error::InvalidConfig(_))));
        spec.sweep_values = vec![1.5];
        assert!(matches!(spec.validate(), Err(Error::InvalidConfig(_))));
        let mut spec = ExperimentSpec::preset(SweepKind::OracleCompare);
        spec.base.mr_count = 16;
        spec.demand.flow_count = 16;
        assert!(matches!(spec.validate(), Err(Error::SizeGuard { flows: 16, limit: 12 })));
    }

    #[test]
    fn seeds() {
        assert_eq!(derive_seed(&[1, 2, 3]), derive_seed(&[1, 2, 3]));
        assert_ne!(derive_seed(&[1, 2, 3]), derive_seed(&[1, 3, 2]));
        let spec = ExperimentSpec::preset(SweepKind::SinrMin);
        assert_eq!(trial_seed(&spec, 0.0, 4), trial_seed(&spec, 1e4, 4));
        let spec = ExperimentSpec::preset(SweepKind::BlockedCount);
        assert_ne!(trial_seed(&spec, 0.0, 4), trial_seed(&spec, 1.0, 4));
    }
}
