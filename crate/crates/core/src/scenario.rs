//! Node placement, radio parameters and seeded demand sampling.
//!
//! Coordinates are in metres. The x axis runs along the track with the train
//! tail at x = 0 and the locomotive at x = `train_length_m`; y is the lateral
//! offset from the track centerline and z the height above ground. MRs are
//! indexed from 0 at the tail, so "left" means lower x.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::AlignmentModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Point3, b: Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Global radio parameters shared by every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioParams {
    pub transmit_power_mw: f64,
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_per_mhz: f64,
    pub path_loss_exponent: f64,
    pub half_power_beamwidth_deg: f64,
    pub slot_duration_s: f64,
    pub sched_phase_s: f64,
    /// Linear residual self-interference factor (1e-13 is -130 dB).
    pub si_cancellation: f64,
    pub transceiver_efficiency: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            transmit_power_mw: 1000.0,
            carrier_freq_hz: 28e9,
            bandwidth_hz: 1200e6,
            noise_psd_dbm_per_mhz: -134.0,
            path_loss_exponent: 2.0,
            half_power_beamwidth_deg: 30.0,
            slot_duration_s: 18e-6,
            sched_phase_s: 850e-6,
            si_cancellation: 1e-13,
            transceiver_efficiency: 1.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("transmit_power_mw", self.transmit_power_mw),
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("path_loss_exponent", self.path_loss_exponent),
            ("half_power_beamwidth_deg", self.half_power_beamwidth_deg),
            ("slot_duration_s", self.slot_duration_s),
            ("sched_phase_s", self.sched_phase_s),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if !self.noise_psd_dbm_per_mhz.is_finite() {
            return Err(Error::InvalidConfig("noise_psd_dbm_per_mhz must be finite".into()));
        }
        if self.half_power_beamwidth_deg > 180.0 {
            return Err(Error::InvalidConfig(format!(
                "half_power_beamwidth_deg must be at most 180, got {}",
                self.half_power_beamwidth_deg
            )));
        }
        if !(self.si_cancellation >= 0.0 && self.si_cancellation.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "si_cancellation must be nonnegative, got {}",
                self.si_cancellation
            )));
        }
        if !(self.transceiver_efficiency > 0.0 && self.transceiver_efficiency <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "transceiver_efficiency must lie in (0, 1], got {}",
                self.transceiver_efficiency
            )));
        }
        Ok(())
    }

    /// Duration of one superframe: scheduling phase plus `total_slots` slots.
    pub fn superframe_s(&self, total_slots: u64) -> f64 {
        self.sched_phase_s + total_slots as f64 * self.slot_duration_s
    }
}

/// Geometry and radio configuration, as read from a JSON document.
///
/// Every key is optional; missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub train_length_m: f64,
    pub mr_count: usize,
    /// Lateral distance of the BS from the track centerline.
    pub bs_offset_m: f64,
    /// Along-track position of the BS measured forward from the locomotive.
    /// Use `-train_length_m / 2` for a BS level with the train midpoint.
    pub bs_ahead_m: f64,
    pub bs_height_m: f64,
    /// Along-track distance of the UAV ahead of the locomotive.
    pub uav_ahead_m: f64,
    pub uav_height_m: f64,
    pub mr_height_m: f64,
    /// Beam pointing error applied at both ends of every link, in degrees.
    pub misalignment_deg: f64,
    #[serde(flatten)]
    pub radio: RadioParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            train_length_m: 200.0,
            mr_count: 16,
            bs_offset_m: 50.0,
            bs_ahead_m: 190.0,
            bs_height_m: 10.0,
            uav_ahead_m: 40.0,
            uav_height_m: 100.0,
            mr_height_m: 2.5,
            misalignment_deg: 0.0,
            radio: RadioParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("cannot parse scenario config: {e}")))
    }
}

/// One frozen snapshot of node positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub bs_pos: Point3,
    pub uav_pos: Point3,
    /// MR positions ordered by increasing along-track coordinate.
    pub mr_pos: Vec<Point3>,
    pub train_length_m: f64,
    pub params: RadioParams,
    pub alignment: AlignmentModel,
}

impl Scenario {
    /// Assembles a scenario from explicit positions, checking its invariants.
    pub fn new(
        bs_pos: Point3,
        uav_pos: Point3,
        mr_pos: Vec<Point3>,
        train_length_m: f64,
        params: RadioParams,
    ) -> Result<Self> {
        params.validate()?;
        if mr_pos.is_empty() {
            return Err(Error::InvalidConfig("at least one MR is required".into()));
        }
        if mr_pos.windows(2).any(|w| w[1].x <= w[0].x) {
            return Err(Error::InvalidConfig(
                "MR positions must strictly increase along the track".into(),
            ));
        }
        let heights = mr_pos.iter().map(|p| p.z).chain([bs_pos.z, uav_pos.z]);
        if heights.clone().any(|z| !(z >= 0.0)) {
            return Err(Error::InvalidConfig("node heights must be nonnegative".into()));
        }
        Ok(Scenario {
            bs_pos,
            uav_pos,
            mr_pos,
            train_length_m,
            params,
            alignment: AlignmentModel::Boresight,
        })
    }

    pub fn with_alignment(mut self, alignment: AlignmentModel) -> Self {
        self.alignment = alignment;
        self
    }

    pub fn mr_count(&self) -> usize {
        self.mr_pos.len()
    }
}

/// Places F MRs at the centres of F equal train segments, the BS beside the
/// track and the UAV above the centerline ahead of the locomotive.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    if config.mr_count == 0 {
        return Err(Error::InvalidConfig("mr_count must be at least 1".into()));
    }
    if !(config.train_length_m > 0.0 && config.train_length_m.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "train_length_m must be positive, got {}",
            config.train_length_m
        )));
    }
    for (name, h) in [
        ("bs_height_m", config.bs_height_m),
        ("uav_height_m", config.uav_height_m),
        ("mr_height_m", config.mr_height_m),
    ] {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be nonnegative, got {h}")));
        }
    }
    if !(0.0..=180.0).contains(&config.misalignment_deg) {
        return Err(Error::InvalidConfig(format!(
            "misalignment_deg must lie in [0, 180], got {}",
            config.misalignment_deg
        )));
    }

    let length = config.train_length_m;
    let spacing = length / config.mr_count as f64;
    let mr_pos = (0..config.mr_count)
        .map(|i| Point3::new((i as f64 + 0.5) * spacing, 0.0, config.mr_height_m))
        .collect();
    let bs_pos = Point3::new(length + config.bs_ahead_m, config.bs_offset_m, config.bs_height_m);
    let uav_pos = Point3::new(length + config.uav_ahead_m, 0.0, config.uav_height_m);

    let alignment = if config.misalignment_deg > 0.0 {
        AlignmentModel::Misaligned {
            tx_deg: config.misalignment_deg,
            rx_deg: config.misalignment_deg,
        }
    } else {
        AlignmentModel::Boresight
    };
    Ok(Scenario::new(bs_pos, uav_pos, mr_pos, length, config.radio.clone())?.with_alignment(alignment))
}

/// A downlink demand from the BS to one MR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: usize,
    pub dest_mr: usize,
    pub qos_bps: f64,
    /// Linear SINR threshold.
    pub sinr_min: f64,
}

/// Everything one superframe needs: geometry, demands and the blocked MRs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub scenario: Scenario,
    pub flows: Vec<Flow>,
    pub blocked: BTreeSet<usize>,
    pub total_slots: u64,
    pub seed: u64,
}

impl Instance {
    pub fn new(
        scenario: Scenario,
        flows: Vec<Flow>,
        blocked: BTreeSet<usize>,
        total_slots: u64,
        seed: u64,
    ) -> Result<Self> {
        let count = scenario.mr_count();
        if let Some(&b) = blocked.iter().find(|&&b| b >= count) {
            return Err(Error::InvalidInput(format!("blocked MR {b} out of range 0..{count}")));
        }
        for flow in &flows {
            if flow.dest_mr >= count {
                return Err(Error::InvalidInput(format!(
                    "flow {} targets MR {} out of range 0..{count}",
                    flow.id, flow.dest_mr
                )));
            }
            if !(flow.qos_bps > 0.0) || !(flow.sinr_min >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "flow {} needs positive QoS and nonnegative SINR threshold",
                    flow.id
                )));
            }
        }
        Ok(Instance {
            scenario,
            flows,
            blocked,
            total_slots,
            seed,
        })
    }

    pub fn is_blocked(&self, mr: usize) -> bool {
        self.blocked.contains(&mr)
    }
}

/// Parameters of the random demand drawn for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandConfig {
    pub flow_count: usize,
    pub blocked_count: usize,
    /// Closed interval the per-flow QoS rates are drawn from (bit/s).
    pub qos_range_bps: (f64, f64),
    pub sinr_min: f64,
    pub total_slots: u64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            flow_count: 16,
            blocked_count: 0,
            qos_range_bps: (10e6, 40e6),
            sinr_min: 7e4,
            total_slots: 2400,
        }
    }
}

/// Draws flow destinations, QoS rates and the blocked set from `seed`.
///
/// Destinations are distinct MRs drawn without replacement and listed in
/// track order; flow ids follow that order.
pub fn sample_instance(scenario: &Scenario, demand: &DemandConfig, seed: u64) -> Result<Instance> {
    let count = scenario.mr_count();
    if demand.flow_count > count {
        return Err(Error::InvalidConfig(format!(
            "flow_count {} exceeds MR count {count}",
            demand.flow_count
        )));
    }
    if demand.blocked_count > count {
        return Err(Error::InvalidConfig(format!(
            "blocked_count {} exceeds MR count {count}",
            demand.blocked_count
        )));
    }
    let (lo, hi) = demand.qos_range_bps;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid QoS range [{lo}, {hi}]")));
    }
    if !(demand.sinr_min >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sinr_min must be nonnegative, got {}",
            demand.sinr_min
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dests = index::sample(&mut rng, count, demand.flow_count).into_vec();
    dests.sort_unstable();
    let flows = dests
        .into_iter()
        .enumerate()
        .map(|(id, dest_mr)| Flow {
            id,
            dest_mr,
            qos_bps: if hi > lo { rng.random_range(lo..=hi) } else { lo },
            sinr_min: demand.sinr_min,
        })
        .collect();
    let blocked = index::sample(&mut rng, count, demand.blocked_count)
        .into_iter()
        .collect();
    Instance::new(scenario.clone(), flows, blocked, demand.total_slots, seed)
}
