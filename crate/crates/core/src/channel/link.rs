use serde::{Deserialize, Serialize};

use super::antenna::AntennaPattern;
use crate::error::{Error, Result};
use crate::scenario::{distance, Flow, Point3, RadioParams, Scenario};
use crate::units::{dbm_to_mw, SPEED_OF_LIGHT};

/// Beam pointing model applied to every link.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum AlignmentModel {
    /// Both ends steer exactly at each other and see the boresight gain.
    #[default]
    Boresight,
    /// Fixed pointing errors at the transmitter and the receiver, in degrees.
    Misaligned { tx_deg: f64, rx_deg: f64 },
}

impl AlignmentModel {
    fn gains_linear(self, pattern: &AntennaPattern) -> Result<(f64, f64)> {
        match self {
            AlignmentModel::Boresight => {
                let g = pattern.gain_linear(0.0)?;
                Ok((g, g))
            }
            AlignmentModel::Misaligned { tx_deg, rx_deg } => {
                Ok((pattern.gain_linear(tx_deg)?, pattern.gain_linear(rx_deg)?))
            }
        }
    }
}

/// Free-space constant (lambda / 4 pi)^2.
pub fn friis_constant(params: &RadioParams) -> f64 {
    let lambda = SPEED_OF_LIGHT / params.carrier_freq_hz;
    (lambda / (4.0 * std::f64::consts::PI)).powi(2)
}

/// Received power in mW over a line-of-sight link.
pub fn received_power_mw(
    tx_pos: Point3,
    rx_pos: Point3,
    params: &RadioParams,
    alignment: AlignmentModel,
) -> Result<f64> {
    let d = distance(tx_pos, rx_pos);
    if !(d > 0.0) {
        return Err(Error::Domain("transmitter and receiver coincide".into()));
    }
    let pattern = AntennaPattern::new(params.half_power_beamwidth_deg)?;
    let (gt, gr) = alignment.gains_linear(&pattern)?;
    Ok(friis_received_mw(gt, gr, d, params))
}

/// k0 * Pt * Gt * Gr * d^-alpha with linear gains.
pub fn friis_received_mw(gt: f64, gr: f64, distance_m: f64, params: &RadioParams) -> f64 {
    friis_constant(params) * params.transmit_power_mw * gt * gr * distance_m.powf(-params.path_loss_exponent)
}

/// Thermal noise power over the channel bandwidth, in mW.
pub fn noise_power_mw(params: &RadioParams) -> f64 {
    dbm_to_mw(params.noise_psd_dbm_per_mhz) * params.bandwidth_hz / 1e6
}

/// Residual full-duplex self-interference at a relaying receiver, in mW.
pub fn si_power_mw(params: &RadioParams) -> f64 {
    params.si_cancellation * params.transmit_power_mw
}

/// Shannon rate scaled by the transceiver efficiency.
pub fn shannon_rate_bps(sinr: f64, params: &RadioParams) -> f64 {
    params.transceiver_efficiency * params.bandwidth_hz * (1.0 + sinr).log2()
}

/// Budget of a single hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopBudget {
    pub received_power_mw: f64,
    pub noise_power_mw: f64,
    /// Whether the receiver is also transmitting (first hop of a relay).
    pub si_flag: bool,
    pub si_power_mw: f64,
    pub sinr: f64,
    pub rate_bps: f64,
}

impl HopBudget {
    pub fn from_received(received_power_mw: f64, si_flag: bool, params: &RadioParams) -> Self {
        let noise_power_mw = noise_power_mw(params);
        let si_power_mw = si_power_mw(params);
        let interference = if si_flag { si_power_mw } else { 0.0 };
        let sinr = received_power_mw / (noise_power_mw + interference);
        HopBudget {
            received_power_mw,
            noise_power_mw,
            si_flag,
            si_power_mw,
            sinr,
            rate_bps: shannon_rate_bps(sinr, params),
        }
    }

    pub fn quality(&self) -> LinkQuality {
        LinkQuality {
            sinr: self.sinr,
            rate_bps: self.rate_bps,
        }
    }
}

pub fn evaluate_hop(tx: Point3, rx: Point3, si_flag: bool, scenario: &Scenario) -> Result<HopBudget> {
    let p = received_power_mw(tx, rx, &scenario.params, scenario.alignment)?;
    Ok(HopBudget::from_received(p, si_flag, &scenario.params))
}

/// End-to-end SINR and rate of a transmission mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkQuality {
    pub sinr: f64,
    pub rate_bps: f64,
}

impl LinkQuality {
    pub const UNAVAILABLE: LinkQuality = LinkQuality {
        sinr: 0.0,
        rate_bps: 0.0,
    };

    pub fn is_available(&self) -> bool {
        self.rate_bps > 0.0
    }

    pub fn meets(&self, sinr_min: f64, rate_min_bps: f64) -> bool {
        self.sinr >= sinr_min && self.rate_bps >= rate_min_bps
    }

    /// Elementwise minimum: a two-hop link is as good as its worse hop.
    pub fn min(self, other: LinkQuality) -> LinkQuality {
        LinkQuality {
            sinr: self.sinr.min(other.sinr),
            rate_bps: self.rate_bps.min(other.rate_bps),
        }
    }
}

/// BS to destination MR, no self-interference.
pub fn evaluate_direct(flow: &Flow, scenario: &Scenario) -> Result<HopBudget> {
    evaluate_hop(scenario.bs_pos, scenario.mr_pos[flow.dest_mr], false, scenario)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelayNode {
    LeftMr,
    RightMr,
    Uav,
}

impl RelayNode {
    pub fn position(self, dest_mr: usize, scenario: &Scenario) -> Option<Point3> {
        match self {
            RelayNode::LeftMr => dest_mr.checked_sub(1).map(|i| scenario.mr_pos[i]),
            RelayNode::RightMr => scenario.mr_pos.get(dest_mr + 1).copied(),
            RelayNode::Uav => Some(scenario.uav_pos),
        }
    }
}

/// Both hops of a relayed flow and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayEvaluation {
    /// `None` when the relay node does not exist (edge MRs).
    pub hops: Option<(HopBudget, HopBudget)>,
    pub combined: LinkQuality,
}

/// First hop BS to relay carries self-interference, second hop relay to
/// destination does not. The relay transmits with the same power as the BS.
pub fn evaluate_relay(flow: &Flow, relay: RelayNode, scenario: &Scenario) -> Result<RelayEvaluation> {
    let Some(relay_pos) = relay.position(flow.dest_mr, scenario) else {
        return Ok(RelayEvaluation {
            hops: None,
            combined: LinkQuality::UNAVAILABLE,
        });
    };
    let hop1 = evaluate_hop(scenario.bs_pos, relay_pos, true, scenario)?;
    let hop2 = evaluate_hop(relay_pos, scenario.mr_pos[flow.dest_mr], false, scenario)?;
    Ok(RelayEvaluation {
        hops: Some((hop1, hop2)),
        combined: hop1.quality().min(hop2.quality()),
    })
}
