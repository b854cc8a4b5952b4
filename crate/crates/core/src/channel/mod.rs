//! Link budgets: antenna gains, received power, noise, full-duplex
//! self-interference, SINR and achievable rate for each transmission mode.

mod antenna;
pub mod doppler;
mod link;

use serde::{Deserialize, Serialize};

pub use antenna::{antenna_gain_db, AntennaPattern};
pub use doppler::{doppler_from_relative, doppler_shift_hz, max_doppler_hz};
pub use link::{
    evaluate_direct, evaluate_hop, evaluate_relay, friis_constant, friis_received_mw, noise_power_mw, received_power_mw,
    shannon_rate_bps, si_power_mw, AlignmentModel, HopBudget, LinkQuality, RelayEvaluation, RelayNode,
};

use crate::blockage::BlockageGraph;
use crate::error::Result;
use crate::mode::Mode;
use crate::scenario::{Flow, Scenario};

/// SINR and rate of all four transmission modes for one flow.
///
/// Modes that are unavailable or forbidden report zero for both.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeEvaluation {
    pub direct: LinkQuality,
    pub left: LinkQuality,
    pub right: LinkQuality,
    pub uav: LinkQuality,
}

impl ModeEvaluation {
    pub fn get(&self, mode: Mode) -> LinkQuality {
        match mode {
            Mode::Direct => self.direct,
            Mode::Left => self.left,
            Mode::Right => self.right,
            Mode::Uav => self.uav,
            Mode::Abandoned => LinkQuality::UNAVAILABLE,
        }
    }

    fn slot(&mut self, mode: Mode) -> Option<&mut LinkQuality> {
        match mode {
            Mode::Direct => Some(&mut self.direct),
            Mode::Left => Some(&mut self.left),
            Mode::Right => Some(&mut self.right),
            Mode::Uav => Some(&mut self.uav),
            Mode::Abandoned => None,
        }
    }

    /// Copy with `mode` reported as unavailable.
    pub fn masked(mut self, mode: Mode) -> Self {
        if let Some(q) = self.slot(mode) {
            *q = LinkQuality::UNAVAILABLE;
        }
        self
    }
}

/// Evaluates every mode of `flow`, zeroing those the blockage graph forbids.
pub fn evaluate_all_modes(flow: &Flow, scenario: &Scenario, graph: &BlockageGraph) -> Result<ModeEvaluation> {
    let forbidden = graph.forbidden_modes(flow.dest_mr);
    let mut eval = ModeEvaluation {
        direct: evaluate_direct(flow, scenario)?.quality(),
        left: evaluate_relay(flow, RelayNode::LeftMr, scenario)?.combined,
        right: evaluate_relay(flow, RelayNode::RightMr, scenario)?.combined,
        uav: evaluate_relay(flow, RelayNode::Uav, scenario)?.combined,
    };
    for mode in forbidden.iter() {
        eval = eval.masked(mode);
    }
    Ok(eval)
}
