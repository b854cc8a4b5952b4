//! Per-flow transmission mode selection.
//!
//! An unblocked flow whose direct link meets both the SINR threshold and the
//! required rate goes direct. Every other flow takes the highest-rate relay
//! mode the blockage graph still allows, provided it meets both thresholds;
//! otherwise the flow is abandoned.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::blockage::BlockageGraph;
use crate::channel::{LinkQuality, ModeEvaluation};
use crate::mode::Mode;
use crate::scenario::{Flow, Instance, RadioParams};

/// Rate a flow needs so that its demand for the whole superframe fits into
/// the transmission slots. Infinite when there are no slots.
pub fn min_required_rate(flow: &Flow, total_slots: u64, params: &RadioParams) -> f64 {
    if total_slots == 0 {
        return f64::INFINITY;
    }
    let tx_time = total_slots as f64 * params.slot_duration_s;
    flow.qos_bps * (params.sched_phase_s + tx_time) / tx_time
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowDecision {
    pub flow_id: usize,
    pub mode: Mode,
    pub sinr: f64,
    pub rate_bps: f64,
}

impl FlowDecision {
    pub fn abandoned(flow_id: usize) -> Self {
        FlowDecision {
            flow_id,
            mode: Mode::Abandoned,
            sinr: 0.0,
            rate_bps: 0.0,
        }
    }

    pub fn new(flow_id: usize, mode: Mode, quality: LinkQuality) -> Self {
        if mode == Mode::Abandoned {
            return Self::abandoned(flow_id);
        }
        FlowDecision {
            flow_id,
            mode,
            sinr: quality.sinr,
            rate_bps: quality.rate_bps,
        }
    }
}

/// One decision per flow, in the instance's flow order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeAssignment {
    pub decisions: Vec<FlowDecision>,
}

impl ModeAssignment {
    /// Builds an assignment from a mode per flow, reading SINR and rate from
    /// the evaluations.
    pub fn from_modes(instance: &Instance, evaluations: &[ModeEvaluation], modes: &[Mode]) -> Self {
        let decisions = instance
            .flows
            .iter()
            .zip(evaluations)
            .zip(modes)
            .map(|((flow, eval), &mode)| FlowDecision::new(flow.id, mode, eval.get(mode)))
            .collect();
        ModeAssignment { decisions }
    }

    pub fn modes(&self) -> Vec<Mode> {
        self.decisions.iter().map(|d| d.mode).collect()
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn scheduled_count(&self) -> usize {
        self.decisions.iter().filter(|d| d.mode != Mode::Abandoned).count()
    }

    pub fn sets(&self) -> ModeSets {
        let mut sets = ModeSets::default();
        for d in &self.decisions {
            let set = match d.mode {
                Mode::Direct => &mut sets.direct,
                Mode::Left => &mut sets.left,
                Mode::Right => &mut sets.right,
                Mode::Uav => &mut sets.uav,
                Mode::Abandoned => &mut sets.abandoned,
            };
            set.insert(d.flow_id);
        }
        sets
    }
}

/// Flow ids grouped by the chosen mode.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModeSets {
    pub direct: BTreeSet<usize>,
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
    pub uav: BTreeSet<usize>,
    pub abandoned: BTreeSet<usize>,
}

/// Picks the mode of one flow.
///
/// Relay ties on rate go to the earlier of Left, Right, Uav.
pub fn decide_flow(
    flow: &Flow,
    eval: &ModeEvaluation,
    graph: &BlockageGraph,
    total_slots: u64,
    params: &RadioParams,
) -> FlowDecision {
    let rate_min = min_required_rate(flow, total_slots, params);
    let forbidden = graph.forbidden_modes(flow.dest_mr);

    if !graph.is_blocked(flow.dest_mr) && eval.direct.meets(flow.sinr_min, rate_min) {
        return FlowDecision::new(flow.id, Mode::Direct, eval.direct);
    }

    let mut best: Option<(Mode, LinkQuality)> = None;
    for mode in Mode::RELAY {
        let q = if forbidden.contains(mode) {
            LinkQuality::UNAVAILABLE
        } else {
            eval.get(mode)
        };
        if best.is_none_or(|(_, b)| q.rate_bps > b.rate_bps) {
            best = Some((mode, q));
        }
    }
    match best {
        Some((mode, q)) if q.is_available() && q.meets(flow.sinr_min, rate_min) => {
            FlowDecision::new(flow.id, mode, q)
        }
        _ => FlowDecision::abandoned(flow.id),
    }
}

/// Assigns a mode to every flow of the instance.
pub fn decide(
    instance: &Instance,
    graph: &BlockageGraph,
    evaluations: &[ModeEvaluation],
) -> (ModeAssignment, ModeSets) {
    assert_eq!(instance.flows.len(), evaluations.len(), "one evaluation per flow");
    let params = &instance.scenario.params;
    let decisions = instance
        .flows
        .iter()
        .zip(evaluations)
        .map(|(flow, eval)| decide_flow(flow, eval, graph, instance.total_slots, params))
        .collect();
    let assignment = ModeAssignment { decisions };
    let sets = assignment.sets();
    (assignment, sets)
}

/// Checks the structural and threshold constraints of the scheduling
/// problem, reporting the first violation found.
///
/// Structural rules are checked against the instance's blocked set directly
/// and, separately, against the graph.
pub fn check_constraints(
    instance: &Instance,
    graph: &BlockageGraph,
    assignment: &ModeAssignment,
) -> Result<(), String> {
    if assignment.decisions.len() != instance.flows.len() {
        return Err(format!(
            "{} decisions for {} flows",
            assignment.decisions.len(),
            instance.flows.len()
        ));
    }
    let count = instance.scenario.mr_count();
    let params = &instance.scenario.params;
    for (flow, d) in instance.flows.iter().zip(&assignment.decisions) {
        if d.flow_id != flow.id {
            return Err(format!("decision for flow {} listed at flow {}", d.flow_id, flow.id));
        }
        let m = flow.dest_mr;
        let blocked = |i: usize| instance.blocked.contains(&i);
        let structural = match d.mode {
            Mode::Direct if blocked(m) => Some("blocked MR cannot go direct"),
            Mode::Left if m == 0 => Some("first MR has no left relay"),
            Mode::Left if blocked(m - 1) => Some("left neighbor is blocked"),
            Mode::Right if m + 1 == count => Some("last MR has no right relay"),
            Mode::Right if blocked(m + 1) => Some("right neighbor is blocked"),
            _ => None,
        };
        if let Some(why) = structural {
            return Err(format!("flow {} in mode {}: {why}", flow.id, d.mode));
        }
        if d.mode != Mode::Abandoned && graph.forbidden_modes(m).contains(d.mode) {
            return Err(format!("flow {} uses mode {} forbidden by the graph", flow.id, d.mode));
        }
        if d.mode == Mode::Abandoned {
            if d.rate_bps != 0.0 || d.sinr != 0.0 {
                return Err(format!("abandoned flow {} carries a rate", flow.id));
            }
            continue;
        }
        let rate_min = min_required_rate(flow, instance.total_slots, params);
        if !(d.rate_bps > 0.0 && d.rate_bps >= rate_min) {
            return Err(format!(
                "flow {} rate {} below required {rate_min}",
                flow.id, d.rate_bps
            ));
        }
        if !(d.sinr >= flow.sinr_min) {
            return Err(format!(
                "flow {} SINR {} below threshold {}",
                flow.id, d.sinr, flow.sinr_min
            ));
        }
    }
    Ok(())
}

pub fn assignment_satisfies_p1_constraints(
    instance: &Instance,
    graph: &BlockageGraph,
    assignment: &ModeAssignment,
) -> bool {
    check_constraints(instance, graph, assignment).is_ok()
}
