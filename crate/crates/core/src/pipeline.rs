//! End-to-end runs of one instance: graph, link evaluation, mode decision
//! and scheduling.

use serde::{Deserialize, Serialize};

use crate::blockage::{build_graph, BlockageGraph};
use crate::channel::{evaluate_all_modes, ModeEvaluation};
use crate::error::Result;
use crate::relay::{decide, ModeAssignment, ModeSets};
use crate::scenario::Instance;
use crate::scheduler::{schedule, ScheduleResult};

/// Blockage graph and per-flow link evaluations of an instance.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub graph: BlockageGraph,
    /// One entry per flow; modes the graph forbids read as unavailable.
    pub evaluations: Vec<ModeEvaluation>,
}

pub fn prepare(instance: &Instance) -> Result<Prepared> {
    let graph = build_graph(&instance.blocked, instance.scenario.mr_count())?;
    let evaluations = instance
        .flows
        .iter()
        .map(|f| evaluate_all_modes(f, &instance.scenario, &graph))
        .collect::<Result<_>>()?;
    Ok(Prepared { graph, evaluations })
}

/// Link evaluations that ignore blockage. Only the train ends remove modes.
pub fn unmasked_evaluations(instance: &Instance) -> Result<Vec<ModeEvaluation>> {
    let open = build_graph(&Default::default(), instance.scenario.mr_count())?;
    instance
        .flows
        .iter()
        .map(|f| evaluate_all_modes(f, &instance.scenario, &open))
        .collect()
}

/// Mode assignment and schedule produced by one scheme on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub assignment: ModeAssignment,
    pub schedule: ScheduleResult,
}

impl Outcome {
    pub fn flows_completed(&self) -> usize {
        self.schedule.flows_completed
    }
}

/// Runs relay decision and scheduling on a prepared instance.
pub fn umra_prepared(instance: &Instance, prepared: &Prepared) -> (Outcome, ModeSets) {
    let (assignment, sets) = decide(instance, &prepared.graph, &prepared.evaluations);
    let schedule = schedule(&assignment, instance);
    (Outcome { assignment, schedule }, sets)
}

/// The full heuristic on one instance.
///
/// ```
/// use trainlink::pipeline::umra;
/// use trainlink::scenario::{build_scenario, sample_instance, DemandConfig, ScenarioConfig};
///
/// let scenario = build_scenario(&ScenarioConfig::default())?;
/// let instance = sample_instance(&scenario, &DemandConfig::default(), 7)?;
/// let outcome = umra(&instance)?;
/// assert_eq!(outcome.flows_completed(), 16);
/// # Ok::<(), trainlink::Error>(())
/// ```
pub fn umra(instance: &Instance) -> Result<Outcome> {
    let prepared = prepare(instance)?;
    Ok(umra_prepared(instance, &prepared).0)
}
