//! Reference schemes: the exhaustive optimum and the two benchmark
//! heuristics (no UAV relay, random relay), plus the relative deviation of a
//! heuristic from the optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockage::{build_graph, BlockageGraph};
use crate::channel::ModeEvaluation;
use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::pipeline::Outcome;
use crate::relay::{assignment_satisfies_p1_constraints, decide, min_required_rate, FlowDecision, ModeAssignment};
use crate::scenario::Instance;
use crate::scheduler::{completions_sorted, demand_bits, run_jobs, schedule, slots_needed, Job};

/// Default flow-count limit of the exhaustive search.
pub const ORACLE_FLOW_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Skip subtrees whose optimistic bound cannot beat the incumbent.
    /// Without pruning every one of the 5^F assignments is enumerated and
    /// checked.
    pub prune: bool,
    pub flow_limit: usize,
    /// Run even when the flow count exceeds `flow_limit`.
    pub allow_oversize: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            prune: true,
            flow_limit: ORACLE_FLOW_LIMIT,
            allow_oversize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_count: usize,
    pub best_throughput_bits: f64,
    pub best_assignment: ModeAssignment,
    /// Search nodes visited (pruned search) or assignments enumerated.
    pub nodes_explored: u64,
}

/// A feasible mode of one flow with the slots it needs.
#[derive(Debug, Clone, Copy)]
struct Choice {
    mode: Mode,
    decision: FlowDecision,
    slots: u64,
    /// Bits sent if the flow is served in full.
    full_bits: f64,
}

struct Search<'a> {
    instance: &'a Instance,
    options: Vec<Vec<Choice>>,
    /// Smallest slot count among each flow's options, if any.
    min_slots: Vec<Option<u64>>,
    /// Suffix sums of the largest per-flow `full_bits`.
    max_bits_suffix: Vec<f64>,
    picks: Vec<usize>,
    best: Option<(usize, f64, Vec<usize>)>,
    nodes: u64,
}

impl Search<'_> {
    fn jobs(&self) -> Vec<Job> {
        let params = &self.instance.scenario.params;
        self.picks
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| {
                let c = self.options[i][p];
                (c.mode != Mode::Abandoned).then(|| Job {
                    index: i,
                    slots: c.slots,
                    rate_bps: c.decision.rate_bps,
                    demand_bits: demand_bits(self.instance.flows[i].qos_bps, self.instance.total_slots, params),
                })
            })
            .collect()
    }

    fn leaf(&mut self) {
        let mut slots: Vec<u64> = self
            .picks
            .iter()
            .enumerate()
            .map(|(i, &p)| self.options[i][p])
            .filter(|c| c.mode != Mode::Abandoned)
            .map(|c| c.slots)
            .collect();
        slots.sort_unstable();
        let count = completions_sorted(&slots, self.instance.total_slots);
        if self.best.as_ref().is_some_and(|(c, _, _)| count < *c) {
            return;
        }
        let result = run_jobs(
            self.jobs(),
            self.instance.flows.len(),
            self.instance.total_slots,
            self.instance.scenario.params.slot_duration_s,
        );
        let better = match &self.best {
            None => true,
            Some((c, t, _)) => count > *c || result.throughput_bits > *t,
        };
        if better {
            self.best = Some((count, result.throughput_bits, self.picks.clone()));
        }
    }

    /// Whether no completion of the current prefix can replace the incumbent.
    fn hopeless(&self, depth: usize) -> bool {
        let Some((best_count, best_bits, _)) = &self.best else {
            return false;
        };
        let mut slots: Vec<u64> = self.picks[..depth]
            .iter()
            .enumerate()
            .map(|(i, &p)| self.options[i][p])
            .filter(|c| c.mode != Mode::Abandoned)
            .map(|c| c.slots)
            .chain(self.min_slots[depth..].iter().flatten().copied())
            .collect();
        slots.sort_unstable();
        let count_bound = completions_sorted(&slots, self.instance.total_slots);
        if count_bound != *best_count {
            return count_bound < *best_count;
        }
        let bits_bound: f64 = self.picks[..depth]
            .iter()
            .enumerate()
            .map(|(i, &p)| self.options[i][p].full_bits)
            .sum::<f64>()
            + self.max_bits_suffix[depth];
        // The slack keeps summation-order rounding from pruning an equal.
        bits_bound * (1.0 + 1e-9) < *best_bits
    }

    fn descend(&mut self, depth: usize) {
        self.nodes += 1;
        if depth == self.picks.len() {
            self.leaf();
            return;
        }
        if self.hopeless(depth) {
            return;
        }
        for p in 0..self.options[depth].len() {
            self.picks[depth] = p;
            self.descend(depth + 1);
        }
    }
}

/// Feasible choices of every flow, in mode order, always ending with
/// `Abandoned`.
fn flow_options(instance: &Instance, graph: &BlockageGraph, evaluations: &[ModeEvaluation]) -> Vec<Vec<Choice>> {
    let params = &instance.scenario.params;
    instance
        .flows
        .iter()
        .zip(evaluations)
        .map(|(flow, eval)| {
            let rate_min = min_required_rate(flow, instance.total_slots, params);
            let forbidden = graph.forbidden_modes(flow.dest_mr);
            let mut choices: Vec<Choice> = Mode::TRANSMIT
                .into_iter()
                .filter(|&m| !forbidden.contains(m))
                .filter_map(|mode| {
                    let q = eval.get(mode);
                    if !(q.is_available() && q.meets(flow.sinr_min, rate_min)) {
                        return None;
                    }
                    let slots = slots_needed(flow.qos_bps, q.rate_bps, instance.total_slots, params)?;
                    Some(Choice {
                        mode,
                        decision: FlowDecision::new(flow.id, mode, q),
                        slots,
                        full_bits: slots as f64 * q.rate_bps * params.slot_duration_s,
                    })
                })
                .collect();
            choices.push(Choice {
                mode: Mode::Abandoned,
                decision: FlowDecision::abandoned(flow.id),
                slots: 0,
                full_bits: 0.0,
            });
            choices
        })
        .collect()
}

/// Maximum number of completed flows over every feasible mode assignment.
///
/// Each assignment is scored by the same ascending-slot scheduler as the
/// heuristic. Ties on the count go to the higher throughput, then to the
/// lexicographically first assignment in mode order.
pub fn exhaustive_optimal(
    instance: &Instance,
    graph: &BlockageGraph,
    evaluations: &[ModeEvaluation],
    options: OracleOptions,
) -> Result<OracleResult> {
    let n = instance.flows.len();
    if n > options.flow_limit && !options.allow_oversize {
        return Err(Error::SizeGuard {
            flows: n,
            limit: options.flow_limit,
        });
    }
    if evaluations.len() != n {
        return Err(Error::InvalidInput(format!("{} evaluations for {n} flows", evaluations.len())));
    }
    let result = if options.prune {
        search(instance, graph, evaluations)
    } else {
        enumerate(instance, graph, evaluations)
    };
    debug_assert!(assignment_satisfies_p1_constraints(instance, graph, &result.best_assignment));
    Ok(result)
}

fn search(instance: &Instance, graph: &BlockageGraph, evaluations: &[ModeEvaluation]) -> OracleResult {
    let options = flow_options(instance, graph, evaluations);
    let n = options.len();
    let min_slots = options
        .iter()
        .map(|o| o.iter().filter(|c| c.mode != Mode::Abandoned).map(|c| c.slots).min())
        .collect();
    let mut max_bits_suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let top = options[i].iter().map(|c| c.full_bits).fold(0.0, f64::max);
        max_bits_suffix[i] = max_bits_suffix[i + 1] + top;
    }
    let mut s = Search {
        instance,
        options,
        min_slots,
        max_bits_suffix,
        picks: vec![0; n],
        best: None,
        nodes: 0,
    };
    s.descend(0);
    let (best_count, best_throughput_bits, picks) = s.best.expect("the all-abandoned assignment is always feasible");
    let decisions = picks.iter().enumerate().map(|(i, &p)| s.options[i][p].decision).collect();
    OracleResult {
        best_count,
        best_throughput_bits,
        best_assignment: ModeAssignment { decisions },
        nodes_explored: s.nodes,
    }
}

/// Plain enumeration of all 5^F mode vectors, each checked against the
/// constraints and scheduled.
fn enumerate(instance: &Instance, graph: &BlockageGraph, evaluations: &[ModeEvaluation]) -> OracleResult {
    let n = instance.flows.len();
    let mut digits = vec![0usize; n];
    let mut best: Option<OracleResult> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let modes: Vec<Mode> = digits.iter().map(|&d| Mode::ALL[d]).collect();
        let assignment = ModeAssignment::from_modes(instance, evaluations, &modes);
        if assignment_satisfies_p1_constraints(instance, graph, &assignment) {
            let r = schedule(&assignment, instance);
            let better = best.as_ref().is_none_or(|b| {
                r.flows_completed > b.best_count
                    || (r.flows_completed == b.best_count && r.throughput_bits > b.best_throughput_bits)
            });
            if better {
                best = Some(OracleResult {
                    best_count: r.flows_completed,
                    best_throughput_bits: r.throughput_bits,
                    best_assignment: assignment,
                    nodes_explored: 0,
                });
            }
        }
        // Odometer with the last flow turning fastest.
        let mut i = n;
        loop {
            if i == 0 {
                let mut b = best.expect("the all-abandoned assignment is always feasible");
                b.nodes_explored = visited;
                return b;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < Mode::ALL.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Benchmark without the UAV relay: the heuristic with the UAV mode
/// reported unavailable for every flow.
pub fn mra(instance: &Instance, evaluations: &[ModeEvaluation]) -> Result<Outcome> {
    let graph = build_graph(&instance.blocked, instance.scenario.mr_count())?;
    let masked: Vec<ModeEvaluation> = evaluations.iter().map(|e| e.masked(Mode::Uav)).collect();
    let (assignment, _) = decide(instance, &graph, &masked);
    let schedule = schedule(&assignment, instance);
    Ok(Outcome { assignment, schedule })
}

/// Benchmark with random relay choice: each flow takes a mode drawn
/// uniformly from those the graph and the train ends allow, without looking
/// at link quality, and is abandoned if that mode misses a threshold.
pub fn ra(instance: &Instance, graph: &BlockageGraph, evaluations: &[ModeEvaluation], seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = &instance.scenario.params;
    let decisions = instance
        .flows
        .iter()
        .zip(evaluations)
        .map(|(flow, eval)| {
            let allowed: Vec<Mode> = graph.allowed_modes(flow.dest_mr).iter().collect();
            let mode = allowed[rng.random_range(0..allowed.len())];
            let q = eval.get(mode);
            let rate_min = min_required_rate(flow, instance.total_slots, params);
            if q.is_available() && q.meets(flow.sinr_min, rate_min) {
                FlowDecision::new(flow.id, mode, q)
            } else {
                FlowDecision::abandoned(flow.id)
            }
        })
        .collect();
    let assignment = ModeAssignment { decisions };
    let schedule = schedule(&assignment, instance);
    Outcome { assignment, schedule }
}

/// Mean relative gap `(os - h) / os` over paired points.
///
/// Points with a zero optimum are skipped with a warning.
///
/// ```
/// use trainlink::baselines::average_deviation;
///
/// let d = average_deviation(&[10.0, 8.0], &[10.0, 6.0])?;
/// assert!((d - 0.125).abs() < 1e-12);
/// # Ok::<(), trainlink::Error>(())
/// ```
pub fn average_deviation(os_counts: &[f64], heuristic_counts: &[f64]) -> Result<f64> {
    if os_counts.len() != heuristic_counts.len() {
        return Err(Error::InvalidInput(format!(
            "{} optimum points against {} heuristic points",
            os_counts.len(),
            heuristic_counts.len()
        )));
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    for (i, (&os, &h)) in os_counts.iter().zip(heuristic_counts).enumerate() {
        if os <= 0.0 {
            log::warn!("skipping point {i}: optimum completes no flow");
            continue;
        }
        sum += (os - h) / os;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InvalidInput("no point with a positive optimum".into()));
    }
    Ok(sum / used as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{prepare, umra};
    use crate::scenario::{build_scenario, sample_instance, DemandConfig, Flow, ScenarioConfig};

    fn instance(mr_count: usize, demand: DemandConfig, seed: u64) -> Instance {
        let s = build_scenario(&ScenarioConfig { mr_count, ..Default::default() }).unwrap();
        sample_instance(&s, &demand, seed).unwrap()
    }

    #[test]
    fn single_direct_flow() {
        let inst = instance(1, DemandConfig { flow_count: 1, ..Default::default() }, 3);
        let p = prepare(&inst).unwrap();
        let r = exhaustive_optimal(&inst, &p.graph, &p.evaluations, OracleOptions::default()).unwrap();
        assert_eq!(r.best_count, 1);
        assert_eq!(r.best_assignment.modes(), vec![Mode::Direct]);
    }

    #[test]
    fn no_flows() {
        let inst = instance(4, DemandConfig { flow_count: 0, ..Default::default() }, 3);
        let p = prepare(&inst).unwrap();
        for prune in [true, false] {
            let r = exhaustive_optimal(&inst, &p.graph, &p.evaluations, OracleOptions { prune, ..Default::default() })
                .unwrap();
            assert_eq!(r.best_count, 0);
            assert!(r.best_assignment.is_empty());
        }
    }

    #[test]
    fn size_guard() {
        let inst = instance(13, DemandConfig { flow_count: 13, ..Default::default() }, 1);
        let p = prepare(&inst).unwrap();
        let err = exhaustive_optimal(&inst, &p.graph, &p.evaluations, OracleOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SizeGuard { flows: 13, limit: 12 }));
    }

    #[test]
    fn zero_slot_budget_completes_nothing() {
        let inst = instance(5, DemandConfig { flow_count: 5, total_slots: 0, ..Default::default() }, 1);
        let p = prepare(&inst).unwrap();
        let r = exhaustive_optimal(&inst, &p.graph, &p.evaluations, OracleOptions::default()).unwrap();
        assert_eq!(r.best_count, 0);
        assert!(r.best_assignment.modes().iter().all(|&m| m == Mode::Abandoned));
    }

    #[test]
    fn mra_equals_umra_without_blockage() {
        let inst = instance(16, DemandConfig::default(), 5);
        let p = prepare(&inst).unwrap();
        assert_eq!(mra(&inst, &p.evaluations).unwrap(), umra(&inst).unwrap());
    }

    #[test]
    fn mra_loses_everything_when_all_blocked() {
        let inst = instance(8, DemandConfig { flow_count: 8, blocked_count: 8, ..Default::default() }, 5);
        let p = prepare(&inst).unwrap();
        let out = mra(&inst, &p.evaluations).unwrap();
        assert_eq!(out.flows_completed(), 0);
        assert!(umra(&inst).unwrap().flows_completed() > 0);
    }

    #[test]
    fn adjacent_interior_blockage_strands_mra() {
        // MR2 and MR3 of five blocked, with one flow to each: each one's only
        // surviving neighbor relay leads through the other side, and with
        // the outer neighbors blocked as well nothing but the UAV is left.
        let s = build_scenario(&ScenarioConfig { mr_count: 5, ..Default::default() }).unwrap();
        let flows = vec![
            Flow { id: 0, dest_mr: 1, qos_bps: 20e6, sinr_min: 0.0 },
            Flow { id: 1, dest_mr: 2, qos_bps: 20e6, sinr_min: 0.0 },
        ];
        let inst = Instance::new(s, flows, [0, 1, 2, 3].into(), 2400, 0).unwrap();
        let p = prepare(&inst).unwrap();
        let m = mra(&inst, &p.evaluations).unwrap();
        assert_eq!(m.assignment.modes(), vec![Mode::Abandoned, Mode::Abandoned]);
        let u = umra(&inst).unwrap();
        assert_eq!(u.assignment.modes(), vec![Mode::Uav, Mode::Uav]);
        assert_eq!(u.flows_completed(), 2);
    }

    #[test]
    fn ra_is_seeded() {
        let inst = instance(16, DemandConfig { blocked_count: 8, ..Default::default() }, 9);
        let p = prepare(&inst).unwrap();
        let a = ra(&inst, &p.graph, &p.evaluations, 42);
        assert_eq!(a, ra(&inst, &p.graph, &p.evaluations, 42));
        let differs = (0..20).any(|s| ra(&inst, &p.graph, &p.evaluations, s).assignment != a.assignment);
        assert!(differs);
    }

    #[test]
    fn ra_with_single_option_matches_umra() {
        // Both neighbors blocked: only the UAV remains for MR3.
        let s = build_scenario(&ScenarioConfig { mr_count: 5, ..Default::default() }).unwrap();
        let flows = vec![Flow { id: 0, dest_mr: 2, qos_bps: 20e6, sinr_min: 0.0 }];
        let inst = Instance::new(s, flows, [1, 2, 3].into(), 2400, 0).unwrap();
        let p = prepare(&inst).unwrap();
        let u = umra(&inst).unwrap();
        for seed in 0..10 {
            assert_eq!(ra(&inst, &p.graph, &p.evaluations, seed), u);
        }
    }

    #[test]
    fn deviation_examples() {
        assert_eq!(average_deviation(&[5.0, 7.0], &[5.0, 7.0]).unwrap(), 0.0);
        assert!((average_deviation(&[10.0], &[9.0]).unwrap() - 0.1).abs() < 1e-12);
        assert!((average_deviation(&[10.0, 0.0], &[9.0, 0.0]).unwrap() - 0.1).abs() < 1e-12);
        assert!(average_deviation(&[1.0], &[]).is_err());
        assert!(average_deviation(&[0.0], &[0.0]).is_err());
    }
}
