//! Serial TDMA scheduling of the assigned flows over one superframe.
//!
//! Flows are served one at a time in ascending order of the slots they need
//! (highest priority first). A flow occupies consecutive slots until its
//! residual traffic is exhausted, and the next flow starts in the following
//! slot. Service stops after the last slot of the superframe.

use serde::{Deserialize, Serialize};

use crate::mode::Mode;
use crate::relay::ModeAssignment;
use crate::scenario::{Instance, RadioParams};

/// Relative tolerance under which a slot count is treated as an exact
/// integer before taking the ceiling.
const SLOT_SNAP: f64 = 1e-9;

/// Bits a flow must move during one superframe.
pub fn demand_bits(qos_bps: f64, total_slots: u64, params: &RadioParams) -> f64 {
    qos_bps * params.superframe_s(total_slots)
}

/// Number of slots flow needs at `rate_bps`, or `None` for a zero rate.
///
/// Always at least 1 for a positive demand.
pub fn slots_needed(qos_bps: f64, rate_bps: f64, total_slots: u64, params: &RadioParams) -> Option<u64> {
    if !(rate_bps > 0.0) {
        return None;
    }
    let exact = demand_bits(qos_bps, total_slots, params) / (rate_bps * params.slot_duration_s);
    let nearest = exact.round();
    let slots = if (exact - nearest).abs() <= SLOT_SNAP * exact.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    Some((slots as u64).max(1))
}

/// Scheduling priority: the reciprocal of the slot count.
pub fn priority(slots: u64) -> f64 {
    assert!(slots >= 1, "a scheduled flow needs at least one slot");
    1.0 / slots as f64
}

/// A flow ready for scheduling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    /// Position of the flow in the instance.
    pub index: usize,
    pub slots: u64,
    pub rate_bps: f64,
    pub demand_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    /// Completion flag per flow, in instance order.
    pub completed: Vec<bool>,
    pub flows_completed: usize,
    /// Bits sent in every served slot, including the overshoot of a flow's
    /// last slot and the slots given to flows that did not finish.
    pub throughput_bits: f64,
    /// Bits that counted towards a flow's demand.
    pub delivered_bits: f64,
    pub slots_used: u64,
    /// Slots each scheduled flow needs; `None` for abandoned flows.
    pub per_flow_slots: Vec<Option<u64>>,
    /// Flow indices in serving order.
    pub order: Vec<usize>,
}

impl ScheduleResult {
    /// Throughput averaged over the superframe, in bit/s.
    pub fn throughput_bps(&self, total_slots: u64, params: &RadioParams) -> f64 {
        self.throughput_bits / params.superframe_s(total_slots)
    }
}

/// Serves `jobs` in ascending slot order (ties by index) within
/// `total_slots` slots of length `slot_s`.
pub fn run_jobs(mut jobs: Vec<Job>, flow_count: usize, total_slots: u64, slot_s: f64) -> ScheduleResult {
    jobs.sort_by_key(|j| (j.slots, j.index));
    let mut result = ScheduleResult {
        completed: vec![false; flow_count],
        flows_completed: 0,
        throughput_bits: 0.0,
        delivered_bits: 0.0,
        slots_used: 0,
        per_flow_slots: vec![None; flow_count],
        order: Vec::with_capacity(jobs.len()),
    };
    for job in &jobs {
        result.per_flow_slots[job.index] = Some(job.slots);
    }
    let mut slot = 0u64;
    for job in &jobs {
        if slot >= total_slots {
            break;
        }
        let served = job.slots.min(total_slots - slot);
        let sent = served as f64 * job.rate_bps * slot_s;
        slot += served;
        result.order.push(job.index);
        result.throughput_bits += sent;
        result.delivered_bits += sent.min(job.demand_bits);
        if served == job.slots {
            result.completed[job.index] = true;
            result.flows_completed += 1;
        }
    }
    result.slots_used = slot;
    result
}

/// Number of flows that finish when flows needing `slots` are served in
/// ascending order within `total_slots`. `slots` must be sorted.
pub fn completions_sorted(slots: &[u64], total_slots: u64) -> usize {
    let mut used = 0u64;
    slots
        .iter()
        .take_while(|&&s| {
            used += s;
            used <= total_slots
        })
        .count()
}

pub fn jobs_for(assignment: &ModeAssignment, instance: &Instance) -> Vec<Job> {
    let params = &instance.scenario.params;
    instance
        .flows
        .iter()
        .zip(&assignment.decisions)
        .enumerate()
        .filter(|(_, (_, d))| d.mode != Mode::Abandoned)
        .map(|(index, (flow, d))| Job {
            index,
            slots: slots_needed(flow.qos_bps, d.rate_bps, instance.total_slots, params)
                .expect("scheduled flows carry a positive rate"),
            rate_bps: d.rate_bps,
            demand_bits: demand_bits(flow.qos_bps, instance.total_slots, params),
        })
        .collect()
}

/// Schedules every non-abandoned flow of `assignment`.
pub fn schedule(assignment: &ModeAssignment, instance: &Instance) -> ScheduleResult {
    let jobs = jobs_for(assignment, instance);
    run_jobs(
        jobs,
        instance.flows.len(),
        instance.total_slots,
        instance.scenario.params.slot_duration_s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> RadioParams {
        RadioParams::default()
    }

    #[test]
    fn slots_reference() {
        // 10e6 * 44.05e-3 / (100e6 * 18e-6) = 244.72 by hand.
        assert_eq!(slots_needed(10e6, 100e6, 2400, &params()), Some(245));
        assert_eq!(slots_needed(10e6, 0.0, 2400, &params()), None);
        assert_eq!(slots_needed(1e-6, 1e9, 2400, &params()), Some(1));
    }

    #[test]
    fn required_rate_needs_exactly_all_slots() {
        for q in [10e6, 17.3e6, 33.33e6, 40e6] {
            for m in [1u64, 7, 1400, 2400, 9999] {
                let flow = crate::scenario::Flow { id: 0, dest_mr: 0, qos_bps: q, sinr_min: 0.0 };
                let r = crate::relay::min_required_rate(&flow, m, &params());
                assert_eq!(slots_needed(q, r, m, &params()), Some(m), "q={q} m={m}");
            }
        }
    }

    #[test]
    fn priorities() {
        assert_eq!(priority(1), 1.0);
        assert_eq!(priority(4), 0.25);
        assert!(priority(3) > priority(5));
    }

    fn job(index: usize, slots: u64, rate_bps: f64) -> Job {
        Job { index, slots, rate_bps, demand_bits: slots as f64 * rate_bps * 18e-6 }
    }

    #[test]
    fn no_flows() {
        let r = run_jobs(vec![], 0, 2400, 18e-6);
        assert_eq!(r.flows_completed, 0);
        assert_eq!(r.throughput_bits, 0.0);
        assert_eq!(r.slots_used, 0);
    }

    #[test]
    fn single_feasible_flow() {
        let r = run_jobs(vec![job(0, 245, 1e8)], 1, 2400, 18e-6);
        assert_eq!(r.flows_completed, 1);
        assert_eq!(r.completed, vec![true]);
        assert_eq!(r.slots_used, 245);
    }

    #[test]
    fn hand_traced_two_flows() {
        // Slot counts (3, 5) within 7 slots, listed out of order.
        let (r1, r2) = (2e9, 1e9);
        let r = run_jobs(vec![job(1, 5, r2), job(0, 3, r1)], 2, 7, 18e-6);
        assert_eq!(r.order, vec![0, 1]);
        assert_eq!(r.completed, vec![true, false]);
        assert_eq!(r.flows_completed, 1);
        assert_eq!(r.slots_used, 7);
        let expected = 3.0 * r1 * 18e-6 + 4.0 * r2 * 18e-6;
        assert!((r.throughput_bits - expected).abs() < 1e-6);
        assert!(r.delivered_bits <= r.throughput_bits);
        assert_eq!(r.per_flow_slots, vec![Some(3), Some(5)]);
    }

    #[test]
    fn overshoot_counts_in_throughput_only() {
        let j = Job { index: 0, slots: 3, rate_bps: 1e9, demand_bits: 2.5 * 1e9 * 18e-6 };
        let r = run_jobs(vec![j], 1, 10, 18e-6);
        assert!((r.throughput_bits - 3.0 * 1e9 * 18e-6).abs() < 1e-6);
        assert!((r.delivered_bits - j.demand_bits).abs() < 1e-6);
    }

    #[test]
    fn ties_break_by_index() {
        let r = run_jobs(vec![job(2, 4, 1e9), job(0, 4, 1e9), job(1, 4, 1e9)], 3, 100, 18e-6);
        assert_eq!(r.order, vec![0, 1, 2]);
    }

    /// Completions of serving `slots` in the given order, by the slot loop.
    fn serve_in_order(slots: &[u64], total: u64) -> usize {
        let mut t = 0;
        let mut done = 0;
        for &s in slots {
            if t + s <= total {
                done += 1;
            }
            t += s;
            if t >= total {
                break;
            }
        }
        done
    }

    fn permutations(items: &[u64]) -> Vec<Vec<u64>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn ascending_order_is_optimal(slots in proptest::collection::vec(1u64..60, 0..=6), total in 0u64..200) {
            let jobs: Vec<Job> = slots.iter().enumerate().map(|(i, &s)| job(i, s, 1e9)).collect();
            let r = run_jobs(jobs, slots.len(), total, 18e-6);
            let best = permutations(&slots).iter().map(|p| serve_in_order(p, total)).max().unwrap_or(0);
            prop_assert_eq!(r.flows_completed, best);
        }

        #[test]
        fn schedule_invariants(slots in proptest::collection::vec(1u64..400, 0..12), total in 0u64..3000) {
            let jobs: Vec<Job> = slots.iter().enumerate().map(|(i, &s)| job(i, s, 1e9)).collect();
            let r = run_jobs(jobs, slots.len(), total, 18e-6);
            prop_assert!(r.slots_used <= total);
            prop_assert_eq!(r.flows_completed, r.completed.iter().filter(|&&c| c).count());
            let used: u64 = slots.iter().zip(&r.completed).filter(|(_, &c)| c).map(|(s, _)| s).sum();
            prop_assert!(used <= total);
            // Completed flows are a prefix of the serving order.
            let flags: Vec<bool> = r.order.iter().map(|&i| r.completed[i]).collect();
            prop_assert!(flags.windows(2).all(|w| w[0] || !w[1]));
            let mut sorted = slots.clone();
            sorted.sort_unstable();
            prop_assert_eq!(completions_sorted(&sorted, total), r.flows_completed);
        }

        #[test]
        fn removing_a_flow_never_raises_completions(
            slots in proptest::collection::vec(1u64..400, 1..12),
            total in 0u64..3000,
            pick in any::<prop::sample::Index>(),
        ) {
            let mut sorted = slots.clone();
            sorted.sort_unstable();
            let full = completions_sorted(&sorted, total);
            sorted.remove(pick.index(sorted.len()));
            prop_assert!(completions_sorted(&sorted, total) <= full);
        }

        #[test]
        fn more_slots_with_fixed_needs_never_hurts(slots in proptest::collection::vec(1u64..400, 0..12), total in 0u64..3000, extra in 0u64..500) {
            let mut sorted = slots.clone();
            sorted.sort_unstable();
            prop_assert!(completions_sorted(&sorted, total + extra) >= completions_sorted(&sorted, total));
        }
    }
}
