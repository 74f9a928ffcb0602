//! Post-hoc checks of a finished trace against the round constraints.

use super::sim::SimulationTrace;
use crate::model::Scenario;

/// A constraint broken by a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditFailure {
    pub round: u32,
    pub message: String,
}

impl std::fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "round {}: {}", self.round, self.message)
    }
}

/// Verifies, for every round, that
///
/// - the admission costs fit the capacity (skipped when `check_budget` is false),
/// - every slice keeps its tenant granted for its whole duration,
/// - no tenant opens a slice while holding one,
/// - every reward lies in `[0, 1]` and the round and run totals add up,
/// - the violation flag matches the recorded load.
pub fn audit_trace(
    scenario: &Scenario,
    trace: &SimulationTrace,
    check_budget: bool,
) -> Result<(), AuditFailure> {
    let fail = |round: u32, message: String| Err(AuditFailure { round, message });
    let n = scenario.tenant_count();
    // first round in which each tenant is free again
    let mut busy_until = vec![0u32; n];
    let mut total = 0.0;
    for r in &trace.rounds {
        let t = r.round;
        if check_budget && r.cost_sum > scenario.capacity {
            return fail(t, format!("cost {} above capacity", r.cost_sum));
        }
        if r.granted.windows(2).any(|w| w[0] >= w[1]) {
            return fail(t, "granted ids not strictly increasing".into());
        }
        for (i, until) in busy_until.iter().enumerate() {
            if t < *until && r.granted.binary_search(&i).is_err() {
                return fail(t, format!("tenant {i} dropped during its lock-up"));
            }
        }
        for &(i, tpl) in &r.new_slices {
            if t < busy_until[i] {
                return fail(t, format!("tenant {i} opened a second slice"));
            }
            if r.granted.binary_search(&i).is_err() {
                return fail(
                    t,
                    format!("tenant {i} opened a slice without being granted"),
                );
            }
            busy_until[i] = t + scenario.templates[tpl].duration;
        }
        if r.rewards.len() != r.granted.len() {
            return fail(t, "reward and grant lists differ in length".into());
        }
        if let Some(x) = r.rewards.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return fail(t, format!("reward {x} outside [0, 1]"));
        }
        let sum: f64 = r.rewards.iter().sum();
        if sum != r.reward_sum {
            return fail(t, format!("reward sum {} != {sum}", r.reward_sum));
        }
        if r.violation != (r.load > f64::from(scenario.capacity)) {
            return fail(t, "violation flag disagrees with load".into());
        }
        total += r.reward_sum;
    }
    if total != trace.cumulative_reward {
        return fail(
            trace.horizon(),
            "cumulative reward is not the sum of rounds".into(),
        );
    }
    Ok(())
}
