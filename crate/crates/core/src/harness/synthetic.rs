use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::analysis::RewardModel;
use crate::error::Result;
use crate::policies::{BrokerState, PendingRequest, Policy, RoundInput};

/// Selections made on a plain multi-play bandit.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRun {
    /// Granted arms per round, increasing ids.
    pub selections: Vec<Vec<usize>>,
    pub pulls: Vec<u64>,
}

/// Plays `policy` for `horizon` rounds on arms with exponential rewards of
/// the model's means, with no budget pressure and no lock-ups.
pub fn run_synthetic<R: Rng>(
    model: &RewardModel,
    policy: &mut dyn Policy,
    horizon: u32,
    rng: &mut R,
) -> Result<SyntheticRun> {
    let n = model.arm_count();
    let arms: Vec<Exp<f64>> = model
        .means()
        .iter()
        .map(|m| Exp::new(1.0 / m).expect("means are positive"))
        .collect();
    let mut state = BrokerState::new(n, 1.0);
    if policy.needs_training() {
        for (i, arm) in arms.iter().enumerate() {
            state.record_pull(i, arm.sample(rng));
        }
    }
    // every arm can be played every round, at no cost
    let offers: Vec<PendingRequest> = (0..n)
        .map(|tenant| PendingRequest {
            tenant,
            template: 0,
            resources: 0,
            duration: 1,
            cost: 0,
            arrival_time: 0.0,
        })
        .collect();
    let mut selections = Vec::with_capacity(horizon as usize);
    let mut pulls = vec![0u64; n];
    for t in 1..=horizon {
        state.begin_round(t);
        let input = RoundInput {
            state: &state,
            pending: &offers,
            capacity: 1,
        };
        let granted = policy.select(&input, rng)?.sorted_ids();
        for &i in &granted {
            state.record_pull(i, arms[i].sample(rng));
            pulls[i] += 1;
        }
        selections.push(granted);
    }
    Ok(SyntheticRun { selections, pulls })
}
