use rand::{Rng, RngCore};

use super::{argmax_by, DecisionBuilder, Policy, PolicyKind, RoundDecision, RoundInput, TieBreak};
use crate::error::Result;

/// Exploration probability `min{1, b·|I| / (d²·t)}`.
pub fn exploration_probability(b: f64, d: f64, tenant_count: usize, round: u32) -> f64 {
    let t = f64::from(round.max(1));
    (b * tenant_count as f64 / (d * d * t)).min(1.0)
}

/// ε-greedy with a decaying exploration rate and no training phase.
///
/// After the locked tenants, every free tenant is considered once: with
/// probability `1 − ε` the one with the highest empirical mean, otherwise a
/// uniformly random one; each is admitted if its cost fits.
#[derive(Debug, Clone)]
pub struct EpsilonGreedy {
    b: f64,
    d: f64,
    ties: TieBreak,
    explorations: u64,
    draws: u64,
}

impl EpsilonGreedy {
    pub fn new(b: f64, d: f64, ties: TieBreak) -> Self {
        Self {
            b,
            d,
            ties,
            explorations: 0,
            draws: 0,
        }
    }

    /// Number of exploratory picks so far and total picks.
    pub fn exploration_counts(&self) -> (u64, u64) {
        (self.explorations, self.draws)
    }
}

impl Policy for EpsilonGreedy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Egreedy
    }

    fn select(&mut self, input: &RoundInput<'_>, rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let state = input.state;
        let eps = exploration_probability(self.b, self.d, state.tenant_count(), state.round());
        let mut b = DecisionBuilder::with_lockups(input)?;
        let mut open = input.candidates();
        while !open.is_empty() {
            let z: f64 = rng.random();
            self.draws += 1;
            let pos = if z > eps {
                let ids: Vec<usize> = open.iter().map(|(t, _)| *t).collect();
                argmax_by(&ids, |t| state.mean(t), self.ties, rng).expect("non-empty")
            } else {
                self.explorations += 1;
                rng.random_range(0..open.len())
            };
            let (tenant, cost) = open.remove(pos);
            b.try_admit(tenant, cost);
        }
        Ok(b.finish())
    }
}
