use rand::RngCore;

use super::{
    solve_instantaneous, ucb_indices, KnapsackItem, Policy, PolicyKind, RoundDecision, RoundInput,
};
use crate::error::Result;

/// UCB with an exact per-round knapsack: locked tenants are kept and the
/// free tenants maximizing the summed UCB index within the residual budget
/// are added.
#[derive(Debug, Clone, Default)]
pub struct EnhancedUcb;

impl EnhancedUcb {
    pub fn new() -> Self {
        Self
    }
}

impl Policy for EnhancedUcb {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Eucb
    }

    fn needs_training(&self) -> bool {
        true
    }

    fn select(&mut self, input: &RoundInput<'_>, _rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let index = ucb_indices(input.state)?;
        let locked: Vec<(usize, u32)> = input
            .state
            .lockups()
            .iter()
            .map(|l| (l.tenant, l.cost))
            .collect();
        let items: Vec<KnapsackItem> = input
            .candidates()
            .into_iter()
            .map(|(tenant, cost)| KnapsackItem {
                tenant,
                value: index[tenant],
                cost,
            })
            .collect();
        let granted = solve_instantaneous(input.capacity, &locked, &items)?;
        let costs = granted
            .iter()
            .map(|&t| match input.state.lockup(t) {
                Some(l) => l.cost,
                None => input.cost_of(t),
            })
            .collect();
        Ok(RoundDecision { granted, costs })
    }
}
