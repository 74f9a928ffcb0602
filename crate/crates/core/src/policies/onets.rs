use rand::RngCore;

use super::{
    argmax_by, ucb_indices, DecisionBuilder, Policy, PolicyKind, RoundDecision, RoundInput,
    TieBreak,
};
use crate::error::Result;

/// Greedy top-K index policy.
///
/// Locked tenants are granted first and count towards the batch of `k`; the
/// remaining slots go to the unconsidered tenants in decreasing UCB index
/// order, each admitted only if its cost fits the leftover budget. Selection
/// stops after `k` admissions or when no candidate is left, so one round costs
/// `O(|I|·k)` comparisons.
#[derive(Debug, Clone)]
pub struct Onets {
    k: usize,
    ties: TieBreak,
}

impl Onets {
    pub fn new(k: usize, ties: TieBreak) -> Self {
        Self { k: k.max(1), ties }
    }

    pub fn batch(&self) -> usize {
        self.k
    }
}

impl Policy for Onets {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Onets
    }

    fn needs_training(&self) -> bool {
        true
    }

    fn select(&mut self, input: &RoundInput<'_>, rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let mut b = DecisionBuilder::with_lockups(input)?;
        let index = ucb_indices(input.state)?;
        let mut open = input.candidates();
        let mut ids: Vec<usize> = open.iter().map(|(t, _)| *t).collect();
        while b.len() < self.k {
            let Some(pos) = argmax_by(&ids, |t| index[t], self.ties, rng) else {
                break;
            };
            let (tenant, cost) = open.remove(pos);
            ids.remove(pos);
            b.try_admit(tenant, cost);
        }
        Ok(b.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::test_support::{lock, pending, state, trained};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn large_batch_takes_everyone_that_fits() {
        let s = trained(&[0.2, 0.5, 0.1, 0.4], 5);
        let p = [
            pending(0, 10, 0.0),
            pending(1, 10, 0.0),
            pending(3, 10, 0.0),
        ];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 150,
        };
        let d = Onets::new(10, TieBreak::LowestId)
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        // tenant 2 has nothing pending
        assert_eq!(d.sorted_ids(), vec![0, 1, 3]);
    }

    #[test]
    fn single_slot_goes_to_highest_index() {
        let s = trained(&[0.1, 0.9], 3);
        let p = [pending(0, 10, 0.0), pending(1, 10, 0.0)];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 150,
        };
        let d = Onets::new(1, TieBreak::LowestId)
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(d.granted, vec![1]);
    }

    #[test]
    fn skips_candidates_that_do_not_fit() {
        let s = trained(&[0.9, 0.5, 0.1], 3);
        let p = [
            pending(0, 120, 0.0),
            pending(1, 60, 0.0),
            pending(2, 30, 0.0),
        ];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 100,
        };
        let d = Onets::new(2, TieBreak::LowestId)
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(d.granted, vec![1, 2]);
        assert_eq!(d.total_cost(), 90);
    }

    #[test]
    fn locked_tenants_count_towards_batch() {
        let mut s = trained(&[0.9, 0.5, 0.1], 3);
        lock(&mut s, 2, 10);
        let p = [pending(0, 10, 0.0), pending(1, 10, 0.0)];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 150,
        };
        let d = Onets::new(2, TieBreak::LowestId)
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(d.granted, vec![2, 0]);
    }

    #[test]
    fn untrained_arm_is_an_error() {
        let s = state(2);
        let input = RoundInput {
            state: &s,
            pending: &[],
            capacity: 150,
        };
        assert!(Onets::new(1, TieBreak::LowestId)
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .is_err());
    }
}
