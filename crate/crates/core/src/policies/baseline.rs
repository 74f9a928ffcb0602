use rand::seq::SliceRandom;
use rand::RngCore;

use super::{DecisionBuilder, Policy, PolicyKind, RoundDecision, RoundInput};
use crate::error::Result;

/// Admits pending requests in arrival order while the budget allows.
#[derive(Debug, Clone, Copy, Default)]
pub struct FcfsPolicy;

impl Policy for FcfsPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Fcfs
    }

    fn select(&mut self, input: &RoundInput<'_>, _rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let mut b = DecisionBuilder::with_lockups(input)?;
        for p in input.pending {
            b.try_admit(p.tenant, p.cost);
        }
        Ok(b.finish())
    }
}

/// Admits pending requests in a uniformly shuffled order while the budget
/// allows.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Random
    }

    fn select(&mut self, input: &RoundInput<'_>, rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let mut b = DecisionBuilder::with_lockups(input)?;
        let mut order: Vec<usize> = (0..input.pending.len()).collect();
        order.shuffle(rng);
        for k in order {
            let p = &input.pending[k];
            b.try_admit(p.tenant, p.cost);
        }
        Ok(b.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::test_support::{lock, pending, state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn everything_fits() {
        let s = state(3);
        let p = [pending(0, 10, 0.1), pending(2, 20, 0.2)];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 150,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            FcfsPolicy.select(&input, &mut rng).unwrap().sorted_ids(),
            vec![0, 2]
        );
        assert_eq!(
            RandomPolicy.select(&input, &mut rng).unwrap().sorted_ids(),
            vec![0, 2]
        );
    }

    #[test]
    fn fcfs_prefers_earlier_arrival() {
        let s = state(2);
        let p = [pending(1, 80, 0.1), pending(0, 80, 0.7)];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 100,
        };
        let d = FcfsPolicy
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(d.granted, vec![1]);
        assert_eq!(d.costs, vec![80]);
    }

    #[test]
    fn random_is_reproducible() {
        let s = state(6);
        let p: Vec<_> = (0..6).map(|i| pending(i, 40, i as f64 * 0.1)).collect();
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 100,
        };
        let a = RandomPolicy
            .select(&input, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        let b = RandomPolicy
            .select(&input, &mut ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.granted.len(), 2);
    }

    #[test]
    fn lockups_come_first() {
        let mut s = state(3);
        lock(&mut s, 2, 90);
        let p = [pending(0, 20, 0.1), pending(1, 5, 0.2)];
        let input = RoundInput {
            state: &s,
            pending: &p,
            capacity: 100,
        };
        let d = FcfsPolicy
            .select(&input, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(d.granted, vec![2, 1]);
        d.check(&s, 100, true).unwrap();
    }
}
