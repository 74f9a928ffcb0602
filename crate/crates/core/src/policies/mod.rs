//! Tenant selection policies.
//!
//! Every policy receives the broker state, the requests pending this round
//! and the capacity, and returns a [`RoundDecision`]. Tenants holding an
//! active slice are always part of the decision at the cost charged when the
//! slice was admitted; the remaining budget is then filled according to the
//! policy.

mod baseline;
mod egreedy;
mod eucb;
mod knapsack;
mod onets;
mod optimum;
mod state;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PolicyParams;

pub use baseline::{FcfsPolicy, RandomPolicy};
pub use egreedy::{exploration_probability, EpsilonGreedy};
pub use eucb::EnhancedUcb;
pub use knapsack::{solve_instantaneous, KnapsackItem};
pub use onets::Onets;
pub use optimum::{hindsight_optimum, OptimumLimits, OptimumPlan, HINDSIGHT_MAX_TENANTS};
pub use state::BrokerState;

/// A request waiting for admission in the current round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendingRequest {
    pub tenant: usize,
    pub template: usize,
    pub resources: u32,
    pub duration: u32,
    /// Admission cost in PRBs.
    pub cost: u32,
    pub arrival_time: f64,
}

/// What a policy sees when it is asked to select.
#[derive(Debug, Clone, Copy)]
pub struct RoundInput<'a> {
    pub state: &'a BrokerState,
    /// Requests in arrival order.
    pub pending: &'a [PendingRequest],
    pub capacity: u32,
}

impl RoundInput<'_> {
    /// Admission cost of `tenant`'s pending request, zero if it has none.
    pub fn cost_of(&self, tenant: usize) -> u32 {
        self.pending
            .iter()
            .find(|p| p.tenant == tenant)
            .map_or(0, |p| p.cost)
    }

    /// Tenants with a pending request and their admission cost, by increasing id.
    pub fn candidates(&self) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = self
            .pending
            .iter()
            .filter(|p| !self.state.is_locked(p.tenant))
            .map(|p| (p.tenant, p.cost))
            .collect();
        out.sort_unstable();
        out
    }
}

/// The set of tenants granted in one round.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundDecision {
    /// Granted tenants, in the order the policy admitted them.
    pub granted: Vec<usize>,
    /// Admission cost charged for each entry of `granted`.
    pub costs: Vec<u32>,
}

impl RoundDecision {
    pub fn total_cost(&self) -> u32 {
        self.costs.iter().sum()
    }

    pub fn contains(&self, tenant: usize) -> bool {
        self.granted.contains(&tenant)
    }

    pub fn sorted_ids(&self) -> Vec<usize> {
        let mut ids = self.granted.clone();
        ids.sort_unstable();
        ids
    }

    /// Checks the budget and lock-up constraints against `state`.
    pub fn check(&self, state: &BrokerState, capacity: u32, check_budget: bool) -> Result<()> {
        if self.granted.len() != self.costs.len() {
            return Err(Error::PolicyContract(
                "decision ids and costs differ in length".into(),
            ));
        }
        let mut seen = vec![false; state.tenant_count()];
        for &i in &self.granted {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::PolicyContract(format!(
                    "tenant {i} granted twice or unknown"
                )));
            }
        }
        if let Some(l) = state.lockups().iter().find(|l| !seen[l.tenant]) {
            return Err(Error::PolicyContract(format!(
                "tenant {} holds a running slice but was not re-selected",
                l.tenant
            )));
        }
        if check_budget && self.total_cost() > capacity {
            return Err(Error::PolicyContract(format!(
                "admission cost {} exceeds capacity {capacity}",
                self.total_cost()
            )));
        }
        Ok(())
    }
}

/// Builds a decision starting from the locked tenants, tracking the budget.
#[derive(Debug)]
pub(crate) struct DecisionBuilder {
    decision: RoundDecision,
    spent: u32,
    capacity: u32,
    taken: Vec<bool>,
}

impl DecisionBuilder {
    pub(crate) fn with_lockups(input: &RoundInput<'_>) -> Result<Self> {
        let mut b = Self {
            decision: RoundDecision::default(),
            spent: 0,
            capacity: input.capacity,
            taken: vec![false; input.state.tenant_count()],
        };
        for l in input.state.lockups() {
            b.decision.granted.push(l.tenant);
            b.decision.costs.push(l.cost);
            b.spent += l.cost;
            b.taken[l.tenant] = true;
        }
        if b.spent > input.capacity {
            return Err(Error::LockedOverBudget {
                locked: b.spent,
                capacity: input.capacity,
            });
        }
        Ok(b)
    }

    /// Admits `tenant` if its cost fits in the remaining budget.
    pub(crate) fn try_admit(&mut self, tenant: usize, cost: u32) -> bool {
        if self.taken[tenant] || self.spent + cost > self.capacity {
            return false;
        }
        self.taken[tenant] = true;
        self.spent += cost;
        self.decision.granted.push(tenant);
        self.decision.costs.push(cost);
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.decision.granted.len()
    }

    pub(crate) fn finish(self) -> RoundDecision {
        self.decision
    }
}

/// How argmax ties are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestId,
    Random,
}

impl TieBreak {
    pub fn from_flag(random: bool) -> Self {
        if random {
            TieBreak::Random
        } else {
            TieBreak::LowestId
        }
    }
}

/// Returns the position in `candidates` maximizing `score`.
pub(crate) fn argmax_by<F>(
    candidates: &[usize],
    mut score: F,
    ties: TieBreak,
    rng: &mut dyn RngCore,
) -> Option<usize>
where
    F: FnMut(usize) -> f64,
{
    let mut best: Option<f64> = None;
    let mut best_pos: Vec<usize> = Vec::new();
    for (pos, &c) in candidates.iter().enumerate() {
        let s = score(c);
        match best {
            Some(b) if s < b => {}
            Some(b) if s == b => best_pos.push(pos),
            _ => {
                best = Some(s);
                best_pos.clear();
                best_pos.push(pos);
            }
        }
    }
    match (ties, best_pos.len()) {
        (_, 0) => None,
        (TieBreak::LowestId, _) | (_, 1) => best_pos.iter().copied().min_by_key(|&p| candidates[p]),
        (TieBreak::Random, n) => Some(best_pos[rng.random_range(0..n)]),
    }
}

/// A selection policy. One instance drives one simulation.
pub trait Policy: Send {
    fn kind(&self) -> PolicyKind;

    /// Whether every arm must be pulled once before the first round.
    fn needs_training(&self) -> bool {
        false
    }

    fn select(&mut self, input: &RoundInput<'_>, rng: &mut dyn RngCore) -> Result<RoundDecision>;
}

/// Stable policy names used by the CLI and in output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Fcfs,
    Random,
    Egreedy,
    Onets,
    Eucb,
    Optimum,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::Fcfs,
        PolicyKind::Random,
        PolicyKind::Egreedy,
        PolicyKind::Onets,
        PolicyKind::Eucb,
        PolicyKind::Optimum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Fcfs => "fcfs",
            PolicyKind::Random => "random",
            PolicyKind::Egreedy => "egreedy",
            PolicyKind::Onets => "onets",
            PolicyKind::Eucb => "eucb",
            PolicyKind::Optimum => "optimum",
        }
    }

    fn valid_names() -> String {
        Self::ALL.map(Self::name).join(", ")
    }

    /// Parses a comma-separated list such as `"onets, eucb,fcfs"`.
    pub fn parse_list(text: &str) -> Result<Vec<PolicyKind>> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let kind: PolicyKind = part.parse()?;
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        if out.is_empty() {
            return Err(Error::UnknownPolicy {
                given: text.to_string(),
                valid: Self::valid_names(),
            });
        }
        Ok(out)
    }

    /// Instantiates an online policy. The hindsight optimum is not an online
    /// policy and yields `None`.
    pub fn build(self, params: &PolicyParams) -> Option<Box<dyn Policy>> {
        let ties = TieBreak::from_flag(params.random_ties);
        match self {
            PolicyKind::Fcfs => Some(Box::new(FcfsPolicy)),
            PolicyKind::Random => Some(Box::new(RandomPolicy)),
            PolicyKind::Egreedy => Some(Box::new(EpsilonGreedy::new(params.b, params.d, ties))),
            PolicyKind::Onets => Some(Box::new(Onets::new(params.k, ties))),
            PolicyKind::Eucb => Some(Box::new(EnhancedUcb::new())),
            PolicyKind::Optimum => None,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::UnknownPolicy {
                given: s.to_string(),
                valid: Self::valid_names(),
            })
    }
}

/// The exploration bonus index `θ̄ + sqrt(2 ln t / W)`.
pub fn ucb_index(mean: f64, pulls: u64, round: f64) -> Result<f64> {
    if pulls == 0 {
        return Err(Error::param(
            "pulls",
            "index undefined before the arm is pulled",
        ));
    }
    if !(round >= 1.0) {
        return Err(Error::param("round", format!("{round} < 1")));
    }
    Ok(mean + (2.0 * round.ln() / pulls as f64).sqrt())
}

/// UCB indices of all arms at the current round.
pub(crate) fn ucb_indices(state: &BrokerState) -> Result<Vec<f64>> {
    let t = f64::from(state.round().max(1));
    (0..state.tenant_count())
        .map(|i| {
            ucb_index(state.mean(i), state.pulls(i), t)
                .map_err(|_| Error::UntrainedArm { tenant: i })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_examples() {
        assert_eq!(ucb_index(0.5, 1, 1.0).unwrap(), 0.5);
        let t = std::f64::consts::E.powi(2);
        assert!((ucb_index(0.5, 2, t).unwrap() - 1.914_213_562_373_095).abs() < 1e-12);
        let far = ucb_index(0.3, 1 << 40, 1000.0).unwrap();
        assert!((far - 0.3).abs() < 1e-5);
        assert!(ucb_index(0.3, 0, 5.0).is_err());
        assert!(ucb_index(0.3, 1, 0.0).is_err());
    }

    #[test]
    fn index_dominates_mean_and_shrinks() {
        let mut last = f64::INFINITY;
        for w in 1..200u64 {
            let v = ucb_index(0.4, w, 500.0).unwrap();
            assert!(v >= 0.4);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn policy_names_round_trip() {
        for k in PolicyKind::ALL {
            assert_eq!(k.name().parse::<PolicyKind>().unwrap(), k);
        }
        assert_eq!(
            PolicyKind::parse_list(" onets,EUCB , fcfs,onets").unwrap(),
            vec![PolicyKind::Onets, PolicyKind::Eucb, PolicyKind::Fcfs]
        );
        let err = PolicyKind::parse_list("onets,ucb2").unwrap_err();
        assert!(err
            .to_string()
            .contains("fcfs, random, egreedy, onets, eucb, optimum"));
        assert!(PolicyKind::parse_list(" , ").is_err());
    }

    #[test]
    fn argmax_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = [4, 2, 7, 1];
        let pos = argmax_by(&c, |_| 1.0, TieBreak::LowestId, &mut rng).unwrap();
        assert_eq!(c[pos], 1);
        let mut hits = [0usize; 4];
        for _ in 0..400 {
            hits[argmax_by(&c, |_| 1.0, TieBreak::Random, &mut rng).unwrap()] += 1;
        }
        assert!(hits.iter().all(|h| *h > 50));
        assert_eq!(argmax_by(&[], |_| 1.0, TieBreak::LowestId, &mut rng), None);
        let pos = argmax_by(&c, |i| i as f64, TieBreak::LowestId, &mut rng).unwrap();
        assert_eq!(c[pos], 7);
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::{BrokerState, PendingRequest};
    use crate::model::LockUp;

    pub(crate) fn state(n: usize) -> BrokerState {
        let mut s = BrokerState::new(n, 0.5);
        s.begin_round(1);
        s
    }

    /// Every arm pulled `pulls` times at exactly `means[i]`, round 10.
    pub(crate) fn trained(means: &[f64], pulls: u64) -> BrokerState {
        let mut s = BrokerState::new(means.len(), 0.5);
        for (i, m) in means.iter().enumerate() {
            for _ in 0..pulls {
                s.record_pull(i, *m);
            }
        }
        s.begin_round(10);
        s
    }

    pub(crate) fn pending(tenant: usize, cost: u32, arrival_time: f64) -> PendingRequest {
        PendingRequest {
            tenant,
            template: 0,
            resources: cost,
            duration: 3,
            cost,
            arrival_time,
        }
    }

    pub(crate) fn lock(s: &mut BrokerState, tenant: usize, cost: u32) {
        let r = s.round();
        s.open_lockup(LockUp {
            tenant,
            template: 0,
            start_round: r,
            end_round: r + 5,
            cost,
            resources: cost,
        });
    }
}
