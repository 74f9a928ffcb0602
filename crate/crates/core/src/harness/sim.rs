//! The round loop.
//!
//! Each round runs in a fixed order: expire finished slices, collect pending
//! requests, ask the policy, open lock-ups for new grants, then observe the
//! used PRBs of every active slice and credit rewards.

use std::time::{Duration, Instant};

use rand::RngCore;

use super::seeds::{RunSeeds, StreamKind};
use super::world::World;
use crate::error::{Error, Result};
use crate::model::{compute_reward, LockUp, Scenario};
use crate::policies::{
    hindsight_optimum, BrokerState, OptimumLimits, OptimumPlan, PendingRequest, Policy, PolicyKind,
    RoundDecision, RoundInput,
};

/// Metrics of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u32,
    /// Granted tenants in increasing id order.
    pub granted: Vec<usize>,
    /// Reward of each entry of `granted`.
    pub rewards: Vec<f64>,
    /// `(tenant, template)` of slices opened this round.
    pub new_slices: Vec<(usize, usize)>,
    pub reward_sum: f64,
    /// Actual PRBs used by the active slices, `Σ λ`.
    pub load: f64,
    /// PRBs requested by the active slices, `Σ R`.
    pub demand: u32,
    pub cost_sum: u32,
    pub violation: bool,
}

impl RoundRecord {
    /// Fraction of capacity actually served, `min(Σ λ, C) / C`.
    pub fn utilization(&self, capacity: u32) -> f64 {
        self.load.min(f64::from(capacity)) / f64::from(capacity)
    }

    /// Requested demand beyond capacity, `max(0, Σ R / C − 1)`.
    pub fn multiplexing_gain(&self, capacity: u32) -> f64 {
        (f64::from(self.demand) / f64::from(capacity) - 1.0).max(0.0)
    }
}

/// Full record of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub policy: PolicyKind,
    pub capacity: u32,
    pub rounds: Vec<RoundRecord>,
    /// Rounds in which each tenant was granted (training pulls excluded).
    pub selections: Vec<u64>,
    /// Empirical means after the last round.
    pub final_means: Vec<f64>,
    /// Pull counts after the last round, training included.
    pub final_pulls: Vec<u64>,
    pub cumulative_reward: f64,
    /// Wall-clock time spent inside the policy.
    pub select_time: Duration,
}

impl SimulationTrace {
    pub fn horizon(&self) -> u32 {
        self.rounds.len() as u32
    }

    pub fn tenant_count(&self) -> usize {
        self.selections.len()
    }

    /// Per-round mean of the served capacity fraction.
    pub fn mean_utilization(&self) -> f64 {
        self.mean_of(|r| r.utilization(self.capacity))
    }

    pub fn violation_rate(&self) -> f64 {
        self.mean_of(|r| if r.violation { 1.0 } else { 0.0 })
    }

    pub fn mean_multiplexing_gain(&self) -> f64 {
        self.mean_of(|r| r.multiplexing_gain(self.capacity))
    }

    pub fn mean_reward(&self) -> f64 {
        self.cumulative_reward / self.rounds.len() as f64
    }

    /// Granted sets, one per round.
    pub fn granted_sets(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.rounds.iter().map(|r| r.granted.as_slice())
    }

    fn mean_of(&self, f: impl Fn(&RoundRecord) -> f64) -> f64 {
        if self.rounds.is_empty() {
            return 0.0;
        }
        self.rounds.iter().map(f).sum::<f64>() / self.rounds.len() as f64
    }
}

/// Options of a single run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Reject decisions whose admission costs exceed the capacity.
    pub enforce_budget: bool,
    /// Reject rounds in which the actual load exceeds the capacity.
    pub forbid_violations: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            enforce_budget: true,
            forbid_violations: false,
        }
    }
}

/// Mutable state of a run in progress.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    scenario: &'a Scenario,
    world: &'a World,
    options: RunOptions,
    state: BrokerState,
    selections: Vec<u64>,
}

impl<'a> Simulator<'a> {
    pub fn new(scenario: &'a Scenario, world: &'a World, options: RunOptions) -> Result<Self> {
        if world.tenant_count() != scenario.tenant_count() {
            return Err(Error::Config(format!(
                "world has {} tenants, scenario {}",
                world.tenant_count(),
                scenario.tenant_count()
            )));
        }
        Ok(Self {
            scenario,
            world,
            options,
            state: BrokerState::new(scenario.tenant_count(), scenario.alpha),
            selections: vec![0; scenario.tenant_count()],
        })
    }

    pub fn state(&self) -> &BrokerState {
        &self.state
    }

    /// One fictitious reward per tenant, credited before the first round.
    pub fn train(&mut self) {
        for (i, r) in self.world.training_rewards().iter().enumerate() {
            self.state.record_pull(i, *r);
        }
    }

    /// Requests visible in `round` from tenants without a running slice,
    /// ordered by arrival time.
    pub fn pending(&self, round: u32) -> Vec<PendingRequest> {
        let mut out: Vec<PendingRequest> = (0..self.scenario.tenant_count())
            .filter(|&i| !self.state.is_locked(i))
            .filter_map(|i| {
                let o = self.world.offer(i, round)?;
                let tpl = &self.scenario.templates[o.template];
                Some(PendingRequest {
                    tenant: i,
                    template: o.template,
                    resources: tpl.resources,
                    duration: tpl.duration,
                    cost: self.state.admission_cost(i, tpl.resources),
                    arrival_time: o.arrival_time,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            a.arrival_time
                .total_cmp(&b.arrival_time)
                .then(a.tenant.cmp(&b.tenant))
        });
        out
    }

    /// Plays `round` with `policy`, returning the round record and the time
    /// the policy took to decide.
    pub fn run_round(
        &mut self,
        round: u32,
        policy: &mut dyn Policy,
        rng: &mut dyn RngCore,
    ) -> Result<(RoundRecord, Duration)> {
        let sc = self.scenario;
        self.state.begin_round(round);
        let pending = self.pending(round);
        let input = RoundInput {
            state: &self.state,
            pending: &pending,
            capacity: sc.capacity,
        };
        let started = Instant::now();
        let decision = policy.select(&input, rng)?;
        let elapsed = started.elapsed();
        decision.check(&self.state, sc.capacity, self.options.enforce_budget)?;
        Ok((self.apply(round, &decision, &pending)?, elapsed))
    }

    fn apply(
        &mut self,
        round: u32,
        decision: &RoundDecision,
        pending: &[PendingRequest],
    ) -> Result<RoundRecord> {
        let sc = self.scenario;
        let mut new_slices = Vec::new();
        for (&tenant, &cost) in decision.granted.iter().zip(&decision.costs) {
            if self.state.is_locked(tenant) {
                continue;
            }
            if let Some(p) = pending.iter().find(|p| p.tenant == tenant) {
                self.state.open_lockup(LockUp {
                    tenant,
                    template: p.template,
                    start_round: round,
                    end_round: round + p.duration,
                    cost,
                    resources: p.resources,
                });
                new_slices.push((tenant, p.template));
            }
        }
        new_slices.sort_unstable();

        let granted = decision.sorted_ids();
        let mut rewards = Vec::with_capacity(granted.len());
        let mut load = 0.0;
        let mut demand = 0;
        for &tenant in &granted {
            self.selections[tenant] += 1;
            let Some(slice) = self.state.lockup(tenant).copied() else {
                // pulled without a request: no payoff
                self.state.record_pull(tenant, 0.0);
                rewards.push(0.0);
                continue;
            };
            let fraction = self.world.used_fraction(tenant, round);
            let lambda = fraction * f64::from(slice.resources);
            let eta = compute_reward(slice.resources, lambda, sc.capacity, sc.alpha)?;
            self.state.record_pull(tenant, eta);
            self.state.record_utilization(tenant, fraction);
            rewards.push(eta);
            load += lambda;
            demand += slice.resources;
        }
        let violation = load > f64::from(sc.capacity);
        if violation && self.options.forbid_violations {
            return Err(Error::PolicyContract(format!(
                "round {round}: used PRBs {load} exceed capacity {}",
                sc.capacity
            )));
        }
        Ok(RoundRecord {
            round,
            reward_sum: rewards.iter().sum(),
            granted,
            rewards,
            new_slices,
            load,
            demand,
            cost_sum: decision.total_cost(),
            violation,
        })
    }

    /// Runs every round of the world with `policy`.
    pub fn run(
        mut self,
        policy: &mut dyn Policy,
        rng: &mut dyn RngCore,
    ) -> Result<SimulationTrace> {
        if policy.needs_training() {
            self.train();
        }
        let mut rounds = Vec::with_capacity(self.world.horizon() as usize);
        let mut select_time = Duration::ZERO;
        let mut cumulative_reward = 0.0;
        for t in 1..=self.world.horizon() {
            let (record, dt) = self.run_round(t, policy, rng)?;
            select_time += dt;
            cumulative_reward += record.reward_sum;
            rounds.push(record);
        }
        Ok(SimulationTrace {
            policy: policy.kind(),
            capacity: self.scenario.capacity,
            rounds,
            selections: self.selections,
            final_means: self.state.means(),
            final_pulls: (0..self.state.tenant_count())
                .map(|i| self.state.pulls(i))
                .collect(),
            cumulative_reward,
            select_time,
        })
    }
}

/// Replays a hindsight plan: running slices plus the planned new grants,
/// each charged its full request.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    plan: OptimumPlan,
}

impl ScriptedPolicy {
    pub fn new(plan: OptimumPlan) -> Self {
        Self { plan }
    }
}

impl Policy for ScriptedPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Optimum
    }

    fn select(&mut self, input: &RoundInput<'_>, _rng: &mut dyn RngCore) -> Result<RoundDecision> {
        let mut d = RoundDecision::default();
        for l in input.state.lockups() {
            d.granted.push(l.tenant);
            d.costs.push(l.resources);
        }
        for &tenant in self.plan.grants_at(input.state.round()) {
            let p = input
                .pending
                .iter()
                .find(|p| p.tenant == tenant)
                .ok_or_else(|| {
                    Error::PolicyContract(format!("plan grants tenant {tenant} without a request"))
                })?;
            d.granted.push(tenant);
            d.costs.push(p.resources);
        }
        Ok(d)
    }
}

/// Runs `kind` on a pre-sampled world.
pub fn run_on_world(
    scenario: &Scenario,
    world: &World,
    kind: PolicyKind,
    seeds: &RunSeeds,
    limits: &OptimumLimits,
) -> Result<SimulationTrace> {
    let mut rng = seeds.rng(StreamKind::Policy);
    match kind.build(&scenario.policy) {
        Some(mut policy) => {
            Simulator::new(scenario, world, RunOptions::default())?.run(policy.as_mut(), &mut rng)
        }
        None => {
            let plan = hindsight_optimum(scenario, world, limits)?;
            let options = RunOptions {
                enforce_budget: false,
                forbid_violations: true,
            };
            let mut policy = ScriptedPolicy::new(plan);
            let started = Instant::now();
            let mut trace = Simulator::new(scenario, world, options)?.run(&mut policy, &mut rng)?;
            trace.select_time = started.elapsed();
            Ok(trace)
        }
    }
}

/// Samples the world of run `seeds` and plays `kind` on it.
pub fn run_simulation(
    scenario: &Scenario,
    kind: PolicyKind,
    seeds: &RunSeeds,
) -> Result<SimulationTrace> {
    if scenario.horizon == 0 {
        return Err(Error::param("horizon", "must be at least one round"));
    }
    let world = World::generate(scenario, seeds)?;
    run_on_world(scenario, &world, kind, seeds, &OptimumLimits::default())
}
