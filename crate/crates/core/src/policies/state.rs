use crate::model::LockUp;

/// Learning state shared by all policies: pull counts, empirical reward
/// means, observed utilization and the running lock-ups.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokerState {
    round: u32,
    alpha: f64,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    util_sums: Vec<f64>,
    util_obs: Vec<u64>,
    /// Sorted by tenant id.
    lockups: Vec<LockUp>,
}

impl BrokerState {
    pub fn new(tenant_count: usize, alpha: f64) -> Self {
        Self {
            round: 0,
            alpha,
            pulls: vec![0; tenant_count],
            reward_sums: vec![0.0; tenant_count],
            util_sums: vec![0.0; tenant_count],
            util_obs: vec![0; tenant_count],
            lockups: Vec::new(),
        }
    }

    pub fn tenant_count(&self) -> usize {
        self.pulls.len()
    }

    /// Current round, 1-based; 0 before the first round.
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Moves to `round` and drops lock-ups that have expired by then.
    pub fn begin_round(&mut self, round: u32) {
        self.round = round;
        self.lockups.retain(|l| l.end_round > round);
    }

    pub fn pulls(&self, tenant: usize) -> u64 {
        self.pulls[tenant]
    }

    /// Empirical mean reward `θ̄`, zero before the first pull.
    pub fn mean(&self, tenant: usize) -> f64 {
        match self.pulls[tenant] {
            0 => 0.0,
            n => self.reward_sums[tenant] / n as f64,
        }
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.tenant_count()).map(|i| self.mean(i)).collect()
    }

    pub fn record_pull(&mut self, tenant: usize, reward: f64) {
        self.pulls[tenant] += 1;
        self.reward_sums[tenant] += reward;
    }

    /// Records one observed `λ / R` of an active slice.
    pub fn record_utilization(&mut self, tenant: usize, fraction: f64) {
        self.util_sums[tenant] += fraction;
        self.util_obs[tenant] += 1;
    }

    pub fn utilization_estimate(&self, tenant: usize) -> Option<f64> {
        match self.util_obs[tenant] {
            0 => None,
            n => Some(self.util_sums[tenant] / n as f64),
        }
    }

    /// PRBs charged for admitting a request of `resources` PRBs from `tenant`:
    /// `⌈α·R + (1 − α)·min(R, û·R)⌉`, where `û` is the tenant's observed mean
    /// used fraction. Without history the full request is charged.
    pub fn admission_cost(&self, tenant: usize, resources: u32) -> u32 {
        let Some(u) = self.utilization_estimate(tenant) else {
            return resources;
        };
        let r = f64::from(resources);
        let est = (u * r).min(r);
        let cost = (self.alpha * r + (1.0 - self.alpha) * est).ceil();
        (cost as u32).min(resources)
    }

    pub fn lockups(&self) -> &[LockUp] {
        &self.lockups
    }

    pub fn lockup(&self, tenant: usize) -> Option<&LockUp> {
        self.lockups.iter().find(|l| l.tenant == tenant)
    }

    pub fn is_locked(&self, tenant: usize) -> bool {
        self.lockup(tenant).is_some()
    }

    pub fn locked_cost(&self) -> u32 {
        self.lockups.iter().map(|l| l.cost).sum()
    }

    pub fn open_lockup(&mut self, lockup: LockUp) {
        debug_assert!(!self.is_locked(lockup.tenant));
        let pos = self.lockups.partition_point(|l| l.tenant < lockup.tenant);
        self.lockups.insert(pos, lockup);
    }
}
