//! Regret and the analytical bounds of the selection policies.

mod egreedy_bound;
mod kl;
mod pulls;
mod regret;

pub use egreedy_bound::{egreedy_suboptimal_prob, EgreedyBound};
pub use kl::{kl_exponential, regret_lower_bound};
pub use pulls::{
    expected_pulls_bound, expected_pulls_numeric, predicted_selections, MAX_BOUND_ARMS,
};
pub use regret::{compute_regret, RegretSeries, RewardModel};
