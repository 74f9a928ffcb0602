//! Online network slice brokering as a budgeted lock-up multi-armed bandit.
//!
//! Tenants are arms. Every round the broker grants a batch of tenants whose
//! admission cost fits the PRB capacity; a granted slice keeps its tenant
//! selected until the slice expires. The crate provides:
//!
//! - [`model`]: templates, tenants, the per-round reward and traffic generators.
//! - [`policies`]: FCFS, Random, ε-greedy, ONETS, eUCB and a hindsight optimum.
//! - [`analysis`]: regret, the KL lower bound, the top-K pull-probability bound
//!   (closed form and numerical integral) and the ε-greedy bound.
//! - [`harness`]: the round loop, multi-seed experiments and CSV/JSON export.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod model;
pub mod policies;

pub use error::{Error, Result};
