//! Bandits whose arm payoffs depend on the delay since the arm was last
//! pulled.
//!
//! An arm `i` has a baseline expectation `mu_i` and a delay `d_i`; pulling it
//! `tau <= d_i` rounds after its previous pull pays `(1 - f(tau)) * mu_i` in
//! expectation, otherwise `mu_i`. The crate provides
//!
//! * the environment ([`Instance`], [`DelayState`], [`Environment`]),
//! * ranking policies and their exact values ([`policies`]),
//! * exact optima over all periodic schedules ([`oracle`]),
//! * a staged elimination learner with few policy switches ([`low_switch`]),
//! * an arm-ordering procedure with confidence-based elimination ([`ranker`]),
//! * a UCB1 baseline over ranking policies ([`ucb`]),
//! * reproducible experiments with regret curves ([`harness`]).

pub mod env;
pub mod error;
pub mod harness;
pub mod low_switch;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod ranker;
pub mod rng;
pub mod trace;
pub mod ucb;

pub use env::{Environment, RewardModel};
pub use error::{Error, Result};
pub use model::{ArmParams, DelayState, DiscountFunction, Instance, RewardSample};
pub use policies::{g_value, ghost_summary, GhostSummary, RankingPolicy};
pub use trace::{PolicyTrace, TraceStep};
