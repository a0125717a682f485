//! Joint power allocation and user assignment for max-min rate fairness in
//! an underlay cognitive-radio heterogeneous network (one macro BS overlaid
//! by several mutually orthogonal picos).
//!
//! The proposed scheme ([`dual_solver::solve_oaop`]) relaxes the coupling
//! constraints with Lagrange multipliers, loads power in closed form,
//! assigns users to (channel, BS) slots by minimizing the per-slot dual
//! cost, and refines the multipliers with projected subgradient steps.
//! [`baselines`] provides the fixed-assignment comparison schemes and
//! [`oracle`] an exhaustive grid search for tiny instances.

pub mod baselines;
pub mod cli;
pub mod dual_solver;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod rate;

pub use error::{Error, Result};
pub use model::{Assignment, ChannelRealization, NetworkConfig, PowerAllocation, Slot, Topology};
