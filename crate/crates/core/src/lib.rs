//! Secret-key distillation laboratory for the tripartite distributions
//! obtained by measuring Werner and symmetric qutrit states.
//!
//! * [`probdist`]: distributions, channels and Shannon quantities.
//! * [`families`]: the closed-form Werner, symmetric and activated tables.
//! * [`intrinsic`]: intrinsic-information upper bounds by channel search.
//! * [`ad`]: advantage-distillation exponents, thresholds and simulation.
//! * [`quantum`]: density matrices, partial transposes and the square-root
//!   measurement, used to rederive the classical tables independently.

pub mod ad;
pub mod error;
pub mod families;
pub mod intrinsic;
pub mod labels;
pub mod par;
pub mod probdist;
pub mod quantum;

pub use error::{Error, Result};
pub use probdist::{EveChannel, TripartiteDistribution};
