//! Markov chains of the sliding fifteen-puzzle on the `n x n` torus.
//!
//! * [`puzzle`]: configurations, moves and the parity invariant.
//! * [`walks`]: the group G and the step laws of the seven chains.
//! * [`represent`]: rewriting moves of one chain as words in another, and
//!   the resulting comparison constants.
//! * [`spectral`]: Dirichlet forms, restricted chains, log-Sobolev estimates
//!   and exact mixing times.
//! * [`lower_bound`]: the traced simulation behind the mixing lower bound.
//! * [`tilde`]: the relative-position graph, heat kernels and conductance.

pub mod error;
pub mod lower_bound;
pub mod puzzle;
pub mod represent;
pub mod rng;
pub mod spectral;
pub mod tilde;
pub mod walks;

pub use error::{Error, Result};
