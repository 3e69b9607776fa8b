//! Torus geometry, configurations and the parity invariant.

mod config;
pub mod perm;
mod torus;

pub use config::{reachable_set, Configuration, HOLE};
pub use torus::{coord_norm, signed_coord, Direction, TorusPoint};
