//! Coordination games on undirected graphs.
//!
//! Players are the nodes of a graph, each picks a color from its own color
//! set, and a player's payoff is the number of neighbors that picked the same
//! color. The crate provides:
//!
//! * [`graph`]: the undirected graph substrate and structural classification,
//! * [`game`]: color assignments, joint strategies, payoffs and welfare,
//! * [`deviation`]: coalitional deviation search, k-equilibrium checks,
//!   key-lemma audits and coalitional improvement dynamics,
//! * [`colorforest`]: the polynomial-time k-equilibrium verifier for color forests,
//! * [`solvers`]: strong-equilibrium computation for tractable graph classes,
//! * [`analysis`]: price of anarchy / stability, transition values and the
//!   named instance generators,
//! * [`format`]: the versioned instance text format.

pub mod analysis;
pub mod colorforest;
pub mod deviation;
mod error;
pub mod format;
pub mod game;
pub mod graph;
pub mod random;
pub mod solvers;

pub use error::{Error, Result};
pub use game::{ColorAssignment, ColorId, CoordinationGame, JointStrategy};
pub use graph::{Graph, GraphClass};

/// Default cap on enumerated candidates (profiles or coalition moves).
pub const DEFAULT_BUDGET: u64 = 100_000_000;
