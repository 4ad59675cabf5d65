//! Exact toolkit for the water transport problem on finite graphs.
//!
//! Barrels sit on the vertices of a simple graph and pipes on its edges.
//! Opening pipes levels water between barrels; the question is how high the
//! level at one target barrel can be pushed. The crate offers exact
//! simulation (rational arithmetic throughout), closed-form solvers for
//! paths and universal targets, an exhaustive bounded-depth search, greedy
//! lattice-animal heuristics and a builder for the 3-SAT hardness gadget.

pub mod cli;
pub mod engine;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod graph;
pub mod heuristics;
pub mod instance;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod sampling;

pub use error::{Error, Result};
pub use rational::Rational;
