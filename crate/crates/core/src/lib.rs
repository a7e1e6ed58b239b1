//! Multi-drone delivery planning by gradient-based model predictive control,
//! plus tabular multi-agent Q-learning baselines (IQL, JAL, VDN) and a
//! benchmark harness comparing them on grid-world delivery scenarios.
//!
//! Module map:
//! - [`environment`]: scenario data model, built-in scenarios, JSON format, validation
//! - [`mpc`]: dynamics, cost terms, gradients, optimizer, fleet selection, tours
//! - [`marl`]: grid MDP, Q-tables, TD losses, trainers, greedy rollout
//! - [`bench`]: per-method runs, comparison reports
//! - [`cli`]: command-line entry point

pub mod bench;
pub mod cli;
pub mod environment;
pub mod error;
pub mod io;
pub mod marl;
pub mod mpc;

pub use error::{Error, Result};

/// Planar point or vector in grid units.
pub type Point = nalgebra::Vector2<f64>;
/// 2×2 system matrix.
pub type Mat2 = nalgebra::Matrix2<f64>;
