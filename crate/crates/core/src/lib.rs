//! Graphon mean field games on finite state and action spaces.
//!
//! The crate computes equilibria of discretized graphon mean field games in
//! two ways: an exact model-based fixed point iteration, and an online learner
//! that only samples transitions and rewards. A finite n-player simulator
//! checks how well the resulting policies do in games on sampled graphs.

pub mod config;
pub mod env;
pub mod error;
pub mod exact;
pub mod graphon;
pub mod learner;
pub mod metrics;
pub mod nplayer;
pub mod rng;
pub mod table;

pub use error::{Error, Result};
