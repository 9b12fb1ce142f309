//! Critical-state identification for reinforcement learning.
//!
//! A state is critical when the choice of action there changes the expected
//! return a lot, measured as the variance of Q over a uniform action
//! distribution (state importance, SI). The crate provides the cliff-maze
//! environment, tabular Q-learning, SI estimators and thresholding,
//! exploration rules that exploit on critical states, the statistics used to
//! compare runs, and a multi-seed experiment harness.

pub mod critical;
pub mod error;
pub mod exploration;
pub mod harness;
pub mod mdp;
pub mod qlearn;
pub mod stats;

pub use error::{Error, Result};
