//! Quantum correlations under local noisy channels.
//!
//! The crate classifies single-party channels (unital, semi-classical or
//! neither), decides whether bipartite states are classically correlated, and
//! estimates the geometric and relative-entropy measures of quantumness by
//! optimizing over product bases.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod channels;
pub mod classicality;
pub mod io;
pub mod measures;
pub mod repro;
mod optimize;

pub use optimize::OptimizerConfig;
