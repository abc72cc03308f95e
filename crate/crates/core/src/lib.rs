//! Frequency-weighted H2 model order reduction for continuous-time LTI systems.

pub mod error;
pub mod matdense;
pub mod norms;
pub mod optimality;
pub mod reducers;
pub mod statespace;

pub use error::{Error, Result};
