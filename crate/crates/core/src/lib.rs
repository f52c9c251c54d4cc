//! Continuous-variable threshold secret sharing engine.

pub mod cost;
pub mod decoder;
pub mod error;
pub mod fidelity;
pub mod gaussian;
pub mod matlib;
pub mod scheme;
pub mod verify;

pub use error::{Error, Result};
