//! Exact computations in highest-weight representation theory of
//! Virasoro-type Lie algebras.

pub mod algorithms;
pub mod checks;
pub mod cli;
pub mod enveloping;
pub mod error;
pub mod fixtures;
pub mod liealg;
pub mod linalg;
pub mod modules;
pub mod scalars;
pub mod sparse;

pub use error::{Error, Result};
