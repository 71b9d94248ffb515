pub mod catalog;
pub mod classifier;
pub mod cli;
pub mod curvature;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod jets;
pub mod output;
pub mod tensor;

pub use error::{Error, Result};
