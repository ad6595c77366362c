pub mod classify;
pub mod cli;
pub mod error;
pub mod filtration;
pub mod generate;
pub mod kernels;
pub mod nullmodels;
pub mod persistence;
pub mod rng;
pub mod textio;
pub mod tgraph;

pub use error::{Error, Result};
