//! Files, command line, simulator and LP-backed prover around `mldr-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod lp;
pub mod prove;
pub mod report;
pub mod script;
pub mod sharefile;
pub mod sim;
pub mod steps;

pub use error::{HarnessError, Result};
