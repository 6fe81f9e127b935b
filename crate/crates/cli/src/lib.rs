//! Command-line front end for `cvxclust`: solve, certify, scan λ paths, run
//! the built-in experiments and generate datasets. Every run writes a
//! `manifest.json` that `cvxclust replay` turns back into the same outputs.

pub mod args;
pub mod commands;
pub mod demos;
pub mod manifest;
pub mod svg;

pub use args::{Cli, Command};
pub use commands::{run, Status};
pub use manifest::RunManifest;
