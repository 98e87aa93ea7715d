//! Experiment harness for the parametric reduced-order modeling toolkit:
//! JSON-configured problems, benchmark orchestration and report emission
//! behind the `promkit` command-line interface.

pub mod config;
pub mod problems;
pub mod report;
pub mod runner;
