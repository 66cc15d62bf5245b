//! Std companion to the `resourcetune` core: instance and plan files, a
//! sparse LP backend, a wall clock, and the experiment runner behind the
//! `resourcetune` command-line tool.

pub mod clock;
pub mod compare;
pub mod error;
pub mod format;
pub mod report;
pub mod runner;
pub mod solver;

pub use error::{HarnessError, Result};
