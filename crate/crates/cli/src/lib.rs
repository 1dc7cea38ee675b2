//! Command-line driver, file formats and experiment harness around
//! `community-core`.

pub mod cli;
pub mod harness;
pub mod io;
pub mod report;
