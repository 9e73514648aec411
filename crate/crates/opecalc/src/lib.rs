//! File format, shipped data and reporting for the `opecalc` command.

pub mod data;
pub mod format;
pub mod report;
