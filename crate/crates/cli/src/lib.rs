//! Configuration, run records and table emission for the `ramsey` binary.

pub mod config;
pub mod manifest;
pub mod table;
