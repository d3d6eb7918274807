//! File formats and subcommands behind the `coxhom` binary.

pub mod commands;
pub mod io;
