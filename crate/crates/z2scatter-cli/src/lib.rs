//! Library surface of the experiment runner, so integration tests can
//! drive the commands directly.

pub mod commands;
pub mod config;
pub mod output;
