//! Scenario handling, the wall-potential reduction and subcommand dispatch for `sheath`.

pub mod commands;
pub mod error;
pub mod scenario;
pub mod wall;

pub use commands::{execute, run, Command, Invocation, Overrides, Report};
pub use error::CliError;
pub use scenario::Scenario;
pub use wall::reduce_wall_potential;
