//! Files, configuration and the command line around `akpz-core`.
//!
//! * [`config`]: sectioned key-value run configurations.
//! * [`io`]: configuration text, height and grid CSV, SVG snapshots.
//! * [`manifest`]: run manifests for bit-exact replays.
//! * [`commands`]: the `simulate`, `gibbs`, `pde`, `hydro` and `snapshot`
//!   subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{execute, rerun, Command, Outcome};
pub use config::Doc;
pub use error::CliError;
