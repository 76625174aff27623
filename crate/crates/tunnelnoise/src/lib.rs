//! File formats, sweeps and the command-line driver around `tunnelnoise-core`.
//!
//! [`config::Config`] reads a TOML run description; [`sweep`] runs single
//! cells and parallel energy × frequency sweeps; [`tables`] and [`output`]
//! write the CSV files; [`commands`] holds one function per CLI subcommand.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod tables;

pub use config::Config;
pub use error::AppError;
