//! Command layer behind the `cfbench` binary.

pub mod commands;
pub mod config;

pub use commands::{cmd_eval, cmd_gen, cmd_prompts, cmd_score, cmd_variants};
pub use config::BenchConfig;
