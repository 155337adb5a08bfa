//! Configuration, export and command drivers for the `nilweier` binary.

pub mod commands;
pub mod config;
pub mod export;
pub mod expr;

pub use commands::{generate, generate_files, list_builtins, roundtrip, verify, Outcome, Report};
pub use config::{ConfigError, Prepared, RunConfig};
pub use expr::{parse_expression, EvalDomain, Expression, ParseError, Variable};

/// Size of the worker pool requested through `NILWEIER_THREADS`.
pub fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var("NILWEIER_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("NILWEIER_THREADS must be a positive integer, got {v:?}"))?;
            anyhow::ensure!(n > 0, "NILWEIER_THREADS must be positive");
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}
