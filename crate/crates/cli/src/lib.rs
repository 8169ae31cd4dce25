//! Command-line front end for `dc1lab`: text forms for systems and points,
//! the `dc1lab/1` report envelope, and the acceptance suite.

pub mod accept;
pub mod commands;
pub mod error;
pub mod parse;
pub mod report;

use std::time::Instant;

pub use commands::{Cli, Command};
pub use error::CliError;

/// Runs one command and writes its report; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let cmd = cli.command;
    let outcome = match cmd.run() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("dc1lab {}: {e}", cmd.name());
            return e.exit_code();
        }
    };
    let common = cmd.common();
    let mut env = report::Envelope::new(cmd.name(), common.seed, outcome.notion, cmd.config(), outcome.result, started);
    if let (Some(meta), serde_json::Value::Object(extra)) = (env.metadata.as_object_mut(), outcome.metadata) {
        meta.extend(extra);
    }
    let text = env.to_json();
    match &common.out {
        Some(path) => {
            if let Err(e) = report::write_atomic(path, &text) {
                eprintln!("dc1lab {}: {e}", cmd.name());
                return e.exit_code();
            }
        }
        None => print!("{text}"),
    }
    if let commands::Command::Accept(_) = cmd {
        if let Some(criteria) = env.result.get("criteria").and_then(|c| c.as_array()) {
            for c in criteria {
                let pass = c["pass"].as_bool().unwrap_or(false);
                eprintln!("criterion {:>2} {}: {}", c["id"], if pass { "PASS" } else { "FAIL" }, c["name"].as_str().unwrap_or(""));
            }
        }
    }
    0
}
