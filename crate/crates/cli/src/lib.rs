//! Scenario runner for the quadphase engine: TOML scenarios in, CSV or JSON out.

pub mod error;
pub mod report;
pub mod runner;
pub mod scenario;

use std::path::Path;

pub use error::{CliError, CliResult};
pub use report::Format;
pub use runner::RunFlags;

/// Loads, evaluates and formats one scenario. Returns `(data, summary)`.
pub fn execute(path: &Path, method: Option<&str>, flags: RunFlags, format: Format) -> CliResult<(String, String)> {
    let exp = scenario::load(path, method)?;
    let out = runner::run(&exp, flags)?;
    let data = match format {
        Format::Csv => report::to_csv(&out),
        Format::Json => report::to_json(&exp, &out),
    };
    Ok((data, report::summary(&exp, &out)))
}
