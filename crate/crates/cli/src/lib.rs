//! Configuration-driven front end for `phononet_core`.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 configuration
//! error, 3 numerical failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;

use std::fmt;
use std::path::{Path, PathBuf};

pub use config::{parse_config, Experiment, Format, RunConfig};
pub use experiments::run_experiment;
pub use output::{header_config, render, Report};

/// Overrides `output.dir` from the config file; `--out` still wins.
pub const OUT_DIR_ENV: &str = "PHONONET_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<phononet_core::Error> for CliError {
    fn from(e: phononet_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

/// Output directory: `--out`, then the environment override, then
/// `output.dir`, then the working directory.
pub fn output_dir(config: &RunConfig, out: Option<&Path>) -> PathBuf {
    if let Some(p) = out {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    config.output.dir.as_deref().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Reads the config, runs the experiment and writes `<dir>/<experiment>.<ext>`.
/// Returns the path written.
pub fn execute(experiment: Experiment, config_path: &Path, overrides: &Overrides) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config = parse_config(&text, Some(experiment))?;
    if let Some(f) = overrides.format {
        config.output.format = f;
    }
    if let Some(n) = overrides.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = run_experiment(&config)?;
    let text = render(&config, &report, config.output.format);

    let dir = output_dir(&config, overrides.out.as_deref());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.{}", config.experiment.name(), config.output.format.extension()));
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
