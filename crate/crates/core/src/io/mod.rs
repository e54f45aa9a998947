//! Configuration files, CSV tables and VTK export.

pub mod config;
pub mod csv;
pub mod vtk;

pub use config::{parse_config, Command, ConstraintMode, MinimizeSpec, ProfileWidth, RunConfig};
pub use vtk::{write_vtk, write_vtk_fields};

use std::path::Path;

use crate::error::{Error, Result};

/// Reads and parses a configuration file; read failures are reported as
/// config errors on line 0.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        key: "<file>".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text)
}
