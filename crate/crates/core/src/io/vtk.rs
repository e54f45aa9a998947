//! Legacy ASCII VTK export on `STRUCTURED_POINTS`.
//!
//! Point data follows the grid's linear order: x fastest, then y, then z.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid3, ScalarField3};

/// Writes one scalar array named `u`.
pub fn write_vtk(field: &ScalarField3, path: &Path) -> Result<()> {
    write_vtk_fields(field.grid(), &[("u", field.values())], path)
}

/// Writes several named scalar arrays sampled on `grid`.
pub fn write_vtk_fields(grid: &Grid3, fields: &[(&str, &[f64])], path: &Path) -> Result<()> {
    if let Some((name, v)) = fields.iter().find(|(_, v)| v.len() != grid.len()) {
        return Err(Error::precondition(format!(
            "array `{name}` has {} values for a grid of {}",
            v.len(),
            grid.len()
        )));
    }
    if let Some((name, _)) = fields.iter().find(|(n, _)| n.is_empty() || n.contains(char::is_whitespace)) {
        return Err(Error::precondition(format!("invalid array name `{name}`")));
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    let [nx, ny, nz] = grid.dims();
    let [ox, oy, oz] = grid.origin();
    let h = grid.spacing();
    let mut body = format!(
        "# vtk DataFile Version 3.0\nhelfrich-phase field\nASCII\nDATASET STRUCTURED_POINTS\n\
         DIMENSIONS {nx} {ny} {nz}\nORIGIN {ox:e} {oy:e} {oz:e}\nSPACING {h:e} {h:e} {h:e}\nPOINT_DATA {}\n",
        grid.len()
    );
    for (name, values) in fields {
        body.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        w.write_all(body.as_bytes()).map_err(io_err)?;
        body.clear();
        for v in values.iter() {
            writeln!(w, "{}", super::csv::fmt(*v)).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}
