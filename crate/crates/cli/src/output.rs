//! CSV writing: scientific notation with nine significant digits, header row
//! always present.

use std::fs;
use std::path::Path;

use crate::scenario::Fields;
use crate::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of plain numbers.
pub fn write_numeric(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect();
    write_csv(path, header, &rows)
}

/// `x, h, u` snapshot; `layer` samples follow the finite-domain ones.
pub fn write_snapshot(path: &Path, fields: &Fields, layer: Option<&Fields>) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for f in std::iter::once(fields).chain(layer) {
        for i in 0..f.x.len() {
            rows.push(vec![f.x[i], f.h[i], f.u[i]]);
        }
    }
    write_numeric(path, &["x", "h", "u"], &rows)
}
