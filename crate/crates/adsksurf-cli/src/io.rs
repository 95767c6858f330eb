//! CSV reading and writing with reproducible formatting: values are printed
//! with 17 significant digits so identical runs produce byte-identical
//! files; `#` lines carry run parameters and are skipped on input.

use std::fmt::Write as _;
use std::path::Path;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV file: `#`-prefixed parameter lines, a header row, then rows.
pub fn write_csv(
    path: &Path,
    params: &[(&str, String)],
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    let mut out = String::new();
    for (k, v) in params {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "{header}");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    std::fs::write(path, out)
}

/// Read a CSV file written by [`write_csv`] (or any comma-separated numeric
/// table with one header row and optional `#` comments). Returns the header
/// fields and the numeric rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut header = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return Err(format!("line {}: {e}", lineno + 1)),
        }
    }
    match header {
        Some(h) => Ok((h, rows)),
        None => Err("empty file".to_string()),
    }
}

/// Reconstruct a rectangular grid layout from (u, v) columns: returns
/// (nu, nv, hu, hv, u0, v0) when rows enumerate a complete grid in row-major
/// order with v fastest.
pub fn grid_layout(rows: &[Vec<f64>]) -> Result<(usize, usize, f64, f64, f64, f64), String> {
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    let v0 = rows[0][1];
    let mut nv = 0;
    for r in rows {
        if nv > 0 && (r[1] - v0).abs() < 1e-12 {
            break;
        }
        nv += 1;
    }
    if nv == 0 || rows.len() % nv != 0 {
        return Err("rows do not form a rectangular grid".into());
    }
    let nu = rows.len() / nv;
    let u0 = rows[0][0];
    let hu = if nu > 1 { rows[nv][0] - u0 } else { 1.0 };
    let hv = if nv > 1 { rows[1][1] - v0 } else { 1.0 };
    // spot-check the layout
    for (k, r) in rows.iter().enumerate() {
        let i = k / nv;
        let j = k % nv;
        let eu = u0 + i as f64 * hu;
        let ev = v0 + j as f64 * hv;
        if (r[0] - eu).abs() > 1e-9 * (1.0 + eu.abs()) || (r[1] - ev).abs() > 1e-9 * (1.0 + ev.abs())
        {
            return Err(format!("row {k} breaks the grid layout"));
        }
    }
    Ok((nu, nv, hu, hv, u0, v0))
}
