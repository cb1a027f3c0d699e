//! Output files.
//!
//! - JSON reports are pretty-printed with a trailing newline.
//! - Per-user CSV columns: `i_prime,k,h,i_ab_bits,chi_bits,i_res_bits,delta_bits,beta,f_s,raw_bits,key_rate_bps,t_bound,bound_bits_per_use,bound_rate_bps`.
//! - Dense matrices are text: a `# rows=R cols=C` header, then one space-separated row per line.
//!
//! Floating-point values use the shortest representation that round-trips.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::CliError;
use cvqan_core::skr::SkrReport;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct UserRow {
    i_prime: usize,
    k: usize,
    h: usize,
    i_ab_bits: f64,
    chi_bits: f64,
    i_res_bits: f64,
    delta_bits: f64,
    beta: f64,
    f_s: f64,
    raw_bits: f64,
    key_rate_bps: f64,
    t_bound: f64,
    bound_bits_per_use: f64,
    bound_rate_bps: f64,
}

pub fn write_user_csv(path: &Path, report: &SkrReport) -> Result<(), CliError> {
    let rows: Vec<UserRow> = report
        .per_user
        .iter()
        .map(|u| UserRow {
            i_prime: u.i_prime,
            k: u.k,
            h: u.h,
            i_ab_bits: u.i_ab,
            chi_bits: u.chi,
            i_res_bits: u.i_res,
            delta_bits: u.delta,
            beta: u.beta,
            f_s: u.f_s,
            raw_bits: u.raw,
            key_rate_bps: u.key_rate,
            t_bound: u.t_bound,
            bound_bits_per_use: u.bound_bits_per_use,
            bound_rate_bps: u.bound_rate,
        })
        .collect();
    write_csv(path, &rows)
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<(), CliError> {
    let mut text = format!("# rows={} cols={}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(" "));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses a matrix written by [`write_matrix`].
pub fn read_matrix(text: &str) -> Result<DMatrix<f64>, CliError> {
    let bad = |m: &str| CliError::Validation(vec![format!("matrix file: {m}")]);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty"))?;
    let dims: Vec<usize> = header
        .trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('=').and_then(|(_, v)| v.parse().ok()))
        .collect();
    let [rows, cols] = dims[..] else { return Err(bad("malformed header")) };
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines {
        for v in line.split_whitespace() {
            data.push(v.parse::<f64>().map_err(|_| bad("non-numeric entry"))?);
        }
    }
    if data.len() != rows * cols {
        return Err(bad("entry count does not match header"));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5e-17, 3.0, 0.1, 5.47, f64::MIN_POSITIVE]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        write_matrix(&p, &m).unwrap();
        assert_eq!(read_matrix(&fs::read_to_string(&p).unwrap()).unwrap(), m);
    }
}
