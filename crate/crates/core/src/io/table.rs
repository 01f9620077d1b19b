//! Comma-delimited tables with a header row and LF line endings.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Format a real with 6 significant digits, `%g` style: fixed notation for decimal
/// exponents in `-5..6`, scientific otherwise, trailing zeros trimmed.
pub fn sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // Round to 6 significant digits first so the exponent reflects the rounded value.
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Raw grid values, one CSV row per image row, full round-trip precision.
pub fn write_grid(path: &Path, grid: &Grid) -> Result<()> {
    let header: Vec<String> = (0..grid.width()).map(|x| format!("x{x}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = grid
        .as_slice()
        .chunks(grid.width())
        .map(|row| row.iter().map(|v| format!("{v:?}")).collect())
        .collect();
    write_rows(path, &header, &rows)
}

/// Read a headed CSV as the header plus string records.
pub fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let header = r.headers().map_err(io)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(io)?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5), "1.5");
        assert_eq!(sig6(21.254999), "21.255");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(0.00000123456789), "1.23457e-6");
        assert_eq!(sig6(-3.0), "-3");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn sig6_keeps_six_digits() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 98765.4321, 2.5e-3, 7.77e12] {
            let back: f64 = sig6(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 5e-6, "{v} -> {}", sig6(v));
        }
    }

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        let g = Grid::from_rows(&[[0.1, -2.5e-17], [3.0, 1.0 / 3.0]]).unwrap();
        write_grid(&p, &g).unwrap();
        let (header, rows) = read_rows(&p).unwrap();
        assert_eq!(header, vec!["x0", "x1"]);
        let back: Vec<f64> = rows.iter().flatten().map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, g.as_slice());
    }
}
