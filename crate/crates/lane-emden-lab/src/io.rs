//! Artifact file formats: CSV tables, 16-bit PGM heatmaps, JSON records.
//!
//! Everything here is deterministic byte-for-byte: floats print in Rust's
//! shortest round-trip form, CSV uses CRLF separators and minimal quoting,
//! PGM pixels are big-endian u16 scaled against the field maximum. Rerunning
//! the same build on the same inputs must reproduce identical files.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::field::Field;

/// Quotes a CSV field only when it contains a delimiter, quote, or line
/// break; embedded quotes double.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('"');
        for ch in s.chars() {
            if ch == '"' {
                out.push('"');
            }
            out.push(ch);
        }
        out.push('"');
        out
    } else {
        s.to_owned()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
    line.push_str("\r\n");
    line
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(csv_line(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>()).as_bytes())?;
    for row in rows {
        out.write_all(csv_line(row).as_bytes())?;
    }
    out.flush()
}

/// One row per unknown, in node order: x, y, value.
pub fn write_field_csv(path: &Path, field: &Field) -> io::Result<()> {
    let rows: Vec<Vec<String>> = (0..field.grid.n_unknowns())
        .map(|q| {
            let p = field.grid.node_point(q);
            vec![p[0].to_string(), p[1].to_string(), field.values[q].to_string()]
        })
        .collect();
    write_csv(path, &["x", "y", "value"], &rows)
}

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples) over the grid's
/// bounding lattice. Exterior nodes are 0; interior values scale linearly so
/// the field maximum lands on 65535. Rows run top-down, so the image y-axis
/// matches the usual plot orientation.
pub fn write_field_pgm(path: &Path, field: &Field) -> io::Result<()> {
    let g = &field.grid;
    let (nx, ny) = (g.nx, g.ny);
    let max = field.max_value().max(0.0);
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };

    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{nx} {ny}\n65535\n")?;
    for row in (0..ny).rev() {
        for col in 0..nx {
            let v = g
                .unknown_at(col as i64, row as i64)
                .map_or(0.0, |q| field.values[q as usize]);
            let px = (v * scale).round().clamp(0.0, 65535.0) as u16;
            out.write_all(&px.to_be_bytes())?;
        }
    }
    out.flush()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> io::Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::build_grid;
    use std::sync::Arc;

    #[test]
    fn csv_quoting_rules() {
        assert_eq!(csv_line(&["plain".into(), "1.5".into()]), "plain,1.5\r\n");
        assert_eq!(csv_line(&["a,b".into()]), "\"a,b\"\r\n");
        assert_eq!(csv_line(&["say \"hi\"".into()]), "\"say \"\"hi\"\"\"\r\n");
        assert_eq!(csv_line(&["two\nlines".into()]), "\"two\nlines\"\r\n");
    }

    #[test]
    fn field_csv_is_deterministic() {
        let grid = Arc::new(build_grid(&DomainSpec::unit_disk(), 2.0 / 32.0).unwrap());
        let f = crate::field::Field::from_fn(grid, |x| x[0] + 2.0 * x[1]);
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_field_csv(&p1, &f).unwrap();
        write_field_csv(&p2, &f).unwrap();
        let b1 = fs::read(&p1).unwrap();
        assert_eq!(b1, fs::read(&p2).unwrap());
        let text = String::from_utf8(b1).unwrap();
        assert!(text.starts_with("x,y,value\r\n"));
        assert_eq!(text.matches("\r\n").count(), f.grid.n_unknowns() + 1);
    }

    #[test]
    fn pgm_header_and_scaling() {
        let grid = Arc::new(build_grid(&DomainSpec::unit_disk(), 2.0 / 32.0).unwrap());
        let f = crate::field::Field::from_fn(grid.clone(), |x| {
            1.0 - (x[0] * x[0] + x[1] * x[1])
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        write_field_pgm(&path, &f).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header = format!("P5\n{} {}\n65535\n", grid.nx, grid.ny);
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len(), header.len() + 2 * grid.nx * grid.ny);
        // the maximum pixel is exactly 65535
        let pixels: Vec<u16> = bytes[header.len()..]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(pixels.iter().copied().max(), Some(65535));
    }

    #[test]
    fn json_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let value = serde_json::json!({"p": 10.0, "status": "completed", "names": ["a", "b"]});
        write_json(&path, &value).unwrap();
        let back: serde_json::Value = read_json(&path).unwrap();
        assert_eq!(back, value);
    }
}
