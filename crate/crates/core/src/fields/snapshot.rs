//! Field snapshot files: one JSON header line, then raw little-endian f64
//! values with x3 fastest, then x2, then x1.

use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Field, Parity, SpectralGrid};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub a: f64,
    pub parity: Parity,
    pub name: String,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &Field, name: &str, time: f64) -> Result<()> {
    let g = field.grid();
    let header = SnapshotHeader {
        n1: g.n1,
        n2: g.n2,
        n3: g.n3,
        a: g.a,
        parity: field.parity(),
        name: name.to_string(),
        time,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut bytes = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(r: R) -> Result<(SnapshotHeader, Field)> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    let grid = SpectralGrid::new(header.n1, header.n2, header.n3, header.a)?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::Config(format!(
            "snapshot payload has {} bytes, expected {}",
            bytes.len(),
            8 * grid.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = Field::from_values(grid, values, header.parity)?;
    Ok((header, field))
}

pub fn save_snapshot(path: &Path, field: &Field, name: &str, time: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_snapshot(&mut w, field, name, time)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<(SnapshotHeader, Field)> {
    read_snapshot(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_x3_fastest() {
        let g = SpectralGrid::new(8, 8, 10, 1.0).unwrap();
        let f = Field::from_fn(g, Parity::None, |x| x[0] * 100.0 + x[1] * 10.0 + x[2]);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, "u1", 0.25).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let header: serde_json::Value = serde_json::from_slice(&buf[..nl]).unwrap();
        assert_eq!(header["parity"], "none");
        assert_eq!(header["name"], "u1");
        let payload = &buf[nl + 1..];
        let second = f64::from_le_bytes(payload[8..16].try_into().unwrap());
        assert_eq!(second, f.at(0, 0, 1));
        let (h, back) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(h.time, 0.25);
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_rejected() {
        let g = SpectralGrid::cubic(8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &Field::zeros(g, Parity::Odd), "c", 0.0).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_snapshot(&buf[..]).is_err());
    }
}
