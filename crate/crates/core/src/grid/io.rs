//! Field serialization: CSV for plotting and a raw little-endian block with a
//! fixed 64-byte header for exact round trips.
//!
//! Header layout (all little-endian):
//!
//! | bytes  | content                         |
//! |--------|---------------------------------|
//! | 0..4   | magic `PFLD`                    |
//! | 4..6   | format version (`u16`, 1)       |
//! | 6..8   | dimension (`u16`)               |
//! | 8..32  | node counts, 3 × `u64`          |
//! | 32..56 | spacings, 3 × `f64`             |
//! | 56..64 | timestamp (`f64`)               |
//!
//! Unused axes carry count 1 and spacing 0. The values follow as `f64`, one
//! per lattice node in axis-0-fastest order.

use super::{Field, Grid};
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::sync::Arc;

pub const HEADER_LEN: usize = 64;
const MAGIC: &[u8; 4] = b"PFLD";
const VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryHeader {
    pub dim: usize,
    pub counts: [u64; 3],
    pub spacing: [f64; 3],
    pub time: f64,
}

impl BinaryHeader {
    fn of(field: &Field) -> Self {
        let grid = field.grid();
        let mut counts = [1u64; 3];
        let mut spacing = [0.0; 3];
        for a in 0..grid.dim() {
            counts[a] = grid.counts()[a] as u64;
            spacing[a] = grid.spacing()[a];
        }
        Self {
            dim: grid.dim(),
            counts,
            spacing,
            time: field.time(),
        }
    }

    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut buf = [0u8; HEADER_LEN];
        buf[0..4].copy_from_slice(MAGIC);
        buf[4..6].copy_from_slice(&VERSION.to_le_bytes());
        buf[6..8].copy_from_slice(&(self.dim as u16).to_le_bytes());
        for a in 0..3 {
            buf[8 + 8 * a..16 + 8 * a].copy_from_slice(&self.counts[a].to_le_bytes());
            buf[32 + 8 * a..40 + 8 * a].copy_from_slice(&self.spacing[a].to_le_bytes());
        }
        buf[56..64].copy_from_slice(&self.time.to_le_bytes());
        buf
    }

    fn decode(buf: &[u8; HEADER_LEN]) -> Result<Self> {
        if &buf[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([buf[4], buf[5]]);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let dim = u16::from_le_bytes([buf[6], buf[7]]) as usize;
        if !(1..=3).contains(&dim) {
            return Err(Error::Format(format!("dimension {dim} out of range")));
        }
        let word = |off: usize| -> [u8; 8] { buf[off..off + 8].try_into().unwrap() };
        let mut counts = [0u64; 3];
        let mut spacing = [0.0; 3];
        for a in 0..3 {
            counts[a] = u64::from_le_bytes(word(8 + 8 * a));
            spacing[a] = f64::from_le_bytes(word(32 + 8 * a));
        }
        Ok(Self {
            dim,
            counts,
            spacing,
            time: f64::from_le_bytes(word(56)),
        })
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product::<u64>() as usize
    }

    fn matches(&self, grid: &Grid) -> bool {
        self.dim == grid.dim()
            && (0..grid.dim()).all(|a| {
                self.counts[a] == grid.counts()[a] as u64 && self.spacing[a] == grid.spacing()[a]
            })
    }
}

pub fn write_binary<W: Write>(field: &Field, mut out: W) -> Result<()> {
    out.write_all(&BinaryHeader::of(field).encode())?;
    let mut body = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        body.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&body)?;
    Ok(())
}

pub fn read_binary_header<R: Read>(mut input: R) -> Result<BinaryHeader> {
    let mut buf = [0u8; HEADER_LEN];
    input.read_exact(&mut buf)?;
    BinaryHeader::decode(&buf)
}

/// Reads a field written by [`write_binary`] onto a grid with the same
/// shape.
pub fn read_binary<R: Read>(grid: &Arc<Grid>, mut input: R) -> Result<Field> {
    let header = read_binary_header(&mut input)?;
    if !header.matches(grid) {
        return Err(Error::Format(format!(
            "header shape {:?}/{:?} does not match the grid",
            header.counts, header.spacing
        )));
    }
    let mut body = vec![0u8; 8 * header.node_count()];
    input.read_exact(&mut body)?;
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::from_values(grid, values, header.time)
}

/// CSV with one row per lattice node: coordinates then value.
pub fn write_csv<W: Write>(field: &Field, mut out: W) -> Result<()> {
    let grid = field.grid();
    let names = ["x", "y", "z"];
    let header: Vec<&str> = names[..grid.dim()].to_vec();
    writeln!(out, "{},value", header.join(","))?;
    for (i, v) in field.values().iter().enumerate() {
        let x = grid.coords(i);
        for xa in &x[..grid.dim()] {
            write!(out, "{xa},")?;
        }
        writeln!(out, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn binary_round_trip_is_exact(
            nx in 8usize..20, ny in 8usize..14,
            t in -10.0f64..10.0,
            seed in any::<u64>(),
        ) {
            let g = build_grid(&DomainSpec::periodic(&[0.0, 1.0], &[3.0, 0.7]), &[nx, ny]).unwrap();
            let f = Field::from_fn(&g, t, |x| ((seed % 97) as f64 * x[0]).sin() + x[1].exp());
            let mut buf = Vec::new();
            write_binary(&f, &mut buf).unwrap();
            prop_assert_eq!(buf.len(), HEADER_LEN + 8 * g.len());
            let back = read_binary(&g, buf.as_slice()).unwrap();
            prop_assert_eq!(back.time(), t);
            prop_assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[16]).unwrap();
        let other = build_grid(&DomainSpec::periodic(&[0.0], &[1.0]), &[32]).unwrap();
        let mut buf = Vec::new();
        write_binary(&Field::zeros(&g, 0.5), &mut buf).unwrap();
        assert!(read_binary(&other, buf.as_slice()).is_err());
        buf[0] = b'X';
        assert!(read_binary(&g, buf.as_slice()).is_err());
    }

    #[test]
    fn csv_has_coordinate_columns() {
        let g = build_grid(&DomainSpec::periodic(&[0.0, 0.0], &[1.0, 1.0]), &[8, 8]).unwrap();
        let mut buf = Vec::new();
        write_csv(&Field::constant(&g, 2.0, 0.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,value"));
        assert_eq!(lines.count(), 64);
    }
}
