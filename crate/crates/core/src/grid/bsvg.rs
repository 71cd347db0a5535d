//! BSVG grid files.
//!
//! Layout (little-endian): `b"BSVG"`, `u16` version = 1, `u8` dim, `u8` level,
//! `u8` domain (0 torus, 1 cube), `u8` dtype (0 real, 1 complex), two zero bytes,
//! then binary64 values in cell order, complex values interleaved as `(re, im)`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{Domain, DyadicGrid, GridFunction};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"BSVG";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    Real,
    Complex,
}

pub fn write_bsvg_to<W: Write>(mut w: W, f: &GridFunction, dtype: Dtype) -> Result<()> {
    let grid = f.grid();
    if dtype == Dtype::Real && !f.is_real() {
        return Err(Error::Format("complex values cannot be written as real".into()));
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + f.len() * 16);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(grid.dim() as u8);
    buf.push(grid.level() as u8);
    buf.push(grid.domain().code());
    buf.push(match dtype {
        Dtype::Real => 0,
        Dtype::Complex => 1,
    });
    buf.extend_from_slice(&[0, 0]);
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        if dtype == Dtype::Complex {
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_bsvg_from<R: Read>(mut r: R) -> Result<(GridFunction, Dtype)> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|e| Error::Format(format!("short header: {e}")))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let domain = Domain::from_code(header[8])
        .ok_or_else(|| Error::Format(format!("bad domain code {}", header[8])))?;
    let dtype = match header[9] {
        0 => Dtype::Real,
        1 => Dtype::Complex,
        d => return Err(Error::Format(format!("bad dtype {d}"))),
    };
    if header[10] != 0 || header[11] != 0 {
        return Err(Error::Format("reserved bytes must be zero".into()));
    }
    let grid = DyadicGrid::new(header[6] as usize, header[7] as usize, domain)?;
    let width = if dtype == Dtype::Complex { 16 } else { 8 };
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != grid.len() * width {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            grid.len() * width
        )));
    }
    let word = |k: usize| f64::from_le_bytes(payload[8 * k..8 * k + 8].try_into().unwrap());
    let values = (0..grid.len())
        .map(|i| match dtype {
            Dtype::Real => Complex64::new(word(i), 0.0),
            Dtype::Complex => Complex64::new(word(2 * i), word(2 * i + 1)),
        })
        .collect();
    Ok((GridFunction::new(grid, values)?, dtype))
}

pub fn write_bsvg(path: impl AsRef<Path>, f: &GridFunction, dtype: Dtype) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_bsvg_to(std::io::BufWriter::new(file), f, dtype)
}

pub fn read_bsvg(path: impl AsRef<Path>) -> Result<(GridFunction, Dtype)> {
    let file = std::fs::File::open(path)?;
    read_bsvg_from(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn header_bytes_are_exact() {
        let g = make_grid(2, 1, Domain::Cube).unwrap();
        let f = GridFunction::from_real(g, vec![1.0, -2.0, 0.5, 0.0]).unwrap();
        let mut out = Vec::new();
        write_bsvg_to(&mut out, &f, Dtype::Real).unwrap();
        assert_eq!(&out[..12], &[0x42, 0x53, 0x56, 0x47, 1, 0, 2, 1, 1, 0, 0, 0]);
        assert_eq!(out.len(), 12 + 4 * 8);
        assert_eq!(&out[12..20], &1.0f64.to_le_bytes());
        let (back, dtype) = read_bsvg_from(&out[..]).unwrap();
        assert_eq!(dtype, Dtype::Real);
        assert_eq!(back, f);
    }

    #[test]
    fn complex_round_trip_and_errors() {
        let g = make_grid(1, 2, Domain::Torus).unwrap();
        let f = GridFunction::new(
            g,
            (0..4).map(|k| Complex64::new(k as f64, -(k as f64) * 0.25)).collect(),
        )
        .unwrap();
        let mut out = Vec::new();
        write_bsvg_to(&mut out, &f, Dtype::Complex).unwrap();
        assert_eq!(out[9], 1);
        assert_eq!(&out[20..28], &(-0.0f64).to_le_bytes());
        assert_eq!(read_bsvg_from(&out[..]).unwrap().0, f);
        assert!(write_bsvg_to(Vec::new(), &f, Dtype::Real).is_err());
        let mut bad = out.clone();
        bad[0] = b'X';
        assert!(read_bsvg_from(&bad[..]).is_err());
        let mut bad = out.clone();
        bad.pop();
        assert!(read_bsvg_from(&bad[..]).is_err());
        let mut bad = out;
        bad[10] = 1;
        assert!(read_bsvg_from(&bad[..]).is_err());
    }
}
