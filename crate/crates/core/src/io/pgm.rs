//! Minimal binary PGM (P5) codec.
//!
//! Writing always produces `P5\n<w> <h>\n255\n` followed by one byte per pixel. Reading
//! accepts any P5 file with maxval up to 65535 and `#` comments in the header.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Dims, Grid};

/// Encode 8-bit samples, row-major.
pub fn encode(dims: Dims, samples: &[u8]) -> Result<Vec<u8>> {
    if samples.len() != dims.len() {
        return Err(Error::Usage(format!(
            "{} samples for a {}x{} image",
            samples.len(),
            dims.width,
            dims.height
        )));
    }
    let mut out = format!("P5\n{} {}\n255\n", dims.width, dims.height).into_bytes();
    out.extend_from_slice(samples);
    Ok(out)
}

/// Min-max map a real grid onto `0..=255`. A constant grid maps to all zeros.
pub fn quantize(grid: &Grid) -> Vec<u8> {
    match grid.normalized() {
        Some(n) => n
            .as_slice()
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect(),
        None => vec![0; grid.dims().len()],
    }
}

pub fn write(path: &Path, grid: &Grid) -> Result<()> {
    let bytes = encode(grid.dims(), &quantize(grid))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Decoded samples together with the header's maxval.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub dims: Dims,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

pub fn decode(bytes: &[u8]) -> Result<Decoded> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    if magic != "P5" {
        return Err(Error::Format(format!("expected P5 magic, found '{magic}'")));
    }
    let width = header_number(bytes, &mut pos)?;
    let height = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let dims = Dims::new(width, height);
    let wide = maxval > 255;
    let need = dims.len() * if wide { 2 } else { 1 };
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::Format("truncated raster".into()))?;
    let samples = if wide {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raster.iter().map(|&b| b as u16).collect()
    };
    Ok(Decoded {
        dims,
        maxval: maxval as u16,
        samples,
    })
}

/// Read a P5 file into a grid with samples scaled to `[0, 1]` by maxval.
pub fn read_unit(path: &Path) -> Result<Grid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let d = decode(&bytes)?;
    let scale = d.maxval as f64;
    Grid::from_vec(
        d.dims,
        d.samples
            .iter()
            .map(|&s| (s as f64 / scale).min(1.0))
            .collect(),
    )
}

fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if bytes.get(*pos) == Some(&b'#') {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("truncated header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos]).map_err(|_| Error::Format("non-ascii header".into()))
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| Error::Format(format!("bad header number '{tok}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_exact() {
        let bytes = encode(Dims::new(3, 2), &[0, 1, 2, 3, 4, 255]).unwrap();
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert_eq!(bytes.len(), 17);
        let d = decode(&bytes).unwrap();
        assert_eq!(d.samples, vec![0, 1, 2, 3, 4, 255]);
    }

    #[test]
    fn decodes_comments_and_wide_samples() {
        let mut bytes = b"P5 # made by hand\n2 1\n# wide\n1000\n".to_vec();
        bytes.extend_from_slice(&[0x03, 0xe8, 0x01, 0xf4]);
        let d = decode(&bytes).unwrap();
        assert_eq!(d.maxval, 1000);
        assert_eq!(d.samples, vec![1000, 500]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode(b"P2\n1 1\n255\n0").is_err());
        assert!(decode(b"P5\n4 4\n255\n\x00\x00").is_err());
        assert!(decode(b"P5\n").is_err());
    }

    #[test]
    fn quantize_spans_full_range() {
        let g = Grid::from_rows(&[[-2.0, 0.0, 2.0]]).unwrap();
        assert_eq!(quantize(&g), vec![0, 128, 255]);
        assert_eq!(quantize(&Grid::filled(Dims::new(2, 1), 3.0)), vec![0, 0]);
    }
}
