//! PGM reader (P2/P5, maxval up to 255) and P5 writer.

use std::fs;
use std::path::Path;

use super::{BinaryMask, GrayImage};
use crate::error::{Error, PgmError, Result};

/// Anything that can be written as an 8-bit P5 raster.
pub trait PgmRaster {
    fn pgm_dims(&self) -> (usize, usize);
    fn pgm_levels(&self) -> Vec<u8>;
}

impl PgmRaster for GrayImage {
    fn pgm_dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn pgm_levels(&self) -> Vec<u8> {
        self.to_levels()
    }
}

impl PgmRaster for BinaryMask {
    fn pgm_dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn pgm_levels(&self) -> Vec<u8> {
        self.bits().iter().map(|&b| if b { 255 } else { 0 }).collect()
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .token()
            .ok_or_else(|| PgmError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| {
                PgmError::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Decodes PGM bytes. Samples are normalized by `maxval`, so a standard
/// 8-bit file maps level `v` to `v / 255`.
pub fn decode(data: &[u8]) -> Result<GrayImage, PgmError> {
    let mut cur = Cursor { data, pos: 0 };
    let magic = cur
        .token()
        .ok_or_else(|| PgmError::MalformedHeader("empty file".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into())),
    };
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| PgmError::MalformedHeader("dimensions overflow".into()))?;

    let mut samples = Vec::with_capacity(expected);
    if binary {
        // exactly one whitespace byte separates maxval from the raster
        match data.get(cur.pos) {
            Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(PgmError::Truncated { expected, found: 0 }),
        }
        let raster = &data[cur.pos..];
        if raster.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: raster.len(),
            });
        }
        samples.extend_from_slice(&raster[..expected]);
    } else {
        while samples.len() < expected {
            let Some(tok) = cur.token() else {
                return Err(PgmError::Truncated {
                    expected,
                    found: samples.len(),
                });
            };
            let v = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| {
                    PgmError::MalformedPixels(format!(
                        "not a sample: {:?}",
                        String::from_utf8_lossy(tok)
                    ))
                })?;
            if v > maxval {
                return Err(PgmError::MalformedPixels(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            samples.push(v as u8);
        }
    }
    if let Some(&v) = samples.iter().find(|&&v| u32::from(v) > maxval) {
        return Err(PgmError::MalformedPixels(format!(
            "sample {v} exceeds maxval {maxval}"
        )));
    }

    let scale = f64::from(maxval);
    let pixels = samples.iter().map(|&v| f64::from(v) / scale).collect();
    Ok(GrayImage::new(width, height, pixels).expect("decoded samples are in range"))
}

/// Encodes as binary P5 with maxval 255.
pub fn encode(raster: &impl PgmRaster) -> Vec<u8> {
    let (w, h) = raster.pgm_dims();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(raster.pgm_levels());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&data).map_err(|source| Error::Pgm {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a mask: any nonzero sample is foreground.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    Ok(BinaryMask::from_image(&load_pgm(path)?))
}

pub fn save_pgm(raster: &impl PgmRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(raster)).map_err(|e| Error::io(path, e))
}
