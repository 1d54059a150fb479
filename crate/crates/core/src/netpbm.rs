//! Binary Netpbm I/O: PPM (`P6`) and PGM (`P5`) with maxval 255.
//!
//! Gray maps are promoted to RGB by replicating the plane. Output is always
//! `P6\n<w> <h>\n255\n` followed by the raw interleaved payload, so writing a
//! decoded P6 file reproduces its pixel bytes exactly.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::image::{ImageError, Plane, RgbImage};

#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("pixel payload too short: expected {expected} bytes, got {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, NetpbmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(NetpbmError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| NetpbmError::MalformedHeader(format!("{what} out of range")))
    }
}

/// Decodes a P6 or P5 byte buffer.
pub fn decode(bytes: &[u8]) -> Result<RgbImage, NetpbmError> {
    let channels = match bytes.get(..2) {
        Some(b"P6") => 3,
        Some(b"P5") => 1,
        Some([b'P', d]) if d.is_ascii_digit() => {
            return Err(NetpbmError::UnsupportedFormat(format!(
                "netpbm variant P{}",
                *d as char
            )))
        }
        _ => {
            return Err(NetpbmError::UnsupportedFormat(
                "not a binary PPM/PGM file".into(),
            ))
        }
    };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(NetpbmError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(NetpbmError::UnsupportedFormat(format!(
            "maxval {maxval} (only 255 is supported)"
        )));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(NetpbmError::MalformedHeader(
                "missing separator after maxval".into(),
            ))
        }
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| NetpbmError::MalformedHeader("dimensions overflow".into()))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(NetpbmError::TruncatedPayload {
            expected,
            actual: payload.len(),
        });
    }
    let payload = &payload[..expected];
    if channels == 3 {
        Ok(RgbImage::from_interleaved(width, height, payload)?)
    } else {
        Ok(RgbImage::from_gray(Plane::new(
            width,
            height,
            payload.to_vec(),
        )?))
    }
}

pub fn encode(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(&image.to_interleaved());
    out
}

pub fn read_image(path: impl AsRef<Path>) -> Result<RgbImage, NetpbmError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| NetpbmError::Io {
        path: path.to_owned(),
        source,
    })?;
    decode(&bytes)
}

pub fn write_image(image: &RgbImage, path: impl AsRef<Path>) -> Result<(), NetpbmError> {
    let path = path.as_ref();
    fs::write(path, encode(image)).map_err(|source| NetpbmError::Io {
        path: path.to_owned(),
        source,
    })
}
