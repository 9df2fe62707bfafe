//! `.npm` noise-map files.
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 4 | magic `NPM1` |
//! | 4  | 2 | version (`u16`, currently 1) |
//! | 6  | 4 | height `H` (`u32`) |
//! | 10 | 4 | width `W` (`u32`) |
//! | 14 | `8*H*W` each | conversion rate, dark current, capacitor mismatch, bias voltage (`f64`) |

use std::path::Path;

use super::{read_file, write_file, Reader};
use crate::error::{FormatError, Result};
use crate::noise::NoiseParams;

pub const MAGIC: [u8; 4] = *b"NPM1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 14;

pub fn encode_params(p: &NoiseParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 32 * p.pixels());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(p.height as u32).to_le_bytes());
    out.extend_from_slice(&(p.width as u32).to_le_bytes());
    for map in [&p.alpha, &p.dark, &p.cap, &p.bias] {
        for v in map {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<NoiseParams, FormatError> {
    let mut r = Reader::new(bytes, "noise maps");
    r.magic(MAGIC)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let height = r.u32()? as usize;
    let width = r.u32()? as usize;
    let n = height * width;
    if n == 0 {
        return Err(FormatError::InvalidHeader(format!("map size {height}x{width}")));
    }
    let mut map = || -> Result<Vec<f64>, FormatError> {
        (0..n)
            .map(|_| r.u64().map(f64::from_bits))
            .collect()
    };
    let alpha = map()?;
    let dark = map()?;
    let cap = map()?;
    let bias = map()?;
    if r.remaining() > 0 {
        return Err(FormatError::TrailingData(r.remaining() as u64));
    }
    Ok(NoiseParams {
        height,
        width,
        alpha,
        dark,
        cap,
        bias,
    })
}

pub fn write_params(p: &NoiseParams, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_params(p))
}

pub fn read_params(path: impl AsRef<Path>) -> Result<NoiseParams> {
    Ok(decode_params(&read_file(path.as_ref())?)?)
}
