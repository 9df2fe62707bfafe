//! `.spk` spike stream files.
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 4 | magic `SPK1` |
//! | 4  | 2 | version (`u16`, currently 1) |
//! | 6  | 4 | height `H` (`u32`) |
//! | 10 | 4 | width `W` (`u32`) |
//! | 14 | 8 | frame count `N` (`u64`) |
//! | 22 | 8 | readout period in nanoseconds (`u64`) |
//! | 30 | 4 | flags (`u32`; bit 0 noisy, bit 1 ideal) |
//! | 34 | `N * ceil(H*W/8)` | frames, row-major, MSB first |
//!
//! All integers little-endian.

use std::path::Path;

use super::{read_file, write_file, Reader};
use crate::error::{FormatError, Result};
use crate::stream::{bytes_per_frame, SpikeStream, StreamFlags};

pub const MAGIC: [u8; 4] = *b"SPK1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 34;

/// Readout period in whole nanoseconds, as stored in the header.
pub fn delta_t_ns(delta_t: f64) -> u64 {
    (delta_t * 1e9).round() as u64
}

pub fn encode_stream(stream: &SpikeStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + stream.as_bytes().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(stream.height() as u32).to_le_bytes());
    out.extend_from_slice(&(stream.width() as u32).to_le_bytes());
    out.extend_from_slice(&(stream.frames() as u64).to_le_bytes());
    out.extend_from_slice(&delta_t_ns(stream.delta_t()).to_le_bytes());
    out.extend_from_slice(&stream.flags().0.to_le_bytes());
    out.extend_from_slice(stream.as_bytes());
    out
}

pub fn decode_stream(bytes: &[u8]) -> Result<SpikeStream, FormatError> {
    let mut r = Reader::new(bytes, "spike header");
    r.magic(MAGIC)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let height = r.u32()? as usize;
    let width = r.u32()? as usize;
    let frames = r.u64()?;
    let dt_ns = r.u64()?;
    let flags = StreamFlags(r.u32()?);
    if height == 0 || width == 0 {
        return Err(FormatError::InvalidHeader(format!(
            "sensor size {height}x{width}"
        )));
    }
    if dt_ns == 0 {
        return Err(FormatError::InvalidHeader("zero readout period".into()));
    }
    let expected = (frames as u128) * bytes_per_frame(height, width) as u128;
    let found = r.remaining() as u128;
    if found < expected {
        return Err(FormatError::Truncated {
            what: "spike payload",
            expected: (expected + r.pos() as u128).min(u64::MAX as u128) as u64,
            found: bytes.len() as u64,
        });
    }
    if found > expected {
        return Err(FormatError::TrailingData((found - expected) as u64));
    }
    let payload = r.take(expected as usize)?.to_vec();
    let delta_t = dt_ns as f64 / 1e9;
    let stream = SpikeStream::from_packed(height, width, frames as usize, delta_t, payload)
        .map_err(|e| FormatError::InvalidHeader(e.to_string()))?;
    Ok(stream.with_flags(flags))
}

pub fn write_stream(stream: &SpikeStream, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_stream(stream))
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<SpikeStream> {
    Ok(decode_stream(&read_file(path.as_ref())?)?)
}
