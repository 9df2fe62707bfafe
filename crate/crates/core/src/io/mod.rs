//! File formats, manifests and dataset generation.
//!
//! | file | layout |
//! |------|--------|
//! | `.spk` spike stream | 34-byte header, then `N * ceil(H*W/8)` payload bytes |
//! | `.isi` ISI plane | 16-byte header, then `H*W` little-endian `u16` |
//! | `.npm` noise maps | 14-byte header, then four `H*W` little-endian `f64` maps |
//! | luminance | directory of PGM frames plus a `luminance.toml` sidecar |
//! | manifests and configs | TOML |
//! | reports | CSV |
//!
//! See the individual modules for byte-level tables.

pub mod dataset;
pub mod isi_file;
pub mod luminance;
pub mod manifest;
pub mod params_file;
pub mod report;
pub mod spike_file;

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Little-endian cursor over a byte slice.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], what: &'static str) -> Self {
        Self { buf, pos: 0, what }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], crate::FormatError> {
        if self.buf.len() - self.pos < n {
            return Err(crate::FormatError::Truncated {
                what: self.what,
                expected: (self.pos + n) as u64,
                found: self.buf.len() as u64,
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn magic(&mut self, expected: [u8; 4]) -> Result<(), crate::FormatError> {
        let found: [u8; 4] = self.take(4)?.try_into().unwrap();
        if found != expected {
            return Err(crate::FormatError::BadMagic { expected, found });
        }
        Ok(())
    }

    pub(crate) fn u16(&mut self) -> Result<u16, crate::FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> Result<u32, crate::FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, crate::FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}
