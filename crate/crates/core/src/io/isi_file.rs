//! `.isi` plane files.
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 4 | magic `ISI1` |
//! | 4  | 4 | height `H` (`u32`) |
//! | 8  | 4 | width `W` (`u32`) |
//! | 12 | 4 | reference frame (`u32`) |
//! | 16 | `2*H*W` | intervals, row-major `u16`; `0xFFFF` = unknown |
//!
//! A plane sequence is a directory of such files, ordered by reference frame.
//! The search window is not stored; planes read back report `window = 0`.

use std::path::{Path, PathBuf};

use super::{read_file, write_file, Reader};
use crate::error::{Error, FormatError, Result};
use crate::isi::IsiPlane;

pub const MAGIC: [u8; 4] = *b"ISI1";
pub const HEADER_LEN: usize = 16;

pub fn encode_plane(plane: &IsiPlane) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * plane.values.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(plane.height as u32).to_le_bytes());
    out.extend_from_slice(&(plane.width as u32).to_le_bytes());
    out.extend_from_slice(&(plane.ref_frame as u32).to_le_bytes());
    for v in &plane.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_plane(bytes: &[u8]) -> Result<IsiPlane, FormatError> {
    let mut r = Reader::new(bytes, "ISI plane");
    r.magic(MAGIC)?;
    let height = r.u32()? as usize;
    let width = r.u32()? as usize;
    let ref_frame = r.u32()? as usize;
    if height == 0 || width == 0 {
        return Err(FormatError::InvalidHeader(format!(
            "plane size {height}x{width}"
        )));
    }
    let n = height * width;
    let values = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
    if r.remaining() > 0 {
        return Err(FormatError::TrailingData(r.remaining() as u64));
    }
    Ok(IsiPlane {
        height,
        width,
        ref_frame,
        window: 0,
        values,
    })
}

pub fn plane_file_name(ref_frame: usize) -> String {
    format!("isi_{ref_frame:08}.isi")
}

pub fn write_plane(plane: &IsiPlane, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_plane(plane))
}

pub fn read_plane(path: impl AsRef<Path>) -> Result<IsiPlane> {
    Ok(decode_plane(&read_file(path.as_ref())?)?)
}

pub fn write_plane_dir(planes: &[IsiPlane], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for p in planes {
        write_plane(p, dir.join(plane_file_name(p.ref_frame)))?;
    }
    Ok(())
}

/// Reads every `.isi` file in `dir`, sorted by reference frame.
pub fn read_plane_dir(dir: impl AsRef<Path>) -> Result<Vec<IsiPlane>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "isi"))
        .collect();
    paths.sort();
    let mut planes = paths
        .iter()
        .map(read_plane)
        .collect::<Result<Vec<_>>>()?;
    planes.sort_by_key(|p| p.ref_frame);
    Ok(planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isi::SENTINEL;

    #[test]
    fn layout_and_round_trip() {
        let p = IsiPlane {
            height: 2,
            width: 3,
            ref_frame: 258,
            window: 0,
            values: vec![1, 2, 300, SENTINEL, 7, 65534],
        };
        let bytes = encode_plane(&p);
        assert_eq!(bytes.len(), 16 + 12);
        assert_eq!(&bytes[..4], b"ISI1");
        assert_eq!(&bytes[12..16], &[2, 1, 0, 0]);
        assert_eq!(&bytes[22..24], &[0xFF, 0xFF]);
        assert_eq!(decode_plane(&bytes).unwrap(), p);
        assert!(matches!(
            decode_plane(&bytes[..20]),
            Err(FormatError::Truncated { .. })
        ));
    }

    #[test]
    fn directory_round_trip_is_ordered() {
        let dir = tempfile::tempdir().unwrap();
        let planes: Vec<IsiPlane> = (0..12).map(|t| IsiPlane::filled(2, 2, t, 0, t as u16 + 1)).collect();
        write_plane_dir(&planes, dir.path()).unwrap();
        assert_eq!(read_plane_dir(dir.path()).unwrap(), planes);
    }
}
