//! Luminance sequences on disk: a directory of grayscale PGM frames (8 or
//! 16 bit, sorted by file name) plus a `luminance.toml` sidecar:
//!
//! ```toml
//! frame_duration = 0.001   # seconds each frame is held
//! intensity_scale = 2.0    # intensity of a full-scale pixel
//! ```
//!
//! A pixel value `v` with maximum `maxval` maps to `v / maxval * intensity_scale`.

use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, FormatError, Result};
use crate::sensor::LuminanceSequence;

pub const SIDECAR: &str = "luminance.toml";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LuminanceSidecar {
    pub frame_duration: f64,
    #[serde(default = "unit_scale")]
    pub intensity_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn image_error(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Format(FormatError::Syntax(format!("{}: {other}", path.display()))),
    }
}

pub fn read_sidecar(dir: &Path) -> Result<LuminanceSidecar> {
    let path = dir.join(SIDECAR);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text)
        .map_err(|e| FormatError::Syntax(format!("{}: {e}", path.display())).into())
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|x| x.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Loads every `*.pgm` in `dir` as one luminance frame.
pub fn read_luminance_dir(dir: impl AsRef<Path>) -> Result<LuminanceSequence> {
    let dir = dir.as_ref();
    let side = read_sidecar(dir)?;
    let paths = frame_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::config(format!("no .pgm frames in {}", dir.display())));
    }
    let mut dims = None;
    let mut data = Vec::new();
    for path in &paths {
        let img = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .decode()
            .map_err(|e| image_error(path, e))?
            .into_luma16();
        let d = (img.height() as usize, img.width() as usize);
        match dims {
            None => dims = Some(d),
            Some(first) if first != d => {
                return Err(Error::dims(
                    format!("{}x{} frame", first.0, first.1),
                    format!("{}x{} in {}", d.0, d.1, path.display()),
                ))
            }
            _ => {}
        }
        let k = side.intensity_scale / u16::MAX as f64;
        data.extend(img.as_raw().iter().map(|&v| v as f64 * k));
    }
    let (h, w) = dims.unwrap();
    LuminanceSequence::new(h, w, side.frame_duration, data)
}

/// Writes `lum` as 16-bit PGM frames `frame_00000.pgm`, ... plus the sidecar.
/// Values are quantized against `intensity_scale`, which must cover the
/// sequence's maximum.
pub fn write_luminance_dir(
    lum: &LuminanceSequence,
    intensity_scale: f64,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if !(intensity_scale.is_finite() && intensity_scale > 0.0) {
        return Err(Error::config(format!(
            "intensity_scale must be positive, got {intensity_scale}"
        )));
    }
    for m in 0..lum.frames() {
        let px: Vec<u16> = lum
            .frame(m)
            .iter()
            .map(|&v| (v / intensity_scale * u16::MAX as f64).round().clamp(0.0, u16::MAX as f64) as u16)
            .collect();
        let path = dir.join(format!("frame_{m:05}.pgm"));
        ImageBuffer::<Luma<u16>, _>::from_raw(lum.width() as u32, lum.height() as u32, px)
            .expect("frame buffer matches dimensions")
            .save(&path)
            .map_err(|e| image_error(&path, e))?;
    }
    let side = LuminanceSidecar {
        frame_duration: lum.frame_duration(),
        intensity_scale,
    };
    let text = toml::to_string(&side).map_err(|e| Error::config(e.to_string()))?;
    let path = dir.join(SIDECAR);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Saves a row-major image as 8-bit PGM with `value / scale` mapped onto
/// 0..=255. A `scale` of `None` uses the image maximum. Returns the scale used.
pub fn write_pgm8(
    values: &[f64],
    height: usize,
    width: usize,
    scale: Option<f64>,
    path: impl AsRef<Path>,
) -> Result<f64> {
    let path = path.as_ref();
    if values.len() != height * width {
        return Err(Error::dims(
            format!("{height}x{width} image"),
            format!("{} values", values.len()),
        ));
    }
    let scale = scale
        .unwrap_or_else(|| values.iter().cloned().fold(0.0, f64::max))
        .max(f64::MIN_POSITIVE);
    let px: Vec<u8> = values
        .iter()
        .map(|&v| (v / scale * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    ImageBuffer::<Luma<u8>, _>::from_raw(width as u32, height as u32, px)
        .expect("image buffer matches dimensions")
        .save(path)
        .map_err(|e| image_error(path, e))?;
    Ok(scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let lum = LuminanceSequence::from_fn(3, 4, 5, 1e-3, |m, y, x| {
            (m * 12 + y * 4 + x) as f64 / 60.0 * 2.0
        })
        .unwrap();
        write_luminance_dir(&lum, 2.0, dir.path()).unwrap();
        let back = read_luminance_dir(dir.path()).unwrap();
        assert_eq!(back.frames(), 5);
        assert_eq!((back.height(), back.width()), (3, 4));
        assert_eq!(back.frame_duration(), 1e-3);
        for m in 0..5 {
            for (a, b) in lum.frame(m).iter().zip(back.frame(m)) {
                assert!((a - b).abs() <= 2.0 / 65535.0, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eight_bit_frames_scale_to_full_range() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.pgm"), b"P5\n2 1\n255\n\x00\xff").unwrap();
        std::fs::write(dir.path().join(SIDECAR), "frame_duration = 0.5\nintensity_scale = 3.0\n").unwrap();
        let lum = read_luminance_dir(dir.path()).unwrap();
        assert_eq!(lum.frame(0), &[0.0, 3.0]);
    }

    #[test]
    fn missing_sidecar_and_bad_frames_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_luminance_dir(dir.path()), Err(Error::Io { .. })));
        std::fs::write(dir.path().join(SIDECAR), "frame_duration = 0.5\n").unwrap();
        assert!(read_luminance_dir(dir.path()).is_err());
        std::fs::write(dir.path().join("a.pgm"), b"P5\n2 1\n255\n\x00").unwrap();
        assert!(read_luminance_dir(dir.path()).is_err());
    }

    #[test]
    fn pgm8_uses_maximum_by_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.pgm");
        let scale = write_pgm8(&[0.0, 0.5, 1.0, 2.0], 2, 2, None, &path).unwrap();
        assert_eq!(scale, 2.0);
        let img = image::open(&path).unwrap().into_luma8();
        assert_eq!(img.as_raw(), &[0, 64, 128, 255]);
    }
}
