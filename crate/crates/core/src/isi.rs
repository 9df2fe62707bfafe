//! Inter-spike-interval (ISI) planes.
//!
//! The plane at frame `t` holds, per pixel, the distance between the last
//! spike at or before `t` and the first spike after `t`, both searched within
//! `window` frames of `t`. Pixels without both spikes get [`SENTINEL`].
//!
//! Also here: reciprocal normalization to `[0, 1]`, the multi-stage update
//! that shortens an interval using strictly nested intervals read from later
//! planes, and greedy decoding of a plane sequence back into spikes.

use crate::error::{Error, Result};
use crate::parallel;
use crate::stream::SpikeStream;

/// Marks a pixel without two bracketing spikes in the window.
pub const SENTINEL: u16 = u16::MAX;

/// Largest interval a plane can hold.
pub const MAX_INTERVAL: u16 = SENTINEL - 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsiPlane {
    pub height: usize,
    pub width: usize,
    pub ref_frame: usize,
    pub window: usize,
    pub values: Vec<u16>,
}

impl IsiPlane {
    pub fn filled(height: usize, width: usize, ref_frame: usize, window: usize, v: u16) -> Self {
        Self {
            height,
            width,
            ref_frame,
            window,
            values: vec![v; height * width],
        }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.values[row * self.width + col]
    }

    pub fn is_known(&self, pixel: usize) -> bool {
        self.values[pixel] != SENTINEL
    }
}

/// Reciprocal ISI plane. 1 means an interval of one frame, 0 means unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedIsiPlane {
    pub height: usize,
    pub width: usize,
    pub ref_frame: usize,
    pub values: Vec<f32>,
}

fn check_window(window: usize) -> Result<()> {
    if window == 0 || 2 * window > MAX_INTERVAL as usize {
        return Err(Error::config(format!(
            "window must be in 1..={}, got {window}",
            MAX_INTERVAL / 2
        )));
    }
    Ok(())
}

#[inline]
fn bracket(spikes: &[usize], t: usize, window: usize) -> u16 {
    let idx = spikes.partition_point(|&s| s <= t);
    if idx == 0 || idx == spikes.len() {
        return SENTINEL;
    }
    let (prev, next) = (spikes[idx - 1], spikes[idx]);
    if t - prev > window || next - t > window {
        return SENTINEL;
    }
    (next - prev) as u16
}

/// ISI plane at frame `t`.
pub fn compute_isi_plane(stream: &SpikeStream, t: usize, window: usize) -> Result<IsiPlane> {
    check_window(window)?;
    if t >= stream.frames() {
        return Err(Error::IndexOutOfRange {
            index: t,
            len: stream.frames(),
        });
    }
    let lo = t.saturating_sub(window);
    let hi = (t + window + 1).min(stream.frames());
    let values = parallel::map_range(stream.pixels(), |p| {
        let spikes: Vec<usize> = (lo..hi).filter(|&f| stream.get(f, p)).collect();
        bracket(&spikes, t, window)
    });
    Ok(IsiPlane {
        height: stream.height(),
        width: stream.width(),
        ref_frame: t,
        window,
        values,
    })
}

/// ISI planes for every frame of `stream`.
pub fn isi_sequence(stream: &SpikeStream, window: usize) -> Result<Vec<IsiPlane>> {
    check_window(window)?;
    let trains: Vec<Vec<usize>> = parallel::map_range(stream.pixels(), |p| stream.spike_frames(p));
    Ok(parallel::map_range(stream.frames(), |t| IsiPlane {
        height: stream.height(),
        width: stream.width(),
        ref_frame: t,
        window,
        values: trains.iter().map(|s| bracket(s, t, window)).collect(),
    }))
}

#[inline]
pub fn normalize_interval(interval: u32) -> f32 {
    1.0 / interval as f32
}

/// Inverse of [`normalize_interval`]; `None` for values that encode no
/// interval (zero, negative, NaN).
#[inline]
pub fn denormalize_value(v: f32) -> Option<u32> {
    if v > 0.0 {
        Some(((1.0 / v as f64).round() as u32).max(1))
    } else {
        None
    }
}

pub fn normalize_isi(plane: &IsiPlane) -> NormalizedIsiPlane {
    NormalizedIsiPlane {
        height: plane.height,
        width: plane.width,
        ref_frame: plane.ref_frame,
        values: plane
            .values
            .iter()
            .map(|&v| {
                if v == SENTINEL {
                    0.0
                } else {
                    normalize_interval(v as u32)
                }
            })
            .collect(),
    }
}

/// Intervals longer than [`MAX_INTERVAL`] saturate.
pub fn denormalize_isi(plane: &NormalizedIsiPlane, window: usize) -> IsiPlane {
    IsiPlane {
        height: plane.height,
        width: plane.width,
        ref_frame: plane.ref_frame,
        window,
        values: plane
            .values
            .iter()
            .map(|&v| match denormalize_value(v) {
                Some(i) => i.min(MAX_INTERVAL as u32) as u16,
                None => SENTINEL,
            })
            .collect(),
    }
}

fn check_sequence(planes: &[IsiPlane]) -> Result<()> {
    let first = planes
        .first()
        .ok_or_else(|| Error::config("empty ISI plane sequence"))?;
    for (i, p) in planes.iter().enumerate() {
        if p.height != first.height || p.width != first.width || p.values.len() != first.pixels() {
            return Err(Error::dims(
                format!("{}x{} planes", first.height, first.width),
                format!("{}x{} at index {i}", p.height, p.width),
            ));
        }
        if p.ref_frame != first.ref_frame + i {
            return Err(Error::config(format!(
                "planes must be consecutive: index {i} has frame {}, expected {}",
                p.ref_frame,
                first.ref_frame + i
            )));
        }
    }
    Ok(())
}

/// Best chain from every offset of one pixel's interval sequence.
///
/// A chain from offset `s` is a sequence `s = t0 < t1 < ... < tk` in which
/// every endpoint `tr + v[tr]` is strictly smaller than the previous one.
/// For each `s` this returns the final endpoint of the longest chain, ties
/// broken by the earliest endpoint. Unknown entries never join a chain.
fn chain_endpoints(v: &[u16]) -> Vec<usize> {
    let n = v.len();
    let mut len = vec![0u32; n];
    let mut end = vec![usize::MAX; n];
    for s in (0..n).rev() {
        if v[s] == SENTINEL {
            continue;
        }
        let e = s + v[s] as usize;
        let (mut best_len, mut best_end) = (0u32, e);
        for r in (s + 1)..e.min(n) {
            if v[r] == SENTINEL || r + v[r] as usize >= e {
                continue;
            }
            let cand = (len[r] + 1, end[r]);
            if cand.0 > best_len || (cand.0 == best_len && cand.1 < best_end) {
                best_len = cand.0;
                best_end = cand.1;
            }
        }
        len[s] = best_len;
        end[s] = best_end;
    }
    end
}

/// Multi-stage update of the plane `planes[0]` using the later planes.
///
/// Every frame a refinement could reference must be present: a pixel with
/// interval `v` at `t0` needs planes up to `t0 + v - 2`.
pub fn mus_update(planes: &[IsiPlane]) -> Result<IsiPlane> {
    check_sequence(planes)?;
    let base = &planes[0];
    let mut values = Vec::with_capacity(base.pixels());
    for p in 0..base.pixels() {
        let v0 = base.values[p];
        if v0 == SENTINEL {
            values.push(SENTINEL);
            continue;
        }
        let needed = (v0 as usize).saturating_sub(1).max(1);
        if planes.len() < needed {
            return Err(Error::InsufficientHorizon {
                pixel: p,
                needed: base.ref_frame + needed - 1,
                available: base.ref_frame + planes.len() - 1,
            });
        }
        let seq: Vec<u16> = planes[..needed].iter().map(|pl| pl.values[p]).collect();
        values.push(chain_endpoints(&seq)[0] as u16);
    }
    Ok(IsiPlane {
        values,
        ..base.clone()
    })
}

/// Applies the multi-stage update at every frame of a consecutive sequence.
/// Near the end of the sequence chains are limited to the planes available.
pub fn mus_refine_sequence(planes: &[IsiPlane]) -> Result<Vec<IsiPlane>> {
    check_sequence(planes)?;
    let n = planes.len();
    let pixels = planes[0].pixels();
    let per_pixel: Vec<Vec<u16>> = parallel::map_range(pixels, |p| {
        let seq: Vec<u16> = planes.iter().map(|pl| pl.values[p]).collect();
        chain_endpoints(&seq)
            .iter()
            .enumerate()
            .map(|(s, &e)| if seq[s] == SENTINEL { SENTINEL } else { (e - s) as u16 })
            .collect()
    });
    Ok((0..n)
        .map(|t| IsiPlane {
            values: per_pixel.iter().map(|v| v[t]).collect(),
            ..planes[t].clone()
        })
        .collect())
}

/// Decodes a plane sequence starting at frame 0 into a spike stream of the
/// same length.
///
/// Per pixel, a cursor starts at frame 0. If the plane under the cursor
/// holds an interval `v`, a spike is placed at `cursor + v` and the cursor
/// moves there; if it is unknown the cursor moves one frame on. Spikes past
/// the last plane are dropped.
pub fn decode_isi_to_stream(planes: &[IsiPlane], delta_t: f64) -> Result<SpikeStream> {
    check_sequence(planes)?;
    if planes[0].ref_frame != 0 {
        return Err(Error::config(format!(
            "decoding needs planes from frame 0, sequence starts at {}",
            planes[0].ref_frame
        )));
    }
    let (h, w, n) = (planes[0].height, planes[0].width, planes.len());
    Ok(SpikeStream::from_pixel_kernel(h, w, n, delta_t, |p, words, mask| {
        let mut cursor = 0usize;
        while cursor < n {
            let v = planes[cursor].values[p];
            if v == SENTINEL {
                cursor += 1;
                continue;
            }
            cursor += v as usize;
            if cursor < n {
                words[cursor] |= mask;
            }
        }
    }))
}
