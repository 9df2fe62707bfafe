//! Bit-packed binary spike streams.
//!
//! Frames are stored back to back. Each frame is `ceil(H*W/8)` bytes, pixels
//! in row-major order, most significant bit first. This is the exact payload
//! layout of the `.spk` file format, so reading and writing are plain copies.

use crate::error::{Error, Result};
use crate::parallel;

/// Header flag bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StreamFlags(pub u32);

impl StreamFlags {
    pub const NONE: StreamFlags = StreamFlags(0);
    pub const NOISY: StreamFlags = StreamFlags(1);
    pub const IDEAL: StreamFlags = StreamFlags(1 << 1);

    pub fn contains(self, other: StreamFlags) -> bool {
        self.0 & other.0 == other.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeStream {
    height: usize,
    width: usize,
    frames: usize,
    delta_t: f64,
    flags: StreamFlags,
    bits: Vec<u8>,
}

#[inline]
pub(crate) fn bytes_per_frame(height: usize, width: usize) -> usize {
    (height * width).div_ceil(8)
}

impl SpikeStream {
    pub fn zeros(height: usize, width: usize, frames: usize, delta_t: f64) -> Self {
        Self {
            height,
            width,
            frames,
            delta_t,
            flags: StreamFlags::NONE,
            bits: vec![0; frames * bytes_per_frame(height, width)],
        }
    }

    /// Wraps an already packed payload.
    pub fn from_packed(
        height: usize,
        width: usize,
        frames: usize,
        delta_t: f64,
        bits: Vec<u8>,
    ) -> Result<Self> {
        let expected = frames * bytes_per_frame(height, width);
        if bits.len() != expected {
            return Err(Error::dims(
                format!("{expected} payload bytes"),
                format!("{} bytes", bits.len()),
            ));
        }
        Ok(Self {
            height,
            width,
            frames,
            delta_t,
            flags: StreamFlags::NONE,
            bits,
        })
    }

    /// Builds a stream from a per-pixel closure `f(frame, row, col)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        frames: usize,
        delta_t: f64,
        mut f: impl FnMut(usize, usize, usize) -> bool,
    ) -> Self {
        let mut s = Self::zeros(height, width, frames, delta_t);
        for t in 0..frames {
            for y in 0..height {
                for x in 0..width {
                    if f(t, y, x) {
                        s.set(t, y * width + x, true);
                    }
                }
            }
        }
        s
    }

    /// Runs `kernel(pixel, words, mask)` for every pixel, in parallel over
    /// blocks of 64 pixels. The kernel marks a spike at frame `f` with
    /// `words[f] |= mask`. Output is independent of the schedule.
    pub(crate) fn from_pixel_kernel<K>(
        height: usize,
        width: usize,
        frames: usize,
        delta_t: f64,
        kernel: K,
    ) -> Self
    where
        K: Fn(usize, &mut [u64], u64) + Sync,
    {
        let pixels = height * width;
        let blocks = pixels.div_ceil(64);
        let block_words: Vec<Vec<u64>> = parallel::map_range(blocks, |b| {
            let mut words = vec![0u64; frames];
            let start = b * 64;
            let end = (start + 64).min(pixels);
            for p in start..end {
                kernel(p, &mut words, 1u64 << (63 - (p - start)));
            }
            words
        });

        let bpf = bytes_per_frame(height, width);
        let mut bits = vec![0u8; frames * bpf];
        for (b, words) in block_words.iter().enumerate() {
            let first = b * 8;
            let len = (bpf - first).min(8);
            for (t, w) in words.iter().enumerate() {
                let dst = t * bpf + first;
                bits[dst..dst + len].copy_from_slice(&w.to_be_bytes()[..len]);
            }
        }
        Self {
            height,
            width,
            frames,
            delta_t,
            flags: StreamFlags::NONE,
            bits,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn flags(&self) -> StreamFlags {
        self.flags
    }

    pub fn with_flags(mut self, flags: StreamFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn set_flags(&mut self, flags: StreamFlags) {
        self.flags = flags;
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bits
    }

    pub fn frame_bytes(&self, frame: usize) -> &[u8] {
        let bpf = bytes_per_frame(self.height, self.width);
        &self.bits[frame * bpf..(frame + 1) * bpf]
    }

    /// Spike flag of flat pixel `pixel` at `frame`.
    #[inline]
    pub fn get(&self, frame: usize, pixel: usize) -> bool {
        let idx = frame * bytes_per_frame(self.height, self.width) + pixel / 8;
        self.bits[idx] & (0x80 >> (pixel % 8)) != 0
    }

    #[inline]
    pub fn get_xy(&self, frame: usize, row: usize, col: usize) -> bool {
        self.get(frame, row * self.width + col)
    }

    #[inline]
    pub fn set(&mut self, frame: usize, pixel: usize, value: bool) {
        let idx = frame * bytes_per_frame(self.height, self.width) + pixel / 8;
        let m = 0x80 >> (pixel % 8);
        if value {
            self.bits[idx] |= m;
        } else {
            self.bits[idx] &= !m;
        }
    }

    /// Frame indices at which `pixel` spiked, ascending.
    pub fn spike_frames(&self, pixel: usize) -> Vec<usize> {
        (0..self.frames).filter(|&t| self.get(t, pixel)).collect()
    }

    /// Per-pixel spike counts over `[start, end)`.
    pub fn counts_in(&self, start: usize, end: usize) -> Vec<u32> {
        let pixels = self.pixels();
        let mut counts = vec![0u32; pixels];
        for t in start..end {
            let frame = self.frame_bytes(t);
            for (byte_idx, &byte) in frame.iter().enumerate() {
                if byte == 0 {
                    continue;
                }
                for bit in 0..8 {
                    if byte & (0x80 >> bit) != 0 {
                        let p = byte_idx * 8 + bit;
                        if p < pixels {
                            counts[p] += 1;
                        }
                    }
                }
            }
        }
        counts
    }

    /// Per-pixel spike counts over the whole stream.
    pub fn counts(&self) -> Vec<u32> {
        self.counts_in(0, self.frames)
    }

    pub fn total_spikes(&self) -> u64 {
        // Padding bits are always zero.
        self.bits.iter().map(|b| b.count_ones() as u64).sum()
    }

    pub fn same_shape(&self, other: &SpikeStream) -> bool {
        self.height == other.height && self.width == other.width && self.frames == other.frames
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_row_major() {
        let mut s = SpikeStream::zeros(3, 3, 2, 1.0);
        s.set(1, 0, true);
        s.set(1, 8, true);
        assert_eq!(s.frame_bytes(0), &[0, 0]);
        assert_eq!(s.frame_bytes(1), &[0x80, 0x80]);
        assert!(s.get_xy(1, 2, 2));
        assert_eq!(s.total_spikes(), 2);
    }

    #[test]
    fn kernel_assembly_matches_from_fn() {
        // 131 pixels spans three 64-pixel blocks, the last one partial.
        let (h, w, n) = (11, 13, 9);
        let rule = |t: usize, p: usize| (t * 7 + p * 3).is_multiple_of(5);
        let a = SpikeStream::from_pixel_kernel(h, w, n, 0.5, |p, words, mask| {
            for (t, word) in words.iter_mut().enumerate() {
                if rule(t, p) {
                    *word |= mask;
                }
            }
        });
        let b = SpikeStream::from_fn(h, w, n, 0.5, |t, y, x| rule(t, y * w + x));
        assert_eq!(a, b);
    }

    #[test]
    fn counts_and_spike_frames() {
        let s = SpikeStream::from_fn(2, 5, 6, 1.0, |t, y, x| (t + y + x) % 3 == 0);
        let counts = s.counts();
        for (p, &c) in counts.iter().enumerate() {
            assert_eq!(c as usize, s.spike_frames(p).len());
        }
        assert_eq!(s.total_spikes(), counts.iter().map(|&c| c as u64).sum::<u64>());
    }
}
