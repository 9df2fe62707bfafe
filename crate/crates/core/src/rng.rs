//! Counter-based random streams.
//!
//! Every random draw in the simulator is addressed by a key built from the
//! master seed, a noise-source id, the flat pixel index and the readout frame.
//! The key is hashed into the state of a small SplitMix64 generator, so a
//! draw never depends on how many other pixels were processed before it or on
//! which thread processed them.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Identifies an independent family of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum NoiseSource {
    Photon = 1,
    Thermal = 2,
    ConversionRate = 3,
    DarkCurrent = 4,
    Threshold = 5,
}

/// Stafford variant 13 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key shared by all draws of one source at one pixel.
#[inline]
pub fn pixel_key(seed: u64, source: NoiseSource, pixel: usize) -> u64 {
    let k = mix64(seed ^ mix64((source as u64).wrapping_mul(GOLDEN)));
    mix64(k ^ (pixel as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// SplitMix64 generator positioned at `(key, counter)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    #[inline]
    pub fn new(key: u64, counter: u64) -> Self {
        Self {
            state: mix64(key ^ counter.wrapping_mul(0xA24B_AED4_963E_E407)),
        }
    }

    #[inline]
    pub fn at(seed: u64, source: NoiseSource, pixel: usize, frame: u64) -> Self {
        Self::new(pixel_key(seed, source, pixel), frame)
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}

/// Position of a frame-level draw: which seed and which readout frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub seed: u64,
    pub frame: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed, frame: 0 }
    }

    pub fn advance(&mut self) {
        self.frame += 1;
    }
}
