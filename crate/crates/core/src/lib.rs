//! Spike camera simulation and spike-stream processing.
//!
//! - [`sensor`]: ideal integrate-and-fire sampling.
//! - [`noise`]: shot, thermal and fixed-pattern noise, noisy sampling.
//! - [`calibration`]: per-pixel noise estimation from static scenes.
//! - [`isi`]: inter-spike-interval planes, multi-stage update, decoding.
//! - [`eval`]: firing statistics, TFP reconstruction, PSNR/SSIM.
//! - [`io`]: file formats, manifests and dataset generation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod eval;
pub mod io;
pub mod isi;
pub mod noise;
pub(crate) mod parallel;
pub mod rng;
pub mod sensor;
pub mod stream;

pub use error::{Error, FormatError, Result};
pub use noise::{
    sample_photon_luminance, sample_spatial_noise, sample_thermal_threshold, simulate_noisy,
    NoiseConfig, NoiseParams,
};
pub use rng::RngState;
pub use sensor::{
    simulate_ideal, step_accumulator, AccumulatorState, LuminanceSequence, SensorConfig,
};
pub use stream::{SpikeStream, StreamFlags};
