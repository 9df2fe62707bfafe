//! Clean/noisy stream pairs from a dataset manifest.

use super::luminance::read_luminance_dir;
use super::manifest::ResolvedEntry;
use super::params_file::{read_params, write_params};
use super::spike_file::write_stream;
use crate::error::Result;
use crate::noise::{sample_spatial_noise, simulate_noisy, NoiseParams};
use crate::sensor::{simulate_ideal, SensorConfig};
use crate::stream::SpikeStream;

#[derive(Debug, Clone)]
pub struct StreamPair {
    pub clean: SpikeStream,
    pub noisy: SpikeStream,
    pub params: NoiseParams,
}

/// Simulates one entry and writes the clean stream, noisy stream and noise
/// maps to the entry's paths. Sensor size follows the luminance frames.
pub fn generate_pair(entry: &ResolvedEntry) -> Result<StreamPair> {
    let lum = read_luminance_dir(&entry.luminance)?;
    let cfg = SensorConfig {
        height: lum.height(),
        width: lum.width(),
        ..entry.sensor.clone()
    };
    let params = match &entry.params_in {
        Some(path) => read_params(path)?,
        None => sample_spatial_noise(&cfg, &entry.noise)?,
    };
    let clean = simulate_ideal(&lum, &cfg)?;
    let noisy = simulate_noisy(&lum, &cfg, &entry.noise, &params)?;
    write_stream(&clean, &entry.clean)?;
    write_stream(&noisy, &entry.noisy)?;
    write_params(&params, &entry.params)?;
    Ok(StreamPair {
        clean,
        noisy,
        params,
    })
}
