//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every call simulates a 64x64 sensor from scratch; results come back as
//! flat arrays the page draws onto canvases.

use spikecam::eval::{compute_stats, psnr, tfp_reconstruct};
use spikecam::{
    sample_spatial_noise, simulate_ideal, simulate_noisy, LuminanceSequence, NoiseConfig,
    NoiseParams, SensorConfig, SpikeStream,
};
use wasm_bindgen::prelude::*;

pub const SIZE: usize = 64;

/// Which noise sources to switch on.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Toggles {
    pub shot: bool,
    pub thermal: bool,
    pub fixed_pattern: bool,
    /// Multiplies the default dark current.
    pub dark_scale: f64,
    pub seed: u32,
}

#[wasm_bindgen]
impl Toggles {
    #[wasm_bindgen(constructor)]
    pub fn new(shot: bool, thermal: bool, fixed_pattern: bool, dark_scale: f64, seed: u32) -> Self {
        Self {
            shot,
            thermal,
            fixed_pattern,
            dark_scale,
            seed,
        }
    }
}

fn noise_config(t: &Toggles) -> NoiseConfig {
    let d = NoiseConfig::default();
    let fp = if t.fixed_pattern { 1.0 } else { 0.0 };
    NoiseConfig {
        sigma_alpha: d.sigma_alpha * fp,
        mu_dark: d.mu_dark * t.dark_scale.max(0.0),
        sigma_dark: d.sigma_dark * t.dark_scale.max(0.0) * fp,
        sigma_c: d.sigma_c * fp,
        sigma_v: d.sigma_v * fp,
        enable_shot_noise: t.shot,
        enable_thermal_noise: t.thermal,
        rng_seed: t.seed as u64,
        ..d
    }
}

fn sensor() -> SensorConfig {
    SensorConfig::with_size(SIZE, SIZE)
}

/// Scene 0: horizontal gradient; 1: bright disk; 2: bar sweeping right.
fn scene(kind: u32, frames: usize, gain: f64) -> LuminanceSequence {
    let cfg = sensor();
    let n = SIZE as f64;
    let held = if kind == 2 { 8 } else { frames.max(1) };
    let segments = frames.div_ceil(held).max(1);
    LuminanceSequence::from_fn(SIZE, SIZE, segments, held as f64 * cfg.delta_t, |m, y, x| {
        let (xf, yf) = (x as f64, y as f64);
        let v = match kind {
            0 => 0.05 + 0.9 * xf / (n - 1.0),
            1 => {
                let r = ((xf - n / 2.0).powi(2) + (yf - n / 2.0).powi(2)).sqrt();
                if r < n / 4.0 {
                    0.8
                } else {
                    0.1
                }
            }
            _ => {
                let bar = (m * 4) % SIZE;
                if x >= bar && x < bar + 8 {
                    0.9
                } else {
                    0.08
                }
            }
        };
        (v * gain).min(1.0)
    })
    .expect("demo scenes are valid")
}

fn run(lum: &LuminanceSequence, toggles: Option<&Toggles>) -> SpikeStream {
    let cfg = sensor();
    match toggles {
        None => simulate_ideal(lum, &cfg).expect("valid scene"),
        Some(t) => {
            let ncfg = noise_config(t);
            let params = if t.fixed_pattern {
                sample_spatial_noise(&cfg, &ncfg).expect("valid noise config")
            } else {
                NoiseParams::uniform(&cfg, &ncfg)
            };
            simulate_noisy(lum, &cfg, &ncfg, &params).expect("valid scene")
        }
    }
}

/// Spike frames as grayscale bytes (0 or 255), frame-major, `SIZE*SIZE`
/// per frame.
#[wasm_bindgen]
pub fn spike_frames(kind: u32, frames: usize, gain: f64, noisy: bool, toggles: &Toggles) -> Vec<u8> {
    let lum = scene(kind, frames, gain);
    let s = run(&lum, noisy.then_some(toggles));
    let mut out = Vec::with_capacity(frames * s.pixels());
    for t in 0..frames.min(s.frames()) {
        out.extend((0..s.pixels()).map(|p| if s.get(t, p) { 255 } else { 0 }));
    }
    out
}

/// Inter-spike-interval histograms for a uniform gray scene over 2000
/// frames: `[ideal_1..=max, noisy_1..=max]`, `2 * max_interval` counts.
#[wasm_bindgen]
pub fn isi_histograms(gray: f64, max_interval: u32, toggles: &Toggles) -> Vec<u32> {
    let cfg = sensor();
    let lum = LuminanceSequence::constant(SIZE, SIZE, 1, 2000.0 * cfg.delta_t, gray.clamp(0.0, 1.0))
        .expect("valid scene");
    let mut out = Vec::with_capacity(2 * max_interval as usize);
    for s in [run(&lum, None), run(&lum, Some(toggles))] {
        let stats = compute_stats(&s, 1).expect("stream has frames");
        out.extend((1..=max_interval).map(|i| stats.isi_histogram.get(&i).copied().unwrap_or(0) as u32));
    }
    out
}

/// Reconstructions from spike counts in a `window` around the middle frame.
///
/// Returns `SIZE*SIZE` ideal intensities, then `SIZE*SIZE` noisy ones, then
/// the PSNR of noisy against ideal in dB (infinite when identical).
#[wasm_bindgen]
pub fn reconstruct(kind: u32, window: usize, gain: f64, toggles: &Toggles) -> Vec<f64> {
    let cfg = sensor();
    let window = window.clamp(2, 512);
    let frames = window + 2;
    let lum = scene(kind, frames, gain);
    let t = frames / 2;
    let phi = cfg.threshold();
    let ideal = tfp_reconstruct(&run(&lum, None), t, window, phi).expect("window fits");
    let noisy = tfp_reconstruct(&run(&lum, Some(toggles)), t, window, phi).expect("window fits");
    let p = psnr(&noisy, &ideal, phi / cfg.delta_t).expect("same size");
    let mut out = ideal;
    out.extend(noisy);
    out.push(p);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_on() -> Toggles {
        Toggles::new(true, true, true, 1.0, 7)
    }

    #[test]
    fn spike_frames_shape_and_values() {
        let f = spike_frames(2, 20, 1.0, true, &all_on());
        assert_eq!(f.len(), 20 * SIZE * SIZE);
        assert!(f.iter().all(|&v| v == 0 || v == 255));
        assert!(f.contains(&255));
    }

    #[test]
    fn all_toggles_off_matches_ideal() {
        let off = Toggles::new(false, false, false, 0.0, 1);
        assert_eq!(spike_frames(1, 30, 1.0, true, &off), spike_frames(1, 30, 1.0, false, &off));
        let r = reconstruct(0, 64, 1.0, &off);
        assert_eq!(r[2 * SIZE * SIZE], f64::INFINITY);
    }

    #[test]
    fn histograms_and_reconstruction() {
        let h = isi_histograms(0.3, 16, &all_on());
        assert_eq!(h.len(), 32);
        let (ideal, noisy) = h.split_at(16);
        // a rate of 0.3 per frame only produces intervals 3 and 4
        assert!(ideal.iter().enumerate().all(|(i, &c)| c == 0 || i == 2 || i == 3));
        assert!(noisy.iter().filter(|&&c| c > 0).count() > 2);
        let r = reconstruct(1, 64, 1.0, &all_on());
        assert_eq!(r.len(), 2 * SIZE * SIZE + 1);
        assert!(r[2 * SIZE * SIZE].is_finite());
    }
}
