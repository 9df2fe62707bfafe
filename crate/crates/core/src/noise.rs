//! Temporal and fixed-pattern noise of the pixel circuit, and the noisy
//! sampling process built on top of the ideal accumulator.
//!
//! Temporal noise is photon shot noise on the luminance (Poisson photon
//! counts per readout period) and thermal fluctuation of the reset voltage.
//! Fixed-pattern noise is drawn once per pixel: conversion rate, dark current,
//! capacitor mismatch and bias voltage. The per-step threshold is
//! `(C + C_s) * (V_d + V_t + V_s)` where `V_t` is the thermal term.
//!
//! All draws go through [`CounterRng`], addressed by `(seed, source, pixel,
//! frame)`, so frame-level helpers such as [`sample_photon_luminance`] produce
//! exactly the values [`simulate_noisy`] uses at the same frame.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;
use crate::rng::{pixel_key, CounterRng, NoiseSource, RngState};
use crate::sensor::{integrate, LuminanceSequence, SensorConfig};
use crate::stream::{SpikeStream, StreamFlags};

/// Above this mean photon count, shot noise uses `N(lambda, lambda)`.
pub const POISSON_EXACT_LIMIT: f64 = 1e4;

/// Maximum redraws for a fixed-pattern value that violates its constraint.
pub const MAX_REDRAWS: usize = 100;

/// Thermal thresholds are clamped to this fraction of `C * V_d`.
pub const THRESHOLD_FLOOR_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub mu_alpha: f64,
    pub sigma_alpha: f64,
    /// Mean dark current, in intensity units.
    pub mu_dark: f64,
    pub sigma_dark: f64,
    /// Capacitor mismatch std, in capacitance units.
    pub sigma_c: f64,
    /// Bias voltage std, in volts.
    pub sigma_v: f64,
    pub enable_shot_noise: bool,
    pub enable_thermal_noise: bool,
    pub rng_seed: u64,
}

impl Default for NoiseConfig {
    /// Illustrative values for the default [`SensorConfig`]; they are not
    /// measurements of any particular device. Dark current alone fires a pixel
    /// about every 100 frames (with 50% spread across pixels), conversion rate
    /// varies by 5%, static threshold by roughly 3%.
    fn default() -> Self {
        Self {
            mu_alpha: 1.0,
            sigma_alpha: 0.05,
            mu_dark: 0.01,
            sigma_dark: 0.005,
            sigma_c: 5e-7,
            sigma_v: 0.02,
            enable_shot_noise: true,
            enable_thermal_noise: true,
            rng_seed: 0,
        }
    }
}

impl NoiseConfig {
    /// Every source off; reduces the noisy model to the ideal one.
    pub fn disabled() -> Self {
        Self {
            mu_alpha: 1.0,
            sigma_alpha: 0.0,
            mu_dark: 0.0,
            sigma_dark: 0.0,
            sigma_c: 0.0,
            sigma_v: 0.0,
            enable_shot_noise: false,
            enable_thermal_noise: false,
            rng_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be nonnegative, got {v}")))
            }
        };
        if !(self.mu_alpha.is_finite() && self.mu_alpha > 0.0) {
            return Err(Error::config(format!(
                "mu_alpha must be positive, got {}",
                self.mu_alpha
            )));
        }
        nonneg("sigma_alpha", self.sigma_alpha)?;
        nonneg("mu_dark", self.mu_dark)?;
        nonneg("sigma_dark", self.sigma_dark)?;
        nonneg("sigma_c", self.sigma_c)?;
        nonneg("sigma_v", self.sigma_v)
    }
}

/// Per-pixel fixed-pattern noise maps, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParams {
    pub height: usize,
    pub width: usize,
    pub alpha: Vec<f64>,
    pub dark: Vec<f64>,
    pub cap: Vec<f64>,
    pub bias: Vec<f64>,
}

#[inline]
fn circuit_threshold(c: f64, c_s: f64, v_d: f64, v_t: f64, v_s: f64) -> f64 {
    (c + c_s) * (v_d + v_t + v_s)
}

impl NoiseParams {
    /// Maps with every pixel at its mean.
    pub fn uniform(cfg: &SensorConfig, ncfg: &NoiseConfig) -> Self {
        let n = cfg.pixels();
        Self {
            height: cfg.height,
            width: cfg.width,
            alpha: vec![ncfg.mu_alpha; n],
            dark: vec![ncfg.mu_dark; n],
            cap: vec![0.0; n],
            bias: vec![0.0; n],
        }
    }

    /// Unit conversion rate, no dark current, no threshold offsets.
    pub fn is_identity(&self) -> bool {
        self.alpha.iter().all(|&a| a == 1.0)
            && self.dark.iter().all(|&d| d == 0.0)
            && self.cap.iter().all(|&c| c == 0.0)
            && self.bias.iter().all(|&v| v == 0.0)
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    /// Static threshold `(C + C_s)(V_d + V_s)` of one pixel.
    #[inline]
    pub fn theta_at(&self, pixel: usize, cfg: &SensorConfig) -> f64 {
        circuit_threshold(
            cfg.capacitance,
            self.cap[pixel],
            cfg.voltage_swing(),
            0.0,
            self.bias[pixel],
        )
    }

    pub fn theta_map(&self, cfg: &SensorConfig) -> Vec<f64> {
        (0..self.pixels()).map(|p| self.theta_at(p, cfg)).collect()
    }

    pub fn validate(&self, cfg: &SensorConfig) -> Result<()> {
        let n = self.pixels();
        if self.height != cfg.height || self.width != cfg.width {
            return Err(Error::dims(
                format!("{}x{} noise maps", cfg.height, cfg.width),
                format!("{}x{}", self.height, self.width),
            ));
        }
        for (name, map) in [
            ("alpha", &self.alpha),
            ("dark", &self.dark),
            ("cap", &self.cap),
            ("bias", &self.bias),
        ] {
            if map.len() != n {
                return Err(Error::dims(format!("{n} {name} values"), map.len()));
            }
            if map.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(format!("{name} map has non-finite values")));
            }
        }
        // Calibration marks dead pixels with alpha = 0.
        if let Some(v) = self.alpha.iter().find(|v| **v < 0.0) {
            return Err(Error::config(format!("negative conversion rate {v}")));
        }
        if let Some(v) = self.dark.iter().find(|v| **v < 0.0) {
            return Err(Error::config(format!("negative dark current {v}")));
        }
        for p in 0..n {
            let value = self.theta_at(p, cfg);
            if !(value > 0.0) {
                return Err(Error::InvalidThreshold { pixel: p, value });
            }
        }
        Ok(())
    }
}

#[inline]
fn gaussian(rng: &mut impl Rng, mean: f64, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mean + sigma * z
}

fn redraw_until<T>(
    mut draw: impl FnMut() -> T,
    ok: impl Fn(&T) -> bool,
    what: &str,
) -> Result<T> {
    for _ in 0..MAX_REDRAWS {
        let v = draw();
        if ok(&v) {
            return Ok(v);
        }
    }
    Err(Error::DegenerateConfig(format!(
        "{what}: no valid draw in {MAX_REDRAWS} attempts"
    )))
}

/// Draws the fixed-pattern maps. Draws that would give a nonpositive
/// conversion rate, negative dark current or nonpositive threshold are redrawn.
pub fn sample_spatial_noise(cfg: &SensorConfig, ncfg: &NoiseConfig) -> Result<NoiseParams> {
    cfg.validate()?;
    ncfg.validate()?;
    let seed = ncfg.rng_seed;
    let (c, v_d) = (cfg.capacitance, cfg.voltage_swing());
    let per_pixel = parallel::map_range(cfg.pixels(), |p| -> Result<[f64; 4]> {
        let mut rng = CounterRng::at(seed, NoiseSource::ConversionRate, p, 0);
        let alpha = redraw_until(
            || gaussian(&mut rng, ncfg.mu_alpha, ncfg.sigma_alpha),
            |a| *a > 0.0,
            "conversion rate",
        )?;
        let mut rng = CounterRng::at(seed, NoiseSource::DarkCurrent, p, 0);
        let dark = redraw_until(
            || gaussian(&mut rng, ncfg.mu_dark, ncfg.sigma_dark),
            |d| *d >= 0.0,
            "dark current",
        )?;
        let mut rng = CounterRng::at(seed, NoiseSource::Threshold, p, 0);
        let (cap, bias) = redraw_until(
            || {
                let cs = gaussian(&mut rng, 0.0, ncfg.sigma_c);
                let vs = gaussian(&mut rng, 0.0, ncfg.sigma_v);
                (cs, vs)
            },
            |&(cs, vs)| circuit_threshold(c, cs, v_d, 0.0, vs) > 0.0,
            "static threshold",
        )?;
        Ok([alpha, dark, cap, bias])
    });

    let n = cfg.pixels();
    let mut params = NoiseParams {
        height: cfg.height,
        width: cfg.width,
        alpha: Vec::with_capacity(n),
        dark: Vec::with_capacity(n),
        cap: Vec::with_capacity(n),
        bias: Vec::with_capacity(n),
    };
    for v in per_pixel {
        let [a, d, cs, vs] = v?;
        params.alpha.push(a);
        params.dark.push(d);
        params.cap.push(cs);
        params.bias.push(vs);
    }
    Ok(params)
}

/// Photon-count sampler for one mean luminance.
#[derive(Debug, Clone)]
pub(crate) enum PhotonSampler {
    Dark,
    Exact(Poisson<f64>),
    Gaussian { lambda: f64, sd: f64 },
}

impl PhotonSampler {
    pub(crate) fn new(mu_l: f64, photon_gain: f64) -> Self {
        let lambda = photon_gain * mu_l;
        if !(lambda > 0.0) {
            PhotonSampler::Dark
        } else if lambda <= POISSON_EXACT_LIMIT {
            PhotonSampler::Exact(Poisson::new(lambda).expect("positive finite lambda"))
        } else {
            PhotonSampler::Gaussian {
                lambda,
                sd: lambda.sqrt(),
            }
        }
    }

    #[inline]
    pub(crate) fn photons(&self, rng: &mut impl Rng) -> f64 {
        match self {
            PhotonSampler::Dark => 0.0,
            PhotonSampler::Exact(p) => p.sample(rng),
            PhotonSampler::Gaussian { lambda, sd } => gaussian(rng, *lambda, *sd).round().max(0.0),
        }
    }
}

/// Luminance seen during readout frame `rng.frame`: `ph / q` with
/// `ph ~ Poisson(q * mu_L)`.
pub fn sample_photon_luminance(
    mu_l: &[f64],
    cfg: &SensorConfig,
    rng: RngState,
) -> Result<Vec<f64>> {
    if let Some(v) = mu_l.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::config(format!(
            "mean luminance must be finite and nonnegative, found {v}"
        )));
    }
    let q = cfg.photon_gain;
    Ok(parallel::map_range(mu_l.len(), |p| {
        let mut r = CounterRng::at(rng.seed, NoiseSource::Photon, p, rng.frame);
        PhotonSampler::new(mu_l[p], q).photons(&mut r) / q
    }))
}

#[inline]
fn thermal_threshold(
    params: &NoiseParams,
    pixel: usize,
    cfg: &SensorConfig,
    sigma_t: f64,
    floor: f64,
    rng: &mut impl Rng,
) -> f64 {
    let v_t = gaussian(rng, 0.0, sigma_t);
    circuit_threshold(
        cfg.capacitance,
        params.cap[pixel],
        cfg.voltage_swing(),
        v_t,
        params.bias[pixel],
    )
    .max(floor)
}

/// Threshold of every pixel during readout frame `rng.frame`, with a fresh
/// reset-voltage fluctuation `V_t ~ N(0, kT0/C)`.
pub fn sample_thermal_threshold(
    params: &NoiseParams,
    cfg: &SensorConfig,
    rng: RngState,
) -> Result<Vec<f64>> {
    params.validate(cfg)?;
    let sigma_t = cfg.thermal_sigma();
    let floor = THRESHOLD_FLOOR_FRACTION * cfg.threshold();
    Ok(parallel::map_range(params.pixels(), |p| {
        let mut r = CounterRng::at(rng.seed, NoiseSource::Thermal, p, rng.frame);
        thermal_threshold(params, p, cfg, sigma_t, floor, &mut r)
    }))
}

/// Noisy spike stream for `lum` under fixed-pattern maps `params`.
pub fn simulate_noisy(
    lum: &LuminanceSequence,
    cfg: &SensorConfig,
    ncfg: &NoiseConfig,
    params: &NoiseParams,
) -> Result<SpikeStream> {
    let steps = lum.check_against(cfg)?;
    ncfg.validate()?;
    params.validate(cfg)?;

    let frames = lum.frames() * steps;
    let dt = cfg.delta_t;
    let q = cfg.photon_gain;
    let sigma_t = cfg.thermal_sigma();
    let floor = THRESHOLD_FLOOR_FRACTION * cfg.threshold();
    let seed = ncfg.rng_seed;
    let shot = ncfg.enable_shot_noise;
    let thermal = ncfg.enable_thermal_noise;

    let stream = SpikeStream::from_pixel_kernel(cfg.height, cfg.width, frames, dt, |p, words, mask| {
        let alpha = params.alpha[p];
        let dark = params.dark[p];
        let theta = params.theta_at(p, cfg);
        let photon_key = pixel_key(seed, NoiseSource::Photon, p);
        let thermal_key = pixel_key(seed, NoiseSource::Thermal, p);
        let mut accum = 0.0;
        for m in 0..lum.frames() {
            let mu = lum.value(m, p);
            let sampler = shot.then(|| PhotonSampler::new(mu, q));
            for s in 0..steps {
                let frame = m * steps + s;
                let l = match &sampler {
                    Some(sampler) => {
                        sampler.photons(&mut CounterRng::new(photon_key, frame as u64)) / q
                    }
                    None => mu,
                };
                let intensity = alpha * l + dark;
                let threshold = if thermal {
                    let mut r = CounterRng::new(thermal_key, frame as u64);
                    thermal_threshold(params, p, cfg, sigma_t, floor, &mut r)
                } else {
                    theta
                };
                if integrate(&mut accum, intensity * dt, threshold) {
                    words[frame] |= mask;
                }
            }
        }
    });
    let flags = if shot || thermal || !params.is_identity() {
        StreamFlags::NOISY
    } else {
        StreamFlags::IDEAL
    };
    Ok(stream.with_flags(flags))
}
