//! Fixed-pattern noise estimation from static scenes.
//!
//! Over a long static capture every spike consumes one threshold's worth of
//! charge, so per pixel `N_k * theta = (alpha * mu_k + I_dark) * T_k` for
//! scene `k` with known luminance `mu_k`, duration `T_k` and spike count
//! `N_k`. Only the ratios `a = alpha/theta` and `b = I_dark/theta` are
//! observable; they come from a two-parameter least-squares fit per pixel.
//! The per-pixel scale `theta` is then set by a MAP estimate under the
//! Gaussian priors of a [`NoiseConfig`], normalized so the mean threshold
//! equals the nominal gauge, and split into capacitor and bias deviations in
//! proportion to their prior variances.

use log::warn;

use crate::error::{Error, Result};
use crate::noise::{NoiseConfig, NoiseParams};
use crate::parallel;
use crate::sensor::SensorConfig;
use crate::stream::SpikeStream;

/// Brightest-scene spike count below which a pixel is reported as
/// under-exposed.
pub const MIN_SPIKES: u32 = 10;

#[derive(Debug, Clone)]
pub struct CalibrationScene {
    pub luminance: f64,
    pub stream: SpikeStream,
}

#[derive(Debug, Clone)]
pub struct CalibrationSet {
    pub cfg: SensorConfig,
    pub scenes: Vec<CalibrationScene>,
}

impl CalibrationSet {
    pub fn new(cfg: SensorConfig, scenes: Vec<CalibrationScene>) -> Result<Self> {
        let set = Self { cfg, scenes };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.scenes.len() < 3 {
            return Err(Error::CalibrationDesign(format!(
                "need at least 3 scenes, got {}",
                self.scenes.len()
            )));
        }
        for (k, s) in self.scenes.iter().enumerate() {
            if s.stream.height() != self.cfg.height || s.stream.width() != self.cfg.width {
                return Err(Error::dims(
                    format!("{}x{} streams", self.cfg.height, self.cfg.width),
                    format!(
                        "{}x{} in scene {k}",
                        s.stream.height(),
                        s.stream.width()
                    ),
                ));
            }
            let rel = (s.stream.delta_t() - self.cfg.delta_t).abs() / self.cfg.delta_t;
            if rel > 1e-9 {
                return Err(Error::config(format!(
                    "scene {k} has delta_t {}, expected {}",
                    s.stream.delta_t(),
                    self.cfg.delta_t
                )));
            }
            if !(s.luminance.is_finite() && s.luminance >= 0.0) {
                return Err(Error::config(format!(
                    "scene {k} luminance must be nonnegative, got {}",
                    s.luminance
                )));
            }
            if s.stream.frames() == 0 {
                return Err(Error::CalibrationDesign(format!("scene {k} is empty")));
            }
        }
        Ok(())
    }

    fn durations(&self) -> Vec<f64> {
        self.scenes
            .iter()
            .map(|s| s.stream.frames() as f64 * self.cfg.delta_t)
            .collect()
    }
}

/// Spike count per scene and pixel.
pub fn spike_counts(set: &CalibrationSet) -> Vec<Vec<u32>> {
    set.scenes.iter().map(|s| s.stream.counts()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseSummary {
    pub alpha: MapStats,
    pub dark: MapStats,
    pub cap: MapStats,
    pub bias: MapStats,
    pub theta: MapStats,
    /// Pixels included in the statistics.
    pub pixels: usize,
}

impl NoiseSummary {
    /// A [`NoiseConfig`] reproducing these statistics, with the given
    /// temporal-noise settings.
    pub fn to_noise_config(&self, temporal: &NoiseConfig) -> NoiseConfig {
        NoiseConfig {
            mu_alpha: self.alpha.mean,
            sigma_alpha: self.alpha.std,
            mu_dark: self.dark.mean,
            sigma_dark: self.dark.std,
            sigma_c: self.cap.std,
            sigma_v: self.bias.std,
            ..temporal.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub params: NoiseParams,
    pub theta: Vec<f64>,
    /// Fitted `alpha / theta`, per unit luminance per second.
    pub rate_slope: Vec<f64>,
    /// Fitted `I_dark / theta`, per second.
    pub rate_offset: Vec<f64>,
    /// RMS fit residual relative to the pixel's mean count.
    pub residual: Vec<f64>,
    pub dead: Vec<bool>,
    pub underexposed: usize,
    pub stats: NoiseSummary,
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.s + self.c
    }
}

/// Scale of one pixel given the fitted ratios, maximizing the joint prior
/// density of `(alpha, I_dark, theta) = (a*theta, b*theta, theta)` including
/// the Jacobian `theta^2`. Priors with zero spread pin the scale directly.
fn map_theta(a: f64, b: f64, priors: &ThetaPriors) -> f64 {
    let p = priors;
    if p.sigma_theta == 0.0 {
        return p.theta0;
    }
    if p.sigma_alpha == 0.0 && a > 0.0 {
        return p.mu_alpha / a;
    }
    if p.sigma_dark == 0.0 && p.mu_dark > 0.0 && b > 0.0 {
        return p.mu_dark / b;
    }
    let mut quad = 1.0 / (p.sigma_theta * p.sigma_theta);
    let mut lin = p.theta0 / (p.sigma_theta * p.sigma_theta);
    if p.sigma_alpha > 0.0 {
        let w = 1.0 / (p.sigma_alpha * p.sigma_alpha);
        quad += a * a * w;
        lin += a * p.mu_alpha * w;
    }
    if p.sigma_dark > 0.0 {
        let w = 1.0 / (p.sigma_dark * p.sigma_dark);
        quad += b * b * w;
        lin += b * p.mu_dark * w;
    }
    // stationary point of the log density: quad*theta^2 - lin*theta - 2 = 0
    (lin + (lin * lin + 8.0 * quad).sqrt()) / (2.0 * quad)
}

struct ThetaPriors {
    theta0: f64,
    sigma_theta: f64,
    mu_alpha: f64,
    sigma_alpha: f64,
    mu_dark: f64,
    sigma_dark: f64,
}

struct PixelFit {
    a: f64,
    b: f64,
    residual: f64,
    dead: bool,
    underexposed: bool,
}

fn fit_pixel(counts: &[f64], x: &[f64], t: &[f64], brightest: usize) -> PixelFit {
    if counts.iter().all(|&n| n == 0.0) {
        return PixelFit {
            a: 0.0,
            b: 0.0,
            residual: 0.0,
            dead: true,
            underexposed: true,
        };
    }
    let (mut sxx, mut sxt, mut stt, mut sxn, mut stn) =
        (Sum::default(), Sum::default(), Sum::default(), Sum::default(), Sum::default());
    for k in 0..counts.len() {
        sxx.add(x[k] * x[k]);
        sxt.add(x[k] * t[k]);
        stt.add(t[k] * t[k]);
        sxn.add(x[k] * counts[k]);
        stn.add(t[k] * counts[k]);
    }
    let (sxx, sxt, stt, sxn, stn) = (sxx.value(), sxt.value(), stt.value(), sxn.value(), stn.value());
    let det = sxx * stt - sxt * sxt;
    let a = (sxn * stt - stn * sxt) / det;
    let b = (sxx * stn - sxt * sxn) / det;

    let mean_count = counts.iter().sum::<f64>() / counts.len() as f64;
    let ss: f64 = (0..counts.len())
        .map(|k| (counts[k] - a * x[k] - b * t[k]).powi(2))
        .sum();
    PixelFit {
        a,
        b,
        residual: (ss / counts.len() as f64).sqrt() / mean_count,
        dead: !(a > 0.0),
        underexposed: counts[brightest] < MIN_SPIKES as f64,
    }
}

/// Solves the per-pixel spike-count equations. `gauge_phi` fixes the global
/// scale (mean threshold); `priors` supplies the prior spreads used to
/// choose each pixel's threshold and to split it into capacitor and bias
/// deviations.
///
/// Scenes must keep every pixel well below one spike per readout: the
/// readout flags at most one spike per frame, so brighter pixels lose counts
/// and bias the fit.
pub fn solve_snee(
    set: &CalibrationSet,
    gauge_phi: f64,
    priors: &NoiseConfig,
) -> Result<CalibrationResult> {
    set.validate()?;
    priors.validate()?;
    if !(gauge_phi.is_finite() && gauge_phi > 0.0) {
        return Err(Error::config(format!(
            "gauge_phi must be positive, got {gauge_phi}"
        )));
    }
    let cfg = &set.cfg;
    let t = set.durations();
    let x: Vec<f64> = set
        .scenes
        .iter()
        .zip(&t)
        .map(|(s, &tk)| s.luminance * tk)
        .collect();

    // The design matrix [x_k, T_k] must have full column rank.
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let stt: f64 = t.iter().map(|v| v * v).sum();
    let sxt: f64 = x.iter().zip(&t).map(|(a, b)| a * b).sum();
    if !(sxx > 0.0) || (sxx * stt - sxt * sxt) <= 1e-12 * sxx * stt {
        return Err(Error::CalibrationDesign(
            "scene luminances must not all be equal (the fit is rank deficient)".into(),
        ));
    }
    let brightest = set
        .scenes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.luminance.total_cmp(&b.1.luminance))
        .map(|(k, _)| k)
        .unwrap_or(0);

    let counts = spike_counts(set);
    let fits = parallel::map_range(cfg.pixels(), |p| {
        let n: Vec<f64> = counts.iter().map(|c| c[p] as f64).collect();
        fit_pixel(&n, &x, &t, brightest)
    });

    let c = cfg.capacitance;
    let v_d = cfg.voltage_swing();
    let rel_c = priors.sigma_c / c;
    let rel_v = priors.sigma_v / v_d;
    let theta_priors = ThetaPriors {
        theta0: gauge_phi,
        sigma_theta: gauge_phi * (rel_c * rel_c + rel_v * rel_v).sqrt(),
        mu_alpha: priors.mu_alpha,
        sigma_alpha: priors.sigma_alpha,
        mu_dark: priors.mu_dark,
        sigma_dark: priors.sigma_dark,
    };

    let mut theta: Vec<f64> = fits
        .iter()
        .map(|f| {
            if f.dead {
                gauge_phi
            } else {
                map_theta(f.a, f.b, &theta_priors)
            }
        })
        .collect();
    let live: Vec<usize> = (0..fits.len()).filter(|&p| !fits[p].dead).collect();
    if !live.is_empty() {
        let mean = live.iter().map(|&p| theta[p]).sum::<f64>() / live.len() as f64;
        let scale = gauge_phi / mean;
        for &p in &live {
            theta[p] *= scale;
        }
    }

    let (w_c, w_v) = (rel_c * rel_c, rel_v * rel_v);
    let (share_c, share_v) = if w_c + w_v > 0.0 {
        (w_c / (w_c + w_v), w_v / (w_c + w_v))
    } else {
        (0.5, 0.5)
    };
    let nominal = c * v_d;
    let n = cfg.pixels();
    let mut params = NoiseParams {
        height: cfg.height,
        width: cfg.width,
        alpha: vec![0.0; n],
        dark: vec![0.0; n],
        cap: vec![0.0; n],
        bias: vec![0.0; n],
    };
    for p in 0..n {
        let f = &fits[p];
        if f.dead {
            continue;
        }
        let th = theta[p];
        params.alpha[p] = f.a * th;
        params.dark[p] = (f.b * th).max(0.0);
        let delta = th / nominal - 1.0;
        params.cap[p] = c * delta * share_c;
        params.bias[p] = v_d * delta * share_v;
    }

    let dead: Vec<bool> = fits.iter().map(|f| f.dead).collect();
    let underexposed = fits.iter().filter(|f| f.underexposed && !f.dead).count();
    if underexposed > 0 {
        warn!(
            "{underexposed} pixels fired fewer than {MIN_SPIKES} spikes in the brightest scene; \
             their estimates are dominated by thermal and quantization noise"
        );
    }
    let dead_count = dead.iter().filter(|d| **d).count();
    if dead_count > 0 {
        warn!("{dead_count} dead pixels excluded from statistics");
    }

    let mut result = CalibrationResult {
        params,
        theta,
        rate_slope: fits.iter().map(|f| f.a).collect(),
        rate_offset: fits.iter().map(|f| f.b).collect(),
        residual: fits.iter().map(|f| f.residual).collect(),
        dead,
        underexposed,
        stats: NoiseSummary::default(),
    };
    result.stats = summarize_noise(&result);
    Ok(result)
}

fn map_stats(values: &[f64], include: &[bool]) -> MapStats {
    let mut sum = Sum::default();
    let mut n = 0usize;
    for (v, &inc) in values.iter().zip(include) {
        if inc {
            sum.add(*v);
            n += 1;
        }
    }
    if n == 0 {
        return MapStats::default();
    }
    let mean = sum.value() / n as f64;
    let mut ss = Sum::default();
    for (v, &inc) in values.iter().zip(include) {
        if inc {
            ss.add((v - mean) * (v - mean));
        }
    }
    MapStats {
        mean,
        std: (ss.value() / n as f64).sqrt(),
    }
}

/// Mean and population standard deviation of every map over live pixels.
pub fn summarize_noise(result: &CalibrationResult) -> NoiseSummary {
    let include: Vec<bool> = result.dead.iter().map(|d| !d).collect();
    let p = &result.params;
    NoiseSummary {
        alpha: map_stats(&p.alpha, &include),
        dark: map_stats(&p.dark, &include),
        cap: map_stats(&p.cap, &include),
        bias: map_stats(&p.bias, &include),
        theta: map_stats(&result.theta, &include),
        pixels: include.iter().filter(|i| **i).count(),
    }
}
