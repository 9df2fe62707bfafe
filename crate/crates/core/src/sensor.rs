//! Ideal integrate-and-fire spike camera.
//!
//! Each pixel integrates its input and raises a spike flag at the first
//! readout instant `n*dt` at which the accumulation has reached the
//! threshold. Input is held constant over each readout step, so the integral
//! is a per-step multiply-accumulate. On a spike the accumulator is reset at
//! the crossing instant, which in the discrete model means the charge
//! collected after the crossing is kept: the residual `A - k*phi` (with `k`
//! the number of crossings in that step) starts the next cycle. The readout
//! still reports at most one flag per pixel per frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{SpikeStream, StreamFlags};

/// Relative slack on the threshold comparison. Lets an input of exactly
/// `phi/dt` fire on every frame even though `dt` is not exactly representable.
pub(crate) const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub height: usize,
    pub width: usize,
    /// Readout period in seconds.
    pub delta_t: f64,
    pub capacitance: f64,
    pub reset_voltage: f64,
    pub reference_voltage: f64,
    /// Expected photons per unit intensity per readout period.
    pub photon_gain: f64,
    pub boltzmann_k: f64,
    /// Absolute temperature in kelvin.
    pub temperature: f64,
}

impl Default for SensorConfig {
    /// 250x400 sensor read at 40 kHz. Capacitance is expressed in the same
    /// normalized units as intensity so that an intensity of 1.0 fills the
    /// nominal threshold in exactly one readout period.
    fn default() -> Self {
        Self {
            height: 250,
            width: 400,
            delta_t: 25e-6,
            capacitance: 25e-6,
            reset_voltage: 3.3,
            reference_voltage: 2.3,
            photon_gain: 100.0,
            boltzmann_k: 1.380_649e-23,
            temperature: 300.0,
        }
    }
}

impl SensorConfig {
    pub fn with_size(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            ..Self::default()
        }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    /// `V_d = V_D - V_ref`.
    pub fn voltage_swing(&self) -> f64 {
        self.reset_voltage - self.reference_voltage
    }

    /// Nominal threshold `phi = C * (V_D - V_ref)`.
    pub fn threshold(&self) -> f64 {
        self.capacitance * self.voltage_swing()
    }

    /// Standard deviation of the reset-voltage fluctuation, `sqrt(k T0 / C)`.
    pub fn thermal_sigma(&self) -> f64 {
        (self.boltzmann_k * self.temperature / self.capacitance).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive, got {v}")))
            }
        };
        if self.height == 0 || self.width == 0 {
            return Err(Error::config(format!(
                "sensor size must be at least 1x1, got {}x{}",
                self.height, self.width
            )));
        }
        positive("delta_t", self.delta_t)?;
        positive("capacitance", self.capacitance)?;
        positive("reset_voltage", self.reset_voltage)?;
        positive("photon_gain", self.photon_gain)?;
        positive("boltzmann_k", self.boltzmann_k)?;
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::config(format!(
                "temperature must be nonnegative, got {}",
                self.temperature
            )));
        }
        if !(self.reference_voltage < self.reset_voltage) {
            return Err(Error::config(format!(
                "reference_voltage {} must be below reset_voltage {}",
                self.reference_voltage, self.reset_voltage
            )));
        }
        positive("threshold", self.threshold())
    }
}

/// Ideal luminance intensity per pixel, frame-major, each frame held for
/// `frame_duration` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceSequence {
    height: usize,
    width: usize,
    frame_duration: f64,
    data: Vec<f64>,
}

impl LuminanceSequence {
    pub fn new(height: usize, width: usize, frame_duration: f64, data: Vec<f64>) -> Result<Self> {
        let hw = height * width;
        if hw == 0 || !data.len().is_multiple_of(hw) {
            return Err(Error::dims(
                format!("a multiple of {height}x{width}"),
                format!("{} values", data.len()),
            ));
        }
        if !(frame_duration.is_finite() && frame_duration > 0.0) {
            return Err(Error::config(format!(
                "frame_duration must be positive, got {frame_duration}"
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::config(format!(
                "luminance must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self {
            height,
            width,
            frame_duration,
            data,
        })
    }

    pub fn constant(
        height: usize,
        width: usize,
        frames: usize,
        frame_duration: f64,
        value: f64,
    ) -> Result<Self> {
        Self::new(
            height,
            width,
            frame_duration,
            vec![value; height * width * frames],
        )
    }

    /// Builds from `f(frame, row, col)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        frames: usize,
        frame_duration: f64,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * frames);
        for m in 0..frames {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(m, y, x));
                }
            }
        }
        Self::new(height, width, frame_duration, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn frames(&self) -> usize {
        self.data.len() / (self.height * self.width)
    }

    pub fn frame_duration(&self) -> f64 {
        self.frame_duration
    }

    pub fn frame(&self, m: usize) -> &[f64] {
        let hw = self.height * self.width;
        &self.data[m * hw..(m + 1) * hw]
    }

    #[inline]
    pub(crate) fn value(&self, m: usize, pixel: usize) -> f64 {
        self.data[m * self.height * self.width + pixel]
    }

    /// Readout steps spanned by one luminance frame.
    pub fn steps_per_frame(&self, delta_t: f64) -> Result<usize> {
        let ratio = self.frame_duration / delta_t;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-6 * steps {
            return Err(Error::config(format!(
                "frame_duration {} is not a positive integer multiple of delta_t {}",
                self.frame_duration, delta_t
            )));
        }
        Ok(steps as usize)
    }

    pub(crate) fn check_against(&self, cfg: &SensorConfig) -> Result<usize> {
        cfg.validate()?;
        if self.height != cfg.height || self.width != cfg.width {
            return Err(Error::dims(
                format!("{}x{} luminance", cfg.height, cfg.width),
                format!("{}x{}", self.height, self.width),
            ));
        }
        self.steps_per_frame(cfg.delta_t)
    }
}

/// One readout step of a single pixel: adds `increment` and fires if the
/// accumulation reaches `threshold`, keeping the post-crossing residual.
#[inline]
pub(crate) fn integrate(accum: &mut f64, increment: f64, threshold: f64) -> bool {
    let a = *accum + increment;
    if a >= threshold * (1.0 - THRESHOLD_SLACK) {
        *accum = if a >= threshold { a % threshold } else { 0.0 };
        true
    } else {
        *accum = a;
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorState {
    pub accum: Vec<f64>,
    /// Frame of the most recent spike, -1 if none yet.
    pub last_spike: Vec<i64>,
    /// Index of the frame the next step will produce.
    pub next_frame: i64,
}

impl AccumulatorState {
    pub fn new(pixels: usize) -> Self {
        Self {
            accum: vec![0.0; pixels],
            last_spike: vec![-1; pixels],
            next_frame: 0,
        }
    }
}

/// Advances every pixel by one readout step.
pub fn step_accumulator(
    state: &AccumulatorState,
    intensity: &[f64],
    threshold: &[f64],
    cfg: &SensorConfig,
) -> Result<(AccumulatorState, Vec<bool>)> {
    let n = state.accum.len();
    if intensity.len() != n || threshold.len() != n || state.last_spike.len() != n {
        return Err(Error::dims(
            format!("{n} pixels"),
            format!(
                "intensity {}, threshold {}, last_spike {}",
                intensity.len(),
                threshold.len(),
                state.last_spike.len()
            ),
        ));
    }
    if let Some((pixel, &value)) = threshold
        .iter()
        .enumerate()
        .find(|(_, &t)| !(t > 0.0 && t.is_finite()))
    {
        return Err(Error::InvalidThreshold { pixel, value });
    }
    let mut next = state.clone();
    let mut spikes = vec![false; n];
    for p in 0..n {
        if integrate(&mut next.accum[p], intensity[p] * cfg.delta_t, threshold[p]) {
            spikes[p] = true;
            next.last_spike[p] = state.next_frame;
        }
    }
    next.next_frame += 1;
    Ok((next, spikes))
}

/// Noise-free spike stream for `lum`.
pub fn simulate_ideal(lum: &LuminanceSequence, cfg: &SensorConfig) -> Result<SpikeStream> {
    let steps = lum.check_against(cfg)?;
    let frames = lum.frames() * steps;
    let phi = cfg.threshold();
    let dt = cfg.delta_t;
    let stream = SpikeStream::from_pixel_kernel(cfg.height, cfg.width, frames, dt, |p, words, mask| {
        let mut accum = 0.0;
        for m in 0..lum.frames() {
            let intensity = lum.value(m, p);
            let increment = intensity * dt;
            for s in 0..steps {
                if integrate(&mut accum, increment, phi) {
                    words[m * steps + s] |= mask;
                }
            }
        }
    });
    Ok(stream.with_flags(StreamFlags::IDEAL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cfg(h: usize, w: usize) -> SensorConfig {
        SensorConfig {
            height: h,
            width: w,
            delta_t: 1.0,
            capacitance: 1.0,
            reset_voltage: 2.0,
            reference_voltage: 1.0,
            ..SensorConfig::default()
        }
    }

    #[test]
    fn default_threshold_matches_one_period_at_unit_intensity() {
        let cfg = SensorConfig::default();
        assert!((cfg.threshold() - cfg.delta_t).abs() < 1e-18);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = SensorConfig::default();
        cfg.reference_voltage = cfg.reset_voltage;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = SensorConfig {
            width: 0,
            ..SensorConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SensorConfig {
            delta_t: -1.0,
            ..SensorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn step_fires_and_keeps_residual() {
        let cfg = unit_cfg(1, 1);
        let state = AccumulatorState {
            accum: vec![0.9],
            last_spike: vec![-1],
            next_frame: 4,
        };
        let (next, spikes) = step_accumulator(&state, &[0.2], &[1.0], &cfg).unwrap();
        assert_eq!(spikes, vec![true]);
        assert!((next.accum[0] - 0.1).abs() < 1e-12);
        assert_eq!(next.last_spike, vec![4]);
        assert_eq!(next.next_frame, 5);
    }

    #[test]
    fn step_without_input_is_quiet() {
        let cfg = unit_cfg(1, 2);
        let state = AccumulatorState::new(2);
        let (next, spikes) = step_accumulator(&state, &[0.0, 0.0], &[1.0, 1.0], &cfg).unwrap();
        assert_eq!(spikes, vec![false, false]);
        assert_eq!(next.accum, vec![0.0, 0.0]);
        assert_eq!(next.last_spike, vec![-1, -1]);
    }

    #[test]
    fn multiple_crossings_give_one_flag() {
        let cfg = unit_cfg(1, 1);
        let state = AccumulatorState {
            accum: vec![0.5],
            last_spike: vec![-1],
            next_frame: 0,
        };
        let (next, spikes) = step_accumulator(&state, &[1.7], &[1.0], &cfg).unwrap();
        assert_eq!(spikes, vec![true]);
        // 2.2 = two crossings, 0.2 left
        assert!((next.accum[0] - 0.2).abs() < 1e-12);
        assert!(next.accum[0] < 1.0);
    }

    #[test]
    fn nonpositive_threshold_is_rejected() {
        let cfg = unit_cfg(1, 2);
        let state = AccumulatorState::new(2);
        let err = step_accumulator(&state, &[1.0, 1.0], &[1.0, 0.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidThreshold { pixel: 1, .. }));
    }

    #[test]
    fn unit_input_fires_every_frame() {
        let cfg = SensorConfig::with_size(3, 4);
        let lum = LuminanceSequence::constant(3, 4, 20, cfg.delta_t, cfg.threshold() / cfg.delta_t)
            .unwrap();
        let s = simulate_ideal(&lum, &cfg).unwrap();
        assert_eq!(s.frames(), 20);
        assert_eq!(s.total_spikes(), 20 * 12);
    }

    #[test]
    fn dark_scene_is_silent() {
        let cfg = SensorConfig::with_size(5, 7);
        let lum = LuminanceSequence::constant(5, 7, 3, 4.0 * cfg.delta_t, 0.0).unwrap();
        let s = simulate_ideal(&lum, &cfg).unwrap();
        assert_eq!(s.frames(), 12);
        assert_eq!(s.total_spikes(), 0);
        assert!(s.flags().contains(StreamFlags::IDEAL));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let cfg = SensorConfig::with_size(4, 4);
        let lum = LuminanceSequence::constant(4, 5, 1, cfg.delta_t, 1.0).unwrap();
        assert!(matches!(
            simulate_ideal(&lum, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn frame_duration_must_be_a_multiple_of_delta_t() {
        let cfg = SensorConfig::with_size(1, 1);
        let lum = LuminanceSequence::constant(1, 1, 1, 1.5 * cfg.delta_t, 1.0).unwrap();
        assert!(matches!(simulate_ideal(&lum, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn negative_luminance_is_rejected() {
        assert!(LuminanceSequence::new(1, 2, 1.0, vec![0.5, -0.1]).is_err());
    }
}
