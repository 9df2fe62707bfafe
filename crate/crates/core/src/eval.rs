//! Firing statistics, texture-from-playback (TFP) reconstruction and image
//! quality metrics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::stream::SpikeStream;

#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    /// Spikes per pixel per frame, in `[0, 1]`.
    pub mean_spikes_per_frame: f64,
    /// Interval length in frames -> number of complete intervals.
    pub isi_histogram: BTreeMap<u32, u64>,
    /// Per-pixel spike count over the first `pattern_window` frames.
    pub spike_pattern: Vec<f64>,
    pub height: usize,
    pub width: usize,
}

impl StreamStats {
    pub fn interval_count(&self) -> u64 {
        self.isi_histogram.values().sum()
    }

    /// Mean and population variance of the interval histogram.
    pub fn isi_moments(&self) -> (f64, f64) {
        histogram_moments(&self.isi_histogram)
    }
}

pub fn histogram_moments(hist: &BTreeMap<u32, u64>) -> (f64, f64) {
    let n: u64 = hist.values().sum();
    if n == 0 {
        return (0.0, 0.0);
    }
    let n = n as f64;
    let mean = hist.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / n;
    let var = hist
        .iter()
        .map(|(&k, &c)| (k as f64 - mean).powi(2) * c as f64)
        .sum::<f64>()
        / n;
    (mean, var)
}

pub fn compute_stats(stream: &SpikeStream, pattern_window: usize) -> Result<StreamStats> {
    if pattern_window > stream.frames() {
        return Err(Error::IndexOutOfRange {
            index: pattern_window,
            len: stream.frames(),
        });
    }
    let cells = stream.frames() * stream.pixels();
    let mean_spikes_per_frame = if cells == 0 {
        0.0
    } else {
        stream.total_spikes() as f64 / cells as f64
    };

    let mut isi_histogram = BTreeMap::new();
    let mut last = vec![usize::MAX; stream.pixels()];
    for t in 0..stream.frames() {
        for (byte_idx, &byte) in stream.frame_bytes(t).iter().enumerate() {
            if byte == 0 {
                continue;
            }
            for bit in 0..8 {
                if byte & (0x80 >> bit) == 0 {
                    continue;
                }
                let p = byte_idx * 8 + bit;
                if last[p] != usize::MAX {
                    *isi_histogram.entry((t - last[p]) as u32).or_insert(0) += 1;
                }
                last[p] = t;
            }
        }
    }

    let spike_pattern = stream
        .counts_in(0, pattern_window)
        .into_iter()
        .map(f64::from)
        .collect();
    Ok(StreamStats {
        mean_spikes_per_frame,
        isi_histogram,
        spike_pattern,
        height: stream.height(),
        width: stream.width(),
    })
}

/// Windowed firing-rate image around frame `t`, scaled to intensity units:
/// `count * phi / (window * dt)` over frames `[t - window/2, t - window/2 + window)`.
pub fn tfp_reconstruct(
    stream: &SpikeStream,
    t: usize,
    window: usize,
    phi: f64,
) -> Result<Vec<f64>> {
    let start = t.checked_sub(window / 2);
    let end = start.map(|s| s + window);
    match (start, end) {
        (Some(start), Some(end)) if window > 0 && end <= stream.frames() => {
            let scale = phi / (window as f64 * stream.delta_t());
            Ok(stream
                .counts_in(start, end)
                .into_iter()
                .map(|c| c as f64 * scale)
                .collect())
        }
        _ => Err(Error::IndexOutOfRange {
            index: t + window.div_ceil(2),
            len: stream.frames(),
        }),
    }
}

/// Peak signal-to-noise ratio in dB; `+inf` for identical images.
pub fn psnr(a: &[f64], b: &[f64], peak: f64) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::dims(format!("{} values", a.len()), b.len()));
    }
    if !(peak > 0.0) {
        return Err(Error::config(format!("peak must be positive, got {peak}")));
    }
    let mse = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - r;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable Gaussian filter over the positions where the whole window fits.
fn filter_valid(img: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (oh, ow) = (h - SSIM_WINDOW + 1, w - SSIM_WINDOW + 1);
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = (0..SSIM_WINDOW).map(|i| k[i] * img[y * w + x + i]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..SSIM_WINDOW).map(|i| k[i] * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// `K1 = 0.01`, `K2 = 0.03` and dynamic range `peak`, averaged over the
/// positions where the window lies inside the image.
pub fn ssim(a: &[f64], b: &[f64], height: usize, width: usize, peak: f64) -> Result<f64> {
    if a.len() != height * width || b.len() != height * width {
        return Err(Error::dims(
            format!("{height}x{width} images"),
            format!("{} and {} values", a.len(), b.len()),
        ));
    }
    if height < SSIM_WINDOW || width < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(format!(
            "{height}x{width} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )));
    }
    if !(peak > 0.0) {
        return Err(Error::config(format!("peak must be positive, got {peak}")));
    }
    let k = gaussian_kernel();
    let prod = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p * q).collect() };
    let mu_a = filter_valid(a, height, width, &k);
    let mu_b = filter_valid(b, height, width, &k);
    let aa = filter_valid(&prod(a, a), height, width, &k);
    let bb = filter_valid(&prod(b, b), height, width, &k);
    let ab = filter_valid(&prod(a, b), height, width, &k);
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let n = mu_a.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    Ok(total / n as f64)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FrameMetrics {
    pub frame: usize,
    pub noisy_psnr: f64,
    pub noisy_ssim: f64,
    pub denoised_psnr: f64,
    pub denoised_ssim: f64,
}

/// TFP-reconstructs the three streams at each frame and scores the noisy and
/// denoised reconstructions against the clean one. `phi` scales counts to
/// intensity; the metric peak is the all-spiking level `phi / dt`.
pub fn compare_streams(
    noisy: &SpikeStream,
    denoised: &SpikeStream,
    clean: &SpikeStream,
    eval_frames: &[usize],
    window: usize,
    phi: f64,
) -> Result<Vec<FrameMetrics>> {
    if !clean.same_shape(noisy) || !clean.same_shape(denoised) {
        return Err(Error::dims(
            format!(
                "{}x{}x{} streams",
                clean.height(),
                clean.width(),
                clean.frames()
            ),
            format!(
                "noisy {}x{}x{}, denoised {}x{}x{}",
                noisy.height(),
                noisy.width(),
                noisy.frames(),
                denoised.height(),
                denoised.width(),
                denoised.frames()
            ),
        ));
    }
    let (h, w) = (clean.height(), clean.width());
    let peak = phi / clean.delta_t();
    eval_frames
        .iter()
        .map(|&t| {
            let c = tfp_reconstruct(clean, t, window, phi)?;
            let n = tfp_reconstruct(noisy, t, window, phi)?;
            let d = tfp_reconstruct(denoised, t, window, phi)?;
            Ok(FrameMetrics {
                frame: t,
                noisy_psnr: psnr(&n, &c, peak)?,
                noisy_ssim: ssim(&n, &c, h, w, peak)?,
                denoised_psnr: psnr(&d, &c, peak)?,
                denoised_ssim: ssim(&d, &c, h, w, peak)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_stats() {
        let s = SpikeStream::from_fn(3, 5, 12, 1.0, |_, _, _| true);
        let st = compute_stats(&s, 4).unwrap();
        assert_eq!(st.mean_spikes_per_frame, 1.0);
        assert_eq!(st.isi_histogram, BTreeMap::from([(1, 11 * 15)]));
        assert!(st.spike_pattern.iter().all(|&c| c == 4.0));
    }

    #[test]
    fn all_zero_stats() {
        let s = SpikeStream::zeros(3, 5, 12, 1.0);
        let st = compute_stats(&s, 12).unwrap();
        assert_eq!(st.mean_spikes_per_frame, 0.0);
        assert!(st.isi_histogram.is_empty());
        assert_eq!(st.isi_moments(), (0.0, 0.0));
        assert!(compute_stats(&s, 13).is_err());
    }

    #[test]
    fn tfp_of_saturated_stream() {
        let s = SpikeStream::from_fn(2, 2, 20, 0.5, |_, _, _| true);
        let img = tfp_reconstruct(&s, 10, 8, 3.0).unwrap();
        assert!(img.iter().all(|&v| (v - 6.0).abs() < 1e-12));
        assert!(tfp_reconstruct(&s, 2, 8, 3.0).is_err());
        assert!(tfp_reconstruct(&s, 17, 8, 3.0).is_err());
        assert!(tfp_reconstruct(&s, 16, 8, 3.0).is_ok());
    }

    #[test]
    fn psnr_closed_form() {
        let a: Vec<f64> = (0..64).map(|i| (i * 3 % 200) as f64).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 10.0).collect();
        let p = psnr(&a, &b, 255.0).unwrap();
        assert!((p - 20.0 * (255.0f64 / 10.0).log10()).abs() < 1e-12);
        assert!((p - 28.13).abs() < 0.01);
        assert_eq!(psnr(&a, &a, 255.0).unwrap(), f64::INFINITY);
        assert!(psnr(&a, &b[..10], 255.0).is_err());
    }

    #[test]
    fn ssim_matches_reference_value() {
        // skimage structural_similarity, gaussian_weights, sigma 1.5,
        // population covariance, data_range 1
        let (h, w) = (24, 20);
        let a: Vec<f64> = (0..h * w)
            .map(|i| ((i / w * 7 + i % w * 3) % 17) as f64 / 16.0)
            .collect();
        let b: Vec<f64> = (0..h * w)
            .map(|i| {
                let (y, x) = ((i / w) as f64, (i % w) as f64);
                (a[i] + (((x * y) as usize % 5) as f64 - 2.0) / 40.0).clamp(0.0, 1.0)
            })
            .collect();
        let s = ssim(&a, &b, h, w, 1.0).unwrap();
        assert!((s - 0.992_716_485_018_442_9).abs() < 1e-12, "{s}");
    }

    #[test]
    fn ssim_identity_and_bounds() {
        let a: Vec<f64> = (0..16 * 16).map(|i| ((i * 37) % 251) as f64).collect();
        assert!((ssim(&a, &a, 16, 16, 255.0).unwrap() - 1.0).abs() < 1e-12);
        let b: Vec<f64> = a.iter().map(|v| 255.0 - v).collect();
        let s = ssim(&a, &b, 16, 16, 255.0).unwrap();
        assert!((-1.0..1.0).contains(&s));
        assert!(matches!(
            ssim(&a[..100], &a[..100], 10, 10, 255.0),
            Err(Error::ImageTooSmall(_))
        ));
    }

    #[test]
    fn compare_identical_denoised() {
        let clean = SpikeStream::from_fn(12, 12, 40, 1.0, |t, y, x| (t + y * x) % 4 == 0);
        let noisy = SpikeStream::from_fn(12, 12, 40, 1.0, |t, y, x| (t + y + x) % 3 == 0);
        let rows = compare_streams(&noisy, &clean, &clean, &[10, 20], 16, 1.0).unwrap();
        for r in &rows {
            assert_eq!(r.denoised_psnr, f64::INFINITY);
            assert!(r.denoised_psnr >= r.noisy_psnr);
            assert!((r.denoised_ssim - 1.0).abs() < 1e-12);
        }
        let rows = compare_streams(&noisy, &noisy, &clean, &[10, 20], 16, 1.0).unwrap();
        for r in &rows {
            assert_eq!(r.noisy_psnr, r.denoised_psnr);
            assert_eq!(r.noisy_ssim, r.denoised_ssim);
        }
    }
}
