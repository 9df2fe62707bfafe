//! CSV reports.
//!
//! | file | columns |
//! |------|---------|
//! | spike pattern | `H` rows of `W` per-pixel spike rates, no header |
//! | ISI histogram | `interval,count` |
//! | stream summary | `metric,value` |
//! | frame metrics | `frame,noisy_psnr,noisy_ssim,denoised_psnr,denoised_ssim` |
//! | noise statistics | `parameter,mean,std` |
//!
//! Infinite PSNR is written as `inf`.

use std::path::Path;

use serde::Serialize;

use crate::calibration::NoiseSummary;
use crate::error::{Error, Result};
use crate::eval::{FrameMetrics, StreamStats};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::config(format!("{}: {other:?}", path.display())),
    }
}

fn write_records<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_spike_pattern(stats: &StreamStats, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in stats.spike_pattern.chunks(stats.width) {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| csv_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::config(e.to_string()))?;
    super::write_file(path, &bytes)
}

pub fn write_isi_histogram(stats: &StreamStats, path: impl AsRef<Path>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        interval: u32,
        count: u64,
    }
    write_records(
        path.as_ref(),
        stats
            .isi_histogram
            .iter()
            .map(|(&interval, &count)| Row { interval, count }),
    )
}

#[derive(Serialize)]
struct Metric<'a> {
    metric: &'a str,
    value: f64,
}

pub fn write_stream_summary(stats: &StreamStats, path: impl AsRef<Path>) -> Result<()> {
    let (mean, var) = stats.isi_moments();
    write_records(
        path.as_ref(),
        [
            Metric { metric: "mean_spikes_per_frame", value: stats.mean_spikes_per_frame },
            Metric { metric: "isi_count", value: stats.interval_count() as f64 },
            Metric { metric: "isi_mean", value: mean },
            Metric { metric: "isi_variance", value: var },
        ],
    )
}

/// Writes `spike_pattern.csv`, `isi_histogram.csv` and `summary.csv` into `dir`.
pub fn write_stats_dir(stats: &StreamStats, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    write_spike_pattern(stats, dir.join("spike_pattern.csv"))?;
    write_isi_histogram(stats, dir.join("isi_histogram.csv"))?;
    write_stream_summary(stats, dir.join("summary.csv"))
}

pub fn write_frame_metrics(rows: &[FrameMetrics], path: impl AsRef<Path>) -> Result<()> {
    write_records(path.as_ref(), rows)
}

pub fn write_noise_summary(summary: &NoiseSummary, path: impl AsRef<Path>) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        parameter: &'static str,
        mean: f64,
        std: f64,
    }
    let s = summary;
    write_records(
        path.as_ref(),
        [
            ("alpha", s.alpha),
            ("dark", s.dark),
            ("cap", s.cap),
            ("bias", s.bias),
            ("theta", s.theta),
        ]
        .map(|(parameter, m)| Row {
            parameter,
            mean: m.mean,
            std: m.std,
        }),
    )
}

/// Reads back a `parameter,mean,std` table.
pub fn read_noise_summary_rows(path: impl AsRef<Path>) -> Result<Vec<(String, f64, f64)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}
