use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use spikecam::calibration::{solve_snee, summarize_noise};
use spikecam::eval::{compare_streams, compute_stats, tfp_reconstruct};
use spikecam::io::dataset::generate_pair;
use spikecam::io::isi_file::{read_plane_dir, write_plane, write_plane_dir, plane_file_name};
use spikecam::io::luminance::{read_luminance_dir, write_pgm8};
use spikecam::io::manifest::{CalibrationManifest, DatasetManifest, SimConfig};
use spikecam::io::params_file::{read_params, write_params};
use spikecam::io::report::{write_frame_metrics, write_noise_summary, write_stats_dir};
use spikecam::io::spike_file::{read_stream, write_stream};
use spikecam::isi::{compute_isi_plane, decode_isi_to_stream, isi_sequence, mus_refine_sequence};
use spikecam::{sample_spatial_noise, simulate_ideal, simulate_noisy, SensorConfig};

/// Spike camera simulation, calibration and spike-stream processing.
#[derive(Parser)]
#[command(name = "spikecam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a spike stream from a directory of luminance frames.
    Simulate(SimulateArgs),
    /// Estimate per-pixel noise maps from static calibration scenes.
    Calibrate(CalibrateArgs),
    /// Compute inter-spike-interval planes from a spike stream.
    Isi(IsiArgs),
    /// Refine an ISI plane sequence and decode it to a spike stream.
    MusDecode(MusDecodeArgs),
    /// Firing-rate, ISI histogram and spike-pattern tables for a stream.
    Stats(StatsArgs),
    /// PSNR/SSIM of noisy and denoised streams against a clean stream.
    Compare(CompareArgs),
    /// Reconstruct intensity images from spike counts.
    Tfp(TfpArgs),
    /// Generate clean/noisy stream pairs from a dataset manifest.
    GenDataset(GenDatasetArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Mode {
    /// Noise-free sensor.
    #[arg(long)]
    ideal: bool,
    /// Sensor with shot, thermal and fixed-pattern noise.
    #[arg(long)]
    noisy: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Luminance directory (PGM frames and luminance.toml).
    input: PathBuf,
    /// Output spike file.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    mode: Mode,
    /// TOML file with [sensor] and [noise] tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the noise seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Use these noise maps instead of sampling them.
    #[arg(long, conflicts_with = "ideal")]
    params: Option<PathBuf>,
    /// Save the noise maps used.
    #[arg(long, conflicts_with = "ideal")]
    params_out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Calibration manifest (TOML).
    manifest: PathBuf,
    /// Output noise-map file.
    #[arg(short, long)]
    output: PathBuf,
    /// Output CSV of map statistics.
    #[arg(long)]
    stats: PathBuf,
    /// Mean threshold fixing the global scale; overrides the manifest.
    #[arg(long)]
    gauge_phi: Option<f64>,
}

#[derive(Args)]
struct IsiArgs {
    /// Input spike file.
    input: PathBuf,
    /// Output directory for plane files.
    #[arg(short, long)]
    output: PathBuf,
    /// Only compute the plane at this frame.
    #[arg(long)]
    frame: Option<usize>,
    /// Maximum distance to a bracketing spike, in frames.
    #[arg(long, default_value_t = 32)]
    window: usize,
}

#[derive(Args)]
struct MusDecodeArgs {
    /// Directory of ISI plane files starting at frame 0.
    input: PathBuf,
    /// Output spike file.
    #[arg(short, long)]
    output: PathBuf,
    /// Readout period of the output stream, in seconds.
    #[arg(long, default_value_t = SensorConfig::default().delta_t)]
    delta_t: f64,
    /// Decode the planes as given, without refinement.
    #[arg(long)]
    no_mus: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Input spike file.
    input: PathBuf,
    /// Output directory for CSV tables.
    #[arg(short, long)]
    output: PathBuf,
    /// Frames averaged into the spike-pattern table (default: up to 10).
    #[arg(long)]
    pattern_window: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    clean: PathBuf,
    #[arg(long)]
    noisy: PathBuf,
    #[arg(long)]
    denoised: PathBuf,
    /// Output metrics CSV.
    #[arg(short, long)]
    output: PathBuf,
    /// Evaluation frames (default: eight evenly spaced frames).
    #[arg(long, value_delimiter = ',')]
    frames: Vec<usize>,
    /// Reconstruction window, in frames.
    #[arg(long, default_value_t = 64)]
    window: usize,
}

#[derive(Args)]
struct TfpArgs {
    /// Input spike file.
    input: PathBuf,
    /// Output directory for 8-bit PGM images.
    #[arg(short, long)]
    output: PathBuf,
    /// Center frames to reconstruct.
    #[arg(long, value_delimiter = ',', required = true)]
    frames: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    window: usize,
    /// Threshold used to convert rates to intensity.
    #[arg(long, default_value_t = SensorConfig::default().threshold())]
    phi: f64,
    /// Intensity mapped to white (default: each image's maximum).
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args)]
struct GenDatasetArgs {
    /// Dataset manifest (TOML).
    manifest: PathBuf,
}

type CliResult = Result<(), Failure>;

enum Failure {
    Usage(String),
    Runtime(spikecam::Error),
}

impl From<spikecam::Error> for Failure {
    fn from(e: spikecam::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn require(path: &Path) -> CliResult {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("no such file or directory: {}", path.display())))
    }
}

fn simulate(a: SimulateArgs) -> CliResult {
    require(&a.input)?;
    for p in a.config.iter().chain(&a.params) {
        require(p)?;
    }
    let mut sim = match &a.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = a.seed {
        sim.noise.rng_seed = seed;
    }
    let lum = read_luminance_dir(&a.input)?;
    let cfg = SensorConfig {
        height: lum.height(),
        width: lum.width(),
        ..sim.sensor
    };
    let stream = if a.mode.ideal {
        simulate_ideal(&lum, &cfg)?
    } else {
        let params = match &a.params {
            Some(p) => read_params(p)?,
            None => sample_spatial_noise(&cfg, &sim.noise)?,
        };
        if let Some(out) = &a.params_out {
            write_params(&params, out)?;
        }
        simulate_noisy(&lum, &cfg, &sim.noise, &params)?
    };
    write_stream(&stream, &a.output)?;
    info!(
        "{}x{}x{} stream, {} spikes",
        stream.height(),
        stream.width(),
        stream.frames(),
        stream.total_spikes()
    );
    Ok(())
}

fn calibrate(a: CalibrateArgs) -> CliResult {
    require(&a.manifest)?;
    let m = CalibrationManifest::load(&a.manifest)?;
    let set = m.load_set()?;
    let gauge = a.gauge_phi.unwrap_or_else(|| m.gauge());
    let result = solve_snee(&set, gauge, &m.priors)?;
    write_params(&result.params, &a.output)?;
    write_noise_summary(&summarize_noise(&result), &a.stats)?;
    info!(
        "{} pixels, {} dead, {} underexposed",
        result.params.pixels(),
        result.dead.iter().filter(|d| **d).count(),
        result.underexposed
    );
    Ok(())
}

fn isi(a: IsiArgs) -> CliResult {
    require(&a.input)?;
    let stream = read_stream(&a.input)?;
    match a.frame {
        Some(t) => {
            let plane = compute_isi_plane(&stream, t, a.window)?;
            write_plane(&plane, a.output.join(plane_file_name(t)))?;
        }
        None => write_plane_dir(&isi_sequence(&stream, a.window)?, &a.output)?,
    }
    Ok(())
}

fn mus_decode(a: MusDecodeArgs) -> CliResult {
    require(&a.input)?;
    let mut planes = read_plane_dir(&a.input)?;
    if !a.no_mus {
        planes = mus_refine_sequence(&planes)?;
    }
    write_stream(&decode_isi_to_stream(&planes, a.delta_t)?, &a.output)?;
    Ok(())
}

fn stats(a: StatsArgs) -> CliResult {
    require(&a.input)?;
    let stream = read_stream(&a.input)?;
    let window = a.pattern_window.unwrap_or(stream.frames().min(10));
    write_stats_dir(&compute_stats(&stream, window)?, &a.output)?;
    Ok(())
}

fn compare(a: CompareArgs) -> CliResult {
    for p in [&a.clean, &a.noisy, &a.denoised] {
        require(p)?;
    }
    let clean = read_stream(&a.clean)?;
    let noisy = read_stream(&a.noisy)?;
    let denoised = read_stream(&a.denoised)?;
    let frames = if a.frames.is_empty() {
        let half = a.window / 2;
        let usable = clean.frames().saturating_sub(a.window);
        (0..8).map(|i| half + usable * i / 7).collect()
    } else {
        a.frames
    };
    // PSNR and SSIM are invariant to the intensity unit.
    let rows = compare_streams(&noisy, &denoised, &clean, &frames, a.window, 1.0)?;
    write_frame_metrics(&rows, &a.output)?;
    Ok(())
}

fn tfp(a: TfpArgs) -> CliResult {
    require(&a.input)?;
    let stream = read_stream(&a.input)?;
    for &t in &a.frames {
        let img = tfp_reconstruct(&stream, t, a.window, a.phi)?;
        let path = a.output.join(format!("tfp_{t:08}.pgm"));
        let scale = write_pgm8(&img, stream.height(), stream.width(), a.scale, &path)?;
        println!("{}\t{scale}", path.display());
    }
    Ok(())
}

fn gen_dataset(a: GenDatasetArgs) -> CliResult {
    require(&a.manifest)?;
    let m = DatasetManifest::load(&a.manifest)?;
    for entry in m.resolve() {
        require(&entry.luminance)?;
        let pair = generate_pair(&entry)?;
        info!(
            "{}: clean {} spikes, noisy {} spikes",
            entry.name,
            pair.clean.total_spikes(),
            pair.noisy.total_spikes()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Isi(a) => isi(a),
        Command::MusDecode(a) => mus_decode(a),
        Command::Stats(a) => stats(a),
        Command::Compare(a) => compare(a),
        Command::Tfp(a) => tfp(a),
        Command::GenDataset(a) => gen_dataset(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
