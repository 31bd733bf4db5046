use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tomokit::{FanGeometry, FilterKind, InterpMethod, ParallelGeometry};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "tomokit", version, about = "Two-dimensional CT reconstruction toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rasterize a phantom to an image file.
    Phantom(PhantomCmd),
    /// Simulate projection data.
    Sinogram(SinogramCmd),
    /// Filtered back projection (parallel or fan data).
    Fbp(FbpCmd),
    /// Kaczmarz / ART on the Radon matrix.
    Art(ArtCmd),
    /// Tikhonov-regularized least squares.
    Tikhonov(TikhonovCmd),
    /// Direct Fourier reconstruction.
    Dfr(SpectralCmd),
    /// Filtering the laminogram.
    Laminogram(SpectralCmd),
    /// Add seeded Gaussian noise to projection data.
    Noise(NoiseCmd),
    /// Error metrics between two raw images.
    Compare(CompareCmd),
}

#[derive(Debug, Args)]
pub struct ImageOut {
    /// Output image: `.pgm` (8-bit gray) or `.img` (raw f64).
    #[arg(long, short)]
    pub out: PathBuf,
    /// Write ASCII PGM (P2) instead of binary (P5).
    #[arg(long)]
    pub ascii: bool,
    /// Fixed gray window `LO:HI` for PGM output.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Image side length in pixels.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Half-width of the image square; defaults to the support radius.
    #[arg(long)]
    pub extent: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PhantomCmd {
    /// Built-in name (shepp-logan, thorax, unit-ball) or ellipse table file.
    #[arg(long, default_value = "shepp-logan")]
    pub phantom: String,
    /// Support radius `r`.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: ImageOut,
}

#[derive(Debug, Args)]
pub struct ParallelArgs {
    /// Bandwidth `L`; sets `d = π/L`, `M = rL/π`, `N = 3M`.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Offset spacing `d` (with --half-count and --angles).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// `M`, offsets run over `-M..=M`.
    #[arg(long)]
    pub half_count: Option<usize>,
    /// Number of angles `N`.
    #[arg(long)]
    pub angles: Option<usize>,
}

impl ParallelArgs {
    pub fn geometry(&self, radius: f64) -> Result<ParallelGeometry, CliError> {
        match (self.bandwidth, self.spacing, self.half_count, self.angles) {
            (Some(l), None, None, None) => Ok(ParallelGeometry::from_bandwidth(l, radius)?),
            (None, Some(d), Some(m), Some(n)) => Ok(ParallelGeometry::new(d, m, n, radius)?),
            (None, None, None, None) => Ok(ParallelGeometry::from_bandwidth(50.0 * PI, radius)?),
            _ => Err(CliError::Config("give either --bandwidth or all of --spacing, --half-count and --angles".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct FanArgs {
    /// Source circle radius `D`.
    #[arg(long, default_value_t = 3.0)]
    pub source_radius: f64,
    /// Fan opening angle `φ` in radians.
    #[arg(long, default_value_t = PI / 3.0)]
    pub opening: f64,
    /// Number of source positions `p`.
    #[arg(long, default_value_t = 270)]
    pub sources: usize,
    /// `q`, rays run over `-q..=q`.
    #[arg(long, default_value_t = 90)]
    pub half_rays: usize,
}

impl FanArgs {
    pub fn geometry(&self, radius: f64) -> Result<FanGeometry, CliError> {
        Ok(FanGeometry::new(self.source_radius, self.opening, self.sources, self.half_rays, radius)?)
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SinogramCmd {
    #[arg(long, default_value = "shepp-logan")]
    pub phantom: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Exact line integrals of the ellipses (default).
    #[arg(long, conflicts_with = "discrete")]
    pub analytic: bool,
    /// Forward project a rasterized image with the pixel basis.
    #[arg(long)]
    pub discrete: bool,
    /// Pixels per side for --discrete.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Fan beam instead of parallel beam.
    #[arg(long, conflicts_with = "discrete")]
    pub fan: bool,
    #[command(flatten)]
    pub parallel: ParallelArgs,
    #[command(flatten)]
    pub fan_geometry: FanArgs,
    /// Output: `.tomo` binary or `.csv`.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// ram-lak, shepp-logan, cosine, hamming:β or gaussian:β.
    #[arg(long, default_value = "ram-lak")]
    pub filter: FilterKind,
    /// Filter bandwidth `L`; defaults to the one matching the sampling.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// nearest or linear.
    #[arg(long, default_value = "linear")]
    pub interp: InterpMethod,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FbpCmd {
    /// Projection data (`.tomo`).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Require fan beam data.
    #[arg(long)]
    pub fan: bool,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: ImageOut,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ArtCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Clamp iterates to be non-negative (ART).
    #[arg(long)]
    pub nonneg: bool,
    /// Relaxation parameter in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    /// Sweep limit; defaults to 10·M/N + 100.
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Visit rows in a seeded random order each sweep.
    #[arg(long)]
    pub shuffle: Option<u64>,
    /// Write the Radon matrix as `M N nnz` + `row col value` text.
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: ImageOut,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TikhonovCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Regularization parameter `γ > 0`.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Relative residual tolerance of CG.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: ImageOut,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpectralCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: ImageOut,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct NoiseCmd {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Relative noise level, `E‖noise‖ = level·‖data‖`.
    #[arg(long, default_value_t = 0.1)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output: `.tomo` binary or `.csv`.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareCmd {
    /// Raw image under test (`.img`).
    #[arg(long)]
    pub estimate: PathBuf,
    /// Raw reference image (`.img`).
    #[arg(long)]
    pub reference: PathBuf,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    if hi <= lo || lo.is_nan() || hi.is_nan() {
        return Err("window needs LO < HI".into());
    }
    Ok((lo, hi))
}
