use std::fs;
use std::path::Path;

use tomokit::algebraic::{
    build_radon_matrix, kaczmarz, kaczmarz_nonneg, tikhonov_cg, CgOptions, KaczmarzOptions, Regularizer, RowOrder,
    SparseMatrix, StopReason,
};
use tomokit::geometry::fan_to_parallel;
use tomokit::io::{self, PgmEncoding, SinogramData};
use tomokit::noise::{add_noise, add_noise_fan};
use tomokit::phantom::{analytic_fan_sinogram, analytic_sinogram, rasterize};
use tomokit::projector::forward_project;
use tomokit::spectral::{direct_fourier_reconstruct, laminogram_reconstruct};
use tomokit::{error_metrics, fbp_fan, fbp_parallel, Error, FilterSpec, Grid, Image, LineParam, Phantom, Sinogram};

use crate::args::*;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Phantom(c) => phantom(c),
        Command::Sinogram(c) => sinogram(c),
        Command::Fbp(c) => fbp(c),
        Command::Art(c) => art(c),
        Command::Tikhonov(c) => tikhonov(c),
        Command::Dfr(c) => dfr(c),
        Command::Laminogram(c) => laminogram(c),
        Command::Noise(c) => noise(c),
        Command::Compare(c) => compare(c),
    }
}

fn load_phantom(source: &str, radius: f64) -> Result<Phantom> {
    match Phantom::builtin(source) {
        Ok(p) => Ok(p),
        Err(Error::UnknownPhantom(_)) if Path::new(source).is_file() => Ok(Phantom::load(Path::new(source), radius)?),
        Err(e) => Err(e.into()),
    }
}

fn grid_for(args: &GridArgs, radius: f64) -> Result<Grid> {
    let extent = args.extent.unwrap_or(radius);
    if args.size == 0 || !(extent > 0.0 && extent.is_finite()) {
        return Err(CliError::Config(format!(
            "grid needs --size ≥ 1 and a positive extent, got {} and {extent}",
            args.size
        )));
    }
    Ok(Grid::square(args.size, extent))
}

fn extension(path: &Path) -> String {
    path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase()
}

fn write_image(out: &ImageOut, image: &Image) -> Result<()> {
    match extension(&out.out).as_str() {
        "pgm" => {
            let enc = if out.ascii { PgmEncoding::Ascii } else { PgmEncoding::Binary };
            io::write_pgm(&out.out, image, enc, out.window)?;
        }
        "img" => io::write_image(&out.out, image)?,
        other => {
            return Err(CliError::Config(format!("unsupported image extension `.{other}` (use .pgm or .img)")));
        }
    }
    Ok(())
}

fn write_sinogram(path: &Path, data: &SinogramData) -> Result<()> {
    if extension(path) == "csv" {
        fs::write(path, io::sinogram_csv(data))?;
    } else {
        io::write_sinogram(path, data)?;
    }
    Ok(())
}

fn read_data(path: &Path) -> Result<SinogramData> {
    io::read_sinogram(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn read_raw_image(path: &Path) -> Result<Image> {
    io::read_image(path, 1.0).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn read_parallel(path: &Path) -> Result<Sinogram> {
    match read_data(path)? {
        SinogramData::Parallel(s) => Ok(s),
        SinogramData::Fan(_) => {
            Err(CliError::Config(format!("{} holds fan beam data; parallel data required", path.display())))
        }
    }
}

fn phantom(c: PhantomCmd) -> Result<()> {
    let ph = load_phantom(&c.phantom, c.radius)?;
    let grid = grid_for(&c.grid, c.radius)?;
    write_image(&c.output, &rasterize(&ph, grid))
}

fn sinogram(c: SinogramCmd) -> Result<()> {
    let ph = load_phantom(&c.phantom, c.radius)?;
    let data = if c.fan {
        let g = c.fan_geometry.geometry(c.radius)?;
        SinogramData::Fan(analytic_fan_sinogram(&ph, &g))
    } else {
        let g = c.parallel.geometry(c.radius)?;
        if c.discrete {
            let grid = grid_for(&GridArgs { size: c.size, extent: None }, c.radius)?;
            SinogramData::Parallel(forward_project(&rasterize(&ph, grid), &g)?)
        } else {
            SinogramData::Parallel(analytic_sinogram(&ph, &g))
        }
    };
    let (rows, cols) = data.shape();
    println!("shape = {rows}x{cols}");
    write_sinogram(&c.out, &data)
}

fn fbp(c: FbpCmd) -> Result<()> {
    let data = read_data(&c.input)?;
    match data {
        SinogramData::Parallel(_) if c.fan => {
            Err(CliError::Config(format!("--fan given but {} holds parallel beam data", c.input.display())))
        }
        SinogramData::Parallel(s) => {
            let g = *s.geometry();
            let spec = FilterSpec::new(c.filter.filter, c.filter.bandwidth.unwrap_or(g.nyquist_bandwidth()))?;
            let grid = grid_for(&c.grid, g.radius())?;
            let image = fbp_parallel(&s, &spec, c.filter.interp, grid)?;
            write_image(&c.output, &image)
        }
        SinogramData::Fan(s) => {
            let g = *s.geometry();
            let default_l = 2.0 * std::f64::consts::PI * g.half_rays() as f64 / (g.opening() * g.source_radius());
            let spec = FilterSpec::new(c.filter.filter, c.filter.bandwidth.unwrap_or(default_l))?;
            let grid = grid_for(&c.grid, g.radius())?;
            let rec = fbp_fan(&s, &spec, c.filter.interp, grid)?;
            println!("excluded_pixels = {}", rec.excluded_pixels);
            write_image(&c.output, &rec.image)
        }
    }
}

/// Radon matrix and data vector for either kind of projection data.
fn linear_system(data: &SinogramData, grid: Grid) -> Result<(SparseMatrix, Vec<f64>)> {
    let lines: Vec<LineParam> = match data {
        SinogramData::Parallel(s) => s.geometry().lines(),
        SinogramData::Fan(s) => {
            let g = s.geometry();
            let mut lines = Vec::with_capacity(g.ray_count() * g.source_count());
            for row in 0..g.ray_count() {
                for k in 0..g.source_count() {
                    lines.push(fan_to_parallel(g.alpha_at_row(row), g.beta(k), g.source_radius())?);
                }
            }
            lines
        }
    };
    Ok((build_radon_matrix(grid, &lines)?, data.values().to_vec()))
}

fn data_radius(data: &SinogramData) -> f64 {
    match data {
        SinogramData::Parallel(s) => s.geometry().radius(),
        SinogramData::Fan(s) => s.geometry().radius(),
    }
}

fn art(c: ArtCmd) -> Result<()> {
    let data = read_data(&c.input)?;
    let grid = grid_for(&c.grid, data_radius(&data))?;
    let (a, y) = linear_system(&data, grid)?;
    if let Some(path) = &c.dump_matrix {
        fs::write(path, a.to_text())?;
    }
    let opts = KaczmarzOptions {
        omega: c.omega,
        delta: c.delta,
        max_sweeps: c.max_sweeps,
        order: c.shuffle.map_or(RowOrder::Sequential, RowOrder::Shuffled),
    };
    let start = vec![0.0; grid.len()];
    let (coeffs, report) =
        if c.nonneg { kaczmarz_nonneg(&a, &y, &start, &opts)? } else { kaczmarz(&a, &y, &start, &opts)? };
    println!("sweeps = {}", report.iterations);
    println!("residual = {:e}", report.residual_norm);
    println!("stop = {}", report.stop_reason);
    println!("skipped_rows = {}", report.skipped_rows);
    write_image(&c.output, &Image::from_column_major(grid, &coeffs)?)?;
    if report.stop_reason == StopReason::MaxIter {
        return Err(CliError::Numerical(format!(
            "Kaczmarz stopped after {} sweeps without reaching δ = {:e}",
            report.iterations, c.delta
        )));
    }
    Ok(())
}

fn tikhonov(c: TikhonovCmd) -> Result<()> {
    let data = read_data(&c.input)?;
    let grid = grid_for(&c.grid, data_radius(&data))?;
    let (a, y) = linear_system(&data, grid)?;
    let opts = CgOptions { tol: c.tol, max_iter: c.max_iter, initial: None };
    let (coeffs, report) = tikhonov_cg(&a, &y, c.gamma, &Regularizer::Identity, &opts)?;
    println!("cg_iterations = {}", report.iterations);
    println!("normal_residual = {:e}", report.residual_norm);
    write_image(&c.output, &Image::from_column_major(grid, &coeffs)?)?;
    if !report.converged() {
        return Err(CliError::Numerical(format!(
            "conjugate gradients stopped after {} steps above tolerance {:e}",
            report.iterations, c.tol
        )));
    }
    Ok(())
}

fn dfr(c: SpectralCmd) -> Result<()> {
    let s = read_parallel(&c.input)?;
    let grid = grid_for(&c.grid, s.geometry().radius())?;
    let out = direct_fourier_reconstruct(&s, grid)?;
    println!("imaginary_ratio = {:e}", out.imaginary_ratio);
    write_image(&c.output, &out.image)
}

fn laminogram(c: SpectralCmd) -> Result<()> {
    let s = read_parallel(&c.input)?;
    let grid = grid_for(&c.grid, s.geometry().radius())?;
    write_image(&c.output, &laminogram_reconstruct(&s, grid)?)
}

fn noise(c: NoiseCmd) -> Result<()> {
    let (noisy, report) = match read_data(&c.input)? {
        SinogramData::Parallel(s) => {
            let (n, r) = add_noise(&s, c.level, c.seed)?;
            (SinogramData::Parallel(n), r)
        }
        SinogramData::Fan(s) => {
            let (n, r) = add_noise_fan(&s, c.level, c.seed)?;
            (SinogramData::Fan(n), r)
        }
    };
    println!("sigma = {:e}", report.sigma);
    println!("realized_ratio = {:.6}", report.realized_ratio);
    write_sinogram(&c.out, &noisy)
}

fn compare(c: CompareCmd) -> Result<()> {
    let estimate = read_raw_image(&c.estimate)?;
    let reference = read_raw_image(&c.reference)?;
    let m = error_metrics(&estimate, &reference)?;
    println!("relative_l2 = {:e}", m.relative_l2);
    println!("max_abs = {:e}", m.max_abs);
    println!("mean_abs = {:e}", m.mean_abs);
    Ok(())
}
