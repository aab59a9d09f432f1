//! Depth statistics for point sets from the command line.
//!
//! Every analysis subcommand writes one compact JSON document to stdout and
//! a human-readable summary (with timings) to stderr, so reports stay
//! byte-reproducible while the chatter does not have to be. Exit codes:
//! 0 on success, 2 for input problems, 3 for numeric or degeneracy
//! failures.

mod heatmap;
mod io;

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use hdepth::{
    median_approx, median_bruteforce, median_exact, HyperplaneFamily, MedianResult, PointSet,
    SlabIndex,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::io::Format;

#[derive(Parser)]
#[command(
    name = "hdepth",
    version,
    about = "Point-set depth from summed distances to all point-spanned hyperplanes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depth of one query point.
    Depth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Override the dimension instead of inferring it.
        #[arg(long)]
        dim: Option<usize>,
        /// Query point, e.g. "0.5,0.5" or "-1,2.5".
        #[arg(long, allow_hyphen_values = true)]
        query: String,
        #[arg(long, value_enum, default_value_t = DepthMethod::Direct)]
        method: DepthMethod,
    },
    /// Deepest point of the set.
    Median {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum, default_value_t = MedianMethod::Exact)]
        method: MedianMethod,
    },
    /// Approximate 2-D median with a certified error bound.
    MedianApprox {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        dim: Option<usize>,
        /// Bisection steps; the error bound halves with each.
        #[arg(long, default_value_t = 8)]
        steps: u32,
        /// Check the certificate against the brute-force median.
        #[arg(long)]
        verify: bool,
    },
    /// Grayscale SVG depth map of a 2-D set (darker = deeper).
    Heatmap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        dim: Option<usize>,
        /// Where to write the SVG.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..=256))]
        resolution: u32,
        /// Extra view space around the bounding square, per side.
        #[arg(long, default_value_t = 0.25)]
        margin: f64,
    },
    /// Generate a random point set as CSV.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Dist::Uniform)]
        dist: Dist,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Write here instead of stdout (stdout then gets a JSON summary).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time indexed against direct depth queries on a random set.
    Bench {
        #[arg(long, default_value_t = 25)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepthMethod {
    Direct,
    Indexed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MedianMethod {
    Exact,
    Brute,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Uniform,
    Gaussian,
}

impl DepthMethod {
    fn name(self) -> &'static str {
        match self {
            DepthMethod::Direct => "direct",
            DepthMethod::Indexed => "indexed",
        }
    }
}

impl MedianMethod {
    fn name(self) -> &'static str {
        match self {
            MedianMethod::Exact => "exact",
            MedianMethod::Brute => "brute",
        }
    }
}

impl Dist {
    fn name(self) -> &'static str {
        match self {
            Dist::Uniform => "uniform",
            Dist::Gaussian => "gaussian",
        }
    }
}

enum CliError {
    Input(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<hdepth::Error> for CliError {
    fn from(e: hdepth::Error) -> Self {
        match e {
            hdepth::Error::InvalidInput(_) | hdepth::Error::DimensionMismatch { .. } => {
                CliError::Input(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(match e {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        });
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Depth {
            input,
            format,
            dim,
            query,
            method,
        } => cmd_depth(&input, format, dim, &query, method),
        Command::Median {
            input,
            format,
            dim,
            method,
        } => cmd_median(&input, format, dim, method),
        Command::MedianApprox {
            input,
            format,
            dim,
            steps,
            verify,
        } => cmd_median_approx(&input, format, dim, steps, verify),
        Command::Heatmap {
            input,
            format,
            dim,
            out,
            resolution,
            margin,
        } => cmd_heatmap(&input, format, dim, &out, resolution, margin),
        Command::Gen {
            n,
            dim,
            seed,
            dist,
            scale,
            out,
        } => cmd_gen(n, dim, seed, dist, scale, out.as_deref()),
        Command::Bench { n, queries, seed } => cmd_bench(n, queries, seed),
    }
}

fn emit<T: Serialize>(report: &T) {
    println!(
        "{}",
        serde_json::to_string(report).expect("reports always serialize")
    );
}

fn coords(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn fmt_point(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(f64::to_string).collect();
    format!("({})", parts.join(", "))
}

#[derive(Serialize)]
struct DepthReport {
    command: &'static str,
    n: usize,
    dim: usize,
    members: usize,
    skipped_degenerate: usize,
    method: &'static str,
    query: Vec<f64>,
    depth: f64,
}

fn cmd_depth(
    input: &std::path::Path,
    format: Option<Format>,
    dim: Option<usize>,
    query: &str,
    method: DepthMethod,
) -> Result<(), CliError> {
    let ps = io::load_points(input, format, dim).map_err(CliError::Input)?;
    let q = io::parse_query(query, ps.dim()).map_err(CliError::Input)?;
    let start = Instant::now();
    let (members, skipped, depth) = match method {
        DepthMethod::Direct => {
            let family = HyperplaneFamily::enumerate(&ps);
            (family.len(), family.skipped_degenerate(), family.depth(&q))
        }
        DepthMethod::Indexed => {
            let idx = SlabIndex::build(&ps)?;
            (
                idx.family().len(),
                idx.family().skipped_degenerate(),
                idx.query_depth(&q),
            )
        }
    };
    let elapsed = start.elapsed();
    emit(&DepthReport {
        command: "depth",
        n: ps.len(),
        dim: ps.dim(),
        members,
        skipped_degenerate: skipped,
        method: method.name(),
        query: coords(&q),
        depth,
    });
    eprintln!(
        "{} points in {}-D span {} hyperplanes; depth at {} = {} [{}, {:.2?}]",
        ps.len(),
        ps.dim(),
        members,
        fmt_point(&q),
        depth,
        method.name(),
        elapsed
    );
    Ok(())
}

#[derive(Serialize)]
struct MedianReport {
    command: &'static str,
    n: usize,
    dim: usize,
    members: usize,
    method: &'static str,
    point: Vec<f64>,
    depth: f64,
    generators: Vec<usize>,
    candidates_examined: u64,
    ties: Vec<Vec<f64>>,
}

fn cmd_median(
    input: &std::path::Path,
    format: Option<Format>,
    dim: Option<usize>,
    method: MedianMethod,
) -> Result<(), CliError> {
    let ps = io::load_points(input, format, dim).map_err(CliError::Input)?;
    let members = HyperplaneFamily::enumerate(&ps).len();
    let start = Instant::now();
    let med: MedianResult = match method {
        MedianMethod::Exact => median_exact(&ps)?,
        MedianMethod::Brute => median_bruteforce(&ps)?,
    };
    let elapsed = start.elapsed();
    emit(&MedianReport {
        command: "median",
        n: ps.len(),
        dim: ps.dim(),
        members,
        method: method.name(),
        point: coords(&med.point),
        depth: med.depth,
        generators: med.generators.clone(),
        candidates_examined: med.candidates_examined,
        ties: med.ties.iter().map(coords).collect(),
    });
    eprintln!(
        "median of {} points = {} with depth {} ({} candidates, {} tie(s)) [{}, {:.2?}]",
        ps.len(),
        fmt_point(&med.point),
        med.depth,
        med.candidates_examined,
        med.ties.len(),
        method.name(),
        elapsed
    );
    Ok(())
}

#[derive(Serialize)]
struct SquareReport {
    center: Vec<f64>,
    half_side: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    exact_depth: f64,
    distance_to_nearest_median: f64,
}

#[derive(Serialize)]
struct ApproxReport {
    command: &'static str,
    n: usize,
    dim: usize,
    members: usize,
    steps: u32,
    point: Vec<f64>,
    depth: f64,
    error_bound: f64,
    exact: bool,
    trace: Vec<SquareReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<VerifyReport>,
}

fn cmd_median_approx(
    input: &std::path::Path,
    format: Option<Format>,
    dim: Option<usize>,
    steps: u32,
    verify: bool,
) -> Result<(), CliError> {
    let ps = io::load_points(input, format, dim).map_err(CliError::Input)?;
    let members = HyperplaneFamily::enumerate(&ps).len();
    let start = Instant::now();
    let approx = median_approx(&ps, steps)?;
    let elapsed = start.elapsed();

    let verification = if verify {
        let brute = median_bruteforce(&ps)?;
        let nearest = brute
            .ties
            .iter()
            .map(|t| (t - &approx.point).norm())
            .fold(f64::INFINITY, f64::min);
        let holds = if approx.exact {
            (approx.depth - brute.depth).abs() <= 1e-9 * (1.0 + brute.depth)
        } else {
            nearest <= approx.error_bound + 1e-9 * (1.0 + approx.point.norm())
        };
        if !holds {
            return Err(CliError::Numeric(format!(
                "certificate check failed: nearest exact median at distance {nearest}, certified bound {}",
                approx.error_bound
            )));
        }
        Some(VerifyReport {
            exact_depth: brute.depth,
            distance_to_nearest_median: nearest,
        })
    } else {
        None
    };

    emit(&ApproxReport {
        command: "median-approx",
        n: ps.len(),
        dim: ps.dim(),
        members,
        steps: approx.steps_done,
        point: coords(&approx.point),
        depth: approx.depth,
        error_bound: approx.error_bound,
        exact: approx.exact,
        trace: approx
            .trace
            .iter()
            .map(|sq| SquareReport {
                center: coords(&sq.center),
                half_side: sq.half_side,
            })
            .collect(),
        verify: verification,
    });
    eprintln!(
        "approximate median {} with depth {}, error bound {}{} after {} step(s) [{:.2?}]",
        fmt_point(&approx.point),
        approx.depth,
        approx.error_bound,
        if approx.exact { " (exact)" } else { "" },
        approx.steps_done,
        elapsed
    );
    Ok(())
}

#[derive(Serialize)]
struct HeatmapReport {
    command: &'static str,
    n: usize,
    dim: usize,
    members: usize,
    resolution: u32,
    depth_min: f64,
    depth_max: f64,
    out: String,
}

fn cmd_heatmap(
    input: &std::path::Path,
    format: Option<Format>,
    dim: Option<usize>,
    out: &std::path::Path,
    resolution: u32,
    margin: f64,
) -> Result<(), CliError> {
    let ps = io::load_points(input, format, dim).map_err(CliError::Input)?;
    let members = HyperplaneFamily::enumerate(&ps).len();
    let start = Instant::now();
    let hm = heatmap::render(&ps, resolution, margin)?;
    fs::write(out, &hm.svg)
        .map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let elapsed = start.elapsed();
    emit(&HeatmapReport {
        command: "heatmap",
        n: ps.len(),
        dim: ps.dim(),
        members,
        resolution,
        depth_min: hm.depth_min,
        depth_max: hm.depth_max,
        out: out.display().to_string(),
    });
    eprintln!(
        "heatmap of {} points at {res}x{res} cells, depth range [{}, {}], written to {} [{:.2?}]",
        ps.len(),
        hm.depth_min,
        hm.depth_max,
        out.display(),
        elapsed,
        res = resolution
    );
    Ok(())
}

#[derive(Serialize)]
struct GenReport {
    command: &'static str,
    n: usize,
    dim: usize,
    seed: u64,
    dist: &'static str,
    scale: f64,
    out: String,
}

fn cmd_gen(
    n: usize,
    dim: usize,
    seed: u64,
    dist: Dist,
    scale: f64,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if n == 0 || dim == 0 {
        return Err(CliError::Input("need n >= 1 and dim >= 1".into()));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::Input("scale must be a positive number".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::new();
    for _ in 0..n {
        let row: Vec<String> = (0..dim)
            .map(|_| {
                let x: f64 = match dist {
                    Dist::Uniform => rng.random_range(-scale..scale),
                    Dist::Gaussian => {
                        let g: f64 = rng.sample(StandardNormal);
                        g * scale
                    }
                };
                x.to_string()
            })
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, &csv)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            emit(&GenReport {
                command: "gen",
                n,
                dim,
                seed,
                dist: dist.name(),
                scale,
                out: path.display().to_string(),
            });
            eprintln!(
                "wrote {n} {dist} points in {dim}-D (seed {seed}) to {}",
                path.display(),
                dist = dist.name()
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn percentile(sorted: &[Duration], p: f64) -> Duration {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

fn cmd_bench(n: usize, queries: usize, seed: u64) -> Result<(), CliError> {
    if n < 2 || queries == 0 {
        return Err(CliError::Input("need n >= 2 and queries >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
        .collect();
    let ps = PointSet::new(2, rows).map_err(CliError::from)?;

    let build_start = Instant::now();
    let idx = SlabIndex::build(&ps)?;
    let build_time = build_start.elapsed();

    let points: Vec<DVector<f64>> = (0..queries)
        .map(|_| {
            DVector::from_vec(vec![
                rng.random_range(-12.0..12.0),
                rng.random_range(-12.0..12.0),
            ])
        })
        .collect();
    for q in points.iter().take(queries.min(100)) {
        std::hint::black_box(idx.family().depth(q));
        std::hint::black_box(idx.query_depth(q));
    }

    let mut direct_times = Vec::with_capacity(queries);
    let mut direct_sum = 0.0;
    for q in &points {
        let t = Instant::now();
        direct_sum += idx.family().depth(q);
        direct_times.push(t.elapsed());
    }
    let mut indexed_times = Vec::with_capacity(queries);
    let mut indexed_sum = 0.0;
    for q in &points {
        let t = Instant::now();
        indexed_sum += idx.query_depth(q);
        indexed_times.push(t.elapsed());
    }
    std::hint::black_box((direct_sum, indexed_sum));
    if (direct_sum - indexed_sum).abs() > 1e-6 * (1.0 + direct_sum.abs()) {
        return Err(CliError::Numeric(
            "indexed and direct depth sums disagree".into(),
        ));
    }

    let direct_total: Duration = direct_times.iter().sum();
    let indexed_total: Duration = indexed_times.iter().sum();
    direct_times.sort_unstable();
    indexed_times.sort_unstable();

    println!(
        "configuration: n={n} ({} members, {} distinct lines), {queries} queries, seed {seed}",
        idx.family().len(),
        idx.line_count()
    );
    println!(
        "index build:   {:>10.2?}  ({} slabs, {} faces)",
        build_time,
        idx.slab_count(),
        idx.face_count()
    );
    println!(
        "direct:        {:>10.2?} total, median {:.2?}, p95 {:.2?}",
        direct_total,
        percentile(&direct_times, 0.5),
        percentile(&direct_times, 0.95)
    );
    println!(
        "indexed:       {:>10.2?} total, median {:.2?}, p95 {:.2?}",
        indexed_total,
        percentile(&indexed_times, 0.5),
        percentile(&indexed_times, 0.95)
    );
    println!(
        "speedup:       {:.2}x",
        direct_total.as_secs_f64() / indexed_total.as_secs_f64()
    );
    Ok(())
}
