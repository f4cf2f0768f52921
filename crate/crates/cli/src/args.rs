use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "xxz-gap", version, about = "Spectral gap experiments for the spin-J XXZ kink chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write to this file (a directory for `figures`) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads; falls back to XXZ_GAP_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Override the desk-scale size guardrails.
    #[arg(long, global = true)]
    pub force: bool,

    /// Record wall time in the metadata (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of one or all magnetization sectors.
    Spectrum(SpectrumArgs),
    /// Ground energy and spectral gap of a sector.
    Gap(GapArgs),
    /// Gap of one sector along a grid of anisotropies.
    GapScan(GapScanArgs),
    /// Lower bound on the gap from the overlap matrix.
    SosBound(SosArgs),
    /// Ising-limit curvature of the gap.
    Curvature(CurvatureArgs),
    /// Boson model against the exact gap.
    Boson(BosonArgs),
    /// Large-J Jacobi operator and its gap.
    Jacobi(JacobiArgs),
    /// Anisotropy maximizing the large-J gap.
    OptimalDelta(OptimalArgs),
    /// Datasets for the figures, one CSV and one JSON sidecar each.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SpinArgs {
    /// Twice the spin, 2J.
    #[arg(long)]
    pub two_j: Option<u32>,

    /// Spin as a rational, e.g. 3/2 or 2.
    #[arg(long)]
    pub spin: Option<String>,
}

impl SpinArgs {
    pub fn two_j(&self) -> CliResult<u32> {
        match (self.two_j, &self.spin) {
            (Some(t), None) => positive_two_j(t),
            (None, Some(s)) => parse_spin(s),
            _ => Err(CliError::usage("give exactly one of --two-j or --spin")),
        }
    }
}

fn positive_two_j(t: u32) -> CliResult<u32> {
    if t == 0 || t > 255 {
        return Err(CliError::usage(format!("2J must lie in 1..=255, got {t}")));
    }
    Ok(t)
}

/// `"3/2"` → 3, `"2"` → 4; denominators other than 1 and 2 are refused.
pub fn parse_spin(s: &str) -> CliResult<u32> {
    let bad = || CliError::usage(format!("cannot read spin {s:?}; expected e.g. 1/2, 1 or 5/2"));
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim().parse::<u32>().map_err(|_| bad())?, d.trim().parse::<u32>().map_err(|_| bad())?),
        None => (s.trim().parse::<u32>().map_err(|_| bad())?, 1),
    };
    let two_j = match den {
        1 => num.checked_mul(2).ok_or_else(bad)?,
        2 => num,
        _ => return Err(bad()),
    };
    positive_two_j(two_j)
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct AnisotropyArgs {
    /// Anisotropy Δ > 1.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,

    /// Inverse anisotropy in [0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub delta_inv: Option<f64>,
}

impl AnisotropyArgs {
    pub fn delta_inv(&self) -> CliResult<f64> {
        match (self.delta, self.delta_inv) {
            (Some(d), None) => {
                if !(d > 1.0) {
                    return Err(CliError::usage(format!("--delta must exceed 1, got {d}")));
                }
                Ok(1.0 / d)
            }
            (None, Some(d)) => {
                if !(0.0..1.0).contains(&d) {
                    return Err(CliError::usage(format!("--delta-inv must lie in [0, 1), got {d}")));
                }
                Ok(d)
            }
            _ => Err(CliError::usage("give exactly one of --delta or --delta-inv")),
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SectorArgs {
    /// Twice the total magnetization, 2M.
    #[arg(long, allow_negative_numbers = true)]
    pub two_m: Option<i32>,

    /// Every sector from −2JL to 2JL.
    #[arg(long)]
    pub all_sectors: bool,
}

impl SectorArgs {
    pub fn sectors(&self, two_j: u32, length: usize) -> CliResult<Vec<i32>> {
        let max = two_j as i64 * length as i64;
        if max > i32::MAX as i64 {
            return Err(CliError::usage("2J·L is too large"));
        }
        let max = max as i32;
        if self.all_sectors {
            return Ok((0..=max).map(|k| -max + 2 * k).collect());
        }
        let m = self.two_m.ok_or_else(|| CliError::usage("give --two-m or --all-sectors"))?;
        if m.abs() > max || (m + max) % 2 != 0 {
            return Err(CliError::usage(format!(
                "--two-m {m} is not a sector of 2J = {two_j}, L = {length} (need |2M| ≤ {max} with 2M ≡ 2JL mod 2)"
            )));
        }
        Ok(vec![m])
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub spin: SpinArgs,

    /// Chain length L.
    #[arg(long, short = 'L')]
    pub length: usize,
}

impl ChainArgs {
    pub fn resolve(&self) -> CliResult<(u32, usize)> {
        if self.length < 2 {
            return Err(CliError::usage("--length must be at least 2"));
        }
        Ok((self.spin.two_j()?, self.length))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// First Δ⁻¹ of the grid.
    #[arg(long, default_value_t = 0.02)]
    pub from: f64,

    /// Last Δ⁻¹ of the grid.
    #[arg(long, default_value_t = 0.98)]
    pub to: f64,

    /// Number of grid points.
    #[arg(long, default_value_t = 49)]
    pub points: usize,
}

impl GridArgs {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        grid(self.from, self.to, self.points)
    }
}

pub fn grid(from: f64, to: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 {
        return Err(CliError::usage("the grid needs at least one point"));
    }
    if !(0.0..1.0).contains(&from) || !(0.0..1.0).contains(&to) || from > to {
        return Err(CliError::usage(format!("grid [{from}, {to}] must satisfy 0 ≤ from ≤ to < 1")));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(|i| from + step * i as f64).collect())
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub anisotropy: AnisotropyArgs,
    #[command(flatten)]
    pub sector: SectorArgs,

    /// Only the k lowest eigenvalues (Lanczos); full spectrum otherwise.
    #[arg(long)]
    pub k: Option<usize>,

    /// Eigenvalue residual tolerance for Lanczos.
    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,

    /// Write the sector matrix as `row col value` triplets (single sector only).
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub anisotropy: AnisotropyArgs,
    #[command(flatten)]
    pub sector: SectorArgs,

    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct GapScanArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    #[arg(long, allow_negative_numbers = true)]
    pub two_m: i32,

    #[command(flatten)]
    pub grid: GridArgs,

    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SosArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    /// Sector as 2M.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "particles", required_unless_present = "particles")]
    pub two_m: Option<i32>,

    /// Sector as the number N of lowered spins, N = (2JL − 2M)/2.
    #[arg(long)]
    pub particles: Option<u32>,

    /// Single anisotropy Δ > 1 (otherwise the grid is used).
    #[arg(long, conflicts_with = "delta_inv")]
    pub delta: Option<f64>,

    /// Single inverse anisotropy (otherwise the grid is used).
    #[arg(long)]
    pub delta_inv: Option<f64>,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Also compute the exact gap at every point.
    #[arg(long)]
    pub with_gap: bool,

    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Emit every entry with 2J ≤ --max-two-j in the table layout.
    #[arg(long)]
    pub table: bool,

    #[arg(long, default_value_t = 6)]
    pub max_two_j: u32,

    /// Twice the spin (single entry).
    #[arg(long, conflicts_with = "table")]
    pub two_j: Option<u32>,

    /// Spin as a rational (single entry).
    #[arg(long, conflicts_with_all = ["table", "two_j"])]
    pub spin: Option<String>,

    /// Excitation index n with 0 ≤ n ≤ J.
    #[arg(long)]
    pub n: Option<u32>,

    /// Also estimate the second derivative by finite differences on a chain of this length.
    #[arg(long)]
    pub numeric_length: Option<usize>,

    /// Finite-difference step in Δ⁻¹.
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,

    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BosonArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub anisotropy: AnisotropyArgs,

    #[arg(long, allow_negative_numbers = true)]
    pub two_m: i32,

    /// Number of boson energies reported.
    #[arg(long, default_value_t = 4)]
    pub k: usize,

    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct JacobiArgs {
    /// Interface parameter μ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,

    #[command(flatten)]
    pub anisotropy: AnisotropyArgs,

    /// Number of sites kept around the interface.
    #[arg(long, default_value_t = 50)]
    pub truncation: usize,

    /// Number of eigenvalues reported.
    #[arg(long, default_value_t = 4)]
    pub k: usize,

    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    #[arg(long, default_value_t = 500)]
    pub truncation: usize,

    /// Coarse grid points in (0, 1).
    #[arg(long, default_value_t = 99)]
    pub grid: usize,

    /// Width of the final bracket around each maximum.
    #[arg(long, default_value_t = 1e-6)]
    pub refine_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "4")]
    Four,
    #[value(name = "5")]
    Five,
    #[value(name = "6")]
    Six,
    All,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Figure to generate.
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,

    /// Points on Δ⁻¹ grids.
    #[arg(long, default_value_t = 49)]
    pub points: usize,

    /// Jacobi truncation for the surface.
    #[arg(long, default_value_t = 50)]
    pub truncation: usize,

    #[arg(long, default_value_t = default_tol())]
    pub tol: f64,
}
