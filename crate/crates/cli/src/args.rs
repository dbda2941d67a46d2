//! Command-line surface and JSON config merging. Flags override config
//! file fields; the environment is never read.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jetgeo::poly::Polynomial;
use jetgeo::synthesis::{CurvatureSpec, Sign};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "jetgeo",
    about = "Sub-Riemannian geodesics on jet space: integrate, synthesize, classify, export",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate the geodesic flow from an explicit initial state
    Integrate(IntegrateArgs),
    /// Build the geodesic with curvature law kappa = p(x) and export it
    Synthesize(SynthesizeArgs),
    /// Band decomposition and motion classes of a curvature profile
    Classify(ProfileArgs),
    /// Period, shift and action of one band interval
    Period(PeriodArgs),
    /// The k Casimir invariants as exact coefficient maps
    Casimirs(CasimirsArgs),
    /// Named curve families (elastica trio, convict curves, geodesic graphs)
    Gallery(GalleryArgs),
    /// Run the full invariant suite and print a per-check table
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
pub struct IntegrateArgs {
    /// Jet order (k >= 1)
    #[arg(long)]
    pub k: usize,
    /// Initial x
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    /// Initial u_1..u_k, comma separated (defaults to zeros)
    #[arg(long)]
    pub u0: Option<String>,
    /// Initial y
    #[arg(long, default_value_t = 0.0)]
    pub y0: f64,
    /// Reduced momenta P_1..P_{k+2}, comma separated
    #[arg(long, conflicts_with = "canonical_p")]
    pub reduced_p: Option<String>,
    /// Canonical momenta p_x,p_1..p_k,p_y, comma separated
    #[arg(long)]
    pub canonical_p: Option<String>,
    /// Arclength to integrate to
    #[arg(long)]
    pub s_span: f64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output file (CSV)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
}

#[derive(Args)]
pub struct GridArgs {
    /// Number of uniform output intervals
    #[arg(long, conflicts_with = "grid_step")]
    pub grid_count: Option<usize>,
    /// Uniform output step in s
    #[arg(long)]
    pub grid_step: Option<f64>,
}

impl GridArgs {
    pub fn to_grid(&self) -> jetgeo::dynamics::OutputGrid {
        match (self.grid_count, self.grid_step) {
            (_, Some(h)) => jetgeo::dynamics::OutputGrid::Step(h),
            (Some(n), None) => jetgeo::dynamics::OutputGrid::Count(n),
            (None, None) => jetgeo::dynamics::OutputGrid::Count(1000),
        }
    }
}

/// The JSON schema of a curvature spec:
/// `{"k": int, "p": [c0, c1, ...], "anchor": {"x": f, "duds": f}, "sigma": +-1}`.
#[derive(Deserialize, Default)]
pub struct SpecFile {
    pub k: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub anchor: Option<AnchorFile>,
    pub sigma: Option<f64>,
}

#[derive(Deserialize)]
pub struct AnchorFile {
    pub x: f64,
    pub duds: f64,
}

#[derive(Args)]
pub struct ProfileArgs {
    /// JSON config file with the curvature spec (flags override its fields)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Jet order (k >= 1)
    #[arg(long)]
    pub k: Option<usize>,
    /// Curvature polynomial coefficients "c0,c1,..." (ascending)
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub anchor_x: Option<f64>,
    #[arg(long)]
    pub anchor_duds: Option<f64>,
    /// Initial sign of dx/ds: +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Band window "xmin,xmax" (default: Cauchy-bound window)
    #[arg(long)]
    pub window: Option<String>,
    /// Output file (JSON report); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Quadrature tolerance for period/action entries
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
}

#[derive(Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Which band interval (index into the classification report)
    #[arg(long, default_value_t = 0)]
    pub interval_index: usize,
}

#[derive(Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Arclength span; the arc covers [-s_span/2, s_span/2] around the anchor
    #[arg(long)]
    pub s_span: f64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
pub struct CasimirsArgs {
    #[arg(long)]
    pub k: usize,
    /// Output file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GalleryArgs {
    /// Produce the three classic k=2 curves plus the manifest
    #[arg(long)]
    pub figure1: bool,
    /// One convict curve: "k,a,alpha"
    #[arg(long)]
    pub convict: Option<String>,
    /// One geodesic graph at jet level m >= 3
    #[arg(long)]
    pub graph: Option<usize>,
    /// Output directory
    #[arg(long, default_value = "gallery-out")]
    pub out_dir: PathBuf,
    /// Arclength extent of each synthesized arc
    #[arg(long, default_value_t = 16.0)]
    pub s_extent: f64,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// RNG seed for the randomized checks (recorded in the output)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

pub struct ResolvedSpec {
    pub k: usize,
    pub spec: CurvatureSpec,
    pub window: Option<(f64, f64)>,
}

impl ProfileArgs {
    /// Merges the config file (if any) with the flags; flags win.
    pub fn resolve(&self) -> Result<ResolvedSpec> {
        let file: SpecFile = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => SpecFile::default(),
        };
        let k = self
            .k
            .or(file.k)
            .context("jet order --k missing (flag or config)")?;
        let coeffs = match (&self.p, file.p) {
            (Some(text), _) => parse_f64_list(text)?,
            (None, Some(v)) => v,
            (None, None) => bail!("curvature polynomial --p missing (flag or config)"),
        };
        let (anchor_x, anchor_duds) = {
            let fa = file.anchor.as_ref();
            (
                self.anchor_x.or(fa.map(|a| a.x)).unwrap_or(0.0),
                self.anchor_duds.or(fa.map(|a| a.duds)).unwrap_or(0.0),
            )
        };
        let sigma_v = self.sigma.or(file.sigma).unwrap_or(1.0);
        let sigma = Sign::from_f64(sigma_v).map_err(|e| anyhow::anyhow!("{e}"))?;
        let spec = CurvatureSpec::new(Polynomial::from_coeffs(coeffs), anchor_x, anchor_duds, sigma)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let window = match &self.window {
            Some(text) => {
                let v = parse_f64_list(text)?;
                if v.len() != 2 {
                    bail!("--window wants exactly two numbers");
                }
                Some((v[0], v[1]))
            }
            None => None,
        };
        Ok(ResolvedSpec { k, spec, window })
    }
}
