//! Command-line surface. Every flag falls back to a `CVXCLUST_*` environment
//! variable; an explicit flag wins over the environment, which wins over the
//! built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cvxclust::hyperparam::GridSpec;
use cvxclust::SolverConfig;

#[derive(Debug, Parser)]
#[command(name = "cvxclust", version, about = "Sum-of-norms clustering with certified solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Solve at one λ, certify the result and write all artifacts.
    Cluster(ClusterArgs),
    /// Solve along a grid of λ values with warm starts.
    Path(PathArgs),
    /// Run one of the built-in experiments and check its claims.
    Demo(DemoArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Audit externally computed prototypes.
    Certify(CertifyArgs),
    /// Re-run the invocation recorded in a manifest.json.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cluster(_) => "cluster",
            Command::Path(_) => "path",
            Command::Demo(_) => "demo",
            Command::Gen(_) => "gen",
            Command::Certify(_) => "certify",
            Command::Replay(_) => "replay",
        }
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Common {
    /// Seed for every random choice (probes, generators, baselines).
    #[arg(long, env = "CVXCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Regularization weight. `cluster` defaults to half the upper bound.
    #[arg(long, env = "CVXCLUST_LAMBDA")]
    pub lambda: Option<f64>,
    /// Output directory, created if missing.
    #[arg(long, env = "CVXCLUST_OUT", default_value = "cvxclust-out")]
    pub out: PathBuf,
    /// Absolute distance below which prototypes are fused
    /// [default: 1e-4 × largest pairwise distance].
    #[arg(long, env = "CVXCLUST_FUSE_TOL")]
    pub fuse_tol: Option<f64>,
    #[arg(long, env = "CVXCLUST_MAX_ITERS", default_value_t = 10_000)]
    pub max_iters: usize,
    /// Initial ADMM penalty.
    #[arg(long, env = "CVXCLUST_RHO", default_value_t = 1.0)]
    pub rho: f64,
    /// Relative primal and dual residual tolerance.
    #[arg(long, env = "CVXCLUST_TOL", default_value_t = 1e-6)]
    pub tol: f64,
}

impl Common {
    pub fn solver_config(&self, lambda: f64) -> SolverConfig {
        SolverConfig {
            lambda,
            primal_tol: self.tol,
            dual_tol: self.tol,
            max_iters: self.max_iters,
            admm_rho: self.rho,
            fuse_tol: self.fuse_tol,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    /// Dataset CSV, one point per row, optional header.
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PathArgs {
    pub input: PathBuf,
    /// `min:max:count[:log|lin]` [default: 32 log-spaced values up to 1.2 × the upper bound].
    #[arg(long, env = "CVXCLUST_LAMBDA_GRID")]
    pub lambda_grid: Option<GridSpec>,
    /// Also certify every converged entry.
    #[arg(long, env = "CVXCLUST_CERTIFY")]
    #[serde(default)]
    pub certify: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoName {
    /// Growing one cluster at fixed λ, then lowering λ.
    Inflexibility,
    /// Convex clustering against k-means and Ward on four datasets.
    Compare,
    /// Collinear data never splits into 1 < k < n clusters.
    Impossible,
    /// A point sits exactly on its cluster's bounding sphere.
    Boundary,
}

impl DemoName {
    pub fn as_str(self) -> &'static str {
        match self {
            DemoName::Inflexibility => "inflexibility",
            DemoName::Compare => "compare",
            DemoName::Impossible => "impossible",
            DemoName::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GenKind {
    TwoMoons,
    Uniform,
    GaussianBlobs,
    BlobsWithNoise,
    Collinear,
    BoundaryWitness,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[arg(long, value_enum, env = "CVXCLUST_KIND", required_unless_present = "spec")]
    pub kind: Option<GenKind>,
    /// Full generator spec as JSON; overrides the other generator flags.
    #[arg(long, env = "CVXCLUST_SPEC", conflicts_with = "kind")]
    pub spec: Option<PathBuf>,
    #[arg(long, env = "CVXCLUST_N", default_value_t = 100)]
    pub n: usize,
    /// Gaussian noise level for two_moons.
    #[arg(long, env = "CVXCLUST_NOISE", default_value_t = 0.15)]
    pub noise: f64,
    /// Blob centers as `x,y;x,y;...` [default: three centers 12 apart on the x axis].
    #[arg(long, env = "CVXCLUST_CENTERS")]
    pub centers: Option<String>,
    #[arg(long, env = "CVXCLUST_STD", default_value_t = 0.5)]
    pub std: f64,
    #[arg(long, env = "CVXCLUST_NOISE_FRACTION", default_value_t = 0.1)]
    pub noise_fraction: f64,
    /// Lower corner of the noise box, `x,y,...` [default: one spacing beyond the centers].
    #[arg(long, env = "CVXCLUST_LOW")]
    pub low: Option<String>,
    #[arg(long, env = "CVXCLUST_HIGH")]
    pub high: Option<String>,
    /// Witness prototype, `x,y,...`.
    #[arg(long, env = "CVXCLUST_PROTOTYPE", default_value = "0,0")]
    pub prototype: String,
    /// Witness direction, normalized before use.
    #[arg(long, env = "CVXCLUST_DIRECTION", default_value = "1,0")]
    pub direction: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    /// Dataset CSV.
    pub input: PathBuf,
    /// Prototype CSV with one row per data point.
    #[arg(long, env = "CVXCLUST_PROTOTYPES")]
    pub prototypes: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
