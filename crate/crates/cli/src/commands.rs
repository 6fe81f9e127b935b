use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::{info, warn};
use serde::Serialize;

use cvxclust::certify::{certify, Certification};
use cvxclust::config::default_fuse_tol;
use cvxclust::datagen::{fixtures, generate, GeneratorKind, GeneratorSpec};
use cvxclust::hyperparam::{lambda_path, lambda_upper_bound, GridScale, GridSpec};
use cvxclust::{solve_admm, CertifyOptions, Dataset, PrototypeSolution, Residuals, SolverConfig};

use crate::args::{CertifyArgs, ClusterArgs, Command, Common, GenArgs, GenKind, PathArgs};
use crate::demos;
use crate::manifest::{now_unix_ms, RunManifest, MANIFEST_FILE, TOOL};
use crate::svg::{self, Panel};

const ADVISORY_FUSE_FACTOR: f64 = 100.0;

/// How a command ended; maps onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Converged and every check passed.
    Certified,
    /// Converged, but certification (or a demo's claim) failed.
    CertFailed,
    NotConverged,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Certified => 0,
            Status::CertFailed => 2,
            Status::NotConverged => 3,
        }
    }

    pub fn from_flags(converged: bool, pass: bool) -> Self {
        match (converged, pass) {
            (false, _) => Status::NotConverged,
            (true, false) => Status::CertFailed,
            (true, true) => Status::Certified,
        }
    }
}

/// Output directory that remembers what was written to it.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        self.write(name, serde_json::to_string_pretty(value)? + "\n")
    }
}

/// What a command hands back for the manifest.
pub struct Ran {
    pub status: Status,
    pub config: Option<SolverConfig>,
    pub seed: u64,
}

pub fn run(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Replay(args) => {
            let mut manifest = RunManifest::read(&args.manifest)?;
            if let Some(out) = args.out {
                common_mut(&mut manifest.invocation).expect("not a replay").out = out;
            }
            info!("replaying {} from {}", manifest.command, args.manifest.display());
            run_recorded(manifest.invocation)
        }
        other => run_recorded(other),
    }
}

fn common_mut(command: &mut Command) -> Option<&mut Common> {
    match command {
        Command::Cluster(a) => Some(&mut a.common),
        Command::Path(a) => Some(&mut a.common),
        Command::Demo(a) => Some(&mut a.common),
        Command::Gen(a) => Some(&mut a.common),
        Command::Certify(a) => Some(&mut a.common),
        Command::Replay(_) => None,
    }
}

fn absolute(path: &mut PathBuf) -> anyhow::Result<()> {
    *path = std::fs::canonicalize(&*path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(())
}

/// Input files of `command`, made absolute so the manifest replays from any
/// working directory.
fn resolve_inputs(command: &mut Command) -> anyhow::Result<Vec<PathBuf>> {
    let mut inputs = Vec::new();
    match command {
        Command::Cluster(a) => inputs.push(&mut a.input),
        Command::Path(a) => inputs.push(&mut a.input),
        Command::Certify(a) => {
            inputs.push(&mut a.input);
            inputs.push(&mut a.prototypes);
        }
        Command::Gen(a) => inputs.extend(a.spec.as_mut()),
        Command::Demo(_) | Command::Replay(_) => {}
    }
    for p in inputs.iter_mut() {
        absolute(p)?;
    }
    Ok(inputs.into_iter().map(|p| p.clone()).collect())
}

fn run_recorded(mut command: Command) -> anyhow::Result<Status> {
    let started = now_unix_ms();
    let inputs = resolve_inputs(&mut command)?;
    let out_dir = common_mut(&mut command).expect("not a replay").out.clone();
    let mut out = Outputs::create(&out_dir)?;
    let ran = match &command {
        Command::Cluster(a) => cluster(a, &mut out)?,
        Command::Path(a) => path(a, &mut out)?,
        Command::Demo(a) => demos::run(a.name, &a.common, &mut out)?,
        Command::Gen(a) => gen(a, &mut out)?,
        Command::Certify(a) => certify_cmd(a, &mut out)?,
        Command::Replay(_) => unreachable!("replay is resolved before recording"),
    };
    let manifest = RunManifest {
        tool: TOOL.to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        command: command.name().to_owned(),
        invocation: command.clone(),
        inputs,
        config: ran.config,
        seed: ran.seed,
        started_unix_ms: started,
        finished_unix_ms: now_unix_ms(),
        out_dir: out_dir.clone(),
        outputs: out.files.clone(),
    };
    out.write(MANIFEST_FILE, manifest.to_json())?;
    Ok(ran.status)
}

pub fn load_dataset(path: &Path) -> anyhow::Result<Dataset> {
    Dataset::read_csv(path).with_context(|| format!("cannot load dataset {}", path.display()))
}

#[derive(Serialize)]
struct CertificateSummary {
    feasible: bool,
    max_norm_violation: f64,
    max_balance_residual: f64,
    iterations: usize,
    worst_point: usize,
}

#[derive(Serialize)]
struct Report<'a> {
    lambda: f64,
    n: usize,
    d: usize,
    k: usize,
    fuse_tol: f64,
    converged: bool,
    iterations: usize,
    objective: f64,
    residuals: Residuals,
    certified: bool,
    probe_minimum: f64,
    cluster_sizes: &'a [usize],
    certificate: CertificateSummary,
    checks: &'a cvxclust::CertReport,
}

/// Certify `solution` and write partition.json, balls.json, report.json and,
/// for planar data, plot.svg. Files land under `prefix`.
pub fn write_certified(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    fuse_tol: f64,
    seed: u64,
    out: &mut Outputs,
    prefix: &str,
) -> anyhow::Result<Certification> {
    let options = CertifyOptions {
        seed,
        ..CertifyOptions::for_dataset(dataset)
    };
    let cert = certify(dataset, solution, fuse_tol, &options)?;
    let report = Report {
        lambda: solution.lambda,
        n: dataset.n(),
        d: dataset.d(),
        k: cert.partition.k(),
        fuse_tol,
        converged: solution.converged,
        iterations: solution.iterations,
        objective: solution.objective_value,
        residuals: solution.residuals,
        certified: cert.report.pass(),
        probe_minimum: cert.probe_minimum,
        cluster_sizes: cert.partition.sizes(),
        certificate: CertificateSummary {
            feasible: cert.certificate.feasible,
            max_norm_violation: cert.certificate.max_norm_violation,
            max_balance_residual: cert.certificate.max_balance_residual,
            iterations: cert.certificate.iterations,
            worst_point: cert.certificate.worst_point,
        },
        checks: &cert.report,
    };
    out.write(&format!("{prefix}partition.json"), cert.partition.to_json() + "\n")?;
    out.write_json(&format!("{prefix}balls.json"), &cert.balls)?;
    out.write_json(&format!("{prefix}report.json"), &report)?;
    if dataset.d() == 2 {
        let panel = Panel::new(dataset.points(), &cert.partition).with_balls(&cert.balls);
        out.write(&format!("{prefix}plot.svg"), svg::render(&panel))?;
    }
    if !cert.report.pass() {
        advise_finer_fuse_tol(dataset, solution, fuse_tol, &options, cert.partition.k())?;
    }
    for failure in cert.report.failures() {
        let witness = &failure.witness_indices[..failure.witness_indices.len().min(8)];
        warn!("check {} failed (margin {:?}, witness {witness:?})", failure.name, failure.margin);
    }
    Ok(cert)
}

/// Optimal clusters can sit closer together than `fuse_tol`, in which case
/// reading them off merges them and the checks fail. Say so when a finer
/// threshold separates them and certifies.
fn advise_finer_fuse_tol(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    fuse_tol: f64,
    options: &CertifyOptions,
    k: usize,
) -> anyhow::Result<()> {
    let finer = fuse_tol / ADVISORY_FUSE_FACTOR;
    if solution.partition(finer).k() == k {
        return Ok(());
    }
    let retry = certify(dataset, solution, finer, options)?;
    if retry.report.pass() {
        warn!(
            "these prototypes certify with --fuse-tol {finer:e} (k = {} instead of {k}): distinct clusters closer than {fuse_tol:e} were merged",
            retry.partition.k()
        );
    }
    Ok(())
}

fn prototypes_csv(prototypes: &ndarray::Array2<f64>) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    cvxclust::dataset::write_matrix_csv(&mut buf, prototypes)?;
    Ok(buf)
}

fn cluster(args: &ClusterArgs, out: &mut Outputs) -> anyhow::Result<Ran> {
    let ds = load_dataset(&args.input)?;
    let lambda = match args.common.lambda {
        Some(l) => l,
        None => {
            let l = 0.5 * lambda_upper_bound(&ds)?;
            warn!("no --lambda given; using half the upper bound, λ = {l}");
            l
        }
    };
    let config = args.common.solver_config(lambda);
    let solution = solve_admm(&ds, &config)?;
    if !solution.converged {
        warn!(
            "not converged after {} iterations (primal {:.3e}, dual {:.3e})",
            solution.iterations, solution.residuals.primal, solution.residuals.dual
        );
    }
    out.write("prototypes.csv", prototypes_csv(&solution.prototypes)?)?;
    let cert = write_certified(&ds, &solution, config.resolved_fuse_tol(&ds), args.common.seed, out, "")?;
    info!("λ = {lambda}: k = {}, certified = {}", cert.partition.k(), cert.report.pass());
    Ok(Ran {
        status: Status::from_flags(solution.converged, cert.report.pass()),
        config: Some(config),
        seed: args.common.seed,
    })
}

fn path(args: &PathArgs, out: &mut Outputs) -> anyhow::Result<Ran> {
    let ds = load_dataset(&args.input)?;
    let grid = match (args.lambda_grid, args.common.lambda) {
        (Some(g), _) => g,
        (None, Some(l)) => GridSpec {
            min: l,
            max: l,
            count: 1,
            scale: GridScale::Lin,
        },
        (None, None) => GridSpec::default_for(&ds)?,
    };
    let config = args.common.solver_config(0.0);
    let path = lambda_path(&ds, &grid.values(), &config)?;
    out.write("path.csv", path.to_csv())?;

    let fuse_tol = config.resolved_fuse_tol(&ds);
    let mut all_converged = true;
    let mut all_certified = true;
    let mut panels = Vec::new();
    for (idx, entry) in path.entries.iter().enumerate() {
        let dir = format!("lambda_{idx:03}/");
        let solve = match &entry.outcome {
            Ok(s) => s,
            Err(reason) => {
                warn!("λ = {}: {reason}", entry.lambda);
                all_converged = false;
                continue;
            }
        };
        all_converged &= solve.converged;
        out.write(&format!("{dir}prototypes.csv"), prototypes_csv(&solve.prototypes)?)?;
        out.write(&format!("{dir}partition.json"), solve.partition.to_json() + "\n")?;
        if args.certify && solve.converged {
            let solution = PrototypeSolution {
                prototypes: solve.prototypes.clone(),
                lambda: entry.lambda,
                objective_value: solve.objective,
                iterations: solve.iterations,
                converged: solve.converged,
                residuals: Residuals::default(),
            };
            let cert = write_certified(&ds, &solution, fuse_tol, args.common.seed, out, &dir)?;
            all_certified &= cert.report.pass();
        }
        if ds.d() == 2 {
            panels.push(
                Panel::new(ds.points(), &solve.partition).titled(format!("λ = {:.4e}, k = {}", entry.lambda, solve.partition.k())),
            );
        }
    }
    if !panels.is_empty() {
        out.write("path.svg", svg::render_grid(&panels, 4, Some("cluster path")))?;
    }
    Ok(Ran {
        status: Status::from_flags(all_converged, all_certified),
        config: Some(config),
        seed: args.common.seed,
    })
}

fn parse_vector(text: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("{what}: {v:?} is not a number"))
        })
        .collect()
}

fn parse_points(text: &str, what: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    text.split(';').map(|p| parse_vector(p, what)).collect()
}

/// Generator spec from the individual flags. Blob kinds default to the
/// three-blob fixture geometry.
pub fn spec_from_flags(args: &GenArgs) -> anyhow::Result<GeneratorSpec> {
    let Some(kind) = args.kind else {
        bail!("--kind or --spec is required");
    };
    let fixture_centers = || match fixtures::noisy_blobs_spec().kind {
        GeneratorKind::BlobsWithNoise { centers, low, high, .. } => (centers, low, high),
        _ => unreachable!("fixture is blobs with noise"),
    };
    let centers = match &args.centers {
        Some(c) => parse_points(c, "--centers")?,
        None => fixture_centers().0,
    };
    let kind = match kind {
        GenKind::TwoMoons => GeneratorKind::TwoMoons { noise: args.noise },
        GenKind::Uniform => GeneratorKind::Uniform,
        GenKind::Collinear => GeneratorKind::Collinear,
        GenKind::GaussianBlobs => GeneratorKind::GaussianBlobs { centers, std: args.std },
        GenKind::BlobsWithNoise => {
            let (_, low, high) = fixture_centers();
            let bound = |flag: &Option<String>, fallback: Vec<f64>, name| match flag {
                Some(v) => parse_vector(v, name),
                None if args.centers.is_none() => Ok(fallback),
                None => bail!("{name} is required with --centers"),
            };
            GeneratorKind::BlobsWithNoise {
                centers,
                std: args.std,
                noise_fraction: args.noise_fraction,
                low: bound(&args.low, low, "--low")?,
                high: bound(&args.high, high, "--high")?,
            }
        }
        GenKind::BoundaryWitness => {
            let direction = parse_vector(&args.direction, "--direction")?;
            let len = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(len.is_finite() && len > 0.0) {
                bail!("--direction must be a nonzero finite vector");
            }
            GeneratorKind::BoundaryWitness {
                lambda: args.common.lambda.unwrap_or(0.1),
                prototype: parse_vector(&args.prototype, "--prototype")?,
                direction: direction.iter().map(|v| v / len).collect(),
            }
        }
    };
    Ok(GeneratorSpec {
        kind,
        n: args.n,
        seed: args.common.seed,
    })
}

fn gen(args: &GenArgs, out: &mut Outputs) -> anyhow::Result<Ran> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str::<GeneratorSpec>(&text).with_context(|| format!("invalid spec {}", path.display()))?
        }
        None => spec_from_flags(args)?,
    };
    let data = generate(&spec)?;
    out.write("data.csv", data.dataset.to_csv_string())?;
    out.write("labels.csv", data.labels_csv())?;
    out.write_json("spec.json", &spec)?;
    Ok(Ran {
        status: Status::Certified,
        config: None,
        seed: spec.seed,
    })
}

fn certify_cmd(args: &CertifyArgs, out: &mut Outputs) -> anyhow::Result<Ran> {
    let ds = load_dataset(&args.input)?;
    let prototypes = Dataset::read_csv(&args.prototypes)
        .with_context(|| format!("cannot load prototypes {}", args.prototypes.display()))?;
    let Some(lambda) = args.common.lambda else {
        bail!("certify needs the λ the prototypes were computed for (--lambda)");
    };
    let solution = PrototypeSolution::from_prototypes(&ds, prototypes.points().clone(), lambda)?;
    let fuse_tol = args.common.fuse_tol.unwrap_or_else(|| default_fuse_tol(&ds));
    if !(fuse_tol.is_finite() && fuse_tol > 0.0) {
        bail!("--fuse-tol must be finite and > 0, got {fuse_tol}");
    }
    let cert = write_certified(&ds, &solution, fuse_tol, args.common.seed, out, "")?;
    Ok(Ran {
        status: Status::from_flags(true, cert.report.pass()),
        config: Some(args.common.solver_config(lambda)),
        seed: args.common.seed,
    })
}
