//! Built-in experiments. Each writes `<name>.json` with its measurements and a
//! `pass` flag for the qualitative claims it checks, plus a figure.

use serde::Serialize;

use cvxclust::certify::{bounding_balls, construct_boundary_dataset};
use cvxclust::datagen::{fixtures, kmeans, ward_agglomerative, NOISE_LABEL};
use cvxclust::hyperparam::{collinear_impossibility, GridScale, GridSpec};
use cvxclust::{solve_admm, Dataset, Partition, SolverConfig};

use crate::args::{Common, DemoName};
use crate::commands::{write_certified, Outputs, Ran, Status};
use crate::svg::{self, Panel};

const KMEANS_ITERS: usize = 300;
const COLLINEAR_SIZES: [usize; 2] = [5, 9];
const COLLINEAR_GRID: GridSpec = GridSpec {
    min: 1e-3,
    max: 10.0,
    count: 100,
    scale: GridScale::Log,
};
const WITNESS_SIZE: usize = 5;
const WITNESS_LAMBDA: f64 = 0.1;
const WITNESS_PROTOTYPE: [f64; 2] = [1.0, -2.0];
const WITNESS_DIRECTION: [f64; 2] = [0.6, 0.8];
/// How close the on-sphere point must sit to the ball surface.
const BOUNDARY_TOL: f64 = 1e-6;

pub fn run(name: DemoName, common: &Common, out: &mut Outputs) -> anyhow::Result<Ran> {
    let (converged, pass, config) = match name {
        DemoName::Inflexibility => inflexibility(common, out)?,
        DemoName::Compare => compare(common, out)?,
        DemoName::Impossible => impossible(common, out)?,
        DemoName::Boundary => boundary(common, out)?,
    };
    if !pass {
        log::warn!("demo {}: a claim did not hold", name.as_str());
    }
    Ok(Ran {
        status: Status::from_flags(converged, pass),
        config,
        seed: common.seed,
    })
}

fn solve(ds: &Dataset, config: &SolverConfig) -> anyhow::Result<(bool, Partition)> {
    let s = solve_admm(ds, config)?;
    Ok((s.converged, s.partition(config.resolved_fuse_tol(ds))))
}

fn cluster_panel(ds: &Dataset, p: &Partition, lambda: f64, title: String) -> anyhow::Result<Panel> {
    let balls = bounding_balls(ds, p, lambda)?;
    Ok(Panel::new(ds.points(), p).with_balls(&balls).titled(title))
}

#[derive(Serialize)]
struct InflexibilityReport {
    fixed_lambda: f64,
    added_points: Vec<usize>,
    fixed_k: Vec<usize>,
    lambdas: Vec<f64>,
    decreasing_k: Vec<usize>,
    fixed_k_nonincreasing: bool,
    merge_event: bool,
    growing_cluster_single: bool,
    splits_as_lambda_decreases: bool,
    converged: bool,
    pass: bool,
}

/// Grow one blob at fixed λ, then lower λ on the largest dataset.
fn inflexibility(common: &Common, out: &mut Outputs) -> anyhow::Result<(bool, bool, Option<SolverConfig>)> {
    let (base, datasets) = fixtures::inflexibility_sequence()?;
    let fixed_lambda = common.lambda.unwrap_or(fixtures::INFLEX_LAMBDA);
    let mut panels = Vec::new();
    let mut converged = true;

    let mut fixed_k = Vec::new();
    for (ds, added) in datasets.iter().zip(fixtures::INFLEX_ADDED) {
        let (c, p) = solve(ds, &common.solver_config(fixed_lambda))?;
        converged &= c;
        fixed_k.push(p.k());
        panels.push(cluster_panel(ds, &p, fixed_lambda, format!("+{added}, λ = {fixed_lambda}, k = {}", p.k()))?);
    }

    let largest = datasets.last().expect("nonempty sequence");
    let growing: Vec<usize> = (0..largest.n())
        .filter(|&i| i >= base.dataset.n() || base.labels[i] == fixtures::INFLEX_GROWING_BLOB)
        .collect();
    let mut decreasing_k = Vec::new();
    let mut single = true;
    for lambda in fixtures::INFLEX_LAMBDAS {
        let (c, p) = solve(largest, &common.solver_config(lambda))?;
        converged &= c;
        decreasing_k.push(p.k());
        single &= growing.iter().all(|&i| p.label(i) == p.label(growing[0]));
        panels.push(cluster_panel(largest, &p, lambda, format!("λ = {lambda}, k = {}", p.k()))?);
    }

    let nonincreasing = fixed_k.windows(2).all(|w| w[1] <= w[0]);
    let merged = fixed_k.windows(2).any(|w| w[1] < w[0]);
    let splits = decreasing_k.windows(2).all(|w| w[1] >= w[0]) && decreasing_k.last() > decreasing_k.first();
    let report = InflexibilityReport {
        fixed_lambda,
        added_points: fixtures::INFLEX_ADDED.to_vec(),
        fixed_k,
        lambdas: fixtures::INFLEX_LAMBDAS.to_vec(),
        decreasing_k,
        fixed_k_nonincreasing: nonincreasing,
        merge_event: merged,
        growing_cluster_single: single,
        splits_as_lambda_decreases: splits,
        converged,
        pass: nonincreasing && merged && single && splits,
    };
    out.write_json("inflexibility.json", &report)?;
    out.write(
        "inflexibility.svg",
        svg::render_grid(&panels, 4, Some("top: growing one cluster at fixed λ; bottom: decreasing λ")),
    )?;
    Ok((converged, report.pass, Some(common.solver_config(fixed_lambda))))
}

#[derive(Serialize)]
struct NoiseSummary {
    noise_points: usize,
    largest_cluster_with_noise: usize,
    cap: usize,
    signal_fraction_in_large_clusters: f64,
    required_fraction: f64,
}

#[derive(Serialize)]
struct CompareEntry {
    dataset: &'static str,
    n: usize,
    lambda: f64,
    converged: bool,
    k_convex: usize,
    k_baselines: usize,
    convex_sizes: Vec<usize>,
    kmeans_sizes: Vec<usize>,
    ward_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseSummary>,
}

#[derive(Serialize)]
struct CompareReport {
    entries: Vec<CompareEntry>,
    pass: bool,
}

fn sorted_sizes(p: &Partition) -> Vec<usize> {
    let mut s = p.sizes().to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

/// Convex clustering, k-means and Ward on the four comparison datasets. The
/// baselines get the ground-truth number of components (or the convex
/// clustering's k when there is a single component).
fn compare(common: &Common, out: &mut Outputs) -> anyhow::Result<(bool, bool, Option<SolverConfig>)> {
    let mut entries = Vec::new();
    let mut panels = Vec::new();
    let mut converged = true;
    let mut pass = true;
    for (name, data, lambda) in fixtures::comparison_suite()? {
        let ds = &data.dataset;
        let (c, p) = solve(ds, &common.solver_config(lambda))?;
        converged &= c;
        let mut truth: Vec<i64> = data.labels.iter().copied().filter(|&l| l != NOISE_LABEL).collect();
        truth.sort_unstable();
        truth.dedup();
        let k = if truth.len() > 1 { truth.len() } else { p.k() };
        let km = kmeans(ds, k, common.seed, KMEANS_ITERS)?;
        let ward = ward_agglomerative(ds, k)?;

        let noise = data.labels.contains(&NOISE_LABEL).then(|| {
            let size_of = |i: usize| p.sizes()[p.label(i)];
            let (noise, signal): (Vec<usize>, Vec<usize>) = (0..ds.n()).partition(|&i| data.labels[i] == NOISE_LABEL);
            let clustered = signal.iter().filter(|&&i| size_of(i) >= fixtures::SIGNAL_CLUSTER_MIN).count();
            NoiseSummary {
                noise_points: noise.len(),
                largest_cluster_with_noise: noise.iter().map(|&i| size_of(i)).max().unwrap_or(0),
                cap: fixtures::NOISE_CLUSTER_CAP,
                signal_fraction_in_large_clusters: clustered as f64 / signal.len().max(1) as f64,
                required_fraction: fixtures::SIGNAL_FRACTION_MIN,
            }
        });
        if let Some(s) = &noise {
            pass &= s.largest_cluster_with_noise <= s.cap && s.signal_fraction_in_large_clusters >= s.required_fraction;
        }

        panels.push(cluster_panel(ds, &p, lambda, format!("{name}: convex, k = {}", p.k()))?);
        panels.push(Panel::new(ds.points(), &km).titled(format!("{name}: k-means, k = {k}")));
        panels.push(Panel::new(ds.points(), &ward).titled(format!("{name}: Ward, k = {k}")));
        entries.push(CompareEntry {
            dataset: name,
            n: ds.n(),
            lambda,
            converged: c,
            k_convex: p.k(),
            k_baselines: k,
            convex_sizes: sorted_sizes(&p),
            kmeans_sizes: sorted_sizes(&km),
            ward_sizes: sorted_sizes(&ward),
            noise,
        });
    }
    out.write_json("compare.json", &CompareReport { entries, pass })?;
    out.write("compare.svg", svg::render_grid(&panels, 3, None))?;
    Ok((converged, pass, None))
}

#[derive(Serialize)]
struct ImpossibleEntry {
    lambda: f64,
    k: Option<usize>,
    converged: bool,
}

#[derive(Serialize)]
struct ImpossibleRun {
    n: usize,
    entries: Vec<ImpossibleEntry>,
    violations: Vec<f64>,
    pass: bool,
}

/// Unit-spaced collinear points over a wide λ grid: k is only ever 1 or n.
fn impossible(common: &Common, out: &mut Outputs) -> anyhow::Result<(bool, bool, Option<SolverConfig>)> {
    let lambdas = COLLINEAR_GRID.values();
    let config = common.solver_config(0.0);
    let mut runs = Vec::new();
    let mut series = Vec::new();
    for n in COLLINEAR_SIZES {
        let report = collinear_impossibility(n, &lambdas, &config)?;
        series.push((
            format!("n = {n}"),
            report
                .entries
                .iter()
                .filter_map(|(l, k, _)| k.map(|k| (*l, k as f64)))
                .collect(),
        ));
        runs.push(ImpossibleRun {
            n,
            pass: report.pass(),
            violations: report.violations,
            entries: report
                .entries
                .into_iter()
                .map(|(lambda, k, converged)| ImpossibleEntry { lambda, k, converged })
                .collect(),
        });
    }
    let converged = runs.iter().all(|r| r.entries.iter().all(|e| e.converged));
    let pass = runs.iter().all(|r| r.pass);
    out.write_json("impossible.json", &runs)?;
    out.write(
        "impossible.svg",
        svg::render_log_steps("collinear points: clusters over λ", "k", &series),
    )?;
    Ok((converged, pass, None))
}

#[derive(Serialize)]
struct BoundaryReport {
    lambda: f64,
    cluster_size: usize,
    k: usize,
    max_prototype_error: f64,
    worst_containment_margin: f64,
    boundary_point: usize,
    certified: bool,
    pass: bool,
}

/// A single cluster with one point placed exactly on its bounding sphere.
fn boundary(common: &Common, out: &mut Outputs) -> anyhow::Result<(bool, bool, Option<SolverConfig>)> {
    let lambda = common.lambda.unwrap_or(WITNESS_LAMBDA);
    let ds = construct_boundary_dataset(WITNESS_SIZE, lambda, &WITNESS_PROTOTYPE, &WITNESS_DIRECTION)?;
    let config = common.solver_config(lambda);
    let solution = solve_admm(&ds, &config)?;
    let proto_err = solution
        .prototypes
        .rows()
        .into_iter()
        .flat_map(|r| r.iter().zip(&WITNESS_PROTOTYPE).map(|(u, m)| (u - m).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let cert = write_certified(&ds, &solution, config.resolved_fuse_tol(&ds), common.seed, out, "")?;
    let containment = cert.report.get("containment").expect("containment check");
    let margin = containment.margin.unwrap_or(f64::NAN);
    let report = BoundaryReport {
        lambda,
        cluster_size: WITNESS_SIZE,
        k: cert.partition.k(),
        max_prototype_error: proto_err,
        worst_containment_margin: margin,
        boundary_point: containment.witness_indices.first().copied().unwrap_or(0),
        certified: cert.report.pass(),
        pass: cert.partition.k() == 1 && proto_err <= BOUNDARY_TOL && margin.abs() <= BOUNDARY_TOL && cert.report.pass(),
    };
    out.write_json("boundary.json", &report)?;
    Ok((solution.converged, report.pass, Some(config)))
}
