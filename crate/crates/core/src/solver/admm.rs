//! ADMM on the pair splitting `w_ij = u_i − u_j`.
//!
//! Every subproblem is exact: the `u`-update solves `(I + ρL) U = R` with `L`
//! the Laplacian of the complete graph, whose inverse is
//! `(I + ρ 11ᵀ) / (1 + ρn)`; the `w`-update is block soft-thresholding.

use log::debug;
use ndarray::Array2;

use super::{pair_count, pairs, polish_centroids};
use crate::config::SolverConfig;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::objective_flat;
use crate::partition::Partition;
use crate::solution::{PrototypeSolution, Residuals};

const RHO_MIN: f64 = 1e-3;
const RHO_MAX: f64 = 1e3;
const RHO_IMBALANCE: f64 = 10.0;
const RHO_FACTOR: f64 = 2.0;

/// Iterates of a run, reusable as a warm start for a nearby `λ`.
#[derive(Debug, Clone)]
pub struct AdmmState {
    /// `n × d` prototypes, row-major.
    pub u: Vec<f64>,
    /// Pair differences, `n(n−1)/2 × d`, lexicographic `(i < j)` order.
    pub w: Vec<f64>,
    /// Multipliers, indexed like `w`.
    pub y: Vec<f64>,
    pub rho: f64,
    pub lambda: f64,
    pub iterations: usize,
    /// `(primal, dual)` residual after each iteration.
    pub history: Vec<(f64, f64)>,
}

impl AdmmState {
    /// `U = X`, `W` the pair differences of `X`, `Y = 0`.
    pub fn cold(dataset: &Dataset, config: &SolverConfig) -> Self {
        let (n, d) = (dataset.n(), dataset.d());
        let x = dataset.flat();
        let mut w = vec![0.0; pair_count(n) * d];
        for (p, i, j) in pairs(n) {
            for c in 0..d {
                w[p * d + c] = x[i * d + c] - x[j * d + c];
            }
        }
        Self {
            u: x.to_vec(),
            y: vec![0.0; w.len()],
            w,
            rho: config.admm_rho,
            lambda: config.lambda,
            iterations: 0,
            history: Vec::new(),
        }
    }

    /// Reuse iterates from a solve at another `λ`, rescaling the multipliers
    /// by `λ_new / λ_old`.
    pub fn warm(&self, dataset: &Dataset, config: &SolverConfig) -> Self {
        let expected = dataset.n() * dataset.d();
        if self.u.len() != expected || self.lambda <= 0.0 {
            return Self::cold(dataset, config);
        }
        let ratio = config.lambda / self.lambda;
        Self {
            u: self.u.clone(),
            w: self.w.clone(),
            y: self.y.iter().map(|v| v * ratio).collect(),
            rho: self.rho,
            lambda: config.lambda,
            iterations: 0,
            history: Vec::new(),
        }
    }
}

pub fn solve_admm(dataset: &Dataset, config: &SolverConfig) -> Result<PrototypeSolution> {
    solve_admm_warm(dataset, config, None).map(|(solution, _)| solution)
}

/// Run ADMM from `warm` (or from the data when `None`). Non-convergence is
/// reported through `converged = false` with the best iterate seen.
pub fn solve_admm_warm(
    dataset: &Dataset,
    config: &SolverConfig,
    warm: Option<&AdmmState>,
) -> Result<(PrototypeSolution, AdmmState)> {
    config.validate()?;
    let (n, d) = (dataset.n(), dataset.d());
    let x = dataset.flat();
    let lambda = config.lambda;

    if lambda == 0.0 || n == 1 {
        let state = AdmmState::cold(dataset, config);
        let solution = PrototypeSolution {
            prototypes: dataset.points().clone(),
            lambda,
            objective_value: 0.0,
            iterations: 0,
            converged: true,
            residuals: Residuals::default(),
        };
        return Ok((solution, state));
    }

    let mut state = match warm {
        Some(prev) => prev.warm(dataset, config),
        None => AdmmState::cold(dataset, config),
    };
    let scale = dataset.scale();
    let primal_target = config.primal_tol * scale;
    let dual_target = config.dual_tol * scale;

    let npairs = pair_count(n);
    let mut r = vec![0.0; n * d];
    let mut total = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut best = (f64::INFINITY, state.u.clone(), Residuals::default());
    let mut converged = false;

    for iter in 1..=config.max_iters {
        let rho = state.rho;

        // u-update: r = X + Bᵀ(ρW − Y), then U = (r + ρ Σ r) / (1 + ρn).
        r.copy_from_slice(x);
        for (p, i, j) in pairs(n) {
            for c in 0..d {
                let g = rho * state.w[p * d + c] - state.y[p * d + c];
                r[i * d + c] += g;
                r[j * d + c] -= g;
            }
        }
        total.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            for c in 0..d {
                total[c] += r[i * d + c];
            }
        }
        let denom = 1.0 + rho * n as f64;
        for i in 0..n {
            for c in 0..d {
                state.u[i * d + c] = (r[i * d + c] + rho * total[c]) / denom;
            }
        }

        // w-update (block soft-threshold) and y-update.
        let shrink = lambda / rho;
        let mut primal_sq = 0.0;
        let mut dual_sq = 0.0;
        for (p, i, j) in pairs(n) {
            let mut tn = 0.0;
            for c in 0..d {
                let diff = state.u[i * d + c] - state.u[j * d + c];
                t[c] = diff + state.y[p * d + c] / rho;
                tn += t[c] * t[c];
            }
            let tn = tn.sqrt();
            let keep = if tn > shrink { 1.0 - shrink / tn } else { 0.0 };
            for c in 0..d {
                let k = p * d + c;
                let w_new = keep * t[c];
                let dw = w_new - state.w[k];
                dual_sq += dw * dw;
                state.w[k] = w_new;
                let gap = state.u[i * d + c] - state.u[j * d + c] - w_new;
                primal_sq += gap * gap;
                state.y[k] += rho * gap;
            }
        }
        debug_assert_eq!(state.w.len(), npairs * d);

        let primal = primal_sq.sqrt();
        let dual = rho * dual_sq.sqrt();
        if !(primal.is_finite() && dual.is_finite()) {
            return Err(Error::NumericalFailure { iteration: iter });
        }
        state.iterations = iter;
        state.history.push((primal, dual));

        let merit = (primal / primal_target).max(dual / dual_target);
        if merit < best.0 {
            best = (merit, state.u.clone(), Residuals { primal, dual });
        }
        if primal <= primal_target && dual <= dual_target {
            converged = true;
            break;
        }

        if config.adaptive_rho {
            if primal > RHO_IMBALANCE * dual && rho * RHO_FACTOR <= RHO_MAX {
                state.rho = rho * RHO_FACTOR;
            } else if dual > RHO_IMBALANCE * primal && rho / RHO_FACTOR >= RHO_MIN {
                state.rho = rho / RHO_FACTOR;
            }
        }
    }

    let (u_flat, residuals) = if converged {
        let (p, dl) = *state.history.last().expect("at least one iteration");
        (state.u.clone(), Residuals { primal: p, dual: dl })
    } else {
        (best.1, best.2)
    };
    let mut prototypes = Array2::from_shape_vec((n, d), u_flat).expect("n × d iterate");
    let mut objective_value = objective_flat(x, prototypes.as_slice().expect("owned"), d, lambda);

    if converged && config.polish && lambda > 0.0 {
        if let Some((value, polished)) = polish_ladder(dataset, &prototypes, lambda, config.resolved_fuse_tol(dataset)) {
            if value <= objective_value + 1e-12 * objective_value.abs() {
                prototypes = polished;
                objective_value = value;
            } else {
                debug!("polish rejected: {value} > {objective_value}");
            }
        }
    }

    debug!(
        "admm: lambda={lambda} iters={} converged={converged} primal={:.3e} dual={:.3e} rho={}",
        state.iterations, residuals.primal, residuals.dual, state.rho
    );

    let solution = PrototypeSolution {
        prototypes,
        lambda,
        objective_value,
        iterations: state.iterations,
        converged,
        residuals,
    };
    Ok((solution, state))
}

const POLISH_RUNGS: usize = 4;

/// Polishes the partitions extracted at `fuse_tol`, `fuse_tol / 10`, ... and
/// keeps the lowest objective. Prototypes that nearly fuse at the optimum sit
/// closer than `fuse_tol`; a finer rung separates them. Walks coarse to fine
/// and stops once a finer partition no longer lowers the objective.
fn polish_ladder(
    dataset: &Dataset,
    prototypes: &Array2<f64>,
    lambda: f64,
    fuse_tol: f64,
) -> Option<(f64, Array2<f64>)> {
    let x = dataset.flat();
    let d = dataset.d();
    let mut best: Option<(f64, Array2<f64>)> = None;
    let mut last_k = 0;
    let mut tol = fuse_tol;
    for _ in 0..POLISH_RUNGS {
        let partition = Partition::extract(prototypes, tol);
        let k = partition.k();
        tol /= 10.0;
        if k == last_k {
            continue;
        }
        last_k = k;
        let Some(centroids) = polish_centroids(dataset, &partition, lambda, tol * 1e-2) else {
            continue;
        };
        let candidate = Partition::with_centroids(partition.labels().to_vec(), centroids)
            .expect("polish keeps the cluster structure")
            .assigned_centroids();
        let value = objective_flat(x, candidate.as_slice().expect("owned"), d, lambda);
        match &best {
            Some((b, _)) if value >= *b - 1e-12 * b.abs() => break,
            _ => best = Some((value, candidate)),
        }
        if k == dataset.n() {
            break;
        }
    }
    best
}
