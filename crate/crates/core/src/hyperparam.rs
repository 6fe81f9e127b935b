//! Necessary bounds on `λ` for a nontrivial clustering (`1 < k < n`), and
//! solution paths over a `λ` grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::dataset::{format_f64, Dataset};
use crate::error::{invalid, Error, Result};
use crate::partition::Partition;
use crate::solver::{solve_admm_warm, AdmmState};

/// `max_{i≠j} ‖x_i − x_j‖ / 2`. Any optimum with `k > 1` has `λ` strictly
/// below this value.
pub fn lambda_upper_bound(dataset: &Dataset) -> Result<f64> {
    if dataset.n() < 2 {
        return Err(invalid("dataset", "need at least two points"));
    }
    Ok(dataset.max_pairwise_distance() / 2.0)
}

/// `min_{i≠j} ‖x_i − x_j‖ / √(2q(q−1))`. Any optimum whose largest cluster
/// has exactly `q ≥ 2` points has `λ` at least this value.
pub fn lambda_lower_bound(dataset: &Dataset, q: usize) -> Result<f64> {
    let n = dataset.n();
    if n < 2 {
        return Err(invalid("dataset", "need at least two points"));
    }
    if q < 2 || q > n {
        return Err(invalid("q", format!("need 2 <= q <= n = {n}, got {q}")));
    }
    Ok(dataset.min_pairwise_distance() / ((2 * q * (q - 1)) as f64).sqrt())
}

/// Both bounds, with the lower bound tabulated for every `q` in `2..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaBounds {
    pub upper: f64,
    /// `(q, bound)` pairs, `q` ascending.
    pub lower_for_q: Vec<(usize, f64)>,
}

impl LambdaBounds {
    pub fn compute(dataset: &Dataset) -> Result<Self> {
        let upper = lambda_upper_bound(dataset)?;
        let lower_for_q = (2..=dataset.n())
            .map(|q| lambda_lower_bound(dataset, q).map(|b| (q, b)))
            .collect::<Result<_>>()?;
        Ok(Self { upper, lower_for_q })
    }

    pub fn lower(&self, q: usize) -> Option<f64> {
        self.lower_for_q.iter().find(|(qq, _)| *qq == q).map(|(_, b)| *b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Lin,
    Log,
}

/// `min:max:count[:log|lin]`; the scale defaults to `lin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|t| {
                let frac = t as f64 / last;
                match self.scale {
                    GridScale::Lin => self.min + (self.max - self.min) * frac,
                    GridScale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * frac).exp(),
                }
            })
            .collect()
    }

    /// 32 log-spaced values from `0.01` to `1.2` times the upper bound.
    pub fn default_for(dataset: &Dataset) -> Result<Self> {
        let upper = lambda_upper_bound(dataset)?;
        if upper <= 0.0 {
            return Err(invalid("dataset", "all points coincide; no nontrivial lambda range"));
        }
        Ok(Self {
            min: 0.01 * upper,
            max: 1.2 * upper,
            count: 32,
            scale: GridScale::Log,
        })
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse { line: 1, reason };
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad(format!("expected min:max:count[:log|lin], got {s:?}")));
        }
        let num = |field: &str, name: &str| -> Result<f64> {
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("{name} is not a number: {field:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{name} must be finite")))
            }
        };
        let min = num(parts[0], "min")?;
        let max = num(parts[1], "max")?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| bad(format!("count is not a positive integer: {:?}", parts[2])))?;
        let scale = match parts.get(3) {
            None | Some(&"lin") => GridScale::Lin,
            Some(&"log") => GridScale::Log,
            Some(other) => return Err(bad(format!("unknown scale {other:?}"))),
        };
        if count == 0 {
            return Err(bad("count must be at least 1".into()));
        }
        if min < 0.0 {
            return Err(bad("lambda values must be nonnegative".into()));
        }
        if count > 1 && min >= max {
            return Err(bad("need min < max for more than one value".into()));
        }
        if scale == GridScale::Log && min <= 0.0 {
            return Err(bad("log grids need min > 0".into()));
        }
        Ok(Self { min, max, count, scale })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            GridScale::Lin => "lin",
            GridScale::Log => "log",
        };
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, scale)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSolve {
    pub partition: Partition,
    pub converged: bool,
    pub objective: f64,
    pub iterations: usize,
    pub prototypes: ndarray::Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEntry {
    pub lambda: f64,
    /// Solver failure is recorded here and does not stop the path.
    pub outcome: std::result::Result<PathSolve, String>,
}

impl PathEntry {
    pub fn k(&self) -> Option<usize> {
        self.outcome.as_ref().ok().map(|s| s.partition.k())
    }

    pub fn converged(&self) -> bool {
        self.outcome.as_ref().is_ok_and(|s| s.converged)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPath {
    pub entries: Vec<PathEntry>,
}

impl LambdaPath {
    pub fn ks(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(PathEntry::k).collect()
    }

    /// Columns `lambda,k,converged,objective`; failed entries leave `k` and
    /// `objective` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,k,converged,objective\n");
        for e in &self.entries {
            match &e.outcome {
                Ok(s) => out.push_str(&format!(
                    "{},{},{},{}\n",
                    format_f64(e.lambda),
                    s.partition.k(),
                    s.converged,
                    format_f64(s.objective)
                )),
                Err(_) => out.push_str(&format!("{},,false,\n", format_f64(e.lambda))),
            }
        }
        out
    }
}

fn check_grid(lambdas: &[f64]) -> Result<()> {
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(invalid("lambdas", "values must be finite and nonnegative"));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("lambdas", "values must be strictly increasing"));
    }
    Ok(())
}

/// Solve at each `λ` in increasing order, warm-starting every solve from the
/// previous one. `config.lambda` is ignored.
pub fn lambda_path(dataset: &Dataset, lambdas: &[f64], config: &SolverConfig) -> Result<LambdaPath> {
    check_grid(lambdas)?;
    let fuse_tol = config.resolved_fuse_tol(dataset);
    let mut warm: Option<AdmmState> = None;
    let mut entries = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let cfg = SolverConfig {
            lambda,
            ..config.clone()
        };
        let outcome = match solve_admm_warm(dataset, &cfg, warm.as_ref()) {
            Ok((solution, state)) => {
                warm = (lambda > 0.0).then_some(state);
                Ok(PathSolve {
                    partition: solution.partition(fuse_tol),
                    converged: solution.converged,
                    objective: solution.objective_value,
                    iterations: solution.iterations,
                    prototypes: solution.prototypes,
                })
            }
            Err(e) => {
                warm = None;
                Err(e.to_string())
            }
        };
        entries.push(PathEntry { lambda, outcome });
    }
    Ok(LambdaPath { entries })
}

/// Independent cold-start solves, evaluated in parallel.
pub fn lambda_path_cold(dataset: &Dataset, lambdas: &[f64], config: &SolverConfig) -> Result<LambdaPath> {
    check_grid(lambdas)?;
    let fuse_tol = config.resolved_fuse_tol(dataset);
    let entries = lambdas
        .par_iter()
        .map(|&lambda| {
            let cfg = SolverConfig {
                lambda,
                ..config.clone()
            };
            let outcome = crate::solver::solve_admm(dataset, &cfg)
                .map(|solution| PathSolve {
                    partition: solution.partition(fuse_tol),
                    converged: solution.converged,
                    objective: solution.objective_value,
                    iterations: solution.iterations,
                    prototypes: solution.prototypes,
                })
                .map_err(|e| e.to_string());
            PathEntry { lambda, outcome }
        })
        .collect();
    Ok(LambdaPath { entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollinearReport {
    pub n: usize,
    /// `(λ, k, converged)`; `k` is `None` if the solve failed.
    pub entries: Vec<(f64, Option<usize>, bool)>,
    /// Converged `λ` values with `1 < k < n`.
    pub violations: Vec<f64>,
}

impl CollinearReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Solve `x_i = i`, `i = 1..=n`, over the grid. Unit-spaced collinear points
/// admit no nontrivial clustering, so every converged `k` must be `1` or `n`.
pub fn collinear_impossibility(n: usize, lambdas: &[f64], config: &SolverConfig) -> Result<CollinearReport> {
    if n < 3 {
        return Err(invalid("n", "need at least 3 points"));
    }
    let values: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let dataset = Dataset::from_scalars(&values)?;
    let path = lambda_path_cold(&dataset, lambdas, config)?;
    let entries: Vec<_> = path
        .entries
        .iter()
        .map(|e| (e.lambda, e.k(), e.converged()))
        .collect();
    let violations = entries
        .iter()
        .filter(|(_, k, conv)| *conv && matches!(k, Some(k) if *k > 1 && *k < n))
        .map(|(l, _, _)| *l)
        .collect();
    Ok(CollinearReport { n, entries, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_examples() {
        let ds = Dataset::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(lambda_upper_bound(&ds).unwrap(), 1.5);
        let dup = Dataset::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(lambda_upper_bound(&dup).unwrap(), 0.0);
        assert_eq!(lambda_upper_bound(&ds.scaled(4.0).unwrap()).unwrap(), 6.0);
        assert!(lambda_upper_bound(&Dataset::from_scalars(&[1.0]).unwrap()).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let ds = Dataset::from_scalars(&[0.0, 1.0, 3.0, 7.0]).unwrap();
        assert_eq!(lambda_lower_bound(&ds, 2).unwrap(), 0.5);
        let expected = 1.0 / (2.0f64 * 4.0 * 3.0).sqrt();
        assert!((lambda_lower_bound(&ds, 4).unwrap() - expected).abs() < 1e-15);
        assert!(lambda_lower_bound(&ds, 1).is_err());
        assert!(lambda_lower_bound(&ds, 5).is_err());
        let dup = Dataset::from_scalars(&[0.0, 2.0, 2.0]).unwrap();
        assert_eq!(lambda_lower_bound(&dup, 2).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_table_is_nonincreasing() {
        let ds = Dataset::from_scalars(&[0.0, 1.5, 2.0, 4.0, 9.0]).unwrap();
        let b = LambdaBounds::compute(&ds).unwrap();
        assert_eq!(b.lower_for_q.len(), 4);
        for w in b.lower_for_q.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
        assert_eq!(b.lower(2), Some(0.25));
    }

    #[test]
    fn grid_spec_parsing() {
        let g: GridSpec = "0:2:3".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 1.0, 2.0]);
        let g: GridSpec = "0.01:1:3:log".parse().unwrap();
        let v = g.values();
        assert!((v[1] - 0.1).abs() < 1e-15 && (v[2] - 1.0).abs() < 1e-15);
        assert_eq!("0.5:0.5:1".parse::<GridSpec>().unwrap().values(), vec![0.5]);
        for bad in ["", "1:2", "a:2:3", "0:1:0", "2:1:3", "0:1:3:log", "0:1:3:cubic", "-1:1:2", "0:inf:2", "0:1:2:lin:x"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
        let g: GridSpec = "0.1:2:4:log".parse().unwrap();
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn path_rejects_unsorted_grid() {
        let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
        assert!(lambda_path(&ds, &[0.2, 0.1], &SolverConfig::default()).is_err());
        assert!(lambda_path(&ds, &[0.1, f64::NAN], &SolverConfig::default()).is_err());
    }

    #[test]
    fn path_endpoints_and_csv() {
        let ds = Dataset::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
        let path = lambda_path(&ds, &[0.0, 10.0], &SolverConfig::default()).unwrap();
        assert_eq!(path.ks(), vec![Some(3), Some(1)]);
        let csv = path.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "lambda,k,converged,objective");
        assert!(lines[1].contains(",3,true,"));
        assert!(lines[2].contains(",1,true,"));
    }

    #[test]
    fn collinear_small_cases() {
        let cfg = SolverConfig::default();
        let r = collinear_impossibility(3, &[0.01, 10.0], &cfg).unwrap();
        assert_eq!(r.entries[0].1, Some(3));
        assert_eq!(r.entries[1].1, Some(1));
        assert!(r.pass());
        assert!(collinear_impossibility(2, &[0.1], &cfg).is_err());
    }
}
