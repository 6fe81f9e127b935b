use serde::{Deserialize, Serialize};

use super::balls::{bounding_balls, check_center_consistency, check_containment, check_gaps, BoundingBall};
use super::convexity::check_convexity;
use super::directions::probe_optimality;
use super::dual::{dual_certificate, Certificate};
use super::CertifyOptions;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::partition::Partition;
use crate::solution::PrototypeSolution;

/// Outcome of one named check. `margin` is `None` when the check is vacuous
/// (e.g. gaps with a single cluster, hulls outside the plane).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub margin: Option<f64>,
    pub witness_indices: Vec<usize>,
}

impl CheckResult {
    pub fn new(name: &str, pass: bool, margin: Option<f64>, witness_indices: Vec<usize>) -> Self {
        Self {
            name: name.to_owned(),
            pass,
            margin,
            witness_indices,
        }
    }
}

/// One entry per check, always in this order: `optimality_probe`,
/// `containment`, `gaps`, `center_consistency`, `convexity_swap`,
/// `convexity_hull`, `dual_certificate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CertReport {
    pub checks: Vec<CheckResult>,
}

impl CertReport {
    pub const CHECK_NAMES: [&'static str; 7] = [
        "optimality_probe",
        "containment",
        "gaps",
        "center_consistency",
        "convexity_swap",
        "convexity_hull",
        "dual_certificate",
    ];

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Everything computed while certifying one solution.
#[derive(Debug, Clone)]
pub struct Certification {
    pub partition: Partition,
    pub balls: Vec<BoundingBall>,
    pub probe_minimum: f64,
    pub certificate: Certificate,
    pub report: CertReport,
}

/// Run the full suite on `solution` with the clusters read off at
/// `fuse_tol`.
pub fn certify(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    fuse_tol: f64,
    options: &CertifyOptions,
) -> Result<Certification> {
    let partition = solution.partition(fuse_tol);
    certify_partition(dataset, solution, partition, options)
}

pub fn certify_partition(
    dataset: &Dataset,
    solution: &PrototypeSolution,
    partition: Partition,
    options: &CertifyOptions,
) -> Result<Certification> {
    let lambda = solution.lambda;
    let probe = probe_optimality(dataset, solution, &partition, lambda, options.num_probes, options.seed)?;
    let balls = bounding_balls(dataset, &partition, lambda)?;
    let containment = check_containment(dataset, &partition, &balls, options.cert_tol);
    let gaps = check_gaps(&balls, lambda, options.cert_tol);
    let centers = check_center_consistency(dataset, solution, &partition, lambda, options.probe_tol)?;
    let convexity = check_convexity(dataset, &partition, options.cert_tol);
    let certificate = dual_certificate(dataset, solution, &partition, lambda, options)?;

    let checks = vec![
        CheckResult::new(
            "optimality_probe",
            probe.minimum >= -options.probe_tol,
            Some(probe.minimum),
            probe.witness.clone(),
        ),
        containment,
        gaps,
        centers,
        convexity.swap,
        convexity.hull,
        CheckResult::new(
            "dual_certificate",
            certificate.feasible,
            Some(certificate.max_norm_violation.max(certificate.max_balance_residual)),
            vec![certificate.worst_point],
        ),
    ];
    Ok(Certification {
        partition,
        balls,
        probe_minimum: probe.minimum,
        certificate,
        report: CertReport { checks },
    })
}
