use approx::assert_abs_diff_eq;
use ndarray::{array, Array2};

use cvxclust::certify::{
    bounding_balls, certify, check_containment, check_convexity, check_gaps, construct_boundary_dataset,
    directional_derivative, dual_certificate, pair_directions, probe_optimality, same_solution_probe, CertReport,
    CertifyOptions, DirectionVector,
};
use cvxclust::config::default_fuse_tol;
use cvxclust::datagen::{fixtures, generate};
use cvxclust::{solve_admm, Dataset, Partition, PrototypeSolution, SolverConfig};

fn solved(ds: &Dataset, lambda: f64) -> (PrototypeSolution, Partition) {
    let s = solve_admm(ds, &SolverConfig::with_lambda(lambda)).unwrap();
    let p = s.partition(default_fuse_tol(ds));
    (s, p)
}

fn options(ds: &Dataset) -> CertifyOptions {
    CertifyOptions::for_dataset(ds)
}

#[test]
fn aggregate_directions_in_one_dimension() {
    // left cluster {0, 0} (2 points), right cluster {1, 1, 1}
    let protos = array![[0.0], [0.0], [1.0], [1.0], [1.0]];
    let p = Partition::extract(&protos, 1e-9);
    let e = pair_directions(&p);
    assert_eq!(e.aggregate(0), &[-3.0]);
    assert_eq!(e.aggregate(1), &[-3.0]);
    assert_eq!(e.aggregate(4), &[2.0]);
    for (i, j) in [(0, 2), (1, 4), (3, 0)] {
        let a = e.e(i, j).unwrap();
        let b = e.e(j, i).unwrap();
        assert_eq!(a[0], -b[0]);
        assert_eq!(a[0].abs(), 1.0);
    }
    assert!(e.e(0, 1).is_none());
}

#[test]
fn single_cluster_has_zero_aggregates() {
    let protos = Array2::from_elem((4, 2), 0.3);
    let e = pair_directions(&Partition::extract(&protos, 1e-9));
    for i in 0..4 {
        assert_eq!(e.aggregate(i), &[0.0, 0.0]);
    }
}

#[test]
fn directional_derivative_examples() {
    let one = Dataset::from_rows(&[[1.5, -2.0]]).unwrap();
    let s = PrototypeSolution::from_prototypes(&one, one.points().clone(), 0.3).unwrap();
    let p = s.partition(1e-9);
    let eps = DirectionVector::new(1, 2, vec![0.3, -4.0]).unwrap();
    assert_eq!(directional_derivative(&one, &s, &p, 0.3, &eps).unwrap(), 0.0);

    let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
    let s = PrototypeSolution::from_prototypes(&ds, array![[0.2], [0.8]], 0.2).unwrap();
    let p = s.partition(1e-9);
    let zero = DirectionVector::zeros(2, 1);
    assert_eq!(directional_derivative(&ds, &s, &p, 0.2, &zero).unwrap(), 0.0);
    let eps = DirectionVector::new(2, 1, vec![1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(directional_derivative(&ds, &s, &p, 0.2, &eps).unwrap(), 0.0, epsilon = 1e-15);

    let bad = DirectionVector::zeros(3, 1);
    assert!(directional_derivative(&ds, &s, &p, 0.2, &bad).is_err());
}

#[test]
fn directional_derivative_is_positively_homogeneous() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let (s, p) = solved(ds, fixtures::INFLEX_LAMBDA);
    let comps: Vec<f64> = (0..ds.n() * 2).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let eps = DirectionVector::new(ds.n(), 2, comps).unwrap();
    let one = directional_derivative(ds, &s, &p, s.lambda, &eps).unwrap();
    let two = directional_derivative(ds, &s, &p, s.lambda, &eps.scaled(2.0)).unwrap();
    assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-10 * (1.0 + one.abs()));
}

#[test]
fn probe_examples() {
    let ds = Dataset::from_rows(&[[0.0, 1.0], [2.0, 0.5], [-1.0, 3.0]]).unwrap();
    let s = PrototypeSolution::from_prototypes(&ds, ds.points().clone(), 0.0).unwrap();
    let p = s.partition(1e-9);
    assert!(probe_optimality(&ds, &s, &p, 0.0, 64, 1).unwrap().minimum >= -1e-10);

    let pair = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
    let (s, p) = solved(&pair, 0.6);
    assert!(probe_optimality(&pair, &s, &p, 0.6, 256, 0).unwrap().minimum >= -1e-8);

    let mut u = s.prototypes.clone();
    u[[0, 0]] += 0.1;
    let moved = PrototypeSolution::from_prototypes(&pair, u, 0.6).unwrap();
    let mp = moved.partition(1e-9);
    assert!(probe_optimality(&pair, &moved, &mp, 0.6, 256, 0).unwrap().minimum < 0.0);
}

#[test]
fn probe_is_deterministic_and_counts_directions() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let (s, p) = solved(ds, 0.11);
    let a = probe_optimality(ds, &s, &p, 0.11, 64, 9).unwrap();
    let b = probe_optimality(ds, &s, &p, 0.11, 64, 9).unwrap();
    assert_eq!(a.minimum, b.minimum);
    assert!(a.directions_tried >= 64 + ds.n() + p.k());
}

#[test]
fn bounding_ball_examples() {
    let ds = Dataset::from_rows(&[[0.0, 0.0], [2.0, 0.0], [5.0, 5.0]]).unwrap();
    let p = Partition::from_data_labels(&ds, &[0, 0, 1]).unwrap();
    let balls = bounding_balls(&ds, &p, 1.2).unwrap();
    assert_eq!(balls[0].center, vec![1.0, 0.0]);
    assert_abs_diff_eq!(balls[0].radius, 1.2);
    assert_eq!(balls[1].center, vec![5.0, 5.0]);
    assert_eq!(balls[1].radius, 0.0);

    let all = Partition::from_data_labels(&ds, &[0, 0, 0]).unwrap();
    let one = bounding_balls(&ds, &all, 0.5).unwrap();
    assert_eq!(one.len(), 1);
    assert_abs_diff_eq!(one[0].center[0], 7.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(one[0].radius, 1.0);
}

#[test]
fn containment_detects_misassigned_point() {
    let ds = Dataset::from_scalars(&[0.0, 0.1, 10.0, 10.1]).unwrap();
    let good = Partition::from_data_labels(&ds, &[0, 0, 1, 1]).unwrap();
    let balls = bounding_balls(&ds, &good, 0.1).unwrap();
    assert!(check_containment(&ds, &good, &balls, 1e-9).pass);

    let bad = Partition::from_data_labels(&ds, &[0, 0, 1, 0]).unwrap();
    let balls = bounding_balls(&ds, &bad, 0.1).unwrap();
    let r = check_containment(&ds, &bad, &balls, 1e-9);
    assert!(!r.pass);
    assert!(r.margin.unwrap() > 0.0);
    assert!(r.witness_indices.contains(&3) || r.witness_indices.contains(&0));
}

#[test]
fn witness_sits_on_ball_surface() {
    let ds = construct_boundary_dataset(4, 0.15, &[1.0, 2.0], &[0.0, 1.0]).unwrap();
    let all = Partition::from_data_labels(&ds, &[0; 4]).unwrap();
    let balls = bounding_balls(&ds, &all, 0.15).unwrap();
    let r = check_containment(&ds, &all, &balls, 1e-9);
    assert!(r.pass);
    assert!(r.margin.unwrap().abs() <= 1e-12);
    assert_eq!(r.witness_indices, vec![0]);
}

#[test]
fn witness_one_dimensional_example() {
    let ds = construct_boundary_dataset(3, 0.1, &[0.0], &[1.0]).unwrap();
    let xs: Vec<f64> = ds.points().iter().copied().collect();
    assert_abs_diff_eq!(xs[0], -0.2, epsilon = 1e-15);
    assert_abs_diff_eq!(xs[1], 0.1, epsilon = 1e-15);
    assert_abs_diff_eq!(xs[2], 0.1, epsilon = 1e-15);
    let (s, p) = solved(&ds, 0.1);
    assert_eq!(p.k(), 1);
    let cert = dual_certificate(&ds, &s, &p, 0.1, &options(&ds)).unwrap();
    assert!(cert.feasible);
    assert!(construct_boundary_dataset(3, 0.1, &[0.0], &[2.0]).is_err());
}

#[test]
fn gaps_examples() {
    let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
    let (_, p) = solved(&ds, 0.2);
    let balls = bounding_balls(&ds, &p, 0.2).unwrap();
    let r = check_gaps(&balls, 0.2, 1e-9);
    assert!(r.pass);
    assert_abs_diff_eq!(r.margin.unwrap(), 1.0 - 0.4, epsilon = 1e-9);

    let all = Partition::from_data_labels(&ds, &[0, 0]).unwrap();
    assert!(check_gaps(&bounding_balls(&ds, &all, 0.6).unwrap(), 0.6, 1e-9).pass);
}

#[test]
fn three_blob_gaps_hold() {
    let data = generate(&fixtures::three_blobs_spec()).unwrap();
    let ds = &data.dataset;
    let (s, p) = solved(ds, fixtures::THREE_BLOBS_LAMBDA);
    assert!(p.k() > 1);
    let balls = bounding_balls(ds, &p, s.lambda).unwrap();
    assert!(check_gaps(&balls, s.lambda, options(ds).cert_tol).pass);
}

#[test]
fn interleaved_labels_fail_swap_test() {
    let ds = Dataset::from_scalars(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    let p = Partition::from_data_labels(&ds, &[0, 1, 0, 1]).unwrap();
    let r = check_convexity(&ds, &p, 1e-9);
    assert!(!r.swap.pass);
    assert!(!r.pass());
}

#[test]
fn moon_labels_fail_hull_test_but_solution_passes() {
    let data = generate(&fixtures::two_moons_spec()).unwrap();
    let ds = &data.dataset;
    let truth: Vec<usize> = data.labels.iter().map(|&l| l as usize).collect();
    let moons = Partition::from_data_labels(ds, &truth).unwrap();
    assert!(!check_convexity(ds, &moons, 1e-9).hull.pass);

    for lambda in fixtures::MOONS_LAMBDAS {
        let (_, p) = solved(ds, lambda);
        assert!(check_convexity(ds, &p, options(ds).cert_tol).pass(), "λ = {lambda}");
    }
}

#[test]
fn dual_certificate_examples() {
    let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
    let fused = PrototypeSolution::from_prototypes(&ds, array![[0.5], [0.5]], 0.6).unwrap();
    let p = fused.partition(1e-9);
    let cert = dual_certificate(&ds, &fused, &p, 0.6, &options(&ds)).unwrap();
    assert!(cert.feasible);
    assert_abs_diff_eq!(cert.z(0, 1).unwrap()[0], 0.5, epsilon = 1e-6);
    assert_abs_diff_eq!(cert.z(1, 0).unwrap()[0], -0.5, epsilon = 1e-6);

    let claimed = PrototypeSolution::from_prototypes(&ds, array![[0.5], [0.5]], 0.4).unwrap();
    let cert = dual_certificate(&ds, &claimed, &p, 0.4, &options(&ds)).unwrap();
    assert!(!cert.feasible);
    assert!(cert.max_balance_residual >= 0.09);
}

#[test]
fn singleton_clusters_require_stationarity() {
    let ds = Dataset::from_scalars(&[0.0, 1.0]).unwrap();
    let exact = PrototypeSolution::from_prototypes(&ds, array![[0.2], [0.8]], 0.2).unwrap();
    let p = exact.partition(1e-9);
    assert!(dual_certificate(&ds, &exact, &p, 0.2, &options(&ds)).unwrap().feasible);
    let off = PrototypeSolution::from_prototypes(&ds, array![[0.25], [0.8]], 0.2).unwrap();
    let p = off.partition(1e-9);
    assert!(!dual_certificate(&ds, &off, &p, 0.2, &options(&ds)).unwrap().feasible);
}

#[test]
fn same_solution_probe_examples() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let (s, p) = solved(ds, fixtures::INFLEX_LAMBDA);
    let opts = options(ds);
    assert!(same_solution_probe(ds, &s, &p, s.lambda, &opts).unwrap());

    let members = p.members(0);
    let (a, b) = (members[0], members[1]);
    let mut rows: Vec<Vec<f64>> = (0..ds.n()).map(|i| ds.row(i).to_vec()).collect();
    rows.swap(a, b);
    let swapped = Dataset::from_rows(&rows).unwrap();
    assert!(same_solution_probe(&swapped, &s, &p, s.lambda, &opts).unwrap());

    let mut rows: Vec<Vec<f64>> = (0..ds.n()).map(|i| ds.row(i).to_vec()).collect();
    rows[a][1] += 50.0;
    let moved = Dataset::from_rows(&rows).unwrap();
    assert!(!same_solution_probe(&moved, &s, &p, s.lambda, &opts).unwrap());

    let short = Dataset::from_scalars(&[1.0, 2.0]).unwrap();
    assert!(same_solution_probe(&short, &s, &p, s.lambda, &opts).is_err());
}

#[test]
fn certificate_feasibility_implies_swap_test() {
    for (name, data, lambda) in fixtures::comparison_suite().unwrap() {
        let ds = &data.dataset;
        let s = solve_admm(ds, &SolverConfig::with_lambda(lambda)).unwrap();
        let c = certify(ds, &s, default_fuse_tol(ds), &options(ds)).unwrap();
        if c.certificate.feasible {
            assert!(c.report.get("convexity_swap").unwrap().pass, "{name}");
        }
    }
}

#[test]
fn full_suite_passes_on_figure_fixtures() {
    for (name, data, lambda) in fixtures::comparison_suite().unwrap() {
        let ds = &data.dataset;
        let s = solve_admm(ds, &SolverConfig::with_lambda(lambda)).unwrap();
        assert!(s.converged, "{name}");
        let c = certify(ds, &s, default_fuse_tol(ds), &options(ds)).unwrap();
        let failed: Vec<_> = c.report.failures().map(|f| f.name.clone()).collect();
        assert!(c.report.pass(), "{name}: {failed:?}");
    }
}

#[test]
fn report_lists_every_check_once_and_round_trips() {
    let ds = Dataset::from_scalars(&[0.0, 1.0, 5.0]).unwrap();
    let s = solve_admm(&ds, &SolverConfig::with_lambda(0.3)).unwrap();
    let c = certify(&ds, &s, default_fuse_tol(&ds), &options(&ds)).unwrap();
    let names: Vec<&str> = c.report.checks.iter().map(|r| r.name.as_str()).collect();
    for expected in CertReport::CHECK_NAMES {
        assert_eq!(names.iter().filter(|&&n| n == expected).count(), 1, "{expected}");
    }
    let json: serde_json::Value = serde_json::from_str(&c.report.to_json()).unwrap();
    let entries = json.as_array().unwrap();
    assert_eq!(entries.len(), names.len());
    for e in entries {
        for key in ["name", "pass", "margin", "witness_indices"] {
            assert!(e.get(key).is_some(), "{key}");
        }
    }
}
