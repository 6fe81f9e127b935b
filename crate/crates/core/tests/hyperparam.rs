use approx::assert_abs_diff_eq;

use cvxclust::certify::{certify, CertifyOptions};
use cvxclust::datagen::{fixtures, generate};
use cvxclust::hyperparam::{
    collinear_impossibility, lambda_lower_bound, lambda_path, lambda_path_cold, lambda_upper_bound, GridScale,
    GridSpec, LambdaBounds,
};
use cvxclust::{Dataset, SolverConfig};

#[test]
fn bound_examples() {
    let ds = Dataset::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
    assert_eq!(lambda_upper_bound(&ds).unwrap(), 1.5);
    assert_eq!(lambda_lower_bound(&ds, 2).unwrap(), 0.5);
    let expected = 1.0 / (2.0f64 * 3.0 * 2.0).sqrt();
    assert_abs_diff_eq!(lambda_lower_bound(&ds, 3).unwrap(), expected, epsilon = 1e-15);
    assert_abs_diff_eq!(lambda_upper_bound(&ds.scaled(2.5).unwrap()).unwrap(), 3.75, epsilon = 1e-15);

    let twins = Dataset::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
    assert_eq!(lambda_upper_bound(&twins).unwrap(), 0.0);
    assert_eq!(lambda_lower_bound(&twins, 2).unwrap(), 0.0);
    assert!(lambda_lower_bound(&ds, 4).is_err());
}

#[test]
fn lower_bounds_decrease_in_q() {
    let data = generate(&fixtures::uniform_spec()).unwrap();
    let b = LambdaBounds::compute(&data.dataset).unwrap();
    assert_eq!(b.lower_for_q.len(), 49);
    assert!(b.lower_for_q.windows(2).all(|w| w[1].1 <= w[0].1));
    assert!(b.lower(2).unwrap() < b.upper);
}

#[test]
fn path_endpoints_go_from_n_to_one() {
    let ds = Dataset::from_rows(&[[0.0, 0.0], [1.0, 0.2], [4.0, -1.0], [4.5, 0.0]]).unwrap();
    let big = 2.0 * lambda_upper_bound(&ds).unwrap();
    let path = lambda_path(&ds, &[0.0, big], &SolverConfig::default()).unwrap();
    assert_eq!(path.ks(), vec![Some(4), Some(1)]);
}

#[test]
fn moons_k_varies_between_adjacent_lambdas() {
    let data = generate(&fixtures::two_moons_spec()).unwrap();
    let path = lambda_path(&data.dataset, &fixtures::MOONS_LAMBDAS, &SolverConfig::default()).unwrap();
    let ks: Vec<usize> = path.ks().into_iter().map(Option::unwrap).collect();
    assert!(ks[0] != ks[1] && ks[1] != ks[2] && ks[0] != ks[2], "{ks:?}");
}

#[test]
fn every_path_entry_certifies() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let grid = GridSpec {
        min: 0.02,
        max: 1.0,
        count: 8,
        scale: GridScale::Log,
    };
    let config = SolverConfig::default();
    let path = lambda_path(ds, &grid.values(), &config).unwrap();
    let opts = CertifyOptions::for_dataset(ds);
    // Polished prototypes of one cluster are identical; the default fuse_tol
    // would merge optimal clusters that sit ~1e-3 apart at some grid points.
    let exact = 1e-9 * ds.max_pairwise_distance();
    for entry in &path.entries {
        let solve = entry.outcome.as_ref().unwrap();
        assert!(solve.converged);
        let solution = cvxclust::PrototypeSolution::from_prototypes(ds, solve.prototypes.clone(), entry.lambda).unwrap();
        let c = certify(ds, &solution, exact, &opts).unwrap();
        let failed: Vec<_> = c.report.failures().map(|f| f.name.clone()).collect();
        assert!(c.report.pass(), "λ = {}: {failed:?}", entry.lambda);
    }
}

#[test]
fn warm_and_cold_paths_agree() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let lambdas = GridSpec::default_for(ds).unwrap().values();
    let config = SolverConfig::default();
    let warm = lambda_path(ds, &lambdas, &config).unwrap();
    let cold = lambda_path_cold(ds, &lambdas, &config).unwrap();
    for (w, c) in warm.entries.iter().zip(&cold.entries) {
        let (w, c) = (w.outcome.as_ref().unwrap(), c.outcome.as_ref().unwrap());
        assert!(w.partition.same_grouping(&c.partition));
    }
    let warm_iters: usize = warm.entries.iter().map(|e| e.outcome.as_ref().unwrap().iterations).sum();
    let cold_iters: usize = cold.entries.iter().map(|e| e.outcome.as_ref().unwrap().iterations).sum();
    assert!(warm_iters <= cold_iters, "warm {warm_iters} vs cold {cold_iters}");
}

#[test]
fn default_grid_brackets_trivial_regimes() {
    let data = generate(&fixtures::inflexibility_base_spec()).unwrap();
    let ds = &data.dataset;
    let grid = GridSpec::default_for(ds).unwrap();
    let upper = lambda_upper_bound(ds).unwrap();
    assert_eq!(grid.count, 32);
    let values = grid.values();
    assert_abs_diff_eq!(values[0], 0.01 * upper, epsilon = 1e-12);
    assert_abs_diff_eq!(values[31], 1.2 * upper, epsilon = 1e-9);
    let path = lambda_path(ds, &values, &SolverConfig::default()).unwrap();
    assert_eq!(path.entries.last().unwrap().k(), Some(1));
}

#[test]
fn path_csv_has_one_row_per_lambda() {
    let ds = Dataset::from_scalars(&[0.0, 1.0, 2.5]).unwrap();
    let path = lambda_path(&ds, &[0.1, 0.2, 5.0], &SolverConfig::default()).unwrap();
    let csv = path.to_csv();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["lambda", "k", "converged", "objective"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][1].parse::<usize>().unwrap(), 1);
    assert_eq!(&rows[0][2], "true");
}

#[test]
fn solver_failures_are_recorded_per_entry() {
    let ds = Dataset::from_scalars(&[0.0, 1.0, 2.5]).unwrap();
    let config = SolverConfig {
        max_iters: 1,
        ..SolverConfig::default()
    };
    let path = lambda_path(&ds, &[0.0, 0.3, 0.4], &config).unwrap();
    assert_eq!(path.entries.len(), 3);
    assert!(path.entries[0].converged());
    assert!(path.entries[1..].iter().all(|e| e.outcome.is_ok() && !e.converged()));
}

#[test]
fn collinear_five_over_a_dense_grid() {
    let lambdas: Vec<f64> = GridSpec {
        min: 0.01,
        max: 3.0,
        count: 100,
        scale: GridScale::Log,
    }
    .values();
    let report = collinear_impossibility(5, &lambdas, &SolverConfig::default()).unwrap();
    assert!(report.pass(), "{:?}", report.violations);
    assert!(report.entries.iter().all(|(_, k, conv)| *conv && matches!(k, Some(1) | Some(5))));
    assert!(report.entries.iter().any(|e| e.1 == Some(5)));
    assert!(report.entries.iter().any(|e| e.1 == Some(1)));
}

#[test]
fn collinear_three_endpoints() {
    let cfg = SolverConfig::default();
    let r = collinear_impossibility(3, &[0.01], &cfg).unwrap();
    assert_eq!(r.entries[0].1, Some(3));
    let ds = Dataset::from_scalars(&[1.0, 2.0, 3.0]).unwrap();
    let s = cvxclust::solve_admm(&ds, &SolverConfig::with_lambda(10.0)).unwrap();
    for v in s.prototypes.iter() {
        assert_abs_diff_eq!(*v, 2.0, epsilon = 1e-9);
    }
}

#[test]
fn grid_spec_round_trip_and_errors() {
    let g: GridSpec = "0.001:2:5:log".parse().unwrap();
    assert_eq!(g.count, 5);
    assert_eq!(g.values().len(), 5);
    assert!(g.values().windows(2).all(|w| w[1] > w[0]));
    let lin: GridSpec = "0:1:5:lin".parse().unwrap();
    assert_eq!(lin.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!("1:0:3".parse::<GridSpec>().is_err());
    assert!("0:1:3:log".parse::<GridSpec>().is_err());
}
