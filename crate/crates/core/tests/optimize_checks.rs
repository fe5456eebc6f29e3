use netshare::optimize::{
    objective_at, optimal_density, DensitySearch, DensitySweep, OptimumStatus,
};
use netshare::scenario::pathloss_constant;
use netshare::{
    LinkStateModel, OperatorId, OperatorParams, PathLossParams, QuadratureConfig, Scenario, Setup,
};

fn two_ball() -> Scenario {
    Scenario::new(
        OperatorParams::new(3e-5, 2e7, 40.0, 10.0).unwrap(),
        OperatorParams::new(3e-5, 2e7, 40.0, 10.0).unwrap(),
        LinkStateModel::new(0.7195, 0.0002, 109.8517).unwrap(),
        PathLossParams::new(pathloss_constant(2.1e9), 2.5, 3.5).unwrap(),
        2.1e9,
    )
    .unwrap()
}

#[test]
fn two_ball_profile_has_interior_maximum() {
    let qc = QuadratureConfig::default();
    let search = DensitySearch::new(1e-6, 1e-3, Setup::NonSharing).unwrap();
    let a = optimal_density(&two_ball(), &search, &qc).unwrap();
    assert_eq!(a.status, OptimumStatus::Interior);
    assert!(a.neighbor_check.passed);
    let best_grid = a.profile.iter().map(|p| p.rate).fold(f64::MIN, f64::max);
    assert!(a.rate_star >= best_grid);
    assert!(a.profile.first().unwrap().rate < a.rate_star);
    assert!(a.profile.last().unwrap().rate < a.rate_star);
    assert!(a.lambda_star > 1e-5 && a.lambda_star < 1e-4);
    assert_eq!(a.rate_star, objective_at(&two_ball(), &search, a.lambda_star, &qc).unwrap());

    let b = optimal_density(&two_ball(), &search, &qc).unwrap();
    assert_eq!(a, b);
}

#[test]
fn single_slope_interference_limited_is_flat() {
    // Equal LOS probability in both regions, one exponent, negligible noise:
    // the SIR law does not depend on the density.
    let op = OperatorParams::new(1e-5, 1e-20, 1.0, 0.0).unwrap();
    let s = Scenario::new(
        op,
        op,
        LinkStateModel::new(0.3, 0.3, 109.8517).unwrap(),
        PathLossParams::new(pathloss_constant(2.1e9), 3.5, 3.5).unwrap(),
        2.1e9,
    )
    .unwrap();
    let mut search = DensitySearch::new(1e-6, 1e-3, Setup::Sharing).unwrap();
    search.grid_points = 8;
    let r = optimal_density(&s, &search, &QuadratureConfig::default()).unwrap();
    assert_eq!(r.status, OptimumStatus::Plateau);
    assert!(r.neighbor_check.passed);
}

#[test]
fn zero_width_range_returns_point() {
    let search = DensitySearch::new(2e-5, 2e-5, Setup::Sharing).unwrap();
    let r = optimal_density(&two_ball(), &search, &QuadratureConfig::default()).unwrap();
    assert_eq!(r.status, OptimumStatus::SinglePoint);
    assert_eq!(r.lambda_star, 2e-5);
    assert_eq!(r.profile.len(), 1);
}

#[test]
fn maximum_at_range_edge_is_flagged() {
    let mut search = DensitySearch::new(1e-7, 1e-6, Setup::NonSharing).unwrap();
    search.grid_points = 8;
    let r = optimal_density(&two_ball(), &search, &QuadratureConfig::default()).unwrap();
    assert_eq!(r.status, OptimumStatus::Boundary);
    assert!((r.lambda_star / 1e-6 - 1.0).abs() < 1e-6);
}

#[test]
fn per_operator_sweep_keeps_other_density() {
    let mut search = DensitySearch::new(1e-6, 1e-4, Setup::NonSharing).unwrap();
    search.grid_points = 8;
    search.refine_iters = 10;
    search.sweep = DensitySweep::PerOperator(OperatorId::Two);
    let template = two_ball();
    let qc = QuadratureConfig::default();
    let r = optimal_density(&template, &search, &qc).unwrap();
    // Operator 1's term is constant, so the optimum is operator 2's own.
    let shared = DensitySearch {
        sweep: DensitySweep::Shared,
        ..search
    };
    let s = optimal_density(&template, &shared, &qc).unwrap();
    assert!((r.lambda_star / s.lambda_star - 1.0).abs() < 1e-6);
    let fixed = 2e7 * netshare::aggregate_rates(&template, &qc).unwrap().r_bar_1;
    let expected = fixed + 0.5 * s.rate_star;
    assert!((r.rate_star - expected).abs() < 1e-8 * expected);
}
