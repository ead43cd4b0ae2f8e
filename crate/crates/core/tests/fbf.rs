use fbf_blasius::oracle::{solve_truncated, ShootingConfig};
use fbf_blasius::problems::{solve_fbf, ExtendedBlasiusSpec, Family, FbfResult, SAMPLE_COUNT};
use fbf_blasius::scalar::max_norm;
use fbf_blasius::{assemble_residual, SolverConfig};

// Reference values from an independent adaptive 8th-order integrator with
// event location at f'' = ε (rtol 1e-13) and a bracketing root finder.
const P1_EPS_0_1: (f64, f64) = (2.7087349239014893, 0.48253447972497654);
const P1_EPS_1E_6: (f64, f64) = (3.3804009077610817, 0.46905505909594275);
const P1_EPS_1E_10: (f64, f64) = (3.3821876763260277, 0.46905505875725234);
const P2_HALF_EPS_1E_6: (f64, f64) = (56.65447359019257, 0.3312372715862618);
const P2_THREE_HALVES_EPS_1E_6: (f64, f64) = (4.346479543383613, 0.36477352987244044);
const P2_TWO_EPS_1E_6: (f64, f64) = (3.361329966925307, 0.3997905740551609);

fn solve(family: Family, p: f64, eps: f64) -> FbfResult<f64> {
    let spec = ExtendedBlasiusSpec::new(family, p, eps);
    solve_fbf(&spec, &SolverConfig::default(), None).unwrap()
}

fn check_invariants(res: &FbfResult<f64>, family: Family, p: f64, eps: f64) {
    let cfg = SolverConfig::<f64>::default();
    let problem =
        fbf_blasius::problems::build_problem(&ExtendedBlasiusSpec::new(family, p, eps)).unwrap();
    assert!(res.report.converged);
    assert!(max_norm(&assemble_residual(&problem, &res.grid).unwrap()) <= cfg.residual_tol);
    assert!(res.free_boundary_spread() <= 10.0 * cfg.newton_tol);
    assert!(res.eta_eps > 0.0);

    let s = &res.samples;
    assert_eq!(s.len(), SAMPLE_COUNT);
    assert_eq!(s[0].eta, 0.0);
    assert!((s[SAMPLE_COUNT - 1].eta - res.eta_eps).abs() < 1e-12 * res.eta_eps);
    assert!(s.windows(2).all(|w| w[0].eta < w[1].eta));
    assert!(s[0].f.abs() <= cfg.newton_tol);
    assert!(s[0].fp.abs() <= cfg.newton_tol);
    let last = s[SAMPLE_COUNT - 1];
    assert!((last.fp - 1.0).abs() <= cfg.residual_tol);
    assert!((last.fpp - eps).abs() <= cfg.residual_tol);

    // shape: f'' > 0 before the free boundary, f' and f increasing, f convex
    assert!(s[..SAMPLE_COUNT - 1].iter().all(|x| x.fpp > 0.0));
    assert!(s.windows(2).all(|w| w[1].fp > w[0].fp));
    assert!(s[1..].windows(2).all(|w| w[1].f > w[0].f));
    for w in s.windows(3) {
        // discrete convexity on the uniform sample grid
        assert!(w[0].f + w[2].f - 2.0 * w[1].f >= -1e-12);
    }
}

#[test]
fn problem1_large_epsilon() {
    let r = solve(Family::Problem1, 1.5, 0.1);
    assert!((r.eta_eps - 2.708708).abs() < 1e-3);
    assert!((r.eta_eps - P1_EPS_0_1.0).abs() < 1e-6);
    assert!((r.fpp0 - P1_EPS_0_1.1).abs() < 1e-8);
    check_invariants(&r, Family::Problem1, 1.5, 0.1);
}

#[test]
fn problem1_small_epsilons() {
    let r = solve(Family::Problem1, 1.5, 1e-6);
    assert!((r.eta_eps - P1_EPS_1E_6.0).abs() < 1e-6);
    assert!((r.fpp0 - P1_EPS_1E_6.1).abs() < 1e-8);
    check_invariants(&r, Family::Problem1, 1.5, 1e-6);

    let r = solve(Family::Problem1, 1.5, 1e-10);
    assert!((r.eta_eps - 3.382150).abs() < 1e-3);
    assert!((r.fpp0 - 0.469055080).abs() < 5e-8);
    assert!((r.eta_eps - P1_EPS_1E_10.0).abs() < 1e-5);
    assert!((r.fpp0 - P1_EPS_1E_10.1).abs() < 1e-8);
    check_invariants(&r, Family::Problem1, 1.5, 1e-10);
}

#[test]
fn problem2_half() {
    let r = solve(Family::Problem2, 0.5, 1e-6);
    assert!((r.fpp0 - 0.331237479).abs() < 1e-5);
    assert!((r.eta_eps - 56.654480).abs() < 0.05);
    assert!((r.fpp0 - P2_HALF_EPS_1E_6.1).abs() < 1e-8);
    assert!((r.eta_eps - P2_HALF_EPS_1E_6.0).abs() < 1e-3);
    check_invariants(&r, Family::Problem2, 0.5, 1e-6);
}

#[test]
fn problem2_three_halves_and_two() {
    let r = solve(Family::Problem2, 1.5, 1e-6);
    assert!((r.fpp0 - 0.364773537).abs() < 1e-7);
    assert!((r.eta_eps - 4.346478).abs() < 5e-3);
    assert!((r.fpp0 - P2_THREE_HALVES_EPS_1E_6.1).abs() < 1e-8);
    check_invariants(&r, Family::Problem2, 1.5, 1e-6);

    let r = solve(Family::Problem2, 2.0, 1e-6);
    assert!((r.fpp0 - P2_TWO_EPS_1E_6.1).abs() < 1e-8);
    assert!((r.eta_eps - P2_TWO_EPS_1E_6.0).abs() < 1e-6);
    check_invariants(&r, Family::Problem2, 2.0, 1e-6);
}

#[test]
fn classical_blasius_matches_shooting_oracle() {
    let r = solve(Family::Problem2, 1.0, 1e-8);
    check_invariants(&r, Family::Problem2, 1.0, 1e-8);
    let s = solve_truncated(Family::Problem2, 1.0, &ShootingConfig::default()).unwrap();
    assert!((r.fpp0 - s).abs() < 1e-6, "{} vs {s}", r.fpp0);
}

#[test]
fn warm_start_reuses_grid() {
    let cfg = SolverConfig::default();
    let first = solve(Family::Problem1, 1.5, 0.1);
    let spec = ExtendedBlasiusSpec::new(Family::Problem1, 1.5, 0.01);
    let warm = solve_fbf(&spec, &cfg, Some(&first.grid)).unwrap();
    let cold = solve_fbf(&spec, &cfg, None).unwrap();
    assert!((warm.fpp0 - cold.fpp0).abs() < 1e-8);
    assert!(warm.grid.len() >= first.grid.len());
}

#[test]
fn literal_rhs_fails_where_corrected_succeeds() {
    let cfg = SolverConfig::default();
    let spec = ExtendedBlasiusSpec::new(Family::Problem2, 0.5, 1e-6)
        .with_rhs_form(fbf_blasius::RhsForm::Literal);
    assert!(solve_fbf(&spec, &cfg, None).is_err());
    // at P = 1 the two forms coincide
    let spec = ExtendedBlasiusSpec::new(Family::Problem2, 1.0, 1e-4)
        .with_rhs_form(fbf_blasius::RhsForm::Literal);
    let lit = solve_fbf(&spec, &cfg, None).unwrap();
    let cor = solve(Family::Problem2, 1.0, 1e-4);
    assert!((lit.fpp0 - cor.fpp0).abs() < 1e-9);
}
