//! Acceptance checks. One PASS/FAIL line per criterion, indented detail
//! lines below it. Exits with status 1 if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use fbf_blasius::bvp::{interval_defects, newton_solve, Mesh, OdeBvpProblem, SolutionGrid};
use fbf_blasius::oracle::{solve_truncated, ShootingConfig};
use fbf_blasius::problems::{build_problem, solve_fbf, ExtendedBlasiusSpec, Family, FbfResult};
use fbf_blasius::scalar::max_norm;
use fbf_blasius::sweep::{agreeing_decimals, run_sweep, SweepPlan, SweepRow, DEFAULT_EPSILONS};
use fbf_blasius::{assemble_residual, finite_difference_jacobian, RhsForm, SolverConfig};

const REFERENCE_ROWS: [(f64, f64, f64); 9] = [
    (0.1, 2.708708, 0.482527634),
    (0.01, 3.193357, 0.469356138),
    (1e-4, 3.323660, 0.469098357),
    (1e-5, 3.364091, 0.469055438),
    (1e-6, 3.376487, 0.469055050),
    (1e-7, 3.380402, 0.469055086),
    (1e-8, 3.381636, 0.469055082),
    (1e-9, 3.382027, 0.469055080),
    (1e-10, 3.382150, 0.469055080),
];
const ROW_ETA_TOL: f64 = 1e-3;
const ROW_FPP_TOL: f64 = 1e-6;
const SWEEP_SECONDS: f64 = 60.0;

const LIMIT_TABLE: f64 = 0.469055080;
const LIMIT_TABLE_TOL: f64 = 5e-8;
const LIMIT_COMPARISON: f64 = 0.46905520505;
const LIMIT_DIGITS: u32 = 6;

const P_HALF: (f64, f64) = (56.654480, 0.331237479);
const P_HALF_TOL: (f64, f64) = (0.05, 1e-5);
const P_TWO: (f64, f64) = (4.346478, 0.364773537);
const P_TWO_TOL: (f64, f64) = (5e-3, 1e-5);

const ORACLE_TOL: f64 = 1e-5;
const ORDER_FACTOR: f64 = 12.0;

struct Log {
    failed: usize,
}

impl Log {
    fn criterion(&mut self, id: &str, pass: bool, summary: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {id}: {summary}", if pass { "PASS" } else { "FAIL" });
    }
}

fn detail(line: String) {
    println!("    {line}");
}

/// Every converged solve produced by this run, kept for the property and
/// honesty criteria.
struct Solved {
    label: String,
    spec: ExtendedBlasiusSpec<f64>,
    result: FbfResult<f64>,
}

fn solve(
    label: &str,
    spec: ExtendedBlasiusSpec<f64>,
    warm: Option<&SolutionGrid<f64>>,
    all: &mut Vec<Solved>,
) -> Option<usize> {
    match solve_fbf(&spec, &SolverConfig::default(), warm) {
        Ok(result) => {
            all.push(Solved {
                label: label.to_string(),
                spec,
                result,
            });
            Some(all.len() - 1)
        }
        Err(e) => {
            detail(format!("{label}: solve failed: {e}"));
            None
        }
    }
}

/// Chain sweep through `solve_fbf`, keeping the grids for honesty checks.
fn chained(family: Family, p: f64, eps: &[f64], all: &mut Vec<Solved>) -> Vec<SweepRow<f64>> {
    let mut rows = Vec::new();
    let mut warm: Option<SolutionGrid<f64>> = None;
    for &e in eps {
        let label = format!("P{family} P={p} eps={e:e} (chain)");
        let Some(i) = solve(
            &label,
            ExtendedBlasiusSpec::new(family, p, e),
            warm.as_ref(),
            all,
        ) else {
            break;
        };
        let r = &all[i].result;
        rows.push(SweepRow {
            epsilon: e,
            eta_eps: r.eta_eps,
            fpp0: r.fpp0,
            newton_iterations: r.report.newton_iterations,
            mesh_points: r.report.final_mesh_points,
        });
        warm = Some(r.grid.clone());
    }
    rows
}

fn reference_table(
    log: &mut Log,
    all: &mut Vec<Solved>,
) -> (Vec<SweepRow<f64>>, Vec<SweepRow<f64>>) {
    let start = Instant::now();
    let plan = SweepPlan::new(
        ExtendedBlasiusSpec::new(Family::Problem1, 1.5, 0.1),
        DEFAULT_EPSILONS.to_vec(),
    );
    let rows = run_sweep(&plan).unwrap_or_default();
    let seconds = start.elapsed().as_secs_f64();
    let mut ok_rows = 0;
    for (row, &(eps, eta, fpp)) in rows.iter().zip(&REFERENCE_ROWS) {
        let (de, df) = ((row.eta_eps - eta).abs(), (row.fpp0 - fpp).abs());
        let ok = de <= ROW_ETA_TOL && df <= ROW_FPP_TOL;
        ok_rows += ok as usize;
        detail(format!(
            "eps={eps:<6e} eta={:.6} (table {eta:.6}, diff {de:.1e})  f''(0)={:.9} (table {fpp:.9}, diff {df:.1e})  {}",
            row.eta_eps,
            row.fpp0,
            if ok { "ok" } else { "MISS" }
        ));
    }
    let pass = rows.len() == 9 && ok_rows == 9 && seconds <= SWEEP_SECONDS;
    log.criterion(
        "1 table reproduction (Problem 1, P=3/2)",
        pass,
        format!(
            "{ok_rows}/9 rows within eta {ROW_ETA_TOL:e} and f''(0) {ROW_FPP_TOL:e}; sweep {seconds:.2}s (limit {SWEEP_SECONDS}s)"
        ),
    );

    // Diagnostic: the table read with its eps column shifted by one row from
    // the third entry on, so the row labelled 1e-4 is compared against 1e-3.
    let shifted_eps = [0.1, 0.01, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];
    let shifted = chained(Family::Problem1, 1.5, &shifted_eps, all);
    let mut eta_ok = 0;
    let mut fpp_ok = 0;
    for (row, &(label, eta, fpp)) in shifted.iter().zip(&REFERENCE_ROWS) {
        eta_ok += ((row.eta_eps - eta).abs() <= ROW_ETA_TOL) as usize;
        fpp_ok += ((row.fpp0 - fpp).abs() <= ROW_FPP_TOL) as usize;
        detail(format!(
            "shifted: table row {label:<6e} vs eps={:<6e}: eta diff {:.1e}, f''(0) diff {:.1e}",
            row.epsilon,
            (row.eta_eps - eta).abs(),
            (row.fpp0 - fpp).abs()
        ));
    }
    detail(format!(
        "shifted alignment: eta within tol {eta_ok}/9, f''(0) within tol {fpp_ok}/9"
    ));
    let mut chain_check = chained(Family::Problem1, 1.5, &DEFAULT_EPSILONS, all);
    chain_check.truncate(rows.len());
    detail(format!(
        "run_sweep rows equal a manual solve_fbf chain: {}",
        chain_check == rows
    ));
    (rows, shifted)
}

fn limit_value(log: &mut Log, rows: &[SweepRow<f64>]) {
    let Some(last) = rows.iter().find(|r| r.epsilon == 1e-10) else {
        log.criterion("2 limit value", false, "no eps=1e-10 row".into());
        return;
    };
    let d = (last.fpp0 - LIMIT_TABLE).abs();
    let digits = agreeing_decimals(last.fpp0, LIMIT_COMPARISON);
    log.criterion(
        "2 limit value",
        d <= LIMIT_TABLE_TOL && digits >= LIMIT_DIGITS,
        format!(
            "f''(0)={:.11} vs {LIMIT_TABLE} diff {d:.1e} (tol {LIMIT_TABLE_TOL:e}); {digits} decimals shared with {LIMIT_COMPARISON} (need {LIMIT_DIGITS})",
            last.fpp0
        ),
    );
}

fn spot_values(log: &mut Log, all: &mut Vec<Solved>) {
    let mut pass = true;
    for (p, (eta, fpp), (eta_tol, fpp_tol)) in [(0.5, P_HALF, P_HALF_TOL), (2.0, P_TWO, P_TWO_TOL)]
    {
        let label = format!("P2 P={p} eps=1e-6");
        match solve(
            &label,
            ExtendedBlasiusSpec::new(Family::Problem2, p, 1e-6),
            None,
            all,
        ) {
            Some(i) => {
                let r = &all[i].result;
                let ok = (r.eta_eps - eta).abs() <= eta_tol && (r.fpp0 - fpp).abs() <= fpp_tol;
                pass &= ok;
                detail(format!(
                    "P={p}: eta={:.6} (want {eta} +- {eta_tol:e}), f''(0)={:.9} (want {fpp} +- {fpp_tol:e})  {}",
                    r.eta_eps,
                    r.fpp0,
                    if ok { "ok" } else { "MISS" }
                ));
            }
            None => pass = false,
        }
    }
    log.criterion(
        "3 Problem 2 spot values at eps=1e-6",
        pass,
        "corrected rhs".into(),
    );

    if let Some(i) = solve(
        "P2 P=1.5 eps=1e-6",
        ExtendedBlasiusSpec::new(Family::Problem2, 1.5, 1e-6),
        None,
        all,
    ) {
        let r = &all[i].result;
        detail(format!(
            "diagnostic P=3/2 (corrected): eta={:.6}, f''(0)={:.9}",
            r.eta_eps, r.fpp0
        ));
    }
    for p in [0.5, 2.0] {
        let spec =
            ExtendedBlasiusSpec::new(Family::Problem2, p, 1e-6).with_rhs_form(RhsForm::Literal);
        match solve_fbf(&spec, &SolverConfig::default(), None) {
            Ok(r) => detail(format!(
                "diagnostic P={p} (literal rhs): eta={:.6}, f''(0)={:.9}",
                r.eta_eps, r.fpp0
            )),
            Err(e) => detail(format!("diagnostic P={p} (literal rhs): {e}")),
        }
    }
}

fn oracle_agreement(log: &mut Log, all: &mut Vec<Solved>) {
    let cases = [
        (Family::Problem1, 1.5),
        (Family::Problem2, 0.5),
        (Family::Problem2, 1.0),
        (Family::Problem2, 2.0),
    ];
    let mut pass = true;
    for (family, p) in cases {
        let label = format!("P{family} P={p} eps=1e-8");
        let fbf = solve(&label, ExtendedBlasiusSpec::new(family, p, 1e-8), None, all)
            .map(|i| all[i].result.fpp0);
        let shot = solve_truncated(family, p, &ShootingConfig::default());
        match (fbf, shot) {
            (Some(a), Ok(b)) => {
                let d = (a - b).abs();
                pass &= d <= ORACLE_TOL;
                detail(format!(
                    "Problem {family} P={p}: fbf {a:.10}, shooting {b:.10}, diff {d:.2e}  {}",
                    if d <= ORACLE_TOL { "ok" } else { "MISS" }
                ));
            }
            (_, Err(e)) => {
                pass = false;
                detail(format!("Problem {family} P={p}: oracle failed: {e}"));
            }
            (None, _) => pass = false,
        }
    }
    log.criterion(
        "4 oracle cross-validation (eps=1e-8 vs eta_inf=10)",
        pass,
        format!("tol {ORACLE_TOL:e}"),
    );
    let half: Vec<String> = [6.0, 8.0, 10.0, 14.0]
        .iter()
        .map(|&e| {
            let c = ShootingConfig {
                eta_infinity: e,
                rk4_steps: (2000.0 * e) as usize,
                ..ShootingConfig::default()
            };
            match solve_truncated(Family::Problem2, 0.5, &c) {
                Ok(s) => format!("{e}: {s:.6}"),
                Err(err) => format!("{e}: {err}"),
            }
        })
        .collect();
    detail(format!(
        "diagnostic P=1/2 shooting slope by eta_inf: {}",
        half.join(", ")
    ));
}

fn blasius_reduction(log: &mut Log, all: &[Solved]) {
    let fbf = all
        .iter()
        .find(|s| {
            s.spec.family == Family::Problem2 && s.spec.p_exponent == 1.0 && s.spec.epsilon == 1e-8
        })
        .map(|s| s.result.fpp0);
    let cfg = ShootingConfig {
        rk4_steps: 40_000,
        ..ShootingConfig::default()
    };
    match (fbf, solve_truncated(Family::Problem2, 1.0, &cfg)) {
        (Some(a), Ok(b)) => {
            let d = (a - b).abs();
            log.criterion(
                "5 classical Blasius reduction (P=1)",
                d <= ORACLE_TOL,
                format!("fbf {a:.10}, shooting (40000 steps) {b:.10}, diff {d:.2e} (tol {ORACLE_TOL:e})"),
            );
        }
        (_, Err(e)) => log.criterion(
            "5 classical Blasius reduction (P=1)",
            false,
            format!("oracle failed: {e}"),
        ),
        (None, _) => log.criterion(
            "5 classical Blasius reduction (P=1)",
            false,
            "no FBF solve".into(),
        ),
    }
}

fn harmonic_error(intervals: usize) -> Option<f64> {
    let p = OdeBvpProblem::new(
        2,
        |_t, u: &[f64], out: &mut [f64]| {
            out[0] = u[1];
            out[1] = -u[0];
        },
        |a: &[f64], b: &[f64], out: &mut [f64]| {
            out[0] = a[0];
            out[1] = b[0] - 1f64.sin();
        },
    );
    let g =
        SolutionGrid::from_fn(Mesh::uniform(intervals + 1).ok()?, 2, |_| vec![0.0, 0.0]).ok()?;
    let (sol, rep) = newton_solve(&p, &g, &SolverConfig::default()).ok()?;
    rep.converged.then(|| {
        sol.mesh()
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &t)| (sol.state(i)[0] - t.sin()).abs())
            .fold(0.0, f64::max)
    })
}

fn fd_jacobian_gap() -> Option<(f64, f64)> {
    let step = SolverConfig::<f64>::default().fd_jacobian_step;
    let p = build_problem(&ExtendedBlasiusSpec::new(Family::Problem1, 1.5, 0.1)).ok()?;
    let g = SolutionGrid::from_fn(Mesh::uniform(3).ok()?, 4, |t| {
        vec![0.4 * t, 0.2 + 0.8 * t, 0.5 - 0.3 * t, 3.0]
    })
    .ok()?;
    let fwd = finite_difference_jacobian(&p, &g, step).ok()?;
    let size = g.states().len();
    let mut worst = 0.0f64;
    for j in 0..size {
        let h = step / 10.0 * (1.0 + g.states()[j].abs());
        let shifted = |sign: f64| {
            let mut s = g.states().to_vec();
            s[j] += sign * h;
            assemble_residual(&p, &SolutionGrid::new(g.mesh().clone(), 4, s).unwrap()).unwrap()
        };
        let (rp, rm) = (shifted(1.0), shifted(-1.0));
        for i in 0..size {
            worst = worst.max((fwd.get(i, j) - (rp[i] - rm[i]) / (2.0 * h)).abs());
        }
    }
    Some((worst, 10.0 * step))
}

fn properties(log: &mut Log, all: &[Solved], sweeps: &[(&str, &[SweepRow<f64>])]) {
    let cfg = SolverConfig::<f64>::default();
    let mut checks: Vec<(&str, bool, String)> = Vec::new();

    let spread = all
        .iter()
        .map(|s| s.result.free_boundary_spread())
        .fold(0.0, f64::max);
    checks.push((
        "free-boundary constancy",
        spread <= 10.0 * cfg.newton_tol,
        format!(
            "max u4 spread {spread:.1e} over {} solves (tol {:.0e})",
            all.len(),
            10.0 * cfg.newton_tol
        ),
    ));

    let bc = all
        .iter()
        .map(|s| {
            let g = &s.result.grid;
            let (a, b) = (g.state(0), g.state(g.len() - 1));
            a[0].abs()
                .max(a[1].abs())
                .max((b[1] - 1.0).abs())
                .max((b[2] - s.spec.epsilon).abs())
        })
        .fold(0.0, f64::max);
    checks.push((
        "boundary conditions",
        bc <= cfg.newton_tol,
        format!("max BC residual {bc:.1e} (tol {:.0e})", cfg.newton_tol),
    ));

    let mono = sweeps
        .iter()
        .all(|(_, rows)| rows.windows(2).all(|w| w[1].eta_eps > w[0].eta_eps));
    checks.push((
        "eta monotone in eps",
        mono,
        format!(
            "{} sweeps: {}",
            sweeps.len(),
            sweeps.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")
        ),
    ));

    let order = harmonic_error(8)
        .zip(harmonic_error(16))
        .map(|(a, b)| a / b);
    checks.push((
        "collocation order",
        order.is_some_and(|r| r >= ORDER_FACTOR),
        format!(
            "error ratio 8 vs 16 intervals {:.2} (need {ORDER_FACTOR})",
            order.unwrap_or(f64::NAN)
        ),
    ));

    let jac = fd_jacobian_gap();
    checks.push((
        "FD Jacobian vs central differences",
        jac.is_some_and(|(w, t)| w <= t),
        match jac {
            Some((w, t)) => format!("max gap {w:.1e} (tol {t:.0e})"),
            None => "could not evaluate".into(),
        },
    ));

    let plan = SweepPlan::new(
        ExtendedBlasiusSpec::new(Family::Problem1, 1.5, 0.1),
        DEFAULT_EPSILONS.to_vec(),
    );
    let same = match (run_sweep(&plan), run_sweep(&plan)) {
        (Ok(a), Ok(b)) => {
            a.iter().zip(&b).all(|(x, y)| {
                x.eta_eps.to_bits() == y.eta_eps.to_bits()
                    && x.fpp0.to_bits() == y.fpp0.to_bits()
                    && x.newton_iterations == y.newton_iterations
                    && x.mesh_points == y.mesh_points
            }) && a.len() == b.len()
        }
        _ => false,
    };
    checks.push((
        "sweep determinism",
        same,
        "two runs of the table sweep compared bitwise".into(),
    ));

    let pass = checks.iter().all(|c| c.1);
    for (name, ok, d) in &checks {
        detail(format!("{} {name}: {d}", if *ok { "ok  " } else { "MISS" }));
    }
    log.criterion(
        "6 property suites",
        pass,
        format!(
            "{}/{} properties hold",
            checks.iter().filter(|c| c.1).count(),
            checks.len()
        ),
    );
}

fn honesty(log: &mut Log, all: &[Solved]) {
    let cfg = SolverConfig::<f64>::default();
    let mut worst = (0.0f64, String::new());
    let mut ok = true;
    for s in all {
        let r = build_problem(&s.spec).and_then(|p| {
            let res = assemble_residual(&p, &s.result.grid)?;
            let def = interval_defects(&p, &s.result.grid)?;
            Ok((max_norm(&res), def.into_iter().fold(0.0, f64::max)))
        });
        match r {
            Ok((res, def)) => {
                ok &=
                    s.result.report.converged && res <= cfg.residual_tol && def <= cfg.residual_tol;
                if res > worst.0 {
                    worst = (res, s.label.clone());
                }
            }
            Err(e) => {
                ok = false;
                detail(format!("{}: re-evaluation failed: {e}", s.label));
            }
        }
    }
    log.criterion(
        "7 solver honesty",
        ok,
        format!(
            "{} converged solves re-evaluated; worst residual {:.1e} ({}) vs tol {:.0e}",
            all.len(),
            worst.0,
            worst.1,
            cfg.residual_tol
        ),
    );
}

fn main() -> ExitCode {
    let mut log = Log { failed: 0 };
    let mut all = Vec::new();

    let (rows, shifted) = reference_table(&mut log, &mut all);
    limit_value(&mut log, &rows);
    spot_values(&mut log, &mut all);
    oracle_agreement(&mut log, &mut all);
    blasius_reduction(&mut log, &all);

    let half = chained(Family::Problem2, 0.5, &[1e-2, 1e-4, 1e-6], &mut all);
    let blasius = chained(
        Family::Problem2,
        1.0,
        &[0.1, 1e-2, 1e-4, 1e-6, 1e-8],
        &mut all,
    );
    properties(
        &mut log,
        &all,
        &[
            ("table", &rows),
            ("shifted table", &shifted),
            ("P2 P=1/2", &half),
            ("P2 P=1", &blasius),
        ],
    );
    honesty(&mut log, &all);

    println!("{} of 7 criteria failed", log.failed);
    if log.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
