//! `fbf-blasius` command implementations.

pub mod args;
pub mod svg;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use fbf_blasius::oracle::{solve_truncated, OracleError, ShootingConfig};
use fbf_blasius::problems::{solve_fbf, ExtendedBlasiusSpec, Family, ProblemError};
use fbf_blasius::sweep::{
    agreeing_decimals, convergence_summary, run_sweep, SweepError, SweepPlan, DEFAULT_EPSILONS,
};
use fbf_blasius::{RhsForm, SolverConfig, SweepRow, WarmStartPolicy};
use thiserror::Error;

use args::{Command, Common, CompareArgs, FamilyArg, Format, PlotArgs, WarmStart};
use table::{significant, Record, SweepDocument};

pub const COMPARE_EPSILON: f64 = 1e-8;
const STDOUT_DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Oracle(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Oracle(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

fn io_error(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    match path {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(format!("cannot write output: {e}")),
    }
}

fn problem_error(e: ProblemError<f64>) -> CliError {
    match e {
        ProblemError::ParameterDomain(m) => CliError::Usage(m),
        other => CliError::Solver(format!("solver failure: {other}")),
    }
}

fn oracle_error(e: OracleError<f64>) -> CliError {
    match e {
        OracleError::ParameterDomain(m) | OracleError::InvalidConfig(m) => CliError::Usage(m),
        other => CliError::Oracle(format!("oracle failure: {other}")),
    }
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::One => Family::Problem1,
        FamilyArg::Two => Family::Problem2,
    }
}

fn solver_config(c: &Common) -> Result<SolverConfig<f64>, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = c.newton_tol {
        cfg.newton_tol = t;
    }
    if let Some(t) = c.residual_tol {
        cfg.residual_tol = t;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Spec with bounds already checked; `epsilon` is the first list entry or
/// the given fallback.
fn spec(c: &Common, epsilon: f64) -> Result<ExtendedBlasiusSpec<f64>, CliError> {
    let form = if c.paper_literal_rhs {
        RhsForm::Literal
    } else {
        RhsForm::Corrected
    };
    let spec = ExtendedBlasiusSpec::new(family(c.family), c.p, epsilon).with_rhs_form(form);
    spec.validate().map_err(problem_error)?;
    Ok(spec)
}

fn single_epsilon(c: &Common, command: &str) -> Result<f64, CliError> {
    match c.eps.as_slice() {
        [e] => Ok(*e),
        [] => Err(CliError::Usage(format!("{command} requires --eps <float>"))),
        _ => Err(CliError::Usage(format!(
            "{command} takes a single --eps value"
        ))),
    }
}

fn format_for(c: &Common, allowed: &[Format], command: &str) -> Result<Format, CliError> {
    let f = c.format.unwrap_or(allowed[0]);
    if !allowed.contains(&f) {
        return Err(CliError::Usage(
            format!("{command} does not support --format {f:?}").to_lowercase(),
        ));
    }
    Ok(f)
}

/// Writes `body` to `--out`, or to `stdout` when no path was given.
fn emit(
    c: &Common,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match &c.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(Some(path), e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).map_err(|e| io_error(Some(path), e))?;
            w.flush().map_err(|e| io_error(Some(path), e))
        }
        None => body(stdout).map_err(|e| io_error(None, e)),
    }
}

fn json<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

fn say(stdout: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(stdout, "{line}").map_err(|e| io_error(None, e))
}

/// Runs one command, writing human-readable lines to `stdout`.
pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Solve(c) => cmd_solve(c, stdout),
        Command::Sweep(c) => cmd_sweep(c, stdout),
        Command::Compare(c) => cmd_compare(c, stdout),
        Command::Plot(c) => cmd_plot(c, stdout),
    }
}

fn cmd_solve(c: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = format_for(c, &[Format::Csv, Format::Json], "solve")?;
    let eps = single_epsilon(c, "solve")?;
    let spec = spec(c, eps)?;
    let cfg = solver_config(c)?;
    let res = solve_fbf(&spec, &cfg, None).map_err(problem_error)?;
    let record = Record {
        epsilon: eps,
        eta_eps: res.eta_eps,
        fpp0: res.fpp0,
        newton_iterations: res.report.newton_iterations,
        mesh_points: res.report.final_mesh_points,
    };
    say(
        stdout,
        format!("eta_eps = {}", significant(res.eta_eps, STDOUT_DIGITS)),
    )?;
    say(
        stdout,
        format!("fpp0 = {}", significant(res.fpp0, STDOUT_DIGITS)),
    )?;
    emit(c, stdout, |w| match format {
        Format::Json => json(w, &record),
        _ => table::write_csv(w, &[record], None),
    })
}

fn cmd_sweep(c: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = format_for(c, &[Format::Csv, Format::Json], "sweep")?;
    let epsilons = if c.eps.is_empty() {
        DEFAULT_EPSILONS.to_vec()
    } else {
        c.eps.clone()
    };
    let mut plan = SweepPlan::new(spec(c, epsilons[0])?, epsilons);
    plan.config = solver_config(c)?;
    plan.warm_start_policy = match c.warm_start {
        WarmStart::Chain => WarmStartPolicy::Chain,
        WarmStart::Cold => WarmStartPolicy::Cold,
    };
    plan.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let (rows, failure): (Vec<SweepRow<f64>>, Option<(f64, String)>) = match run_sweep(&plan) {
        Ok(rows) => (rows, None),
        Err(SweepError::SolveFailed {
            completed,
            epsilon,
            source,
        }) => (completed, Some((epsilon, source.to_string()))),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let records: Vec<Record> = rows.iter().copied().map(Record::from).collect();
    let trailer = failure
        .as_ref()
        .map(|(e, msg)| format!("solve failed at epsilon={e:e}: {msg}"));
    emit(c, stdout, |w| match format {
        Format::Json => json(
            w,
            &SweepDocument {
                rows: records.clone(),
                failed_epsilon: failure.as_ref().map(|f| f.0),
                error: failure.as_ref().map(|f| f.1.clone()),
            },
        ),
        _ => table::write_csv(w, &records, trailer.as_deref()),
    })?;

    for r in &rows {
        say(
            stdout,
            format!(
                "eps = {:e}  eta_eps = {}  fpp0 = {}",
                r.epsilon,
                significant(r.eta_eps, STDOUT_DIGITS),
                significant(r.fpp0, STDOUT_DIGITS)
            ),
        )?;
    }
    match convergence_summary(&rows) {
        Ok((limit, digits)) => say(
            stdout,
            format!(
                "fpp0 limit estimate = {} (last two rows agree to {digits} decimals)",
                significant(limit, STDOUT_DIGITS)
            ),
        )?,
        Err(e) if failure.is_none() => say(stdout, format!("no convergence summary: {e}"))?,
        Err(_) => {}
    }
    match failure {
        Some((e, msg)) => Err(CliError::Solver(format!(
            "solve failed at epsilon={e:e}: {msg}"
        ))),
        None => Ok(()),
    }
}

#[derive(serde::Serialize)]
struct Comparison {
    family: String,
    p: f64,
    epsilon: f64,
    eta_infinity: f64,
    fbf_fpp0: f64,
    shooting_fpp0: f64,
    abs_difference: f64,
    agreeing_decimals: u32,
}

fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = &args.common;
    let format = format_for(c, &[Format::Csv, Format::Json], "compare")?;
    if !c.eps.is_empty() {
        return Err(CliError::Usage(format!(
            "compare always uses epsilon = {COMPARE_EPSILON:e}; drop --eps"
        )));
    }
    let spec = spec(c, COMPARE_EPSILON)?;
    let cfg = solver_config(c)?;
    let fbf = solve_fbf(&spec, &cfg, None).map_err(problem_error)?.fpp0;
    let shooting_cfg = ShootingConfig {
        eta_infinity: args.eta_inf,
        ..ShootingConfig::default()
    };
    let shot =
        solve_truncated(spec.family, spec.p_exponent, &shooting_cfg).map_err(oracle_error)?;
    let cmp = Comparison {
        family: spec.family.to_string(),
        p: spec.p_exponent,
        epsilon: COMPARE_EPSILON,
        eta_infinity: args.eta_inf,
        fbf_fpp0: fbf,
        shooting_fpp0: shot,
        abs_difference: (fbf - shot).abs(),
        agreeing_decimals: agreeing_decimals(fbf, shot),
    };
    say(
        stdout,
        format!(
            "fbf fpp0 (eps = {COMPARE_EPSILON:e}) = {}",
            significant(fbf, STDOUT_DIGITS)
        ),
    )?;
    say(
        stdout,
        format!(
            "shooting fpp0 (eta_inf = {}) = {}",
            args.eta_inf,
            significant(shot, STDOUT_DIGITS)
        ),
    )?;
    say(
        stdout,
        format!("abs difference = {:.3e}", cmp.abs_difference),
    )?;
    say(
        stdout,
        format!("agreeing decimals = {}", cmp.agreeing_decimals),
    )?;
    if c.out.is_none() {
        return Ok(());
    }
    emit(c, stdout, |w| match format {
        Format::Json => json(w, &cmp),
        _ => {
            writeln!(w, "family,p,epsilon,eta_infinity,fbf_fpp0,shooting_fpp0,abs_difference,agreeing_decimals")?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                cmp.family,
                table::full_precision(cmp.p),
                table::full_precision(cmp.epsilon),
                table::full_precision(cmp.eta_infinity),
                table::full_precision(cmp.fbf_fpp0),
                table::full_precision(cmp.shooting_fpp0),
                table::full_precision(cmp.abs_difference),
                cmp.agreeing_decimals
            )
        }
    })
}

fn cmd_plot(args: &PlotArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = &args.common;
    format_for(c, &[Format::Svg], "plot")?;
    let eps = single_epsilon(c, "plot")?;
    if c.out.is_none() {
        return Err(CliError::Usage("plot requires --out <path>".into()));
    }
    if args.components.is_empty() {
        return Err(CliError::Usage(
            "--components must name at least one curve".into(),
        ));
    }
    let spec = spec(c, eps)?;
    let cfg = solver_config(c)?;
    let res = solve_fbf(&spec, &cfg, None).map_err(problem_error)?;
    let mut components = Vec::new();
    for &k in &args.components {
        if !components.contains(&k) {
            components.push(k);
        }
    }
    let title = format!(
        "Problem {}, P = {}, \u{3b5} = {:e}",
        spec.family, spec.p_exponent, eps
    );
    let doc = svg::render(&res.samples, &components, &title);
    say(
        stdout,
        format!("eta_eps = {}", significant(res.eta_eps, STDOUT_DIGITS)),
    )?;
    say(
        stdout,
        format!("fpp0 = {}", significant(res.fpp0, STDOUT_DIGITS)),
    )?;
    emit(c, stdout, |w| w.write_all(doc.as_bytes()))
}
