//! Orchestration: potential, eikonal fields, solves, functionals and
//! verification in dependency order, one record per requested check.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eikonal::{
    dyadic_annuli, field_from_profile, fit_decay, lambda_scaling_ratio, DecayFit, EikonalField, FieldName,
    FieldOptions, Normalization,
};
use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::helmholtz::{
    assemble, epsilon_sweep, greens_reference, solve, HelmholtzProblem, Method, SolutionField, SolveOptions,
};
use crate::potential::{make_potential, Potential, PotentialSpec};
use crate::verification::{
    apriori_ratio, key_identity_residual, lemma2_residuals, theorem_ratio, Cutoff, Multiplier,
};

use super::config::{CheckKind, ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be computed; the message says why.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub extent: f64,
    pub spacing: f64,
    pub shape: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub potential: PotentialSpec,
    pub lambdas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub radii: Vec<f64>,
    pub grid: GridSummary,
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
}

impl Summary {
    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == id)
    }

    /// Deterministic pretty JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A plot-ready table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub id: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct FieldDump {
    pub name: String,
    pub grid: Grid3,
    pub values: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub summary: Summary,
    pub curves: Vec<Curve>,
    pub fields: Vec<FieldDump>,
}

impl ReportBundle {
    pub fn curve(&self, id: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.id == id)
    }
}

/// Label used in curve ids and dump names.
fn tag(lambda: f64, epsilon: Option<f64>) -> String {
    match epsilon {
        Some(e) => format!("lambda{lambda}_eps{e}"),
        None => format!("lambda{lambda}"),
    }
}

struct Job {
    lambda: f64,
    epsilon: f64,
    problem: HelmholtzProblem,
    field: std::result::Result<EikonalField, String>,
    solution: std::result::Result<SolutionField, String>,
}

fn solve_options(config: &ExperimentConfig) -> SolveOptions {
    SolveOptions {
        tolerance: config.tolerances.solver,
        max_iterations: config.tolerances.max_iterations,
        method: Method::Auto,
    }
}

fn problem_for(config: &ExperimentConfig, pot: &Potential, lambda: f64, epsilon: f64) -> Result<HelmholtzProblem> {
    let grid = config.grid.grid();
    let source = config.source.bump().sample(&grid);
    HelmholtzProblem::new(lambda, epsilon, pot.clone(), source, grid, config.boundary.boundary(lambda))
}

/// Eikonal field used by the identity and theorem checks.
pub fn solve_field(pot: &Potential, lambda: f64, grid: &Grid3) -> Result<EikonalField> {
    if pot.is_zero() {
        return Ok(EikonalField::spherical(grid));
    }
    if !pot.is_radial() {
        return Err(Error::NonRadial(pot.spec().family.clone()));
    }
    field_from_profile(pot, lambda, grid, &FieldOptions { core_radius: None, normalization: Normalization::Origin })
}

fn build_jobs(config: &ExperimentConfig, pot: &Potential) -> Result<Vec<Job>> {
    let pairs: Vec<(f64, f64)> =
        config.lambdas.iter().flat_map(|&l| config.epsilons.iter().map(move |&e| (l, e))).collect();
    let opts = solve_options(config);
    pairs
        .into_par_iter()
        .map(|(lambda, epsilon)| {
            let problem = problem_for(config, pot, lambda, epsilon)?;
            let field = solve_field(pot, lambda, &problem.grid).map_err(|e| e.to_string());
            let solution = assemble(&problem)
                .and_then(|op| solve(&op, &problem.source, &opts))
                .map_err(|e| e.to_string());
            Ok(Job { lambda, epsilon, problem, field, solution })
        })
        .collect()
}

fn record(kind: CheckKind, pass: bool, errors: &[String], details: Value) -> CheckRecord {
    let status = if !errors.is_empty() {
        Status::Error
    } else if pass {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckRecord {
        check: kind.id().to_string(),
        status,
        message: if errors.is_empty() { None } else { Some(errors.join("; ")) },
        details,
    }
}

/// Decay fits of every geometric field at one `λ`.
pub fn decay_fits(config: &ExperimentConfig, pot: &Potential, lambda: f64) -> Result<Vec<DecayFit>> {
    let d = &config.decay;
    let grid = Grid3::centered(d.half_cells, d.spacing);
    let field = field_from_profile(
        pot,
        lambda,
        &grid,
        &FieldOptions { core_radius: None, normalization: Normalization::Asymptotic },
    )?;
    let annuli = dyadic_annuli(d.r_min, d.r_max);
    let delta = pot.spec().delta;
    FieldName::ALL
        .iter()
        .map(|&name| {
            let tol = if name == FieldName::GradLaplaceG {
                config.tolerances.grad_laplace_exponent
            } else {
                config.tolerances.decay_exponent
            };
            fit_decay(name.id(), &field.samples(name), lambda, name.expected_rate(delta), &annuli, tol)
        })
        .collect()
}

fn decay_curves(fits: &[DecayFit], lambda: f64) -> Vec<Curve> {
    fits.iter()
        .filter(|f| !f.identically_zero)
        .map(|f| Curve {
            id: format!("loglog_{}_{}", f.field, tag(lambda, None)),
            columns: vec!["log_r".into(), "log_sup".into()],
            rows: f.midpoints.iter().zip(&f.sups).map(|(m, s)| vec![m.ln(), s.ln()]).collect(),
        })
        .collect()
}

fn run_decay(config: &ExperimentConfig, pot: &Potential, curves: &mut Vec<Curve>) -> CheckRecord {
    let per_lambda: Vec<(f64, Result<Vec<DecayFit>>)> =
        config.lambdas.par_iter().map(|&l| (l, decay_fits(config, pot, l))).collect();
    let mut errors = Vec::new();
    let mut pass = true;
    let mut entries = Vec::new();
    let mut dr_fits = Vec::new();
    for (lambda, res) in per_lambda {
        match res {
            Ok(fits) => {
                pass &= fits.iter().all(|f| f.bounded);
                curves.extend(decay_curves(&fits, lambda));
                if let Some(f) = fits.iter().find(|f| f.field == FieldName::DrG.id()) {
                    dr_fits.push((lambda, f.clone()));
                }
                entries.push(json!({ "lambda": lambda, "fits": serde_json::to_value(&fits).unwrap_or(Value::Null) }));
            }
            Err(e) => errors.push(format!("lambda = {lambda}: {e}")),
        }
    }
    let mut scaling = Value::Null;
    if dr_fits.len() >= 2 {
        dr_fits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (lo, hi) = (&dr_fits[0], &dr_fits[dr_fits.len() - 1]);
        if !lo.1.identically_zero && !hi.1.identically_zero {
            let measured = lambda_scaling_ratio(&lo.1, &hi.1);
            let expected = lo.0 / hi.0;
            let within = (measured / expected - 1.0).abs() <= config.tolerances.lambda_scaling;
            pass &= within;
            scaling = json!({
                "lambda_low": lo.0, "lambda_high": hi.0,
                "measured": measured, "expected": expected, "within": within,
            });
        }
    }
    record(CheckKind::Decay, pass, &errors, json!({ "per_lambda": entries, "lambda_scaling": scaling }))
}

fn job_label(job: &Job) -> Value {
    json!({ "lambda": job.lambda, "epsilon": job.epsilon })
}

fn with_solution<'a>(job: &'a Job) -> std::result::Result<(&'a SolutionField, &'a EikonalField), String> {
    let s = job.solution.as_ref().map_err(|e| format!("solve failed: {e}"))?;
    let f = job.field.as_ref().map_err(|e| format!("eikonal field failed: {e}"))?;
    Ok((s, f))
}

fn run_identities(config: &ExperimentConfig, jobs: &[Job]) -> CheckRecord {
    let id = &config.identities;
    let mut errors = Vec::new();
    let mut pass = true;
    let mut entries = Vec::new();
    for job in jobs {
        let out = (|| -> std::result::Result<Value, String> {
            let (sol, field) = with_solution(job)?;
            let cut = Cutoff::new(id.cutoff_inner, id.cutoff_outer).map_err(|e| e.to_string())?;
            let p = &job.problem;
            let l2 = lemma2_residuals(&sol.u, &sol.grad, p, field, &Multiplier::phi(cut)).map_err(|e| e.to_string())?;
            let key = key_identity_residual(&sol.u, &sol.grad, p, field, &Multiplier::smooth_quadratic(cut))
                .map_err(|e| e.to_string())?;
            let kinked = key_identity_residual(
                &sol.u,
                &sol.grad,
                p,
                field,
                &Multiplier::proposition(id.switch_radius, cut),
            )
            .map_err(|e| e.to_string())?;
            let h = p.grid.spacing;
            let bound = config.tolerances.identity_factor * (h * h + config.tolerances.solver);
            let ok = l2.real.normalized <= bound && l2.imaginary.normalized <= bound && key.normalized <= bound;
            pass &= ok;
            Ok(json!({
                "lambda": job.lambda,
                "epsilon": job.epsilon,
                "bound": bound,
                "passed": ok,
                "lemma2_real": l2.real,
                "lemma2_imaginary": l2.imaginary,
                "key_identity": key,
                "key_identity_kinked": kinked,
            }))
        })();
        match out {
            Ok(v) => entries.push(v),
            Err(e) => {
                errors.push(format!("lambda = {}, epsilon = {}: {e}", job.lambda, job.epsilon));
                entries.push(job_label(job));
            }
        }
    }
    record(CheckKind::Identities, pass, &errors, json!({ "runs": entries }))
}

fn run_theorem(config: &ExperimentConfig, jobs: &[Job], curves: &mut Vec<Curve>) -> CheckRecord {
    let mut errors = Vec::new();
    let mut entries = Vec::new();
    let mut sups: Vec<(f64, f64, f64)> = Vec::new();
    let single = jobs.len() == 1;
    for job in jobs {
        let out = with_solution(job).and_then(|(sol, field)| {
            theorem_ratio(&sol.u, &sol.grad, &job.problem, field, &config.radii).map_err(|e| e.to_string())
        });
        match out {
            Ok(rep) => {
                let id = if single {
                    "ratio_vs_R".to_string()
                } else {
                    format!("ratio_vs_R_{}", tag(job.lambda, Some(job.epsilon)))
                };
                curves.push(Curve {
                    id,
                    columns: vec!["R".into(), "lhs".into(), "ratio".into()],
                    rows: rep.radii.iter().zip(&rep.lhs).zip(&rep.ratios).map(|((r, l), q)| vec![*r, *l, *q]).collect(),
                });
                sups.push((job.lambda, job.epsilon, rep.sup_ratio));
                entries.push(serde_json::to_value(&rep).unwrap_or(Value::Null));
            }
            Err(e) => {
                errors.push(format!("lambda = {}, epsilon = {}: {e}", job.lambda, job.epsilon));
                entries.push(job_label(job));
            }
        }
    }
    let finite = sups.iter().all(|s| s.2.is_finite() && s.2 >= 0.0);
    let mut stability = Vec::new();
    let mut stable = true;
    for &lambda in &config.lambdas {
        let mut row: Vec<(f64, f64)> = sups.iter().filter(|s| s.0 == lambda).map(|s| (s.1, s.2)).collect();
        row.sort_by(|a, b| b.0.total_cmp(&a.0));
        for w in row.windows(2) {
            let change = if w[0].1 > 0.0 { (w[1].1 / w[0].1 - 1.0).abs() } else { 0.0 };
            let ok = change <= config.tolerances.ratio_stability;
            stable &= ok;
            stability.push(json!({ "lambda": lambda, "epsilon_from": w[0].0, "epsilon_to": w[1].0, "relative_change": change, "within": ok }));
        }
    }
    let sup_overall = sups.iter().map(|s| s.2).fold(0.0, f64::max);
    record(
        CheckKind::Theorem,
        finite && stable,
        &errors,
        json!({ "runs": entries, "sup_ratio": sup_overall, "epsilon_stability": stability }),
    )
}

fn run_apriori(jobs: &[Job]) -> CheckRecord {
    let mut errors = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for job in jobs {
        let out = job
            .solution
            .as_ref()
            .map_err(|e| format!("solve failed: {e}"))
            .and_then(|sol| apriori_ratio(&sol.u, &sol.grad, &job.problem).map_err(|e| e.to_string()));
        match out {
            Ok(rep) => {
                pass &= rep.ratio.is_some_and(f64::is_finite);
                entries.push(json!({ "lambda": job.lambda, "epsilon": job.epsilon, "report": rep }));
            }
            Err(e) => {
                errors.push(format!("lambda = {}, epsilon = {}: {e}", job.lambda, job.epsilon));
                entries.push(job_label(job));
            }
        }
    }
    let ratios: Vec<f64> = entries
        .iter()
        .filter_map(|e| e.pointer("/report/ratio").and_then(Value::as_f64))
        .collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    record(CheckKind::Apriori, pass, &errors, json!({ "runs": entries, "max_ratio": max }))
}

/// Weighted relative distance of `u` from the free-space convolution at `ε = 0` over the trusted ball.
pub fn limit_oracle_error(problem: &HelmholtzProblem, u: &[C64]) -> Result<f64> {
    let grid = &problem.grid;
    let trusted = problem.trusted_radius();
    let targets: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius_at(i) <= trusted).collect();
    let reference = greens_reference(&problem.source, problem.lambda, 0.0, grid, &targets)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &i) in targets.iter().enumerate() {
        num += (u[i] - reference[j]).norm_sqr();
        den += reference[j].norm_sqr();
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}

fn run_sweep(config: &ExperimentConfig, pot: &Potential, curves: &mut Vec<Curve>) -> CheckRecord {
    let opts = solve_options(config);
    let per_lambda: Vec<(f64, Result<(crate::helmholtz::SweepSummary, Option<f64>)>)> = config
        .lambdas
        .par_iter()
        .map(|&lambda| {
            let out = problem_for(config, pot, lambda, config.epsilons[0]).and_then(|p| {
                let rep = epsilon_sweep(&p, &config.epsilons, &opts)?;
                let oracle = match (&rep.extrapolated, pot.is_zero()) {
                    (Some(u), true) => Some(limit_oracle_error(&p, u)?),
                    _ => None,
                };
                Ok((rep.summary, oracle))
            });
            (lambda, out)
        })
        .collect();
    let mut errors = Vec::new();
    let mut entries = Vec::new();
    let mut pass = true;
    for (lambda, res) in per_lambda {
        match res {
            Ok((summary, oracle)) => {
                let oracle_ok = oracle.is_none_or(|e| e <= config.tolerances.limit_oracle);
                pass &= summary.monotone && oracle_ok;
                curves.push(Curve {
                    id: format!("eps_convergence_{}", tag(lambda, None)),
                    columns: vec!["epsilon".into(), "difference".into()],
                    rows: summary.epsilons[1..].iter().zip(&summary.differences).map(|(e, d)| vec![*e, *d]).collect(),
                });
                entries.push(json!({ "lambda": lambda, "summary": summary, "limit_oracle_error": oracle, "limit_within": oracle_ok }));
            }
            Err(e) => errors.push(format!("lambda = {lambda}: {e}")),
        }
    }
    record(CheckKind::Sweep, pass, &errors, json!({ "per_lambda": entries }))
}

/// Runs every requested check. Configuration problems are reported before any
/// computation; failures inside one check never abort its siblings.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    let pot = make_potential(&config.potential)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| run_inner(config, &pot))
}

fn run_inner(config: &ExperimentConfig, pot: &Potential) -> Result<ReportBundle> {
    let checks = config.expanded_checks();
    let jobs = if config.needs_solves() { build_jobs(config, pot)? } else { Vec::new() };
    let mut curves = Vec::new();
    let mut records = Vec::with_capacity(checks.len());
    for &kind in &checks {
        let rec = match kind {
            CheckKind::Decay => run_decay(config, pot, &mut curves),
            CheckKind::Identities => run_identities(config, &jobs),
            CheckKind::Theorem => run_theorem(config, &jobs, &mut curves),
            CheckKind::Apriori => run_apriori(&jobs),
            CheckKind::Sweep => run_sweep(config, pot, &mut curves),
            CheckKind::All => unreachable!("expanded"),
        };
        records.push(rec);
    }
    let mut fields = Vec::new();
    if config.dump_fields {
        for job in &jobs {
            if let Ok(sol) = &job.solution {
                fields.push(FieldDump {
                    name: format!("u_{}", tag(job.lambda, Some(job.epsilon))),
                    grid: job.problem.grid,
                    values: sol.u.clone(),
                });
            }
        }
    }
    let grid = config.grid.grid();
    let all_passed = records.iter().all(|r| r.status == Status::Pass);
    Ok(ReportBundle {
        summary: Summary {
            schema_version: SCHEMA_VERSION,
            potential: config.potential.clone(),
            lambdas: config.lambdas.clone(),
            epsilons: config.epsilons.clone(),
            radii: config.radii.clone(),
            grid: GridSummary { extent: config.grid.extent, spacing: grid.spacing, shape: grid.shape },
            checks: records,
            all_passed,
        },
        curves,
        fields,
    })
}
