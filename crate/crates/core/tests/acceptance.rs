//! Acceptance criteria 1-9. Each test prints one `criterion N: PASS|FAIL` line
//! on stderr (visible without `--nocapture`) and then asserts it.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use num_complex::Complex64 as C64;
use sommerfeld_core::eikonal::{
    dyadic_annuli, field_from_profile, fit_decay, lambda_scaling_ratio, lemma1_residual, solve_eikonal_grid,
    solve_eikonal_radial, EikonalField, FieldName, FieldOptions, Normalization,
};
use sommerfeld_core::grid::norm3;
use sommerfeld_core::harness::{run_experiment, ExperimentConfig};
use sommerfeld_core::helmholtz::{
    assemble, epsilon_sweep, greens_reference, solve, wavelength, Boundary, Bump, HelmholtzProblem, SolutionField,
    SolveOptions,
};
use sommerfeld_core::norms::{radiation_functional_analytic, ScalarField3, SphereQuadrature, SphericalGeometry};
use sommerfeld_core::potential::{make_potential, Potential, PotentialSpec};
use sommerfeld_core::verification::{
    apriori_ratio, key_identity_residual, lemma2_residuals, theorem_ratio, Cutoff, Multiplier,
};
use sommerfeld_core::Grid3;

// criterion 1
const FREE_PROFILE_TOL: f64 = 1e-12;
const FMM_MAX_REL: f64 = 0.02;
const FMM_HALVING: (f64, f64) = (1.7, 2.3);
// criterion 2
const LEMMA1_RATIO: (f64, f64) = (3.5, 4.5);
const LEMMA1_FREE_AGREEMENT: f64 = 1e-9;
// criterion 3
const DECAY_SLACK: f64 = 0.3;
const LAMBDA_SCALING_TOL: f64 = 0.3;
// criterion 4
const SOLVER_ORACLE_MAX: f64 = 0.02;
const SOLVER_ORDER_RATIO: (f64, f64) = (3.5, 4.5);
const FOUR_PI_TOL: f64 = 0.01;
// criterion 5
const IDENTITY_FACTOR: f64 = 10.0;
const IDENTITY_ORDER: (f64, f64) = (1.75, 2.5);
const SPHERICAL_AGREEMENT: f64 = 1e-9;
// criterion 6
const RATIO_STABILITY: f64 = 0.2;
// criterion 7
const APRIORI_GROWTH: f64 = 2.0;
const APRIORI_SCALE_INVARIANCE: f64 = 1e-9;
// criterion 8
const LIMIT_ORACLE_MAX: f64 = 0.03;
// criterion 9
const SUITE_BUDGET_SECS: f64 = 900.0;

const SOLVER_TOL: f64 = 1e-8;

static SERIAL: Mutex<()> = Mutex::new(());

/// Criteria run one at a time so timings and memory are not shared.
fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, pass: bool, detail: &str) {
    let line = format!("criterion {id}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn long_range(mu: f64) -> Potential {
    make_potential(&PotentialSpec::long_range(mu, 0.5)).unwrap()
}

fn zero() -> Potential {
    make_potential(&PotentialSpec::zero()).unwrap()
}

fn solve_problem(p: &HelmholtzProblem) -> SolutionField {
    let opts = SolveOptions { tolerance: SOLVER_TOL, ..SolveOptions::default() };
    solve(&assemble(p).unwrap(), &p.source, &opts).unwrap()
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn in_range(v: f64, (lo, hi): (f64, f64)) -> bool {
    v >= lo && v <= hi
}

#[test]
fn criterion_1_eikonal_correctness() {
    let _serial = serial();
    let free = solve_eikonal_radial(&zero(), 4.0, 20.0, 2001).unwrap();
    let free_err = (1..=400).map(|j| 0.05 * j as f64).map(|r| (free.k(r) - r).abs()).fold(0.0, f64::max);

    let pot = long_range(0.1);
    let r_max = 8.0;
    let profile = solve_eikonal_radial(&pot, 4.0, 2.0 * r_max, 4001).unwrap();
    let max_rel = |cells: usize| {
        let grid = Grid3::octant(cells, r_max / cells as f64);
        let k = solve_eikonal_grid(&pot, 4.0, &grid).unwrap();
        (0..grid.len())
            .filter(|&i| grid.radius_at(i) > 0.0)
            .map(|i| {
                let exact = profile.k(grid.radius_at(i));
                (k[i] - exact).abs() / exact
            })
            .fold(0.0, f64::max)
    };
    let t = Instant::now();
    let e64 = max_rel(64);
    let secs64 = t.elapsed().as_secs_f64();
    let e128 = max_rel(128);
    let halving = e64 / e128;

    let pass = free_err <= FREE_PROFILE_TOL && e64 <= FMM_MAX_REL && in_range(halving, FMM_HALVING);
    report(
        1,
        pass,
        &format!(
            "free |K-r| {free_err:.1e} (<= {FREE_PROFILE_TOL:e}); FMM max rel {:.2}% at h=R/64 (<= {}%, {secs64:.1}s), \
             {:.2}% at h/2, ratio {halving:.2} in {FMM_HALVING:?}",
            100.0 * e64,
            100.0 * FMM_MAX_REL,
            100.0 * e128
        ),
    );
    assert!(pass);
}

/// `max |D²|x| - ∇²|x||` over the nodes the lemma residual uses, with the
/// centred second differences written out independently.
fn hessian_of_norm_error(grid: &Grid3, r_min: f64) -> f64 {
    let h = grid.spacing;
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        if !grid.is_interior(i, 1) || grid.radius_at(i) < r_min {
            continue;
        }
        let x = grid.point_at(i);
        let r = norm3(x);
        let at = |d: [f64; 3]| norm3([x[0] + d[0] * h, x[1] + d[1] * h, x[2] + d[2] * h]);
        for a in 0..3 {
            for b in a..3 {
                let mut ea = [0.0; 3];
                let mut eb = [0.0; 3];
                ea[a] = 1.0;
                eb[b] = 1.0;
                let fd = if a == b {
                    let m = [-ea[0], -ea[1], -ea[2]];
                    (at(ea) - 2.0 * r + at(m)) / (h * h)
                } else {
                    let pp = at([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
                    let pm = at([ea[0] - eb[0], ea[1] - eb[1], ea[2] - eb[2]]);
                    let mp = at([-ea[0] + eb[0], -ea[1] + eb[1], -ea[2] + eb[2]]);
                    let mm = at([-ea[0] - eb[0], -ea[1] - eb[1], -ea[2] - eb[2]]);
                    (pp - pm - mp + mm) / (4.0 * h * h)
                };
                let exact = ((a == b) as u8 as f64 - x[a] * x[b] / (r * r)) / r;
                worst = worst.max((fd - exact).abs());
            }
        }
    }
    worst
}

#[test]
fn criterion_2_hessian_identity() {
    let _serial = serial();
    let pot = long_range(0.1);
    let r_min = 2.0;
    let residual = |p: &Potential, m: usize| {
        let grid = Grid3::centered(m, 4.0 / m as f64);
        let field = field_from_profile(p, 4.0, &grid, &FieldOptions::default()).unwrap();
        (grid, lemma1_residual(&field, r_min))
    };
    let res: Vec<f64> = [8, 16, 32].iter().map(|&m| residual(&pot, m).1.normalized).collect();
    let ratios = [res[0] / res[1], res[1] / res[2]];

    let (grid, free) = residual(&zero(), 16);
    let oracle = hessian_of_norm_error(&grid, r_min);
    let free_gap = (free.max - oracle).abs() / oracle;

    let pass = ratios.iter().all(|&q| in_range(q, LEMMA1_RATIO)) && free_gap <= LEMMA1_FREE_AGREEMENT;
    report(
        2,
        pass,
        &format!(
            "normalized residuals {}, refinement ratios {ratios:.2?} in {LEMMA1_RATIO:?}; \
             p=0 residual vs D²|x| error {:.3e} / {oracle:.3e} (rel gap {free_gap:.1e})",
            sci(&res),
            free.max
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_decay_ladder() {
    let _serial = serial();
    let delta = 0.5;
    let pot = long_range(0.1);
    let grid = Grid3::centered(48, 32.0 / 48.0);
    let annuli = dyadic_annuli(4.0, 32.0);
    let checked = [FieldName::DrG, FieldName::DG, FieldName::D2G, FieldName::F, FieldName::GradTraceF];
    let mut lines = Vec::new();
    let mut pass = true;
    let mut dr = Vec::new();
    for lambda in [4.0, 16.0] {
        let opts = FieldOptions { core_radius: None, normalization: Normalization::Asymptotic };
        let field = field_from_profile(&pot, lambda, &grid, &opts).unwrap();
        for name in checked {
            let fit =
                fit_decay(name.id(), &field.samples(name), lambda, name.expected_rate(delta), &annuli, DECAY_SLACK)
                    .unwrap();
            let e = fit.exponent.unwrap_or(f64::NAN);
            pass &= e >= fit.target_exponent - DECAY_SLACK;
            lines.push(format!("{}@{lambda}={e:.2}/{}", name.id(), fit.target_exponent));
            if name == FieldName::DrG {
                dr.push(fit);
            }
        }
    }
    let measured = lambda_scaling_ratio(&dr[0], &dr[1]);
    let scaling_err = (measured / 0.25 - 1.0).abs();
    pass &= scaling_err <= LAMBDA_SCALING_TOL;
    report(
        3,
        pass,
        &format!(
            "exponents {} (slack {DECAY_SLACK}); dr_g constant ratio lambda 4->16 {measured:.4} vs 1/4 (rel err {scaling_err:.3} <= {LAMBDA_SCALING_TOL})",
            lines.join(" ")
        ),
    );
    assert!(pass);
}

struct Outgoing(f64);

impl ScalarField3 for Outgoing {
    fn value(&self, x: [f64; 3]) -> C64 {
        let r = norm3(x);
        C64::new(0.0, self.0 * r).exp() / r
    }

    fn gradient(&self, x: [f64; 3]) -> [C64; 3] {
        let r = norm3(x);
        let du = self.value(x) * (C64::new(0.0, self.0) - 1.0 / r);
        [du * x[0] / r, du * x[1] / r, du * x[2] / r]
    }
}

/// Weighted relative L² distance between the solve and the on-grid Green's
/// convolution over `|x| <= radius`, weight `(1 + |x|²)^{-1}`.
fn free_space_error(ppw: f64, radius: f64) -> (f64, f64) {
    let lambda = 4.0;
    let h = wavelength(lambda) / ppw;
    let m = (4.71 / h).round() as usize;
    let grid = Grid3::centered(m, h);
    let bump = Bump::centered(1.0, 1.0);
    let p = HelmholtzProblem::new(lambda, 0.1, zero(), bump.sample(&grid), grid, Boundary::pml_wavelengths(lambda, 0.75))
        .unwrap();
    let sol = solve_problem(&p);
    let targets: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius_at(i) <= radius).collect();
    let reference = greens_reference(&p.source, lambda, 0.1, &grid, &targets).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &i) in targets.iter().enumerate() {
        let r = grid.radius_at(i);
        let w = 1.0 / (1.0 + r * r);
        num += w * (sol.u[i] - reference[j]).norm_sqr();
        den += w * reference[j].norm_sqr();
    }
    ((num / den).sqrt(), p.trusted_radius())
}

#[test]
fn criterion_4_free_space_solver() {
    let _serial = serial();
    // both grids are compared on the ball trusted by the coarser one
    let radius = 1.8;
    let (e12, t12) = free_space_error(12.0, radius);
    let (e24, t24) = free_space_error(24.0, radius);
    assert!(radius <= t12.min(t24), "comparison ball {radius} exceeds trusted radii {t12}, {t24}");
    let order = e12 / e24;
    let fp: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&r| {
            radiation_functional_analytic(&Outgoing(2.0), &SphericalGeometry, 4.0, r, None, false, SphereQuadrature::default())
                .unwrap()
        })
        .collect();
    let fp_ok = fp.iter().all(|v| (v / (4.0 * PI) - 1.0).abs() <= FOUR_PI_TOL);
    let accurate = e12 <= SOLVER_ORACLE_MAX;
    let ordered = in_range(order, SOLVER_ORDER_RATIO);
    let pass = accurate && ordered && fp_ok;
    report(
        4,
        pass,
        &format!(
            "12 ppw error {:.2}% (<= {}%: {}), 24 ppw {:.2}%, ratio {order:.2} in {SOLVER_ORDER_RATIO:?}: {}; \
             far-field functional / 4pi at R=1,2,4 {:?}: {}",
            100.0 * e12,
            100.0 * SOLVER_ORACLE_MAX,
            if accurate { "ok" } else { "missed" },
            100.0 * e24,
            if ordered { "ok" } else { "missed" },
            fp.iter().map(|v| format!("{:.6}", v / (4.0 * PI))).collect::<Vec<_>>(),
            if fp_ok { "ok" } else { "missed" },
        ),
    );
    assert!(pass);
}

struct IdentityRun {
    h: f64,
    lemma_real: f64,
    lemma_imag: f64,
    key: f64,
}

fn identity_run(pot: &Potential, m: usize) -> (IdentityRun, HelmholtzProblem, SolutionField) {
    let lambda = 4.0;
    let h = 3.0 / m as f64;
    let grid = Grid3::centered(m, h);
    let f = Bump::centered(1.0, 1.0).sample(&grid);
    let p = HelmholtzProblem::new(lambda, 0.1, pot.clone(), f, grid, Boundary::Dirichlet).unwrap();
    let sol = solve_problem(&p);
    let field = field_from_profile(pot, lambda, &grid, &FieldOptions::default()).unwrap();
    let cut = Cutoff::new(1.0, 2.5).unwrap();
    let l2 = lemma2_residuals(&sol.u, &sol.grad, &p, &field, &Multiplier::phi(cut)).unwrap();
    let key = key_identity_residual(&sol.u, &sol.grad, &p, &field, &Multiplier::smooth_quadratic(cut)).unwrap();
    let run = IdentityRun { h, lemma_real: l2.real.normalized, lemma_imag: l2.imaginary.normalized, key: key.normalized };
    (run, p, sol)
}

#[test]
fn criterion_5_identities() {
    let _serial = serial();
    let mut pass = true;
    let mut lines = Vec::new();
    let mut spherical_gap = 0.0;
    for (name, pot) in [("free", zero()), ("long_range", long_range(0.1))] {
        let mut runs = Vec::new();
        for m in [12, 24, 48] {
            let (run, p, sol) = identity_run(&pot, m);
            if name == "free" && m == 24 {
                let cut = Cutoff::new(1.0, 2.5).unwrap();
                let psi = Multiplier::smooth_quadratic(cut);
                let profile = field_from_profile(&pot, 4.0, &p.grid, &FieldOptions::default()).unwrap();
                let a = key_identity_residual(&sol.u, &sol.grad, &p, &profile, &psi).unwrap();
                let b = key_identity_residual(&sol.u, &sol.grad, &p, &EikonalField::spherical(&p.grid), &psi).unwrap();
                spherical_gap = a
                    .terms
                    .iter()
                    .zip(&b.terms)
                    .map(|(x, y)| (x.value - y.value).abs() / a.scale)
                    .fold(0.0, f64::max);
            }
            runs.push(run);
        }
        for r in &runs {
            let bound = IDENTITY_FACTOR * (r.h * r.h + SOLVER_TOL);
            pass &= r.lemma_real <= bound && r.lemma_imag <= bound && r.key <= bound;
        }
        let order = |sel: fn(&IdentityRun) -> f64| -> Vec<f64> {
            runs.windows(2).map(|w| (sel(&w[0]) / sel(&w[1])).log2()).collect()
        };
        let orders = [order(|r| r.lemma_real), order(|r| r.lemma_imag), order(|r| r.key)];
        pass &= orders.iter().flatten().all(|&o| in_range(o, IDENTITY_ORDER));
        lines.push(format!(
            "{name}: lemma re {} im {} key {} vs 10(h²+tol), orders {:.2?}",
            sci(&runs.iter().map(|r| r.lemma_real).collect::<Vec<_>>()),
            sci(&runs.iter().map(|r| r.lemma_imag).collect::<Vec<_>>()),
            sci(&runs.iter().map(|r| r.key).collect::<Vec<_>>()),
            orders
        ));
    }
    pass &= spherical_gap <= SPHERICAL_AGREEMENT;
    report(
        5,
        pass,
        &format!(
            "{}; orders in {IDENTITY_ORDER:?}; p=0 vs spherical path max term gap {spherical_gap:.1e} (<= {SPHERICAL_AGREEMENT:e})",
            lines.join("; ")
        ),
    );
    assert!(pass);
}

/// Grid at 12 points per wavelength whose trusted ball reaches `reach`.
fn resolved_problem(pot: &Potential, lambda: f64, epsilon: f64, reach: f64) -> HelmholtzProblem {
    let wl = wavelength(lambda);
    let h = wl / 12.0;
    let m = ((reach + 0.75 * wl + 2.0 * h) / h).ceil() as usize;
    let grid = Grid3::centered(m, h);
    let f = Bump::centered(1.0, 1.0).sample(&grid);
    HelmholtzProblem::new(lambda, epsilon, pot.clone(), f, grid, Boundary::pml_wavelengths(lambda, 0.75)).unwrap()
}

#[test]
fn criterion_6_theorem_ratio() {
    let _serial = serial();
    let pot = long_range(0.1);
    let radii = [1.0, 1.5, 2.0, 3.0, 4.0];
    let mut pass = true;
    let mut sup: f64 = 0.0;
    let mut lines = Vec::new();
    for lambda in [4.0, 8.0, 16.0] {
        let mut sups = Vec::new();
        for eps in [0.1, 0.05] {
            let p = resolved_problem(&pot, lambda, eps, 4.6);
            let field = field_from_profile(&pot, lambda, &p.grid, &FieldOptions::default()).unwrap();
            let sol = solve_problem(&p);
            let rep = theorem_ratio(&sol.u, &sol.grad, &p, &field, &radii).unwrap();
            pass &= rep.sup_ratio.is_finite();
            sups.push(rep.sup_ratio);
        }
        let change = (sups[1] / sups[0] - 1.0).abs();
        pass &= change <= RATIO_STABILITY;
        sup = sup.max(sups[0]).max(sups[1]);
        lines.push(format!("lambda {lambda}: sup {:.4} -> {:.4} ({:.2}%)", sups[0], sups[1], 100.0 * change));
    }
    report(
        6,
        pass,
        &format!("{}; measured constant {sup:.4}; eps-halving change <= {}%", lines.join(", "), 100.0 * RATIO_STABILITY),
    );
    assert!(pass);
}

#[test]
fn criterion_7_apriori_ratio() {
    let _serial = serial();
    let pot = zero();
    let mut ratios = Vec::new();
    let mut scale_gap: f64 = 0.0;
    for lambda in [4.0, 16.0, 64.0] {
        let p = resolved_problem(&pot, lambda, 0.1, 2.0);
        let sol = solve_problem(&p);
        let r = apriori_ratio(&sol.u, &sol.grad, &p).unwrap().ratio.unwrap();
        ratios.push(r);
        if lambda <= 16.0 {
            let c = 3.7;
            let scaled = p.with_source(p.source.iter().map(|v| v * c).collect()).unwrap();
            let s = solve_problem(&scaled);
            let rc = apriori_ratio(&s.u, &s.grad, &scaled).unwrap().ratio.unwrap();
            scale_gap = scale_gap.max((rc / r - 1.0).abs());
        }
    }
    let growth = ratios.iter().copied().fold(0.0, f64::max) / ratios[0];
    let pass = ratios.iter().all(|r| r.is_finite()) && growth <= APRIORI_GROWTH && scale_gap <= APRIORI_SCALE_INVARIANCE;
    report(
        7,
        pass,
        &format!(
            "ratios at lambda 4,16,64 {ratios:.4?}, growth {growth:.3} (<= {APRIORI_GROWTH}); f -> 3.7f rel change {scale_gap:.1e} (<= {APRIORI_SCALE_INVARIANCE:e})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_limiting_absorption() {
    let _serial = serial();
    let lambda = 4.0;
    let h = wavelength(lambda) / 16.0;
    let grid = Grid3::centered((4.7 / h).round() as usize, h);
    let f = Bump::centered(1.0, 1.0).sample(&grid);
    let p = HelmholtzProblem::new(lambda, 0.4, zero(), f, grid, Boundary::pml_wavelengths(lambda, 0.75)).unwrap();
    let opts = SolveOptions { tolerance: SOLVER_TOL, ..SolveOptions::default() };
    let rep = epsilon_sweep(&p, &[0.4, 0.2, 0.1, 0.05], &opts).unwrap();
    let limit = rep.extrapolated.as_ref().unwrap();
    let trusted = p.trusted_radius();
    let targets: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius_at(i) <= trusted).collect();
    let oracle = greens_reference(&p.source, lambda, 0.0, &grid, &targets).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &i) in targets.iter().enumerate() {
        num += (limit[i] - oracle[j]).norm_sqr();
        den += oracle[j].norm_sqr();
    }
    let err = (num / den).sqrt();
    let diffs = &rep.summary.differences;
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    let pass = monotone && rep.summary.monotone && err <= LIMIT_ORACLE_MAX;
    report(
        8,
        pass,
        &format!(
            "differences {} monotone {monotone}; extrapolated limit vs Green's oracle {:.2}% (<= {}%) at 16 ppw",
            sci(diffs),
            100.0 * err,
            100.0 * LIMIT_ORACLE_MAX
        ),
    );
    assert!(pass);
}

const SMALL: &str = r#"
    checks = ["theorem", "apriori", "sweep"]
    lambdas = [4.0]
    epsilons = [0.2, 0.1]
    radii = [1.0, 1.5]
    [potential]
    family = "long_range"
    delta = 0.5
    amplitude_p = 0.1
    [grid]
    extent = 4.5
    spacing = 0.25
"#;

#[test]
fn criterion_9_harness_determinism() {
    let _serial = serial();
    let mut small = ExperimentConfig::from_toml_str(SMALL).unwrap();
    small.workers = 1;
    let first = run_experiment(&small).unwrap();
    small.workers = 0;
    let second = run_experiment(&small).unwrap();
    let identical = first.summary.to_json().unwrap() == second.summary.to_json().unwrap();

    // direct module calls on the same inputs
    let pot = make_potential(&small.potential).unwrap();
    let grid = small.grid.grid();
    let p = HelmholtzProblem::new(4.0, 0.1, pot.clone(), small.source.bump().sample(&grid), grid, small.boundary.boundary(4.0))
        .unwrap();
    let sol = solve(&assemble(&p).unwrap(), &p.source, &SolveOptions::default()).unwrap();
    let field = field_from_profile(&pot, 4.0, &grid, &FieldOptions::default()).unwrap();
    let direct = theorem_ratio(&sol.u, &sol.grad, &p, &field, &small.radii).unwrap();
    let curve = first.curve("ratio_vs_R_lambda4_eps0.1").expect("theorem curve");
    let equal = curve.rows.iter().zip(&direct.ratios).all(|(row, q)| row[2].to_bits() == q.to_bits())
        && curve.rows.len() == direct.ratios.len();

    let default = ExperimentConfig::from_toml_str(include_str!("../../../configs/default.toml")).unwrap();
    let t = Instant::now();
    let suite = run_experiment(&default).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let shape = suite.summary.grid.shape;
    let within = secs <= SUITE_BUDGET_SECS && shape.iter().all(|&n| n <= 97);
    let statuses: Vec<String> =
        suite.summary.checks.iter().map(|c| format!("{}={:?}", c.check, c.status).to_lowercase()).collect();

    let pass = identical && equal && within;
    report(
        9,
        pass,
        &format!(
            "summaries identical across runs/workers {identical}; orchestrated == direct {equal}; \
             default suite {secs:.0}s on {} thread(s) (<= {SUITE_BUDGET_SECS}s), grid {shape:?}, checks {}",
            rayon::current_num_threads(),
            statuses.join(" ")
        ),
    );
    assert!(pass);
}
