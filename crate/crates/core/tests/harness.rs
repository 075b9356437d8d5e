use sommerfeld_core::eikonal::decay::linear_fit;
use sommerfeld_core::harness::{
    emit_plots, read_bundle, run_experiment, write_bundle, CheckKind, ExperimentConfig, ReportBundle, Status,
};
use sommerfeld_core::helmholtz::{assemble, solve, HelmholtzProblem, SolveOptions};
use sommerfeld_core::potential::make_potential;
use sommerfeld_core::verification::theorem_ratio;
use sommerfeld_core::Error;

const FREE_SPACE: &str = r#"
    checks = ["theorem", "apriori"]
    lambdas = [4.0]
    epsilons = [0.1]
    radii = [1.0, 1.5]
    [potential]
    family = "zero"
    delta = 0.5
    [grid]
    extent = 4.5
    spacing = 0.25
    [source]
    kind = "bump"
    radius = 1.0
"#;

fn free_space() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(FREE_SPACE).unwrap()
}

#[test]
fn empty_check_list_gives_metadata_only() {
    let mut c = free_space();
    c.checks.clear();
    let b = run_experiment(&c).unwrap();
    assert!(b.summary.checks.is_empty());
    assert!(b.summary.all_passed);
    assert!(b.curves.is_empty());
    assert_eq!(b.summary.lambdas, vec![4.0]);
    assert_eq!(b.summary.schema_version, 1);
}

#[test]
fn theorem_curve_matches_direct_call_bit_for_bit() {
    let c = free_space();
    let bundle = run_experiment(&c).unwrap();
    assert_eq!(bundle.summary.checks.len(), 2);
    let curve = bundle.curve("ratio_vs_R").expect("single job curve id");
    assert_eq!(curve.columns, ["R", "lhs", "ratio"]);

    let pot = make_potential(&c.potential).unwrap();
    let grid = c.grid.grid();
    let problem = HelmholtzProblem::new(
        4.0,
        0.1,
        pot.clone(),
        c.source.bump().sample(&grid),
        grid,
        c.boundary.boundary(4.0),
    )
    .unwrap();
    let sol = solve(&assemble(&problem).unwrap(), &problem.source, &SolveOptions::default()).unwrap();
    let field = sommerfeld_core::harness::run::solve_field(&pot, 4.0, &grid).unwrap();
    let direct = theorem_ratio(&sol.u, &sol.grad, &problem, &field, &c.radii).unwrap();
    for (row, (l, q)) in curve.rows.iter().zip(direct.lhs.iter().zip(&direct.ratios)) {
        assert_eq!(row[1].to_bits(), l.to_bits());
        assert_eq!(row[2].to_bits(), q.to_bits());
    }
}

#[test]
fn summaries_are_identical_across_runs_and_worker_counts() {
    let mut c = free_space();
    c.epsilons = vec![0.2, 0.1];
    c.checks = vec![CheckKind::Theorem, CheckKind::Apriori, CheckKind::Sweep];
    c.workers = 1;
    let a = run_experiment(&c).unwrap().summary.to_json().unwrap();
    c.workers = 2;
    let b = run_experiment(&c).unwrap().summary.to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn under_resolved_config_fails_before_any_compute() {
    let mut c = free_space();
    c.lambdas = vec![4.0, 64.0];
    match run_experiment(&c) {
        Err(Error::Config(m)) => assert!(m.contains("lambda = 64"), "{m}"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn failing_sibling_does_not_abort_others() {
    let mut c = free_space();
    // radius 4 lies outside the trusted ball, so the theorem check errors
    c.radii = vec![1.0, 4.0];
    let b = run_experiment(&c).unwrap();
    let theorem = b.summary.check("theorem").unwrap();
    assert_eq!(theorem.status, Status::Error);
    assert!(theorem.message.as_deref().unwrap().contains("K >= 4"));
    assert_eq!(b.summary.check("apriori").unwrap().status, Status::Pass);
    assert!(!b.summary.all_passed);
}

#[test]
fn non_radial_decay_is_an_error_record() {
    let text = r#"
        checks = ["decay"]
        lambdas = [4.0]
        [potential]
        family = "anisotropic"
        delta = 0.5
        amplitude_p = 0.1
        scales = [1.0, 1.5, 2.0]
        [grid]
        extent = 4.5
        spacing = 0.25
        [decay]
        half_cells = 24
        spacing = 1.0
        r_min = 2.0
        r_max = 16.0
    "#;
    let b = run_experiment(&ExperimentConfig::from_toml_str(text).unwrap()).unwrap();
    assert_eq!(b.summary.checks.len(), 1);
    assert_eq!(b.summary.checks[0].status, Status::Error);
}

fn decay_bundle() -> ReportBundle {
    let text = r#"
        checks = ["decay"]
        lambdas = [4.0, 16.0]
        [potential]
        family = "long_range"
        delta = 0.5
        amplitude_p = 0.1
        [grid]
        extent = 4.5
        spacing = 0.25
        [decay]
        half_cells = 24
        spacing = 1.0
        r_min = 2.0
        r_max = 16.0
    "#;
    run_experiment(&ExperimentConfig::from_toml_str(text).unwrap()).unwrap()
}

#[test]
fn loglog_curve_refits_to_the_bundle_exponent() {
    let b = decay_bundle();
    let rec = b.summary.check("decay").unwrap();
    let fits = rec.details.pointer("/per_lambda/0/fits").unwrap().as_array().unwrap();
    let dr = fits.iter().find(|f| f["field"] == "dr_g").unwrap();
    let exponent = dr["exponent"].as_f64().unwrap();
    let curve = b.curve("loglog_dr_g_lambda4").unwrap();
    assert_eq!(curve.columns, ["log_r", "log_sup"]);
    let xs: Vec<f64> = curve.rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = curve.rows.iter().map(|r| r[1]).collect();
    let (slope, _, _) = linear_fit(&xs, &ys);
    assert!((-slope - exponent).abs() <= 1e-9, "{slope} vs {exponent}");
}

#[test]
fn plots_and_bundles_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let empty = ReportBundle { summary: run_experiment(&{
        let mut c = free_space();
        c.checks.clear();
        c
    })
    .unwrap()
    .summary, curves: vec![], fields: vec![] };
    let written = emit_plots(&empty, None, &dir.path().join("none")).unwrap();
    assert!(written.is_empty());
    assert!(!dir.path().join("none").exists());

    let mut c = free_space();
    c.dump_fields = true;
    let b = run_experiment(&c).unwrap();
    let out = dir.path().join("bundle");
    write_bundle(&b, &out).unwrap();
    let csv = std::fs::read_to_string(out.join("plots/ratio_vs_R.csv")).unwrap();
    assert!(csv.starts_with("R,lhs,ratio\n"));
    let script = std::fs::read_to_string(out.join("plots/plot.gp")).unwrap();
    assert!(script.contains("ratio_vs_R.csv"));

    let back = read_bundle(&out).unwrap();
    assert_eq!(back.summary, b.summary);
    assert_eq!(back.curves, b.curves);
    assert_eq!(back.fields.len(), 1);
    assert_eq!(back.fields[0].values, b.fields[0].values);
    assert_eq!(back.fields[0].grid, b.fields[0].grid);

    let missing = emit_plots(&b, Some(&["nope".to_string()]), &dir.path().join("x"));
    assert!(matches!(missing, Err(Error::MissingCurve(_))));
    let none = emit_plots(&b, Some(&[]), &dir.path().join("y")).unwrap();
    assert!(none.is_empty());
}
