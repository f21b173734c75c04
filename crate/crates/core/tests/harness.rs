use fracmax::gallery::{GalleryKind, TestFunction};
use fracmax::harness::{
    render_svg, run, write_csv, Check, ExperimentConfig, ExperimentId, Report, Verdict, CSV_HEADER,
};
use fracmax::Error;

fn config(id: ExperimentId) -> ExperimentConfig {
    ExperimentConfig::new(id).with_ladder(vec![0.04, 0.02, 0.01])
}

fn csv(report: &Report) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn hypothesis(result: fracmax::Result<Report>) -> String {
    match result {
        Err(Error::Hypothesis { condition, .. }) => condition,
        other => panic!("expected a hypothesis rejection, got {other:?}"),
    }
}

#[test]
fn names_parse_back() {
    for id in ExperimentId::ALL {
        assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
    }
    assert!("thm99".parse::<ExperimentId>().is_err());
}

#[test]
fn holder_experiment_is_consistent() {
    let report = run(&config(ExperimentId::Thm31)).unwrap();
    assert_eq!(report.verdict, Verdict::Consistent);
    assert!(report.spread("holder_ratio") <= 2.0);
}

#[test]
fn constant_input_has_undefined_holder_ratio() {
    let cfg = config(ExperimentId::Thm31).with_function(TestFunction::Constant(2.0));
    assert!(matches!(run(&cfg), Err(Error::UndefinedRatio(_))));
}

#[test]
fn lebesgue_bound_needs_p_above_one() {
    let mut cfg = config(ExperimentId::Thm41);
    cfg.p = Some(1.0);
    assert!(hypothesis(run(&cfg)).contains("p>1"));
}

#[test]
fn zero_input_is_rejected() {
    let cfg = config(ExperimentId::Thm41).with_function(TestFunction::Constant(0.0));
    assert!(run(&cfg).is_err());
}

#[test]
fn smoothing_bound_rejects_large_alpha() {
    let mut cfg = config(ExperimentId::Thm42);
    cfg.alpha = Some(0.99);
    cfg.p = Some(1.05);
    cfg.delta = Some(0.5);
    assert!(hypothesis(run(&cfg)).contains("Q/p"));
}

#[test]
fn smoothing_bound_rejects_delta_above_alpha() {
    // The line has decay exponent 1, above the default α = 0.5.
    assert!(hypothesis(run(&config(ExperimentId::Thm42))).contains("δ≤α"));
}

#[test]
fn smoothing_bound_holds_with_supplied_delta() {
    let mut cfg = config(ExperimentId::Thm42);
    cfg.delta = Some(0.5);
    let report = run(&cfg).unwrap();
    assert_ne!(report.verdict, Verdict::Violated);
    assert!(report.spread("hajlasz_constant") <= 2.0);
}

#[test]
fn chain_lemma_rejects_positive_beta() {
    let mut cfg = config(ExperimentId::Lemma32);
    cfg.beta = Some(0.5);
    assert!(run(&cfg).is_err());
}

#[test]
fn case_split_must_match_s() {
    let mut cfg = config(ExperimentId::Thm44a);
    cfg.s = Some(1.0);
    cfg.delta = Some(0.5);
    assert!(hypothesis(run(&cfg)).contains("s<δ"));
}

#[test]
fn equal_case_matches_sobolev_experiment() {
    let a = run(&config(ExperimentId::Thm43)).unwrap();
    let b = run(&config(ExperimentId::Thm44b)).unwrap();
    let ratios =
        |r: &Report, q: &str| -> Vec<f64> { r.rows.iter().filter(|x| x.quantity == q).map(|x| x.ratio).collect() };
    assert_eq!(ratios(&a, "hajlasz_constant"), ratios(&b, "hajlasz_constant"));
}

#[test]
fn constant_input_has_zero_gradient_constant() {
    let cfg = config(ExperimentId::Thm43).with_function(TestFunction::Constant(1.0));
    let report = run(&cfg).unwrap();
    assert_ne!(report.verdict, Verdict::Violated);
    assert!(report.rows.iter().filter(|r| r.quantity == "hajlasz_constant").all(|r| r.ratio == 0.0));
}

#[test]
fn empty_ladder_gives_header_only_csv() {
    let cfg = ExperimentConfig::new(ExperimentId::Thm41).with_ladder(Vec::new());
    let report = run(&cfg).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(report.verdict, Verdict::TruncationLimited);
    assert_eq!(csv(&report).trim_end(), CSV_HEADER.join(","));
}

#[test]
fn outputs_are_byte_identical_on_rerun() {
    let cfg = config(ExperimentId::Thm31);
    let (a, b) = (run(&cfg).unwrap(), run(&cfg).unwrap());
    assert_eq!(csv(&a), csv(&b));
    assert_eq!(render_svg(&a), render_svg(&b));
}

#[test]
fn line_plus_arc_origin_and_jump() {
    let cfg = ExperimentConfig::new(ExperimentId::Ex51).with_ladder(vec![0.01]);
    let report = run(&cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Consistent);
    let origin = report.rows.iter().find(|r| r.quantity == "origin").unwrap();
    assert!((0.232..=0.275).contains(&origin.ratio), "M u(0) = {}", origin.ratio);
    assert!(report.rows.iter().any(|r| r.quantity == "jump" && r.check == Check::Pass));
}

#[test]
fn line_plus_arc_rejects_other_space() {
    let cfg = ExperimentConfig::new(ExperimentId::Ex51).with_space(GalleryKind::Cross, 3.0);
    assert!(matches!(run(&cfg), Err(Error::WrongSpaceKind { .. })));
}

#[test]
fn weighted_example_flags_infinite_regime() {
    let mut cfg = ExperimentConfig::new(ExperimentId::Ex51w).with_ladder(vec![0.02]);
    cfg.alpha = Some(1.5);
    let report = run(&cfg).unwrap();
    assert!(report.rows.iter().all(|r| r.quantity == "infinite" && r.ratio.is_infinite()));
    assert!(report.notes.iter().any(|n| n.contains("≡ ∞")));
}

#[test]
fn cross_gap_is_detected() {
    let cfg = ExperimentConfig::new(ExperimentId::Ex52).with_ladder(vec![0.01]);
    let report = run(&cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Consistent);
    let gap = report.rows.iter().find(|r| r.quantity == "gap").unwrap();
    assert!(gap.ratio >= 0.1, "gap {}", gap.ratio);
}

#[test]
fn unwritable_path_is_an_error() {
    let report = run(&ExperimentConfig::new(ExperimentId::Thm41).with_ladder(Vec::new())).unwrap();
    let path = std::path::Path::new("/nonexistent-dir/report.csv");
    assert!(fracmax::harness::emit_report(&report, path).is_err());
}
