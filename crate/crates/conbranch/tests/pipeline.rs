mod common;

use conbranch::{parse_native, run_pipeline, Mode, PipelineOptions, RunStatus};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn triangles_simple() {
    let report = run_pipeline(&common::two_triangles(), &PipelineOptions::default()).unwrap();
    assert_eq!(report.status, RunStatus::Optimal);
    assert!(close(report.pure_lp.unwrap(), 3.0));
    assert!(close(report.bound_inc, 1.0));
    assert!(close(report.bound.unwrap(), 4.0));
    assert!(report.branches >= 2);
    assert!(close(report.degree, 2.0));
}

#[test]
fn cycle_simple_reports_a_lower_upper_bound() {
    let report = run_pipeline(&common::five_cycle(), &PipelineOptions::default()).unwrap();
    assert!(close(report.pure_lp.unwrap(), 5.0 / 3.0));
    assert!(close(report.bound_inc, 10.0 / 33.0));
    assert!(close(report.bound.unwrap(), 5.0 / 3.0 - 10.0 / 33.0));
    assert!(close(report.degree, 20.0 / 11.0));
}

#[test]
fn every_mode_runs_on_the_fixtures() {
    for model in [common::two_triangles(), common::five_cycle()] {
        let optimum = common::binary_optimum_min(&model).unwrap();
        let simple = run_pipeline(&model, &PipelineOptions::default()).unwrap();
        for mode in [Mode::Simple, Mode::Complex, Mode::Sequential, Mode::Huge] {
            for refine in [false, true] {
                let options = PipelineOptions {
                    mode,
                    refine,
                    integrity: true,
                    cuts: true,
                    anchors: 3,
                    ..PipelineOptions::default()
                };
                let report = run_pipeline(&model, &options).unwrap();
                assert!(report.bound_inc >= 0.0);
                assert!(!report.cuts.is_empty());
                let bound_min = optimum_sense(&model, report.bound.unwrap());
                assert!(bound_min <= optimum + 1e-6, "{mode:?}");
                if mode == Mode::Huge {
                    assert!(report.bound_inc >= simple.bound_inc - 1e-6);
                }
            }
        }
    }
}

fn optimum_sense(model: &conbranch_core::Model, value: f64) -> f64 {
    match model.sense {
        conbranch_core::Sense::Minimize => value,
        conbranch_core::Sense::Maximize => -value,
    }
}

#[test]
fn integral_root_gives_no_improvement() {
    let model = parse_native("min : x + y\nvar x bin\nvar y bin\nrow c >= 1 : x + y\n").unwrap();
    let report = run_pipeline(&model, &PipelineOptions::default()).unwrap();
    assert_eq!(report.candidates, 0);
    assert_eq!(report.bound_inc, 0.0);
    assert_eq!(report.degree, 0.0);
    assert_eq!(report.bound, report.pure_lp);
}

#[test]
fn terminal_root_status() {
    let infeasible = parse_native("min : x\nvar x 0 1\nrow c >= 2 : x\n").unwrap();
    let report = run_pipeline(&infeasible, &PipelineOptions::default()).unwrap();
    assert_eq!(report.status, RunStatus::Infeasible);
    assert_eq!(report.pure_lp, None);

    let unbounded = parse_native("min : -1*x\nvar x int 0 inf\n").unwrap();
    let report = run_pipeline(&unbounded, &PipelineOptions::default()).unwrap();
    assert_eq!(report.status, RunStatus::Unbounded);
    assert_eq!(report.branches, 0);
}

#[test]
fn fixings_are_counted() {
    // 2x >= 1 with x in [0, 1]: the down branch x <= 0 is infeasible.
    let model = parse_native("min : x + y\nvar x int 0 1\nvar y int 0 1\nrow c >= 1 : 2*x + y\nrow d >= 1/2 : y\n").unwrap();
    let report = run_pipeline(&model, &PipelineOptions::default()).unwrap();
    assert_eq!(report.status, RunStatus::Optimal);
    assert_eq!(report.fixings + report.branches, report.candidates);
}

#[test]
fn candidate_limit() {
    let options = PipelineOptions {
        max_candidates: Some(2),
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&common::two_triangles(), &options).unwrap();
    assert_eq!(report.candidates, 2);
}
