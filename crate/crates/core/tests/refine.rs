mod common;

use common::parabola_start;
use metais::classify::{prob_in_margin, MarginSpec};
use metais::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use metais::pipeline::initial_doe;
use metais::problem::LimitState;
use metais::refine::{
    refine_once, refine_until_budget, RefineOutcome, RefinementConfig, StopReason,
};
use metais::surrogate::Surrogate;

fn config(budget: usize, seed: u64) -> RefinementConfig {
    RefinementConfig {
        budget,
        seed,
        ..RefinementConfig::default()
    }
}

#[test]
fn one_iteration_adds_margin_points_inside_the_sphere() {
    let (ls, model) = parabola_start(3);
    let before = ls.eval_count();
    let RefineOutcome::Enriched {
        model: next,
        evaluated,
        ..
    } = refine_once(&model, &ls, &config(100, 5)).unwrap()
    else {
        panic!("margin should not be empty after 12 points");
    };
    assert_eq!(evaluated.len(), 10);
    assert_eq!(ls.eval_count() - before, 10);
    assert_eq!(next.doe().len(), 22);
    let spec = MarginSpec::default();
    for (u, y) in &evaluated {
        assert!(u.iter().map(|v| v * v).sum::<f64>().sqrt() <= 8.0);
        assert!(prob_in_margin(&model, u, spec).unwrap() > 0.0);
        assert_eq!(*y, ls.evaluate(u).unwrap());
        let p = next.predict(u).unwrap();
        assert!((p.mean - y).abs() <= 1e-8 * (1.0 + y.abs()));
        assert!(p.std <= 1e-6 * next.process_std());
    }
}

#[test]
fn empty_margin_signals_convergence() {
    let ls = LimitState::new("far", 2, |u: &[f64]| 100.0 + 0.1 * u[0]).unwrap();
    let pts = initial_doe(2, 12, 8.0, 1).unwrap();
    let ys = pts.iter().map(|u| ls.evaluate(u).unwrap()).collect();
    let model = KrigingModel::fit(
        DesignOfExperiments::new(pts, ys).unwrap(),
        KrigingConfig::default(),
    )
    .unwrap();
    let before = ls.eval_count();
    assert!(matches!(
        refine_once(&model, &ls, &config(100, 1)).unwrap(),
        RefineOutcome::MarginConverged
    ));
    assert_eq!(ls.eval_count(), before);

    let (out, trace) = refine_until_budget(model.clone(), &ls, &config(100, 1)).unwrap();
    assert_eq!(trace.stop_reason, StopReason::MarginConverged);
    assert!(trace.records.is_empty());
    assert_eq!(out.doe(), model.doe());
}

#[test]
fn budget_equal_to_doe_size_runs_nothing() {
    let (ls, model) = parabola_start(1);
    let before = ls.eval_count();
    let (out, trace) = refine_until_budget(model, &ls, &config(12, 1)).unwrap();
    assert!(trace.records.is_empty());
    assert_eq!(trace.stop_reason, StopReason::BudgetExhausted);
    assert_eq!(out.doe().len(), 12);
    assert_eq!(ls.eval_count(), before);
}

#[test]
fn two_iterations_of_ten() {
    let (ls, model) = parabola_start(2);
    let before = ls.eval_count();
    let (out, trace) = refine_until_budget(model, &ls, &config(32, 4)).unwrap();
    assert_eq!(trace.records.len(), 2);
    assert_eq!(out.doe().len(), 32);
    assert_eq!(ls.eval_count() - before, 20);
}

#[test]
fn truncated_last_iteration() {
    let (ls, model) = parabola_start(2);
    let (out, trace) = refine_until_budget(model, &ls, &config(37, 4)).unwrap();
    let sizes: Vec<usize> = trace.records.iter().map(|r| r.doe_size).collect();
    assert_eq!(sizes, vec![22, 32, 37]);
    assert_eq!(out.doe().len(), 37);
}

#[test]
fn full_budget_run_on_the_parabola() {
    let (ls, model) = parabola_start(1);
    let before = ls.eval_count();
    let (out, trace) = refine_until_budget(model, &ls, &config(100, 1)).unwrap();
    let added = out.doe().len() - 12;
    assert_eq!((ls.eval_count() - before) as usize, added);
    assert!(trace
        .records
        .windows(2)
        .all(|w| w[1].doe_size > w[0].doe_size));
    for u in &out.doe().points()[12..] {
        assert!(u.iter().map(|v| v * v).sum::<f64>().sqrt() <= 8.0);
    }
    let last = trace
        .records
        .last()
        .expect("at least one iteration")
        .margin_mass;
    assert!(
        last < trace.initial_margin_mass,
        "{last} vs {}",
        trace.initial_margin_mass
    );

    let mut csv = Vec::new();
    trace.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("iteration,doe_size,margin_mass,wall_time_ms\n"));
    assert_eq!(text.lines().count(), trace.records.len() + 1);
}

#[test]
fn refinement_is_seed_deterministic() {
    let run = || {
        let (ls, model) = parabola_start(6);
        refine_until_budget(model, &ls, &config(42, 9)).unwrap().0
    };
    assert_eq!(run().doe(), run().doe());
}
