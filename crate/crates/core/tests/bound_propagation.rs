//! Bound propagation against closed forms, hand-derived optima, and the
//! brute-force LP oracle.

mod common;

use coherence_core::{
    cm_bounds, extension_set, propagate, propagate_point, propagate_recorded, rat, wt_bounds,
    BoxAssessment, ConditionalEvent, EngineConfig, Event, Interval, PreciseAssessment,
    PropagationBranch, Rational,
};

fn atom(s: &str) -> Event {
    Event::atom(s)
}

fn ce(consequent: Event, antecedent: Event) -> ConditionalEvent {
    ConditionalEvent::new(consequent, antecedent).unwrap()
}

fn pa(values: &[Rational]) -> PreciseAssessment {
    PreciseAssessment::new(values.to_vec()).unwrap()
}

fn closed(lo: Rational, hi: Rational) -> Interval {
    Interval::closed(lo, hi).unwrap()
}

fn transitive_family() -> Vec<ConditionalEvent> {
    vec![
        ce(atom("C"), atom("B")),
        ce(atom("B"), atom("A")),
        ce(atom("A"), atom("A").or(atom("B"))),
    ]
}

fn transitive_target() -> ConditionalEvent {
    ce(atom("C"), atom("A"))
}

fn monotonicity_family() -> Vec<ConditionalEvent> {
    vec![ce(atom("C"), atom("A")), ce(atom("B"), atom("A"))]
}

fn monotonicity_target() -> ConditionalEvent {
    ce(atom("C"), atom("A").and(atom("B")))
}

#[test]
fn minimization_layer_reaches_the_known_optimum() {
    // at (4/5, 9/10, 9/10) the lower probe is infeasible and the
    // minimization layer must land exactly on 157/225
    let res = propagate_point(
        &transitive_family(),
        &pa(&[rat(4, 5), rat(9, 10), rat(9, 10)]),
        &transitive_target(),
    )
    .unwrap();
    assert_eq!(res.interval.lo(), &rat(157, 225));
    assert_eq!(res.lower.branch, PropagationBranch::Optimized);
    assert_eq!(
        res.interval,
        wt_bounds(&rat(4, 5), &rat(9, 10), &rat(9, 10)).unwrap()
    );
}

#[test]
fn probe_feasibility_splits_on_the_case_condition() {
    // (1/2, 1/2, 1/2): both probes feasible, extension unconstrained
    let free = propagate_point(
        &transitive_family(),
        &pa(&[rat(1, 2), rat(1, 2), rat(1, 2)]),
        &transitive_target(),
    )
    .unwrap();
    assert_eq!(free.interval, Interval::unit());

    // (1, 1, 1): the zero probe is infeasible and the bound is sure
    let sure = propagate_point(
        &transitive_family(),
        &pa(&[rat(1, 1), rat(1, 1), rat(1, 1)]),
        &transitive_target(),
    )
    .unwrap();
    assert_eq!(sure.interval, Interval::point(rat(1, 1)));
    assert_eq!(sure.lower.branch, PropagationBranch::Optimized);
    assert_eq!(sure.upper.branch, PropagationBranch::ProbeAttained);
}

#[test]
fn box_envelopes_grow_with_the_box() {
    let family = transitive_family();
    let target = transitive_target();
    let narrow = BoxAssessment::new(vec![
        Interval::point(rat(1, 1)),
        closed(rat(3, 4), rat(1, 1)),
        closed(rat(1, 2), rat(3, 4)),
    ])
    .unwrap();
    let wide = BoxAssessment::new(vec![
        closed(rat(3, 4), rat(1, 1)),
        closed(rat(1, 2), rat(1, 1)),
        closed(rat(1, 4), rat(1, 1)),
    ])
    .unwrap();
    let narrow_res = propagate(&family, &narrow, &target).unwrap();
    let wide_res = propagate(&family, &wide, &target).unwrap();
    assert!(narrow_res.interval.subset_of(&wide_res.interval));

    let full = BoxAssessment::new(vec![Interval::unit(); 3]).unwrap();
    let full_res = propagate(&family, &full, &target).unwrap();
    assert_eq!(full_res.interval, Interval::unit());
    assert!(wide_res.interval.subset_of(&full_res.interval));
}

#[test]
fn closed_forms_match_the_engine_on_a_coarse_grid() {
    let family = transitive_family();
    let target = transitive_target();
    let grid: Vec<Rational> = (0..=2).map(|k| rat(k, 2)).collect();
    for x in &grid {
        for y in &grid {
            for t in &grid {
                let expected = wt_bounds(x, y, t).unwrap();
                let got = propagate_point(
                    &family,
                    &pa(&[x.clone(), y.clone(), t.clone()]),
                    &target,
                )
                .unwrap();
                assert_eq!(got.interval, expected, "wt mismatch at ({x}, {y}, {t})");
            }
        }
    }
    let family = monotonicity_family();
    let target = monotonicity_target();
    for x in &grid {
        for y in &grid {
            let expected = cm_bounds(x, y).unwrap();
            let got =
                propagate_point(&family, &pa(&[x.clone(), y.clone()]), &target).unwrap();
            assert_eq!(got.interval, expected, "cm mismatch at ({x}, {y})");
        }
    }
}

#[test]
fn monotonicity_bounds_pin_their_examples() {
    assert_eq!(
        cm_bounds(&rat(1, 1), &rat(1, 1)).unwrap(),
        Interval::point(rat(1, 1))
    );
    assert_eq!(
        cm_bounds(&rat(4, 5), &rat(9, 10)).unwrap(),
        closed(rat(7, 9), rat(8, 9))
    );
    assert_eq!(
        cm_bounds(&rat(0, 1), &rat(1, 1)).unwrap(),
        Interval::point(rat(0, 1))
    );
}

#[test]
fn every_recorded_program_agrees_with_the_vertex_oracle() {
    // spot coverage at interesting points; the acceptance suite replays
    // the full grids
    let family = transitive_family();
    let target = transitive_target();
    let mut programs = Vec::new();
    for (x, y, t) in [
        (rat(1, 1), rat(1, 1), rat(1, 2)),
        (rat(4, 5), rat(9, 10), rat(9, 10)),
        (rat(1, 2), rat(1, 2), rat(1, 2)),
        (rat(1, 3), rat(2, 3), rat(0, 1)),
    ] {
        let bx = BoxAssessment::new(vec![
            Interval::point(x),
            Interval::point(y),
            Interval::point(t),
        ])
        .unwrap();
        let (_, mut recorded) = propagate_recorded(&family, &bx, &target).unwrap();
        programs.append(&mut recorded);
    }
    let checked = common::assert_oracle_agrees(&programs);
    assert!(checked >= 20, "expected a substantial replay, got {checked}");
}

#[test]
fn witnessed_extensions_stay_inside_the_envelope() {
    let family = transitive_family();
    let target = transitive_target();
    let config = EngineConfig {
        budget: 120,
        ..EngineConfig::default()
    };
    let bx = BoxAssessment::new(vec![
        Interval::point(rat(1, 1)),
        Interval::unit_above_zero(),
        Interval::unit_above_zero(),
    ])
    .unwrap();
    let ext = extension_set(&bx, &family, &target, &config).unwrap();
    assert!(!ext.inner.is_empty());
    for achieved in &ext.inner {
        assert!(achieved.interval.subset_of(&ext.outer));
        // endpoint witnesses re-verify: premise point coheres and its
        // propagated interval has the claimed endpoint
        let lo_point = pa(achieved.lo_witness.values());
        let res = propagate_point(&family, &lo_point, &target).unwrap();
        assert_eq!(res.interval.lo(), achieved.interval.lo());
    }
    assert_eq!(ext.outer, Interval::unit());
}
