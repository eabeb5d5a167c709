//! Knowledge-base reasoning: the four certified transitivity shapes, the
//! monotonicity rules, conjugacy, sub-sequence behavior, and verified
//! counterexamples.

use coherence_core::{
    check_coherence, conjugate, kb_to_assessment, p_consistent, p_entails, rat, CertifiedRule,
    ConsistencyStatus, EngineConfig, EntailmentStatus, Event, Interval, KbError, KnowledgeBase,
    PreciseAssessment, Statement, StatementKind,
};

fn atom(s: &str) -> Event {
    Event::atom(s)
}

fn st(kind: StatementKind, antecedent: Event, consequent: Event) -> Statement {
    Statement::new(kind, antecedent, consequent).unwrap()
}

fn kb(statements: Vec<Statement>) -> KnowledgeBase {
    KnowledgeBase::new(statements).unwrap()
}

// (B~>C, A~>B, A|B ~/> !A) with conclusion A~>C
fn outer_exception_kb() -> KnowledgeBase {
    kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::Default, atom("A"), atom("B")),
        st(
            StatementKind::NegatedDefault,
            atom("A").or(atom("B")),
            atom("A").not(),
        ),
    ])
}

// (B~>C, A~/>!B, A|B ~/> !A) with conclusion A~/>!C
fn negated_outer_exception_kb() -> KnowledgeBase {
    kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::NegatedDefault, atom("A"), atom("B").not()),
        st(
            StatementKind::NegatedDefault,
            atom("A").or(atom("B")),
            atom("A").not(),
        ),
    ])
}

// (B~>C, A~>B, B ~/> !A) with conclusion A~>C
fn inner_exception_kb() -> KnowledgeBase {
    kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::Default, atom("A"), atom("B")),
        st(StatementKind::NegatedDefault, atom("B"), atom("A").not()),
    ])
}

// (B~>C, A~/>!B, B ~/> !A) with conclusion A~/>!C
fn negated_inner_exception_kb() -> KnowledgeBase {
    kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::NegatedDefault, atom("A"), atom("B").not()),
        st(StatementKind::NegatedDefault, atom("B"), atom("A").not()),
    ])
}

fn sure_conclusion() -> Statement {
    st(StatementKind::Default, atom("A"), atom("C"))
}

fn below_conclusion() -> Statement {
    st(StatementKind::NegatedDefault, atom("A"), atom("C").not())
}

fn expect_certificate(
    base: &KnowledgeBase,
    conclusion: &Statement,
    rule: CertifiedRule,
) -> Vec<usize> {
    let verdict = p_entails(base, conclusion, &EngineConfig::default()).unwrap();
    match verdict.status {
        EntailmentStatus::Entailed { certificate } => {
            assert_eq!(certificate.rule, rule);
            certificate.premise_indices
        }
        other => panic!("expected a {rule} certificate, got {other:?}"),
    }
}

#[test]
fn all_four_transitivity_shapes_certify() {
    assert_eq!(
        expect_certificate(
            &outer_exception_kb(),
            &sure_conclusion(),
            CertifiedRule::WeakTransitivity
        ),
        vec![0, 1, 2]
    );
    assert_eq!(
        expect_certificate(
            &negated_outer_exception_kb(),
            &below_conclusion(),
            CertifiedRule::NegatedWeakTransitivity
        ),
        vec![0, 1, 2]
    );
    assert_eq!(
        expect_certificate(
            &inner_exception_kb(),
            &sure_conclusion(),
            CertifiedRule::WeakTransitivityInnerException
        ),
        vec![0, 1, 2]
    );
    assert_eq!(
        expect_certificate(
            &negated_inner_exception_kb(),
            &below_conclusion(),
            CertifiedRule::NegatedWeakTransitivityInnerException
        ),
        vec![0, 1, 2]
    );
}

#[test]
fn matching_is_semantic_not_syntactic() {
    // same base with the third antecedent written B|A instead of A|B and
    // a doubly-negated consequent
    let base = kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::Default, atom("A"), atom("B").not().not()),
        st(
            StatementKind::NegatedDefault,
            atom("B").or(atom("A")),
            atom("A").not(),
        ),
    ]);
    assert_eq!(
        expect_certificate(&base, &sure_conclusion(), CertifiedRule::WeakTransitivity),
        vec![0, 1, 2]
    );
}

#[test]
fn monotonicity_rules_certify() {
    let cautious = kb(vec![
        st(StatementKind::Default, atom("A"), atom("C")),
        st(StatementKind::Default, atom("A"), atom("B")),
    ]);
    let conclusion = st(StatementKind::Default, atom("A").and(atom("B")), atom("C"));
    assert_eq!(
        expect_certificate(&cautious, &conclusion, CertifiedRule::CautiousMonotonicity),
        vec![0, 1]
    );

    let rational = kb(vec![
        st(StatementKind::Default, atom("A"), atom("C")),
        st(StatementKind::NegatedDefault, atom("A"), atom("B").not()),
    ]);
    assert_eq!(
        expect_certificate(&rational, &conclusion, CertifiedRule::RationalMonotonicity),
        vec![0, 1]
    );
}

#[test]
fn conjugation_preserves_every_verdict_in_the_corpus() {
    let config = EngineConfig::default();
    let cases: Vec<(KnowledgeBase, Statement)> = vec![
        (outer_exception_kb(), sure_conclusion()),
        (negated_outer_exception_kb(), below_conclusion()),
        (inner_exception_kb(), sure_conclusion()),
        (negated_inner_exception_kb(), below_conclusion()),
        (
            kb(vec![
                st(StatementKind::Default, atom("B"), atom("C")),
                st(StatementKind::Default, atom("A"), atom("B")),
            ]),
            sure_conclusion(),
        ),
    ];
    for (base, conclusion) in cases {
        let rewritten = conjugate(&base);
        let direct = p_consistent(&base, &config).unwrap().status;
        let other = p_consistent(&rewritten, &config).unwrap().status;
        assert_eq!(
            matches!(direct, ConsistencyStatus::PConsistent { .. }),
            matches!(other, ConsistencyStatus::PConsistent { .. })
        );
        let direct = p_entails(&base, &conclusion, &config).unwrap().status;
        let other = p_entails(&rewritten, &conclusion, &config).unwrap().status;
        let tag = |s: &EntailmentStatus| match s {
            EntailmentStatus::Entailed { .. } => 0,
            EntailmentStatus::NotEntailed { .. } => 1,
            EntailmentStatus::Unknown => 2,
        };
        assert_eq!(tag(&direct), tag(&other));
    }
}

#[test]
fn fresh_statements_do_not_break_a_certified_entailment() {
    let mut statements = outer_exception_kb().statements().to_vec();
    statements.push(st(StatementKind::Default, atom("D"), atom("E")));
    let extended = kb(statements);
    let config = EngineConfig::default();
    assert!(matches!(
        p_consistent(&extended, &config).unwrap().status,
        ConsistencyStatus::PConsistent { .. }
    ));
    let verdict = p_entails(&extended, &sure_conclusion(), &config).unwrap();
    match verdict.status {
        EntailmentStatus::Entailed { certificate } => {
            assert_eq!(certificate.rule, CertifiedRule::WeakTransitivity);
            assert_eq!(certificate.premise_indices, vec![0, 1, 2]);
        }
        other => panic!("expected the sub-sequence certificate, got {other:?}"),
    }
}

#[test]
fn sub_sequences_of_a_consistent_base_stay_consistent() {
    let base = negated_outer_exception_kb();
    let config = EngineConfig::default();
    assert!(matches!(
        p_consistent(&base, &config).unwrap().status,
        ConsistencyStatus::PConsistent { .. }
    ));
    let statements = base.statements();
    for keep in 1..8u8 {
        let sub: Vec<Statement> = statements
            .iter()
            .enumerate()
            .filter(|(i, _)| keep >> i & 1 == 1)
            .map(|(_, s)| s.clone())
            .collect();
        if sub.is_empty() {
            continue;
        }
        let sub = kb(sub);
        assert!(
            matches!(
                p_consistent(&sub, &config).unwrap().status,
                ConsistencyStatus::PConsistent { .. }
            ),
            "sub-sequence {keep:03b} lost consistency"
        );
    }
}

#[test]
fn counterexamples_reverify_against_the_coherence_checker() {
    let base = kb(vec![
        st(StatementKind::Default, atom("B"), atom("C")),
        st(StatementKind::Default, atom("A"), atom("B")),
    ]);
    let config = EngineConfig::default();
    for conclusion in [sure_conclusion(), below_conclusion()] {
        let verdict = p_entails(&base, &conclusion, &config).unwrap();
        let EntailmentStatus::NotEntailed { counterexample } = verdict.status else {
            panic!("plain transitivity must be refuted");
        };
        let (mut family, _) = kb_to_assessment(&base);
        family.push(conclusion.conditional());
        let mut values = counterexample.premise_values.values().to_vec();
        values.push(counterexample.z.clone());
        let extended = PreciseAssessment::new(values).unwrap();
        assert!(check_coherence(&extended, &family).unwrap().coherent);
        match conclusion.kind() {
            StatementKind::Default => assert!(counterexample.z < rat(1, 1)),
            StatementKind::NegatedDefault => assert_eq!(counterexample.z, rat(1, 1)),
            _ => unreachable!(),
        }
    }
}

#[test]
fn entailment_requires_a_consistent_base_and_a_queryable_conclusion() {
    let config = EngineConfig::default();
    let clash = kb(vec![
        st(StatementKind::Default, atom("A"), atom("B")),
        st(StatementKind::NegConsequentDefault, atom("A"), atom("B")),
    ]);
    assert!(matches!(
        p_entails(&clash, &sure_conclusion(), &config),
        Err(KbError::Inconsistent)
    ));
    let base = outer_exception_kb();
    let conjugate_form = st(StatementKind::NegatedNegDefault, atom("A"), atom("C"));
    assert!(matches!(
        p_entails(&base, &conjugate_form, &config),
        Err(KbError::UnsupportedConclusion { .. })
    ));
}

#[test]
fn table_interval_assignments_survive_assessment_building() {
    let base = kb(vec![
        st(StatementKind::Default, atom("A"), atom("B")),
        st(StatementKind::NegConsequentDefault, atom("A"), atom("B")),
        st(StatementKind::NegatedDefault, atom("A"), atom("B")),
        st(StatementKind::NegatedNegDefault, atom("A"), atom("B")),
    ]);
    let (family, bx) = kb_to_assessment(&base);
    assert_eq!(family.len(), 4);
    for ce in &family {
        assert_eq!(format!("{ce}"), "[B : A]");
    }
    assert_eq!(bx.intervals()[0], Interval::point(rat(1, 1)));
    assert_eq!(bx.intervals()[1], Interval::point(rat(0, 1)));
    assert_eq!(bx.intervals()[2], Interval::unit_below_one());
    assert_eq!(bx.intervals()[3], Interval::unit_above_zero());
}
