use gucon_core::algebra::{evaluate, TermPattern, Variable};
use gucon_core::engine::{augment_rule, exec_variable, get_obligation_states, ComplianceStatus, StateSet};
use gucon_core::kb::load_kb;
use gucon_core::report::{build_report, read_report, ReportMeta};
use gucon_core::syntax::{parse_rule_text, parse_turtle_star, serialize_turtle_star};
use gucon_core::ucp::{encode_ucp, parse_policy_graph, parse_policy_text, PolicyFormat};
use gucon_core::vocab::{EX, EXP, GUCON};
use gucon_core::{Iri, Term, TimeInstant};
use gucon_testkit::fixtures::*;

fn expected_states(id: &str) -> StateSet {
    // Expected states column of the hospital correctness matrix.
    let (a, ns, f, v, e) = (
        StateSet::ACTIVE,
        StateSet::NOT_SATISFIED,
        StateSet::FULFILLED,
        StateSet::VIOLATED,
        StateSet::EXPIRED,
    );
    match id {
        "S11" | "S21" | "S31" => a | ns,
        "S12" | "S22" | "S32" => a | f,
        "S23" | "S33" => e | v,
        "S24" | "S34" => e | f,
        _ => unreachable!(),
    }
}

#[test]
fn correctness_matrix() {
    for case in STATE_CASES {
        let states = get_obligation_states(&case.policy(), &case.kb(), case.evaluation_time()).unwrap();
        assert_eq!(states.len(), 1, "{}", case.id);
        assert_eq!(states.entries[0].1, expected_states(case.id), "{}", case.id);
        let violated = expected_states(case.id).contains(StateSet::VIOLATED);
        assert_eq!(
            states.status() == ComplianceStatus::NonCompliant,
            violated,
            "{}",
            case.id
        );
    }
}

#[test]
fn hospital_rule_shape() {
    let rule = parse_rule_text(HOSPITAL_RULE).unwrap();
    assert_eq!(rule.condition.triple_pattern_count(), 7);
    assert_eq!(rule.condition.bind_count(), 2);
    assert_eq!(rule.action.actor, TermPattern::var("doctor"));
    assert_eq!(rule.action.action, TermPattern::iri(&format!("{GUCON}sign")));
    assert_eq!(rule.action.resource, TermPattern::var("diagnosisReport"));
    assert_eq!(rule.start, Some(TermPattern::var("startTime")));
    assert_eq!(rule.deadline, Some(TermPattern::var("deadline")));
}

#[test]
fn hospital_kb_split() {
    let graph = parse_turtle_star(HOSPITAL_KB).unwrap();
    let kb = load_kb(&graph, Iri::new(HOSPITAL_KB_IRI)).unwrap();
    assert_eq!(kb.dkb().len(), 11);
    assert_eq!(kb.events().len(), 1);
    let event = &kb.events()[0];
    assert_eq!(event.actor, Term::iri(&format!("{EX}doctor-angelika-smith")));
    assert_eq!(event.exec, dt("2025-07-20T12:30:00+02:00"));
    assert_eq!(kb.dkb().len() + kb.events().len(), graph.len());
}

#[test]
fn augmented_rule_binds_execution_time() {
    let rule = parse_rule_text(HOSPITAL_RULE).unwrap();
    let kb = load_kb(&parse_turtle_star(HOSPITAL_KB).unwrap(), Iri::new(HOSPITAL_KB_IRI)).unwrap();
    let snapshot = kb.snapshot(dt(HOSPITAL_EVALUATION_TIME));
    let mappings = evaluate(&augment_rule(&rule), &snapshot);
    assert_eq!(mappings.len(), 1);
    assert_eq!(
        mappings[0].get(&exec_variable()).and_then(Term::as_datetime),
        Some(dt("2025-07-20T12:30:00+02:00"))
    );
    assert_eq!(
        mappings[0].get(&Variable::new("deadline")).and_then(Term::as_datetime),
        Some(dt("2025-07-20T22:30:00+02:00"))
    );
}

#[test]
fn hospital_end_to_end_with_report() {
    let policy = parse_policy_text(HOSPITAL_RULE, None).unwrap();
    let kb = load_kb(&parse_turtle_star(HOSPITAL_KB).unwrap(), Iri::new(HOSPITAL_KB_IRI)).unwrap();
    let t = dt(HOSPITAL_EVALUATION_TIME);
    let states = get_obligation_states(&policy, &kb, t).unwrap();
    assert_eq!(states.len(), 1);
    let (o, s) = &states.entries[0];
    assert_eq!(*s, StateSet::FULFILLED | StateSet::EXPIRED);
    assert_eq!(o.start, TimeInstant::Finite(dt("2025-07-20T10:30:00+02:00")));
    assert_eq!(o.deadline, TimeInstant::Finite(dt("2025-07-20T22:30:00+02:00")));
    assert_eq!(o.exec_times, vec![dt("2025-07-20T12:30:00+02:00")]);
    assert_eq!(states.status(), ComplianceStatus::Compliant);

    let meta = ReportMeta::new(
        Iri::new(format!("{EXP}policy-obligation-sign-diagnosis-report")),
        kb.iri().clone(),
        dt("2025-07-21T10:00:12+02:00"),
    );
    let text = serialize_turtle_star(&build_report(&states, states.status(), &meta));
    let back = read_report(&parse_turtle_star(&text).unwrap()).unwrap();
    assert!(back.describes(&states));
    assert_eq!(back.status, ComplianceStatus::Compliant);
    assert!(text.contains("gucon:hasComplianceStatus gucon:COMPLIANT"), "{text}");
}

#[test]
fn hospital_ucp_policy() {
    let doc = parse_policy_text(HOSPITAL_POLICY, None).unwrap();
    assert_eq!(doc.len(), 1);
    let policy_iri = Iri::new(format!("{EXP}policy-obligation-sign-diagnosis-report"));
    assert_eq!(doc.rules[0].policy.as_ref(), Some(&policy_iri));
    let meta = doc.metadata(&policy_iri).unwrap();
    assert_eq!(meta.creator, Some(Term::iri(&format!("{EX}ines-akaichi"))));
    assert_eq!(meta.description.as_deref(), Some("an example policy"));
    // Same rule body as the arrow form.
    let arrow = parse_rule_text(HOSPITAL_RULE).unwrap();
    assert_eq!(doc.rules[0].condition, arrow.condition);
    assert_eq!(doc.rules[0].action, arrow.action);
    assert_eq!(PolicyFormat::detect(HOSPITAL_POLICY), PolicyFormat::Ucp);

    let again = parse_policy_graph(&encode_ucp(&doc)).unwrap();
    assert_eq!(again, doc);
}

#[test]
fn active_inside_window() {
    let policy = parse_policy_text(HOSPITAL_RULE, None).unwrap();
    let kb = load_kb(&parse_turtle_star(S3_KB).unwrap(), Iri::new(HOSPITAL_KB_IRI)).unwrap();
    let active = gucon_core::engine::active_rules(&policy, &kb, dt("2025-07-20T12:00:00+02:00")).unwrap();
    assert_eq!(active.len(), 1);
    let before = gucon_core::engine::active_rules(&policy, &kb, dt("2025-07-20T10:29:59+02:00")).unwrap();
    assert!(before.is_empty());
}
