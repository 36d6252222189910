use std::collections::BTreeSet;

use gucon_core::algebra::{evaluate, evaluate_unordered, GraphPattern, TermPattern};
use gucon_core::engine::check_rule_compliance_atemporal;
use gucon_testkit::gen::{random_atemporal_case, random_graph, random_pattern};
use gucon_testkit::oracle::{oracle_atemporal_compliance, oracle_evaluate};
use gucon_testkit::rng;

fn has_quoted(p: &GraphPattern) -> bool {
    match p {
        GraphPattern::Empty => false,
        GraphPattern::Triple(tp) => {
            matches!(tp.subject, TermPattern::Triple(_)) || matches!(tp.object, TermPattern::Triple(_))
        }
        GraphPattern::And(l, r)
        | GraphPattern::Union(l, r)
        | GraphPattern::Optional(l, r)
        | GraphPattern::Minus(l, r) => has_quoted(l) || has_quoted(r),
        GraphPattern::Filter(i, _) | GraphPattern::Bind(i, _, _) => has_quoted(i),
    }
}

fn operator_kinds(p: &GraphPattern, out: &mut BTreeSet<&'static str>) {
    let name = match p {
        GraphPattern::And(..) => "and",
        GraphPattern::Union(..) => "union",
        GraphPattern::Optional(..) => "opt",
        GraphPattern::Minus(..) => "minus",
        GraphPattern::Filter(..) => "filter",
        GraphPattern::Bind(..) => "bind",
        _ => return,
    };
    out.insert(name);
    match p {
        GraphPattern::And(l, r)
        | GraphPattern::Union(l, r)
        | GraphPattern::Optional(l, r)
        | GraphPattern::Minus(l, r) => {
            operator_kinds(l, out);
            operator_kinds(r, out);
        }
        GraphPattern::Filter(i, _) | GraphPattern::Bind(i, _, _) => operator_kinds(i, out),
        _ => {}
    }
}

#[test]
fn evaluator_matches_enumeration() {
    let mut r = rng(0xA15E);
    let mut kinds = BTreeSet::new();
    let (mut quoted, mut nonempty) = (0, 0);
    for i in 0..400 {
        let graph = random_graph(&mut r, 8);
        let pattern = random_pattern(&mut r, 4, 3);
        assert!(pattern.operator_count() <= 4);
        assert!(pattern.variables().len() <= 3);
        operator_kinds(&pattern, &mut kinds);
        quoted += has_quoted(&pattern) as usize;
        let got: BTreeSet<_> = evaluate(&pattern, &graph).into_iter().collect();
        let want = oracle_evaluate(&pattern, &graph);
        nonempty += (!want.is_empty() && want.iter().any(|m| !m.is_empty())) as usize;
        assert_eq!(got, want, "case {i}: {pattern:?}\n{graph:?}");
    }
    assert_eq!(kinds.len(), 6, "{kinds:?}");
    assert!(quoted > 40, "{quoted}");
    assert!(nonempty > 40, "{nonempty}");
}

#[test]
fn evaluation_is_duplicate_free_and_order_independent() {
    let mut r = rng(7);
    for _ in 0..100 {
        let graph = random_graph(&mut r, 8);
        let pattern = random_pattern(&mut r, 4, 3);
        let sorted = evaluate(&pattern, &graph);
        let set: BTreeSet<_> = sorted.iter().cloned().collect();
        assert_eq!(set.len(), sorted.len());
        let reversed: gucon_core::Graph = graph.sorted().into_iter().rev().cloned().collect();
        let other: BTreeSet<_> = evaluate_unordered(&pattern, &reversed).into_iter().collect();
        assert_eq!(set, other);
    }
}

#[test]
fn union_commutes_and_join_with_empty_is_identity() {
    let mut r = rng(11);
    for _ in 0..100 {
        let graph = random_graph(&mut r, 8);
        let a = random_pattern(&mut r, 2, 3);
        let b = random_pattern(&mut r, 2, 3);
        let ab: BTreeSet<_> = evaluate(&a.clone().union(b.clone()), &graph).into_iter().collect();
        let ba: BTreeSet<_> = evaluate(&b.clone().union(a.clone()), &graph).into_iter().collect();
        assert_eq!(ab, ba);
        let plain = evaluate(&a, &graph);
        assert_eq!(evaluate(&GraphPattern::Empty.and(a.clone()), &graph), plain);
    }
}

#[test]
fn atemporal_compliance_matches_membership_check() {
    let mut r = rng(0xC0DE);
    let (mut yes, mut no) = (0, 0);
    for i in 0..300 {
        let (rule, graph) = random_atemporal_case(&mut r);
        let got = check_rule_compliance_atemporal(&rule, &graph);
        assert_eq!(
            got,
            oracle_atemporal_compliance(&rule, &graph),
            "case {i}: {rule:?}\n{graph:?}"
        );
        if got {
            yes += 1
        } else {
            no += 1
        }
    }
    assert!(yes > 20 && no > 20, "{yes}/{no}");
}
