//! Random graphs, patterns, temporal KBs and obligations over a small
//! vocabulary, so that random patterns actually match.

use rand::seq::IndexedRandom;
use rand::Rng;

use gucon_core::algebra::{
    Expression, GraphPattern, SolutionMapping, Substitute, TermPattern, TriplePattern, Variable,
};
use gucon_core::kb::{Event, TemporalKB};
use gucon_core::policy::{ActionPattern, AtemporalRule};
use gucon_core::{DateTime, Graph, Iri, Literal, Term, TimeInstant, Triple};

use crate::oracle::oracle_evaluate;

pub const NS: &str = "http://example.org/t/";

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}"))
}

const NODES: [&str; 4] = ["a", "b", "c", "d"];
const PREDICATES: [&str; 3] = ["p", "q", "r"];
const VARS: [&str; 3] = ["x", "y", "z"];

fn node(rng: &mut impl Rng) -> Term {
    Term::Iri(iri(NODES.choose(rng).unwrap()))
}

fn predicate(rng: &mut impl Rng) -> Iri {
    iri(PREDICATES.choose(rng).unwrap())
}

fn literal(rng: &mut impl Rng) -> Term {
    match rng.random_range(0..4) {
        0 => Literal::integer(rng.random_range(1..=3)).into(),
        1 => Literal::string(["u", "v"].choose(rng).unwrap().to_string()).into(),
        2 => Literal::boolean(rng.random_bool(0.5)).into(),
        _ => Literal::datetime(DateTime::from_timestamp_millis(rng.random_range(0..3) * 3_600_000, 0).unwrap()).into(),
    }
}

fn flat_triple(rng: &mut impl Rng) -> Triple {
    let object = if rng.random_bool(0.7) { node(rng) } else { literal(rng) };
    Triple::new(node(rng), predicate(rng), object)
}

/// A random ground triple; about a third carry a quoted triple, and
/// nesting goes at most two levels deep.
pub fn random_triple(rng: &mut impl Rng) -> Triple {
    let depth_roll = rng.random_range(0..10);
    let quoted = |rng: &mut _, depth: u32| {
        let mut t = flat_triple(rng);
        if depth > 1 {
            t = Triple::new(Term::Triple(t.into()), predicate(rng), node(rng));
        }
        Term::Triple(t.into())
    };
    match depth_roll {
        0..=5 => flat_triple(rng),
        6 | 7 => Triple::new(
            quoted(rng, 1),
            predicate(rng),
            if rng.random_bool(0.5) { node(rng) } else { literal(rng) },
        ),
        8 => Triple::new(node(rng), predicate(rng), quoted(rng, 1)),
        _ => Triple::new(quoted(rng, 2), predicate(rng), literal(rng)),
    }
}

/// Up to `max` distinct random triples.
pub fn random_graph(rng: &mut impl Rng, max: usize) -> Graph {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| random_triple(rng)).collect()
}

fn var(rng: &mut impl Rng, vars: usize) -> Variable {
    Variable::new(VARS[rng.random_range(0..vars.clamp(1, VARS.len()))])
}

fn term_pattern(rng: &mut impl Rng, vars: usize, subject: bool, depth: u32) -> TermPattern {
    match rng.random_range(0..10) {
        0..=4 => TermPattern::Variable(var(rng, vars)),
        5 | 6 => TermPattern::Term(node(rng)),
        7 if !subject => TermPattern::Term(literal(rng)),
        8 | 9 if depth < 2 => TermPattern::quoted(
            term_pattern(rng, vars, true, depth + 1),
            predicate_pattern(rng, vars),
            term_pattern(rng, vars, false, depth + 1),
        ),
        _ => TermPattern::Term(node(rng)),
    }
}

fn predicate_pattern(rng: &mut impl Rng, vars: usize) -> TermPattern {
    if rng.random_bool(0.15) {
        TermPattern::Variable(var(rng, vars))
    } else {
        TermPattern::Term(Term::Iri(predicate(rng)))
    }
}

pub fn random_triple_pattern(rng: &mut impl Rng, vars: usize) -> TriplePattern {
    TriplePattern::new(
        term_pattern(rng, vars, true, 0),
        predicate_pattern(rng, vars),
        term_pattern(rng, vars, false, 0),
    )
}

fn operand(rng: &mut impl Rng, vars: usize) -> Expression {
    match rng.random_range(0..5) {
        0..=2 => Expression::Variable(var(rng, vars)),
        3 => Expression::Constant(literal(rng)),
        _ => Expression::Constant(node(rng)),
    }
}

/// A small boolean expression over `vars` variables.
pub fn random_expression(rng: &mut impl Rng, vars: usize) -> Expression {
    let b = |e: Expression| Box::new(e);
    match rng.random_range(0..9) {
        0 => Expression::Equal(b(operand(rng, vars)), b(operand(rng, vars))),
        1 => Expression::NotEqual(b(operand(rng, vars)), b(operand(rng, vars))),
        2 => Expression::Less(b(operand(rng, vars)), b(operand(rng, vars))),
        3 => Expression::GreaterOrEqual(
            b(operand(rng, vars)),
            b(Expression::Constant(Literal::integer(2).into())),
        ),
        4 => Expression::Not(b(random_expression(rng, vars))),
        5 => Expression::And(b(random_expression(rng, vars)), b(random_expression(rng, vars))),
        6 => Expression::Or(b(random_expression(rng, vars)), b(random_expression(rng, vars))),
        7 => Expression::Equal(
            b(Expression::Add(
                b(operand(rng, vars)),
                b(Expression::Constant(Literal::integer(1).into())),
            )),
            b(operand(rng, vars)),
        ),
        _ => operand(rng, vars),
    }
}

fn bind_expression(rng: &mut impl Rng, vars: usize) -> Expression {
    let b = |e: Expression| Box::new(e);
    match rng.random_range(0..4) {
        0 => operand(rng, vars),
        1 => Expression::Add(
            b(operand(rng, vars)),
            b(Expression::Constant(Literal::integer(1).into())),
        ),
        2 => Expression::Constant(literal(rng)),
        _ => random_expression(rng, vars),
    }
}

/// A random pattern with at most `ops` operators over at most `vars`
/// variables. BIND targets are never in scope of their inner pattern.
pub fn random_pattern(rng: &mut impl Rng, ops: usize, vars: usize) -> GraphPattern {
    if ops == 0 {
        return if rng.random_range(0..12) == 0 {
            GraphPattern::Empty
        } else {
            GraphPattern::Triple(random_triple_pattern(rng, vars))
        };
    }
    let used = rng.random_range(1..=ops);
    let left_budget = rng.random_range(0..used);
    let right_budget = used - 1 - left_budget;
    match rng.random_range(0..6) {
        0 => random_pattern(rng, left_budget, vars).and(random_pattern(rng, right_budget, vars)),
        1 => random_pattern(rng, left_budget, vars).union(random_pattern(rng, right_budget, vars)),
        2 => random_pattern(rng, left_budget, vars).optional(random_pattern(rng, right_budget, vars)),
        3 => random_pattern(rng, left_budget, vars).minus(random_pattern(rng, right_budget, vars)),
        4 => random_pattern(rng, used - 1, vars).filter(random_expression(rng, vars)),
        _ => {
            let inner = random_pattern(rng, used - 1, vars);
            let scope = inner.in_scope_variables();
            let free: Vec<&str> = VARS[..vars.clamp(1, VARS.len())]
                .iter()
                .copied()
                .filter(|v| !scope.contains(&Variable::new(*v)))
                .collect();
            match free.choose(rng) {
                Some(v) => {
                    let e = bind_expression(rng, vars);
                    inner.bind(Variable::new(*v), e)
                }
                None => inner.filter(random_expression(rng, vars)),
            }
        }
    }
}

/// A dateTime within a month of 2025-01-01, with one of three offsets.
pub fn random_datetime(rng: &mut impl Rng) -> DateTime {
    let base = 1_735_689_600_000i64;
    let minutes = rng.random_range(0..30 * 24 * 60);
    let offset = [0, 7200, -18000].choose(rng).copied().unwrap();
    DateTime::from_timestamp_millis(base + minutes * 60_000, offset).unwrap()
}

/// A finite instant, or an infinity about one time in five.
pub fn random_instant(rng: &mut impl Rng) -> TimeInstant {
    match rng.random_range(0..10) {
        0 => TimeInstant::NegInfinity,
        1 => TimeInstant::PosInfinity,
        _ => TimeInstant::Finite(random_datetime(rng)),
    }
}

/// Random start and deadline with `start <= deadline`, never both
/// infinite, start never +∞ and deadline never −∞.
pub fn random_window(rng: &mut impl Rng) -> (TimeInstant, TimeInstant) {
    loop {
        let (a, b) = (random_instant(rng), random_instant(rng));
        let (start, deadline) = if a <= b { (a, b) } else { (b, a) };
        let degenerate = start == TimeInstant::PosInfinity
            || deadline == TimeInstant::NegInfinity
            || (!start.is_finite() && !deadline.is_finite());
        if !degenerate {
            return (start, deadline);
        }
    }
}

/// A KB with a random fact graph and up to `max_events` events over a
/// handful of ground actions.
pub fn random_temporal_kb(rng: &mut impl Rng, max_facts: usize, max_events: usize) -> TemporalKB {
    let dkb = random_graph(rng, max_facts);
    let n = rng.random_range(0..=max_events);
    let events = (0..n)
        .map(|_| {
            Event::new(
                node(rng),
                iri(["do", "sign"].choose(rng).unwrap()),
                node(rng),
                random_datetime(rng),
            )
        })
        .collect();
    TemporalKB::new(iri("kb"), dkb, events)
}

/// A random atemporal rule and a graph to check it against. The graph
/// is topped up with some of the demanded actions so both verdicts occur.
pub fn random_atemporal_case(rng: &mut impl Rng) -> (AtemporalRule, Graph) {
    let mut graph = random_graph(rng, 8);
    loop {
        let condition = random_pattern(rng, 2, 3);
        let scope: Vec<Variable> = condition.in_scope_variables().into_iter().collect();
        let actor = action_slot(rng, &scope, true);
        let resource = action_slot(rng, &scope, false);
        let action = ActionPattern::new(actor, TermPattern::Term(Term::Iri(iri("do"))), resource);
        let Ok(rule) = AtemporalRule::new(iri("rule"), condition, action) else {
            continue;
        };
        let mappings: Vec<SolutionMapping> = oracle_evaluate(&rule.condition, &graph).into_iter().collect();
        let keep = rng.random_range(0..3);
        for mu in &mappings {
            if keep == 2 || (keep == 1 && rng.random_bool(0.5)) {
                if let Ok(t) = rule.action.substitute(mu) {
                    graph.insert(t);
                }
            }
        }
        return (rule, graph);
    }
}

fn action_slot(rng: &mut impl Rng, scope: &[Variable], subject: bool) -> TermPattern {
    if !scope.is_empty() && rng.random_bool(0.7) {
        TermPattern::Variable(scope.choose(rng).unwrap().clone())
    } else if subject || rng.random_bool(0.7) {
        TermPattern::Term(node(rng))
    } else {
        TermPattern::Term(literal(rng))
    }
}
