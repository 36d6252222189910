//! A definitional evaluator. Triple patterns are answered by trying every
//! total assignment of their variables to terms of the graph; operators
//! are set comprehensions over the operand results. Slow on purpose.

use std::collections::BTreeSet;

use gucon_core::algebra::{
    eval_filter_expr, holds, GraphPattern, SolutionMapping, Substitute, TriplePattern, Variable,
};
use gucon_core::policy::AtemporalRule;
use gucon_core::{Graph, Term};

pub type Solutions = BTreeSet<SolutionMapping>;

/// Every term occurring in the graph, quoted triples and their parts
/// included, plus every predicate as an IRI term.
pub fn universe(graph: &Graph) -> Vec<Term> {
    fn walk(t: &Term, out: &mut BTreeSet<Term>) {
        out.insert(t.clone());
        if let Term::Triple(inner) = t {
            walk(&inner.subject, out);
            out.insert(Term::Iri(inner.predicate.clone()));
            walk(&inner.object, out);
        }
    }
    let mut out = BTreeSet::new();
    for triple in graph.iter() {
        walk(&triple.subject, &mut out);
        out.insert(Term::Iri(triple.predicate.clone()));
        walk(&triple.object, &mut out);
    }
    out.into_iter().collect()
}

/// All total assignments of `vars` over `universe`.
pub fn assignments(vars: &[Variable], universe: &[Term]) -> Vec<SolutionMapping> {
    let mut out = vec![SolutionMapping::new()];
    for v in vars {
        let mut next = Vec::with_capacity(out.len() * universe.len());
        for partial in &out {
            for t in universe {
                next.push(partial.clone().with(v.clone(), t.clone()));
            }
        }
        out = next;
    }
    out
}

fn triple_solutions(tp: &TriplePattern, graph: &Graph, universe: &[Term]) -> Solutions {
    let vars: Vec<Variable> = tp.variables().into_iter().collect();
    assignments(&vars, universe)
        .into_iter()
        .filter(|mu| tp.substitute(mu).is_ok_and(|t| graph.contains(&t)))
        .collect()
}

/// Evaluates `pattern` over `graph` by definition.
pub fn oracle_evaluate(pattern: &GraphPattern, graph: &Graph) -> Solutions {
    let universe = universe(graph);
    eval(pattern, graph, &universe)
}

fn eval(pattern: &GraphPattern, graph: &Graph, universe: &[Term]) -> Solutions {
    match pattern {
        GraphPattern::Empty => [SolutionMapping::new()].into_iter().collect(),
        GraphPattern::Triple(tp) => triple_solutions(tp, graph, universe),
        GraphPattern::And(l, r) => {
            let (l, r) = (eval(l, graph, universe), eval(r, graph, universe));
            let mut out = Solutions::new();
            for a in &l {
                for b in &r {
                    if a.is_compatible(b) {
                        out.insert(a.merge(b).expect("compatible"));
                    }
                }
            }
            out
        }
        GraphPattern::Union(l, r) => {
            let mut out = eval(l, graph, universe);
            out.extend(eval(r, graph, universe));
            out
        }
        GraphPattern::Optional(l, r) => {
            let (l, r) = (eval(l, graph, universe), eval(r, graph, universe));
            let mut out = Solutions::new();
            for a in &l {
                let mut extended = false;
                for b in &r {
                    if a.is_compatible(b) {
                        out.insert(a.merge(b).expect("compatible"));
                        extended = true;
                    }
                }
                if !extended {
                    out.insert(a.clone());
                }
            }
            out
        }
        GraphPattern::Minus(l, r) => {
            let (l, r) = (eval(l, graph, universe), eval(r, graph, universe));
            l.into_iter()
                .filter(|a| !r.iter().any(|b| a.is_compatible(b) && a.shares_variable(b)))
                .collect()
        }
        GraphPattern::Filter(inner, expr) => eval(inner, graph, universe)
            .into_iter()
            .filter(|mu| holds(expr, mu))
            .collect(),
        GraphPattern::Bind(inner, v, expr) => eval(inner, graph, universe)
            .into_iter()
            .map(|mu| {
                if mu.contains(v) {
                    return mu;
                }
                match eval_filter_expr(expr, &mu) {
                    Ok(value) => mu.with(v.clone(), value.to_term()),
                    Err(_) => mu,
                }
            })
            .collect(),
    }
}

/// Compliance of a graph with an atemporal rule by enumeration: each
/// mapping's action, formed by hand, must be in the graph.
pub fn oracle_atemporal_compliance(rule: &AtemporalRule, graph: &Graph) -> bool {
    oracle_evaluate(&rule.condition, graph).iter().all(|mu| {
        let ground = |p: &gucon_core::algebra::TermPattern| p.substitute(mu).ok();
        let (Some(s), Some(p), Some(o)) = (
            ground(&rule.action.actor),
            ground(&rule.action.action),
            ground(&rule.action.resource),
        ) else {
            return false;
        };
        let (Term::Iri(p), false) = (p, matches!(s, Term::Literal(_))) else {
            return false;
        };
        graph.contains(&gucon_core::Triple::new(s, p, o))
    })
}
