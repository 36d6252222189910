//! Set-semantics evaluation of graph patterns.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::error::SubstitutionError;
use crate::graph::Graph;
use crate::term::{Term, Triple};

use super::expr::{eval_filter_expr, holds, Expression};
use super::mapping::SolutionMapping;
use super::pattern::{GraphPattern, TermPattern, TriplePattern, Variable};

/// All solutions of `pattern` over `graph`, deduplicated and sorted in
/// canonical order.
pub fn evaluate(pattern: &GraphPattern, graph: &Graph) -> Vec<SolutionMapping> {
    let mut out = evaluate_unordered(pattern, graph);
    out.sort_unstable();
    out
}

/// All solutions, deduplicated, in no particular order.
pub fn evaluate_unordered(pattern: &GraphPattern, graph: &Graph) -> Vec<SolutionMapping> {
    match pattern {
        GraphPattern::Empty => vec![SolutionMapping::new()],
        GraphPattern::Triple(tp) => {
            let mut out = Vec::new();
            extend_with_triple(tp, graph, &SolutionMapping::new(), &mut out);
            out
        }
        GraphPattern::And(left, right) => {
            let lhs = evaluate_unordered(left, graph);
            if let GraphPattern::Triple(tp) = right.as_ref() {
                let mut out = Vec::new();
                for mu in &lhs {
                    extend_with_triple(tp, graph, mu, &mut out);
                }
                return dedup_unless(uniform_domain(&lhs), out);
            }
            let rhs = evaluate_unordered(right, graph);
            dedup(join(&lhs, &rhs))
        }
        GraphPattern::Union(left, right) => {
            let mut out = evaluate_unordered(left, graph);
            out.extend(evaluate_unordered(right, graph));
            dedup(out)
        }
        GraphPattern::Optional(left, right) => {
            let lhs = evaluate_unordered(left, graph);
            if let GraphPattern::Triple(tp) = right.as_ref() {
                let mut out = Vec::new();
                for mu in &lhs {
                    let before = out.len();
                    extend_with_triple(tp, graph, mu, &mut out);
                    if out.len() == before {
                        out.push(mu.clone());
                    }
                }
                return dedup_unless(uniform_domain(&lhs), out);
            }
            let rhs = evaluate_unordered(right, graph);
            dedup(left_join(&lhs, &rhs))
        }
        GraphPattern::Minus(left, right) => {
            let lhs = evaluate_unordered(left, graph);
            let rhs = evaluate_unordered(right, graph);
            minus(lhs, &rhs)
        }
        GraphPattern::Filter(inner, expr) => {
            let mut out = evaluate_unordered(inner, graph);
            out.retain(|mu| holds(expr, mu));
            out
        }
        GraphPattern::Bind(inner, variable, expr) => {
            let mut out = evaluate_unordered(inner, graph);
            let uniform = uniform_domain(&out);
            for mu in &mut out {
                apply_bind(mu, variable, expr);
            }
            dedup_unless(uniform, out)
        }
    }
}

/// Extends `mu` with the value of `expr`, leaving `variable` unbound when
/// evaluation fails or the variable is already bound.
pub fn apply_bind(mu: &mut SolutionMapping, variable: &Variable, expr: &Expression) {
    if mu.contains(variable) {
        return;
    }
    if let Ok(value) = eval_filter_expr(expr, mu) {
        mu.insert(variable.clone(), value.to_term());
    }
}

/// Distinct mappings over one common domain stay distinct when each is
/// extended, since restricting an extension recovers its source.
fn uniform_domain(mappings: &[SolutionMapping]) -> bool {
    let Some((first, rest)) = mappings.split_first() else {
        return true;
    };
    rest.iter()
        .all(|mu| mu.len() == first.len() && mu.domain().eq(first.domain()))
}

fn dedup_unless(distinct: bool, out: Vec<SolutionMapping>) -> Vec<SolutionMapping> {
    if distinct {
        out
    } else {
        dedup(out)
    }
}

fn dedup(mut out: Vec<SolutionMapping>) -> Vec<SolutionMapping> {
    if out.len() < 2 {
        return out;
    }
    let mut seen = HashSet::with_capacity_and_hasher(out.len(), Default::default());
    out.retain(|mu| seen.insert(mu.clone()));
    out
}

/// The value a term position must have under `mu`, if it is fully
/// determined.
fn resolve(pattern: &TermPattern, mu: &SolutionMapping) -> Option<Term> {
    match pattern {
        TermPattern::Term(t) => Some(t.clone()),
        TermPattern::Variable(v) => mu.get(v).cloned(),
        TermPattern::Triple(tp) => {
            let s = resolve(&tp.subject, mu)?;
            let Term::Iri(p) = resolve(&tp.predicate, mu)? else {
                return None;
            };
            let o = resolve(&tp.object, mu)?;
            if matches!(s, Term::Literal(_)) {
                return None;
            }
            Some(Term::quoted(s, p, o))
        }
    }
}

/// Unifies a term pattern with a ground term, extending `mu`.
fn unify(pattern: &TermPattern, term: &Term, mu: &mut SolutionMapping) -> bool {
    match pattern {
        TermPattern::Term(t) => t == term,
        TermPattern::Variable(v) => match mu.get(v) {
            Some(bound) => bound == term,
            None => {
                mu.insert(v.clone(), term.clone());
                true
            }
        },
        TermPattern::Triple(tp) => match term {
            Term::Triple(t) => unify_triple(tp, t, mu),
            _ => false,
        },
    }
}

fn unify_triple(tp: &TriplePattern, triple: &Triple, mu: &mut SolutionMapping) -> bool {
    let predicate = Term::Iri(triple.predicate.clone());
    unify(&tp.subject, &triple.subject, mu)
        && unify(&tp.predicate, &predicate, mu)
        && unify(&tp.object, &triple.object, mu)
}

fn extend_with_triple(tp: &TriplePattern, graph: &Graph, mu: &SolutionMapping, out: &mut Vec<SolutionMapping>) {
    let subject = resolve(&tp.subject, mu);
    let predicate = match resolve(&tp.predicate, mu) {
        Some(Term::Iri(p)) => Some(p),
        Some(_) => return,
        None => None,
    };
    let object = resolve(&tp.object, mu);
    for triple in graph.matching(subject.as_ref(), predicate.as_ref(), object.as_ref()) {
        let mut extended = mu.clone();
        if unify_triple(tp, triple, &mut extended) {
            out.push(extended);
        }
    }
}

/// Variables bound in every mapping of both inputs.
fn join_key(left: &[SolutionMapping], right: &[SolutionMapping]) -> Vec<Variable> {
    let (Some(first), Some(_)) = (left.first(), right.first()) else {
        return Vec::new();
    };
    first
        .domain()
        .filter(|v| left.iter().all(|m| m.contains(v)) && right.iter().all(|m| m.contains(v)))
        .cloned()
        .collect()
}

fn key_of(mu: &SolutionMapping, key: &[Variable]) -> Vec<Term> {
    key.iter()
        .map(|v| mu.get(v).cloned().expect("key variable bound"))
        .collect()
}

struct Buckets<'a> {
    key: Vec<Variable>,
    buckets: HashMap<Vec<Term>, Vec<&'a SolutionMapping>>,
    all: &'a [SolutionMapping],
}

impl<'a> Buckets<'a> {
    fn new(left: &[SolutionMapping], right: &'a [SolutionMapping]) -> Self {
        let key = join_key(left, right);
        let mut buckets: HashMap<Vec<Term>, Vec<&SolutionMapping>> = HashMap::default();
        if !key.is_empty() {
            for mu in right {
                buckets.entry(key_of(mu, &key)).or_default().push(mu);
            }
        }
        Buckets {
            key,
            buckets,
            all: right,
        }
    }

    fn candidates(&self, mu: &SolutionMapping) -> Box<dyn Iterator<Item = &'a SolutionMapping> + '_> {
        if self.key.is_empty() {
            return Box::new(self.all.iter());
        }
        match self.buckets.get(&key_of(mu, &self.key)) {
            Some(bucket) => Box::new(bucket.iter().copied()),
            None => Box::new(std::iter::empty()),
        }
    }
}

fn join(left: &[SolutionMapping], right: &[SolutionMapping]) -> Vec<SolutionMapping> {
    let buckets = Buckets::new(left, right);
    let mut out = Vec::new();
    for mu in left {
        out.extend(buckets.candidates(mu).filter_map(|nu| mu.merge(nu)));
    }
    out
}

fn left_join(left: &[SolutionMapping], right: &[SolutionMapping]) -> Vec<SolutionMapping> {
    let buckets = Buckets::new(left, right);
    let mut out = Vec::new();
    for mu in left {
        let before = out.len();
        out.extend(buckets.candidates(mu).filter_map(|nu| mu.merge(nu)));
        if out.len() == before {
            out.push(mu.clone());
        }
    }
    out
}

fn minus(mut left: Vec<SolutionMapping>, right: &[SolutionMapping]) -> Vec<SolutionMapping> {
    let buckets = Buckets::new(&left, right);
    let remove: Vec<bool> = left
        .iter()
        .map(|mu| {
            buckets
                .candidates(mu)
                .any(|nu| mu.is_compatible(nu) && mu.shares_variable(nu))
        })
        .collect();
    let mut flags = remove.into_iter();
    left.retain(|_| !flags.next().expect("one flag per mapping"));
    left
}

/// Replacement of variables by their values under a mapping.
pub trait Substitute {
    type Output;

    fn substitute(&self, mapping: &SolutionMapping) -> Result<Self::Output, SubstitutionError>;
}

impl Substitute for TermPattern {
    type Output = Term;

    fn substitute(&self, mapping: &SolutionMapping) -> Result<Term, SubstitutionError> {
        match self {
            TermPattern::Term(t) => Ok(t.clone()),
            TermPattern::Variable(v) => mapping
                .get(v)
                .cloned()
                .ok_or_else(|| SubstitutionError::Unbound(v.name().to_owned())),
            TermPattern::Triple(tp) => tp.substitute(mapping).map(Term::from),
        }
    }
}

impl Substitute for TriplePattern {
    type Output = Triple;

    fn substitute(&self, mapping: &SolutionMapping) -> Result<Triple, SubstitutionError> {
        let subject = self.subject.substitute(mapping)?;
        if matches!(subject, Term::Literal(_)) {
            return Err(SubstitutionError::LiteralSubject);
        }
        let predicate = match self.predicate.substitute(mapping)? {
            Term::Iri(p) => p,
            other => return Err(SubstitutionError::NonIriPredicate(other.to_string())),
        };
        let object = self.object.substitute(mapping)?;
        Ok(Triple::new(subject, predicate, object))
    }
}

impl Substitute for Expression {
    type Output = Expression;

    fn substitute(&self, mapping: &SolutionMapping) -> Result<Expression, SubstitutionError> {
        let sub = |e: &Expression| e.substitute(mapping).map(Box::new);
        Ok(match self {
            Expression::Constant(t) => Expression::Constant(t.clone()),
            Expression::Variable(v) => Expression::Constant(
                mapping
                    .get(v)
                    .cloned()
                    .ok_or_else(|| SubstitutionError::Unbound(v.name().to_owned()))?,
            ),
            Expression::Not(e) => Expression::Not(sub(e)?),
            Expression::Negate(e) => Expression::Negate(sub(e)?),
            Expression::Or(a, b) => Expression::Or(sub(a)?, sub(b)?),
            Expression::And(a, b) => Expression::And(sub(a)?, sub(b)?),
            Expression::Equal(a, b) => Expression::Equal(sub(a)?, sub(b)?),
            Expression::NotEqual(a, b) => Expression::NotEqual(sub(a)?, sub(b)?),
            Expression::Less(a, b) => Expression::Less(sub(a)?, sub(b)?),
            Expression::LessOrEqual(a, b) => Expression::LessOrEqual(sub(a)?, sub(b)?),
            Expression::Greater(a, b) => Expression::Greater(sub(a)?, sub(b)?),
            Expression::GreaterOrEqual(a, b) => Expression::GreaterOrEqual(sub(a)?, sub(b)?),
            Expression::Add(a, b) => Expression::Add(sub(a)?, sub(b)?),
            Expression::Subtract(a, b) => Expression::Subtract(sub(a)?, sub(b)?),
            Expression::Multiply(a, b) => Expression::Multiply(sub(a)?, sub(b)?),
            Expression::Divide(a, b) => Expression::Divide(sub(a)?, sub(b)?),
        })
    }
}

impl Substitute for GraphPattern {
    type Output = GraphPattern;

    /// Grounds every position. A BIND becomes a FILTER asserting that the
    /// bound value equals the expression.
    fn substitute(&self, mapping: &SolutionMapping) -> Result<GraphPattern, SubstitutionError> {
        let sub = |p: &GraphPattern| p.substitute(mapping).map(Box::new);
        Ok(match self {
            GraphPattern::Empty => GraphPattern::Empty,
            GraphPattern::Triple(tp) => {
                let ground = tp.substitute(mapping)?;
                GraphPattern::triple(ground.subject, ground.predicate, ground.object)
            }
            GraphPattern::And(l, r) => GraphPattern::And(sub(l)?, sub(r)?),
            GraphPattern::Union(l, r) => GraphPattern::Union(sub(l)?, sub(r)?),
            GraphPattern::Optional(l, r) => GraphPattern::Optional(sub(l)?, sub(r)?),
            GraphPattern::Minus(l, r) => GraphPattern::Minus(sub(l)?, sub(r)?),
            GraphPattern::Filter(inner, e) => GraphPattern::Filter(sub(inner)?, e.substitute(mapping)?),
            GraphPattern::Bind(inner, v, e) => {
                let value = Expression::Variable(v.clone()).substitute(mapping)?;
                GraphPattern::Filter(
                    sub(inner)?,
                    Expression::Equal(Box::new(value), Box::new(e.substitute(mapping)?)),
                )
            }
        })
    }
}

/// Convenience wrapper over [`Substitute`].
pub fn substitute<P: Substitute>(mapping: &SolutionMapping, pattern: &P) -> Result<P::Output, SubstitutionError> {
    pattern.substitute(mapping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Iri, Literal};

    fn iri(s: &str) -> Term {
        Term::iri(s)
    }

    fn sample() -> Graph {
        [
            Triple::new(iri("a"), Iri::new("p"), iri("b")),
            Triple::new(iri("b"), Iri::new("p"), iri("c")),
            Triple::new(iri("a"), Iri::new("q"), Literal::integer(3).into()),
            Triple::new(
                Term::quoted(iri("a"), Iri::new("p"), iri("b")),
                Iri::new("t"),
                Literal::integer(7).into(),
            ),
        ]
        .into_iter()
        .collect()
    }

    fn tp(s: TermPattern, p: &str, o: TermPattern) -> GraphPattern {
        GraphPattern::triple(s, TermPattern::iri(p), o)
    }

    fn v(n: &str) -> TermPattern {
        TermPattern::var(n)
    }

    #[test]
    fn empty_graph_yields_nothing() {
        let p = GraphPattern::triple(v("s"), v("p"), v("o"));
        assert!(evaluate(&p, &Graph::new()).is_empty());
        assert_eq!(
            evaluate(&GraphPattern::Empty, &Graph::new()),
            vec![SolutionMapping::new()]
        );
    }

    #[test]
    fn join_chains() {
        let p = tp(v("x"), "p", v("y")).and(tp(v("y"), "p", v("z")));
        let out = evaluate(&p, &sample());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].get(&Variable::new("z")), Some(&iri("c")));
    }

    #[test]
    fn optional_keeps_unmatched() {
        let p = tp(v("x"), "p", v("y")).optional(tp(v("x"), "q", v("n")));
        let out = evaluate(&p, &sample());
        assert_eq!(out.len(), 2);
        assert!(out.iter().any(|m| m.contains(&Variable::new("n"))));
        assert!(out.iter().any(|m| !m.contains(&Variable::new("n"))));
    }

    #[test]
    fn minus_needs_shared_variable() {
        let left = tp(v("x"), "p", v("y"));
        let out = evaluate(&left.clone().minus(tp(v("x"), "q", v("n"))), &sample());
        assert_eq!(out.len(), 1);
        let out = evaluate(&left.minus(tp(v("u"), "q", v("w"))), &sample());
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn quoted_triple_patterns_unify_recursively() {
        let q = TermPattern::quoted(v("s"), TermPattern::iri("p"), v("o"));
        let p = GraphPattern::triple(q, TermPattern::iri("t"), v("n"));
        let out = evaluate(&p, &sample());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].get(&Variable::new("s")), Some(&iri("a")));
        assert_eq!(out[0].get(&Variable::new("o")), Some(&iri("b")));
    }

    #[test]
    fn bind_failure_leaves_unbound() {
        let p = tp(v("x"), "p", v("y")).bind(
            Variable::new("z"),
            Expression::Add(
                Box::new(Expression::var("y")),
                Box::new(Expression::constant(Literal::integer(1))),
            ),
        );
        let out = evaluate(&p, &sample());
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|m| !m.contains(&Variable::new("z"))));
    }

    #[test]
    fn substitution_grounds_and_reports_unbound() {
        let mu = SolutionMapping::new()
            .with(Variable::new("s"), iri("a"))
            .with(Variable::new("o"), iri("b"));
        let quoted = TermPattern::quoted(v("s"), TermPattern::iri("p"), v("o"));
        assert_eq!(
            substitute(&mu, &quoted).unwrap(),
            Term::quoted(iri("a"), Iri::new("p"), iri("b"))
        );
        let ground = TermPattern::Term(iri("k"));
        assert_eq!(substitute(&mu, &ground).unwrap(), iri("k"));
        assert!(matches!(substitute(&mu, &v("zz")), Err(SubstitutionError::Unbound(_))));
    }
}
