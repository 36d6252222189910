use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::term::{Iri, Term, Triple};

use super::expr::Expression;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// A term position that may hold a variable, possibly inside a quoted
/// triple pattern.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermPattern {
    Term(Term),
    Variable(Variable),
    Triple(Box<TriplePattern>),
}

impl TermPattern {
    pub fn var(name: &str) -> Self {
        TermPattern::Variable(Variable::new(name))
    }

    pub fn iri(value: &str) -> Self {
        TermPattern::Term(Term::iri(value))
    }

    /// Builds a quoted triple pattern; a variable-free one collapses to a
    /// ground quoted triple term.
    pub fn quoted(subject: TermPattern, predicate: TermPattern, object: TermPattern) -> Self {
        match (subject, predicate, object) {
            (TermPattern::Term(s), TermPattern::Term(Term::Iri(p)), TermPattern::Term(o))
                if !matches!(s, Term::Literal(_)) =>
            {
                TermPattern::Term(Term::quoted(s, p, o))
            }
            (subject, predicate, object) => TermPattern::Triple(Box::new(TriplePattern {
                subject,
                predicate,
                object,
            })),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            TermPattern::Term(_) => true,
            TermPattern::Variable(_) => false,
            TermPattern::Triple(t) => t.is_ground(),
        }
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            TermPattern::Term(_) => {}
            TermPattern::Variable(v) => {
                out.insert(v.clone());
            }
            TermPattern::Triple(t) => t.collect_variables(out),
        }
    }
}

impl From<Term> for TermPattern {
    fn from(value: Term) -> Self {
        TermPattern::Term(value)
    }
}

impl From<Variable> for TermPattern {
    fn from(value: Variable) -> Self {
        TermPattern::Variable(value)
    }
}

impl From<Iri> for TermPattern {
    fn from(value: Iri) -> Self {
        TermPattern::Term(Term::Iri(value))
    }
}

impl fmt::Debug for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Term(t) => t.fmt(f),
            TermPattern::Variable(v) => v.fmt(f),
            TermPattern::Triple(t) => write!(f, "<< {:?} {:?} {:?} >>", t.subject, t.predicate, t.object),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplePattern {
    pub subject: TermPattern,
    /// An IRI or a variable.
    pub predicate: TermPattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<TermPattern>,
        predicate: impl Into<TermPattern>,
        object: impl Into<TermPattern>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.subject.is_ground() && self.predicate.is_ground() && self.object.is_ground()
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        self.subject.collect_variables(out);
        self.predicate.collect_variables(out);
        self.object.collect_variables(out);
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    /// The ground triple if the pattern has no variables.
    pub fn as_ground(&self) -> Option<Triple> {
        match (&self.subject, &self.predicate, &self.object) {
            (TermPattern::Term(s), TermPattern::Term(Term::Iri(p)), TermPattern::Term(o)) => {
                Some(Triple::new(s.clone(), p.clone(), o.clone()))
            }
            _ => None,
        }
    }
}

impl fmt::Debug for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} {:?}", self.subject, self.predicate, self.object)
    }
}

/// A graph pattern tree.
#[derive(Clone, PartialEq, Debug)]
pub enum GraphPattern {
    /// The empty group `{}`; evaluates to the single empty mapping.
    Empty,
    Triple(TriplePattern),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Optional(Box<GraphPattern>, Box<GraphPattern>),
    Minus(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, Expression),
    Bind(Box<GraphPattern>, Variable, Expression),
}

impl GraphPattern {
    pub fn triple(
        subject: impl Into<TermPattern>,
        predicate: impl Into<TermPattern>,
        object: impl Into<TermPattern>,
    ) -> Self {
        GraphPattern::Triple(TriplePattern::new(subject, predicate, object))
    }

    pub fn and(self, right: GraphPattern) -> Self {
        GraphPattern::And(Box::new(self), Box::new(right))
    }

    pub fn union(self, right: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(self), Box::new(right))
    }

    pub fn optional(self, right: GraphPattern) -> Self {
        GraphPattern::Optional(Box::new(self), Box::new(right))
    }

    pub fn minus(self, right: GraphPattern) -> Self {
        GraphPattern::Minus(Box::new(self), Box::new(right))
    }

    pub fn filter(self, expr: Expression) -> Self {
        GraphPattern::Filter(Box::new(self), expr)
    }

    pub fn bind(self, variable: Variable, expr: Expression) -> Self {
        GraphPattern::Bind(Box::new(self), variable, expr)
    }

    /// Every variable occurring anywhere in the pattern, including filter
    /// and bind expressions.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            GraphPattern::Empty => {}
            GraphPattern::Triple(t) => t.collect_variables(out),
            GraphPattern::And(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Optional(l, r)
            | GraphPattern::Minus(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            GraphPattern::Filter(inner, e) => {
                inner.collect_variables(out);
                e.collect_variables(out);
            }
            GraphPattern::Bind(inner, v, e) => {
                inner.collect_variables(out);
                out.insert(v.clone());
                e.collect_variables(out);
            }
        }
    }

    /// Variables that may be bound by a solution of this pattern. MINUS
    /// right-hand sides and filter expressions contribute nothing.
    pub fn in_scope_variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_in_scope(&mut out);
        out
    }

    fn collect_in_scope(&self, out: &mut BTreeSet<Variable>) {
        match self {
            GraphPattern::Empty => {}
            GraphPattern::Triple(t) => t.collect_variables(out),
            GraphPattern::And(l, r) | GraphPattern::Union(l, r) | GraphPattern::Optional(l, r) => {
                l.collect_in_scope(out);
                r.collect_in_scope(out);
            }
            GraphPattern::Minus(l, _) | GraphPattern::Filter(l, _) => l.collect_in_scope(out),
            GraphPattern::Bind(inner, v, _) => {
                inner.collect_in_scope(out);
                out.insert(v.clone());
            }
        }
    }

    /// Variables bound in every solution: triple-pattern variables reachable
    /// through AND, and those certain on both sides of a UNION.
    pub fn certain_variables(&self) -> BTreeSet<Variable> {
        match self {
            GraphPattern::Empty => BTreeSet::new(),
            GraphPattern::Triple(t) => t.variables(),
            GraphPattern::And(l, r) => {
                let mut out = l.certain_variables();
                out.extend(r.certain_variables());
                out
            }
            GraphPattern::Union(l, r) => {
                let right = r.certain_variables();
                l.certain_variables()
                    .into_iter()
                    .filter(|v| right.contains(v))
                    .collect()
            }
            GraphPattern::Optional(l, _) | GraphPattern::Minus(l, _) | GraphPattern::Filter(l, _) => {
                l.certain_variables()
            }
            // A failed BIND leaves its target unbound.
            GraphPattern::Bind(inner, _, _) => inner.certain_variables(),
        }
    }

    /// Number of triple patterns, including those under OPTIONAL and MINUS.
    pub fn triple_pattern_count(&self) -> usize {
        match self {
            GraphPattern::Empty => 0,
            GraphPattern::Triple(_) => 1,
            GraphPattern::And(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Optional(l, r)
            | GraphPattern::Minus(l, r) => l.triple_pattern_count() + r.triple_pattern_count(),
            GraphPattern::Filter(inner, _) | GraphPattern::Bind(inner, _, _) => inner.triple_pattern_count(),
        }
    }

    pub fn bind_count(&self) -> usize {
        match self {
            GraphPattern::Empty | GraphPattern::Triple(_) => 0,
            GraphPattern::And(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Optional(l, r)
            | GraphPattern::Minus(l, r) => l.bind_count() + r.bind_count(),
            GraphPattern::Filter(inner, _) => inner.bind_count(),
            GraphPattern::Bind(inner, _, _) => 1 + inner.bind_count(),
        }
    }

    /// Operator count, the size measure used by the random generators.
    pub fn operator_count(&self) -> usize {
        match self {
            GraphPattern::Empty | GraphPattern::Triple(_) => 0,
            GraphPattern::And(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Optional(l, r)
            | GraphPattern::Minus(l, r) => 1 + l.operator_count() + r.operator_count(),
            GraphPattern::Filter(inner, _) | GraphPattern::Bind(inner, _, _) => 1 + inner.operator_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_quoted_pattern_collapses_to_term() {
        let q = TermPattern::quoted(TermPattern::iri("a"), TermPattern::iri("p"), TermPattern::iri("b"));
        assert!(matches!(q, TermPattern::Term(Term::Triple(_))));
        let q = TermPattern::quoted(TermPattern::var("x"), TermPattern::iri("p"), TermPattern::iri("b"));
        assert!(matches!(q, TermPattern::Triple(_)));
    }

    #[test]
    fn minus_right_is_out_of_scope() {
        let p = GraphPattern::triple(TermPattern::var("a"), TermPattern::iri("p"), TermPattern::var("b")).minus(
            GraphPattern::triple(TermPattern::var("a"), TermPattern::iri("q"), TermPattern::var("c")),
        );
        let names: Vec<_> = p.in_scope_variables().iter().map(|v| v.name().to_owned()).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(p.variables().len(), 3);
    }
}
