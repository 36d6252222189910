//! Ground RDF-star terms: IRIs, literals and (nested) quoted triples.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::time::{DateTime, DayTimeDuration};
use crate::vocab::xsd;

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl Into<Arc<str>>) -> Self {
        Iri(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl From<&str> for Iri {
    fn from(value: &str) -> Self {
        Iri::new(value)
    }
}

/// A typed literal. Plain literals carry `xsd:string`.
///
/// Well-formed `xsd:dateTime` literals compare by timeline value; every
/// other literal compares by its (lexical form, datatype) pair.
#[derive(Clone)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    instant: Option<DateTime>,
}

impl Literal {
    pub fn new(lexical: impl Into<Arc<str>>, datatype: Iri) -> Self {
        let lexical = lexical.into();
        if datatype.as_str() == xsd::DATE_TIME {
            if let Ok(value) = DateTime::parse(&lexical) {
                return Literal::datetime(value);
            }
        }
        Literal {
            lexical,
            datatype,
            instant: None,
        }
    }

    pub fn string(value: impl Into<Arc<str>>) -> Self {
        Literal::new(value, Iri::new(xsd::STRING))
    }

    pub fn integer(value: i64) -> Self {
        Literal::new(value.to_string(), Iri::new(xsd::INTEGER))
    }

    pub fn boolean(value: bool) -> Self {
        Literal::new(if value { "true" } else { "false" }, Iri::new(xsd::BOOLEAN))
    }

    pub fn decimal(value: f64) -> Self {
        let mut text = format!("{value}");
        if !text.contains('.') && !text.contains('e') && !text.contains("inf") && !text.contains("NaN") {
            text.push_str(".0");
        }
        Literal::new(text, Iri::new(xsd::DECIMAL))
    }

    pub fn double(value: f64) -> Self {
        let text = if value.is_nan() {
            "NaN".to_owned()
        } else if value.is_infinite() {
            if value > 0.0 { "INF" } else { "-INF" }.to_owned()
        } else {
            format!("{value:E}")
        };
        Literal::new(text, Iri::new(xsd::DOUBLE))
    }

    pub fn datetime(value: DateTime) -> Self {
        Literal {
            lexical: value.to_lexical().into(),
            datatype: Iri::new(xsd::DATE_TIME),
            instant: Some(value),
        }
    }

    pub fn duration(value: DayTimeDuration) -> Self {
        Literal::new(value.to_lexical(), Iri::new(xsd::DAY_TIME_DURATION))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    /// The instant of a well-formed `xsd:dateTime` literal.
    pub fn as_datetime(&self) -> Option<DateTime> {
        self.instant
    }

    pub fn is_string(&self) -> bool {
        self.datatype.as_str() == xsd::STRING
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self.instant, other.instant) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.lexical == other.lexical && self.datatype == other.datatype,
            _ => false,
        }
    }
}

impl Eq for Literal {}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.instant {
            Some(value) => {
                0u8.hash(state);
                value.hash(state);
            }
            None => {
                1u8.hash(state);
                self.lexical.hash(state);
                self.datatype.hash(state);
            }
        }
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.instant, other.instant) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self
                .datatype
                .cmp(&other.datatype)
                .then_with(|| self.lexical.cmp(&other.lexical)),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        if !self.is_string() {
            write!(f, "^^{}", self.datatype)?;
        }
        Ok(())
    }
}

pub(crate) fn write_escaped(out: &mut impl fmt::Write, text: &str) -> fmt::Result {
    for c in text.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

/// A ground term. Variables live in [`crate::algebra::TermPattern`] so a
/// `Term` can never hold one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
    Triple(Arc<Triple>),
}

impl Term {
    pub fn iri(value: &str) -> Self {
        Term::Iri(Iri::new(value))
    }

    pub fn quoted(subject: Term, predicate: Iri, object: Term) -> Self {
        Term::Triple(Arc::new(Triple::new(subject, predicate, object)))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(literal) => Some(literal),
            _ => None,
        }
    }

    pub fn as_triple(&self) -> Option<&Triple> {
        match self {
            Term::Triple(triple) => Some(triple),
            _ => None,
        }
    }

    pub fn as_datetime(&self) -> Option<DateTime> {
        self.as_literal().and_then(Literal::as_datetime)
    }

    /// Nesting depth: 0 for IRIs and literals.
    pub fn depth(&self) -> usize {
        match self {
            Term::Triple(t) => 1 + t.subject.depth().max(t.object.depth()),
            _ => 0,
        }
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

impl From<Triple> for Term {
    fn from(value: Triple) -> Self {
        Term::Triple(Arc::new(value))
    }
}

impl From<DateTime> for Term {
    fn from(value: DateTime) -> Self {
        Term::Literal(Literal::datetime(value))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Literal(literal) => literal.fmt(f),
            Term::Triple(triple) => write!(f, "<< {} {} {} >>", triple.subject, triple.predicate, triple.object),
        }
    }
}

/// A ground RDF-star triple. The subject is an IRI or a quoted triple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Iri, object: Term) -> Self {
        debug_assert!(!matches!(subject, Term::Literal(_)), "literal subject");
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::hash_map::DefaultHasher;

    fn hash_of<T: Hash>(value: &T) -> u64 {
        let mut h = DefaultHasher::new();
        value.hash(&mut h);
        h.finish()
    }

    fn dt_lit(s: &str) -> Term {
        Term::Literal(Literal::new(s, Iri::new(xsd::DATE_TIME)))
    }

    #[test]
    fn datetime_literals_compare_by_instant() {
        let a = dt_lit("2025-07-20T08:30:00Z");
        let b = dt_lit("2025-07-20T10:30:00+02:00");
        assert_eq!(a, b);
        assert_eq!(hash_of(&a), hash_of(&b));
        assert_eq!(a.cmp(&b), Ordering::Equal);
    }

    #[test]
    fn other_literals_compare_lexically() {
        let a = Term::Literal(Literal::new("1", Iri::new(xsd::INTEGER)));
        let b = Term::Literal(Literal::new("01", Iri::new(xsd::INTEGER)));
        let c = Term::Literal(Literal::string("1"));
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ill_typed_datetime_is_opaque() {
        let bad = Literal::new("yesterday", Iri::new(xsd::DATE_TIME));
        assert!(bad.as_datetime().is_none());
        assert_eq!(bad, Literal::new("yesterday", Iri::new(xsd::DATE_TIME)));
    }

    #[test]
    fn nested_quoted_triples_are_structural() {
        let inner = || Term::quoted(Term::iri("ex:a"), Iri::new("ex:p"), Term::iri("ex:b"));
        let outer = || Term::quoted(inner(), Iri::new("ex:q"), dt_lit("2025-07-20T08:30:00Z"));
        assert_eq!(outer(), outer());
        assert_eq!(hash_of(&outer()), hash_of(&outer()));
        assert_eq!(outer().depth(), 2);
        let other = Term::quoted(inner(), Iri::new("ex:q"), dt_lit("2025-07-20T08:30:01Z"));
        assert_ne!(outer(), other);
    }

    #[test]
    fn display_escapes() {
        let lit = Literal::string("a\"b\\c\nd");
        assert_eq!(lit.to_string(), r#""a\"b\\c\nd""#);
        assert_eq!(
            Literal::integer(5).to_string(),
            "\"5\"^^<http://www.w3.org/2001/XMLSchema#integer>"
        );
    }
}
