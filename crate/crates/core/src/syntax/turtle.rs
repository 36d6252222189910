//! Turtle-star reader and canonical writer.

use std::fmt::Write as _;

use crate::error::SyntaxError;
use crate::graph::Graph;
use crate::term::{write_escaped, Iri, Literal, Term, Triple};
use crate::vocab::{rdf, xsd};

use super::lexer::Token;
use super::prefixes::PrefixMap;
use super::stream::Stream;

/// Parses a Turtle-star document with the bundled prefixes pre-declared.
pub fn parse_turtle_star(text: &str) -> Result<Graph, SyntaxError> {
    let mut prefixes = PrefixMap::bundled();
    parse_with_prefixes(text, &mut prefixes)
}

/// Parses with the given prefixes; declarations in the document are added.
pub fn parse_with_prefixes(text: &str, prefixes: &mut PrefixMap) -> Result<Graph, SyntaxError> {
    let mut stream = Stream::new(text)?;
    let mut graph = Graph::new();
    while !stream.at_eof() {
        if stream.directive(prefixes)? {
            continue;
        }
        let subject = subject(&mut stream, prefixes)?;
        predicate_object_list(&mut stream, prefixes, &subject, &mut graph)?;
        stream.expect(&Token::Dot)?;
    }
    Ok(graph)
}

fn predicate_object_list(
    stream: &mut Stream,
    prefixes: &PrefixMap,
    subject: &Term,
    graph: &mut Graph,
) -> Result<(), SyntaxError> {
    loop {
        let predicate = predicate(stream, prefixes)?;
        loop {
            let object = object(stream, prefixes)?;
            graph.insert(Triple::new(subject.clone(), predicate.clone(), object));
            if !stream.eat(&Token::Comma) {
                break;
            }
        }
        if !stream.eat(&Token::Semicolon) {
            return Ok(());
        }
        while stream.eat(&Token::Semicolon) {}
        if matches!(stream.peek(), Token::Dot | Token::QuoteClose) {
            return Ok(());
        }
    }
}

fn reject_data_only(stream: &Stream) -> Result<(), SyntaxError> {
    match stream.peek() {
        Token::Variable(v) => Err(stream.error(format!("variable ?{v} is not allowed in data"))),
        Token::LParen => Err(stream.error("collections are not supported")),
        _ => Ok(()),
    }
}

fn subject(stream: &mut Stream, prefixes: &PrefixMap) -> Result<Term, SyntaxError> {
    reject_data_only(stream)?;
    if let Some(iri) = stream.iri(prefixes)? {
        return Ok(Term::Iri(iri));
    }
    if *stream.peek() == Token::QuoteOpen {
        return quoted(stream, prefixes);
    }
    if stream.literal(prefixes)?.is_some() {
        return Err(stream.error("a literal cannot be a subject"));
    }
    Err(stream.unexpected("subject"))
}

fn predicate(stream: &mut Stream, prefixes: &PrefixMap) -> Result<Iri, SyntaxError> {
    reject_data_only(stream)?;
    if matches!(stream.peek(), Token::Word(w) if w == "a") {
        stream.next();
        return Ok(Iri::new(rdf::TYPE));
    }
    match stream.iri(prefixes)? {
        Some(iri) => Ok(iri),
        None => Err(stream.unexpected("predicate")),
    }
}

fn object(stream: &mut Stream, prefixes: &PrefixMap) -> Result<Term, SyntaxError> {
    reject_data_only(stream)?;
    if let Some(iri) = stream.iri(prefixes)? {
        return Ok(Term::Iri(iri));
    }
    if *stream.peek() == Token::QuoteOpen {
        return quoted(stream, prefixes);
    }
    match stream.literal(prefixes)? {
        Some(literal) => Ok(Term::Literal(literal)),
        None => Err(stream.unexpected("object")),
    }
}

fn quoted(stream: &mut Stream, prefixes: &PrefixMap) -> Result<Term, SyntaxError> {
    stream.expect(&Token::QuoteOpen)?;
    let s = subject(stream, prefixes)?;
    let p = predicate(stream, prefixes)?;
    let o = object(stream, prefixes)?;
    stream.expect(&Token::QuoteClose)?;
    Ok(Term::quoted(s, p, o))
}

/// Canonical serialization with the bundled prefixes.
pub fn serialize_turtle_star(graph: &Graph) -> String {
    serialize_with_prefixes(graph, &PrefixMap::bundled())
}

/// Writes every prefix declaration, then the triples sorted in canonical
/// term order and grouped by subject.
pub fn serialize_with_prefixes(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    for (prefix, ns) in prefixes.iter() {
        out.push_str("@prefix ");
        out.push_str(prefix);
        out.push_str(": ");
        write_iri_ref(&mut out, ns);
        out.push_str(" .\n");
    }
    let triples = graph.sorted();
    if !triples.is_empty() {
        out.push('\n');
    }
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        write_term(&mut out, subject, prefixes);
        let mut first = true;
        while i < triples.len() && triples[i].subject == *subject {
            out.push_str(if first { " " } else { " ;\n    " });
            first = false;
            write_predicate(&mut out, &triples[i].predicate, prefixes);
            out.push(' ');
            write_term(&mut out, &triples[i].object, prefixes);
            i += 1;
        }
        out.push_str(" .\n");
    }
    out
}

fn write_predicate(out: &mut String, iri: &Iri, prefixes: &PrefixMap) {
    if iri.as_str() == rdf::TYPE {
        out.push('a');
    } else {
        write_iri(out, iri.as_str(), prefixes);
    }
}

pub(crate) fn write_iri(out: &mut String, iri: &str, prefixes: &PrefixMap) {
    match prefixes.compact(iri) {
        Some(pname) => out.push_str(&pname),
        None => write_iri_ref(out, iri),
    }
}

fn write_iri_ref(out: &mut String, iri: &str) {
    out.push('<');
    for c in iri.chars() {
        if c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
}

pub(crate) fn write_literal(out: &mut String, literal: &Literal, prefixes: &PrefixMap) {
    out.push('"');
    let _ = write_escaped(out, literal.lexical());
    out.push('"');
    if literal.datatype().as_str() != xsd::STRING {
        out.push_str("^^");
        write_iri(out, literal.datatype().as_str(), prefixes);
    }
}

pub(crate) fn write_term(out: &mut String, term: &Term, prefixes: &PrefixMap) {
    match term {
        Term::Iri(iri) => write_iri(out, iri.as_str(), prefixes),
        Term::Literal(literal) => write_literal(out, literal, prefixes),
        Term::Triple(t) => {
            out.push_str("<< ");
            write_term(out, &t.subject, prefixes);
            out.push(' ');
            write_predicate(out, &t.predicate, prefixes);
            out.push(' ');
            write_term(out, &t.object, prefixes);
            out.push_str(" >>");
        }
    }
}
