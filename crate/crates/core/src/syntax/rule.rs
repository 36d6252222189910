//! The arrow rule syntax: `{ condition } -> O { << np cp rp >> bounds }`.

use crate::algebra::{Expression, GraphPattern, TermPattern, TriplePattern, Variable};
use crate::error::{RuleError, SyntaxError, ValidationError};
use crate::policy::{is_bound_predicate, ActionPattern, AtemporalRule, BoundTerm, ObligationRule, PolicyDocument};
use crate::term::{Iri, Term};
use crate::vocab::{rdf, EXP};

use super::lexer::{Span, Token};
use super::prefixes::PrefixMap;
use super::stream::Stream;
use super::turtle::{write_iri, write_term};

/// Variables with this prefix are reserved for the engine.
pub const RESERVED_VARIABLE_PREFIX: &str = "__gucon";

fn default_rule_iri(index: usize) -> Iri {
    Iri::new(format!("{EXP}rule-{index}"))
}

/// Parses a single rule with the bundled prefixes.
pub fn parse_rule_text(text: &str) -> Result<ObligationRule, RuleError> {
    let doc = parse_rule_document(text)?;
    let mut rules = doc.rules.into_iter();
    match (rules.next(), rules.next()) {
        (Some(rule), None) => Ok(rule),
        (None, _) => Err(SyntaxError::new(1, 1, "expected a rule").into()),
        (Some(_), Some(r)) => {
            Err(SyntaxError::new(1, 1, format!("expected one rule, found a second ({})", r.iri)).into())
        }
    }
}

/// Parses a rule file: prefix directives followed by any number of rules.
/// Unnamed rules get `exp:rule-<n>` by position, starting at 1.
pub fn parse_rule_document(text: &str) -> Result<PolicyDocument, RuleError> {
    parse_rule_document_with(text, &mut PrefixMap::bundled())
}

pub fn parse_rule_document_with(text: &str, prefixes: &mut PrefixMap) -> Result<PolicyDocument, RuleError> {
    let mut stream = Stream::new(text)?;
    let mut rules = Vec::new();
    while !stream.at_eof() {
        if stream.directive(prefixes)? {
            continue;
        }
        let name = stream.iri(prefixes)?;
        let mut parser = RuleParser {
            stream: &mut stream,
            prefixes,
        };
        let rule = parser.rule(name.unwrap_or_else(|| default_rule_iri(rules.len() + 1)))?;
        rules.push(rule);
    }
    Ok(PolicyDocument::new(rules))
}

/// Parses a condition: a group body with or without surrounding braces.
pub fn parse_condition_text(text: &str, prefixes: &PrefixMap) -> Result<GraphPattern, RuleError> {
    let mut stream = Stream::new(text)?;
    let mut parser = RuleParser {
        stream: &mut stream,
        prefixes,
    };
    let pattern = parser.group_body(&Token::Eof)?;
    parser.stream.expect(&Token::Eof)?;
    Ok(pattern)
}

/// Parses an action block: `<< np cp rp >> gucon:startTime s ; gucon:deadline d`,
/// with or without braces.
pub fn parse_action_text(
    text: &str,
    prefixes: &PrefixMap,
) -> Result<(ActionPattern, Option<BoundTerm>, Option<BoundTerm>), RuleError> {
    let mut stream = Stream::new(text)?;
    let mut parser = RuleParser {
        stream: &mut stream,
        prefixes,
    };
    let action = parser.action_block()?;
    parser.stream.expect(&Token::Eof)?;
    Ok(action)
}

/// Parses `{ condition } -> O { np cp rp }` with a plain action triple.
pub fn parse_atemporal_rule_text(text: &str) -> Result<AtemporalRule, RuleError> {
    let prefixes = PrefixMap::bundled();
    let mut stream = Stream::new(text)?;
    let name = stream.iri(&prefixes)?;
    let mut parser = RuleParser {
        stream: &mut stream,
        prefixes: &prefixes,
    };
    parser.stream.expect(&Token::LBrace)?;
    let condition = parser.group_body(&Token::RBrace)?;
    parser.stream.expect(&Token::RBrace)?;
    parser.arrow()?;
    let braced = parser.stream.eat(&Token::LBrace);
    let action = if *parser.stream.peek() == Token::QuoteOpen {
        parser.stream.next();
        let a = parser.action_triple()?;
        parser.stream.expect(&Token::QuoteClose)?;
        a
    } else {
        parser.action_triple()?
    };
    parser.stream.eat(&Token::Dot);
    if braced {
        parser.stream.expect(&Token::RBrace)?;
    }
    parser.stream.expect(&Token::Eof)?;
    Ok(AtemporalRule::new(
        name.unwrap_or_else(|| default_rule_iri(1)),
        condition,
        action,
    )?)
}

struct RuleParser<'a, 'p> {
    stream: &'a mut Stream,
    prefixes: &'p PrefixMap,
}

impl RuleParser<'_, '_> {
    fn rule(&mut self, iri: Iri) -> Result<ObligationRule, RuleError> {
        self.stream.expect(&Token::LBrace)?;
        let condition = self.group_body(&Token::RBrace)?;
        self.stream.expect(&Token::RBrace)?;
        self.arrow()?;
        let (action, start, deadline) = self.action_block()?;
        Ok(ObligationRule::new(iri, condition, action, start, deadline)?)
    }

    fn arrow(&mut self) -> Result<(), SyntaxError> {
        self.stream.expect(&Token::Arrow)?;
        if matches!(self.stream.peek(), Token::Word(w) if w == "O") {
            self.stream.next();
            Ok(())
        } else {
            Err(self.stream.unexpected("deontic operator 'O'"))
        }
    }

    fn action_block(&mut self) -> Result<(ActionPattern, Option<BoundTerm>, Option<BoundTerm>), RuleError> {
        let braced = self.stream.eat(&Token::LBrace);
        self.stream.expect(&Token::QuoteOpen)?;
        let action = self.action_triple()?;
        self.stream.expect(&Token::QuoteClose)?;
        let mut start = None;
        let mut deadline = None;
        while let Some(predicate) = self.stream.iri(self.prefixes)? {
            let is_start = is_bound_predicate(predicate.as_str())
                .ok_or_else(|| ValidationError::UnexpectedActionPredicate(predicate.to_string()))?;
            let value = self.bound_value()?;
            let (slot, which) = if is_start {
                (&mut start, "gucon:startTime")
            } else {
                (&mut deadline, "gucon:deadline")
            };
            if slot.is_some() {
                return Err(ValidationError::DuplicateBound { which }.into());
            }
            *slot = Some(value);
            while self.stream.eat(&Token::Semicolon) {}
            // The separator is optional; an IRI followed by `{` names the
            // next rule instead.
            let next_is_bound = matches!(self.stream.peek(), Token::IriRef(_) | Token::PrefixedName { .. })
                && *self.stream.peek_at(1) != Token::LBrace;
            if !next_is_bound {
                break;
            }
        }
        self.stream.eat(&Token::Dot);
        if braced {
            self.stream.expect(&Token::RBrace)?;
        }
        Ok((action, start, deadline))
    }

    fn bound_value(&mut self) -> Result<BoundTerm, RuleError> {
        let span = self.stream.span();
        let value = self.term_pattern(Position::Object)?;
        match &value {
            TermPattern::Variable(_) => Ok(value),
            TermPattern::Term(Term::Literal(l)) if l.as_datetime().is_some() => Ok(value),
            other => Err(Stream::error_at(
                span,
                format!("bound must be a variable or an xsd:dateTime literal, found {other:?}"),
            )
            .into()),
        }
    }

    fn action_triple(&mut self) -> Result<ActionPattern, RuleError> {
        let actor = self.term_pattern(Position::Subject)?;
        let action = self.predicate()?;
        let resource = self.term_pattern(Position::Object)?;
        Ok(ActionPattern {
            actor,
            action,
            resource,
        })
    }

    fn variable(&mut self) -> Result<Variable, SyntaxError> {
        match self.stream.peek().clone() {
            Token::Variable(name) => {
                if name.starts_with(RESERVED_VARIABLE_PREFIX) {
                    return Err(self.stream.error(ValidationError::ReservedVariable(name).to_string()));
                }
                self.stream.next();
                Ok(Variable::new(name))
            }
            _ => Err(self.stream.unexpected("variable")),
        }
    }

    fn predicate(&mut self) -> Result<TermPattern, SyntaxError> {
        match self.stream.peek() {
            Token::Word(w) if w == "a" => {
                self.stream.next();
                Ok(TermPattern::iri(rdf::TYPE))
            }
            Token::Variable(_) => Ok(TermPattern::Variable(self.variable()?)),
            _ => match self.stream.iri(self.prefixes)? {
                Some(iri) => Ok(TermPattern::from(iri)),
                None => Err(self.stream.unexpected("predicate")),
            },
        }
    }

    fn term_pattern(&mut self, position: Position) -> Result<TermPattern, SyntaxError> {
        match self.stream.peek() {
            Token::Variable(_) => return Ok(TermPattern::Variable(self.variable()?)),
            Token::QuoteOpen => {
                self.stream.next();
                let s = self.term_pattern(Position::Subject)?;
                let p = self.predicate()?;
                let o = self.term_pattern(Position::Object)?;
                self.stream.expect(&Token::QuoteClose)?;
                return Ok(TermPattern::quoted(s, p, o));
            }
            Token::LParen => return Err(self.stream.error("collections are not supported")),
            _ => {}
        }
        if let Some(iri) = self.stream.iri(self.prefixes)? {
            return Ok(TermPattern::from(iri));
        }
        let span = self.stream.span();
        match self.stream.literal(self.prefixes)? {
            Some(_) if position == Position::Subject => Err(Stream::error_at(span, "a literal cannot be a subject")),
            Some(literal) => Ok(TermPattern::Term(literal.into())),
            None => Err(self.stream.unexpected(match position {
                Position::Subject => "subject",
                Position::Object => "object",
            })),
        }
    }

    /// Triples with `;` and `,` lists; `.` separators are optional.
    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), SyntaxError> {
        let subject = self.term_pattern(Position::Subject)?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.term_pattern(Position::Object)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.stream.eat(&Token::Comma) {
                    break;
                }
            }
            if !self.stream.eat(&Token::Semicolon) {
                return Ok(());
            }
            while self.stream.eat(&Token::Semicolon) {}
            if !matches!(
                self.stream.peek(),
                Token::Variable(_) | Token::IriRef(_) | Token::PrefixedName { .. }
            ) && !matches!(self.stream.peek(), Token::Word(w) if w == "a")
            {
                return Ok(());
            }
        }
    }

    fn braced_group(&mut self) -> Result<GraphPattern, RuleError> {
        self.stream.expect(&Token::LBrace)?;
        let inner = self.group_body(&Token::RBrace)?;
        self.stream.expect(&Token::RBrace)?;
        Ok(inner)
    }

    /// Elements up to `end`. Joins fold left, with the first joined element
    /// replacing the empty group; filters apply to the whole group.
    fn group_body(&mut self, end: &Token) -> Result<GraphPattern, RuleError> {
        let mut pattern = GraphPattern::Empty;
        let mut filters = Vec::new();
        let join = |pattern: GraphPattern, right: GraphPattern| match pattern {
            GraphPattern::Empty => right,
            left => left.and(right),
        };
        while self.stream.peek() != end {
            let token = self.stream.peek().clone();
            if token.is_word("OPTIONAL") {
                self.stream.next();
                pattern = pattern.optional(self.braced_group()?);
            } else if token.is_word("MINUS") {
                self.stream.next();
                pattern = pattern.minus(self.braced_group()?);
            } else if token.is_word("FILTER") {
                self.stream.next();
                filters.push(self.bracketed_expression()?);
            } else if token.is_word("BIND") {
                let span = self.stream.next().span;
                self.stream.expect(&Token::LParen)?;
                let expr = self.expression()?;
                if !self.stream.eat_word("AS") {
                    return Err(self.stream.unexpected("'AS'").into());
                }
                let variable = self.variable()?;
                self.stream.expect(&Token::RParen)?;
                if pattern.in_scope_variables().contains(&variable) {
                    return Err(bind_error(span, &variable).into());
                }
                pattern = pattern.bind(variable, expr);
            } else if token == Token::LBrace {
                let mut group = self.braced_group()?;
                while self.stream.eat_word("UNION") {
                    group = group.union(self.braced_group()?);
                }
                pattern = join(pattern, group);
            } else if token.is_word("UNION") {
                return Err(self.stream.error("UNION must follow a braced group").into());
            } else if matches!(token, Token::Eof | Token::RBrace) {
                return Err(self.stream.unexpected(&end.describe()).into());
            } else {
                let mut triples = Vec::new();
                self.triples_block(&mut triples)?;
                for tp in triples {
                    pattern = join(pattern, GraphPattern::Triple(tp));
                }
            }
            self.stream.eat(&Token::Dot);
        }
        for f in filters {
            pattern = pattern.filter(f);
        }
        Ok(pattern)
    }

    fn bracketed_expression(&mut self) -> Result<Expression, SyntaxError> {
        self.stream.expect(&Token::LParen)?;
        let e = self.expression()?;
        self.stream.expect(&Token::RParen)?;
        Ok(e)
    }

    fn expression(&mut self) -> Result<Expression, SyntaxError> {
        let mut left = self.conjunction()?;
        while self.stream.eat(&Token::OrOr) {
            left = Expression::Or(Box::new(left), Box::new(self.conjunction()?));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Expression, SyntaxError> {
        let mut left = self.relational()?;
        while self.stream.eat(&Token::AndAnd) {
            left = Expression::And(Box::new(left), Box::new(self.relational()?));
        }
        Ok(left)
    }

    fn relational(&mut self) -> Result<Expression, SyntaxError> {
        let left = self.additive()?;
        let make: fn(Box<Expression>, Box<Expression>) -> Expression = match self.stream.peek() {
            Token::Eq => Expression::Equal,
            Token::Ne => Expression::NotEqual,
            Token::Lt => Expression::Less,
            Token::Le => Expression::LessOrEqual,
            Token::Gt => Expression::Greater,
            Token::Ge => Expression::GreaterOrEqual,
            _ => return Ok(left),
        };
        self.stream.next();
        let right = self.additive()?;
        Ok(make(Box::new(left), Box::new(right)))
    }

    fn additive(&mut self) -> Result<Expression, SyntaxError> {
        let mut left = self.multiplicative()?;
        loop {
            let make: fn(Box<Expression>, Box<Expression>) -> Expression = match self.stream.peek() {
                Token::Plus => Expression::Add,
                Token::Minus => Expression::Subtract,
                _ => return Ok(left),
            };
            self.stream.next();
            left = make(Box::new(left), Box::new(self.multiplicative()?));
        }
    }

    fn multiplicative(&mut self) -> Result<Expression, SyntaxError> {
        let mut left = self.unary()?;
        loop {
            let make: fn(Box<Expression>, Box<Expression>) -> Expression = match self.stream.peek() {
                Token::Star => Expression::Multiply,
                Token::Slash => Expression::Divide,
                _ => return Ok(left),
            };
            self.stream.next();
            left = make(Box::new(left), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expression, SyntaxError> {
        match self.stream.peek() {
            Token::Bang => {
                self.stream.next();
                Ok(Expression::Not(Box::new(self.unary()?)))
            }
            Token::Minus => {
                self.stream.next();
                Ok(Expression::Negate(Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.stream.next();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expression, SyntaxError> {
        match self.stream.peek() {
            Token::LParen => return self.bracketed_expression(),
            Token::Variable(_) => return Ok(Expression::Variable(self.variable()?)),
            Token::QuoteOpen => {
                let span = self.stream.span();
                return match self.term_pattern(Position::Object)? {
                    TermPattern::Term(t) => Ok(Expression::Constant(t)),
                    _ => Err(Stream::error_at(span, "quoted triples in expressions must be ground")),
                };
            }
            _ => {}
        }
        if let Some(iri) = self.stream.iri(self.prefixes)? {
            return Ok(Expression::Constant(Term::Iri(iri)));
        }
        match self.stream.literal(self.prefixes)? {
            Some(literal) => Ok(Expression::Constant(literal.into())),
            None => Err(self.stream.unexpected("expression")),
        }
    }
}

fn bind_error(span: Span, variable: &Variable) -> SyntaxError {
    Stream::error_at(
        span,
        ValidationError::BindRebinds {
            variable: variable.name().to_owned(),
        }
        .to_string(),
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Subject,
    Object,
}

/// Writes a rule in arrow syntax. `parse_rule_text(render_rule(r))` gives
/// back `r` for every condition free of empty groups.
pub fn render_rule(rule: &ObligationRule) -> String {
    let prefixes = PrefixMap::bundled();
    let mut out = String::new();
    write_iri(&mut out, rule.iri.as_str(), &prefixes);
    out.push_str(" {\n    ");
    out.push_str(&render_condition_with(&rule.condition, &prefixes));
    out.push_str("\n} -> O {\n    ");
    out.push_str(&render_action(rule));
    out.push_str("\n}\n");
    out
}

/// Writes every rule, separated by blank lines.
pub fn render_document(doc: &PolicyDocument) -> String {
    doc.rules.iter().map(render_rule).collect::<Vec<_>>().join("\n")
}

/// The condition as a brace-less group body.
pub fn render_condition(pattern: &GraphPattern) -> String {
    render_condition_with(pattern, &PrefixMap::bundled())
}

/// The action block body, without braces.
pub fn render_action(rule: &ObligationRule) -> String {
    let prefixes = PrefixMap::bundled();
    let mut out = String::new();
    write_term_pattern(&mut out, &rule.action.as_quoted_always(), &prefixes);
    let mut parts = Vec::new();
    if let Some(start) = &rule.start {
        let mut s = String::from("gucon:startTime ");
        write_term_pattern(&mut s, start, &prefixes);
        parts.push(s);
    }
    if let Some(deadline) = &rule.deadline {
        let mut s = String::from("gucon:deadline ");
        write_term_pattern(&mut s, deadline, &prefixes);
        parts.push(s);
    }
    out.push(' ');
    out.push_str(&parts.join(" ; "));
    out.push_str(" .");
    out
}

impl ActionPattern {
    /// Always the quoted-pattern form, even when ground.
    fn as_quoted_always(&self) -> QuotedAlways<'_> {
        QuotedAlways(self)
    }
}

struct QuotedAlways<'a>(&'a ActionPattern);

trait WritePattern {
    fn write(&self, out: &mut String, prefixes: &PrefixMap);
}

impl WritePattern for QuotedAlways<'_> {
    fn write(&self, out: &mut String, prefixes: &PrefixMap) {
        out.push_str("<< ");
        write_term_pattern(out, &self.0.actor, prefixes);
        out.push(' ');
        write_predicate_pattern(out, &self.0.action, prefixes);
        out.push(' ');
        write_term_pattern(out, &self.0.resource, prefixes);
        out.push_str(" >>");
    }
}

impl WritePattern for TermPattern {
    fn write(&self, out: &mut String, prefixes: &PrefixMap) {
        match self {
            TermPattern::Term(t) => write_term(out, t, prefixes),
            TermPattern::Variable(v) => {
                out.push('?');
                out.push_str(v.name());
            }
            TermPattern::Triple(tp) => {
                out.push_str("<< ");
                write_triple_pattern(out, tp, prefixes);
                out.push_str(" >>");
            }
        }
    }
}

fn write_term_pattern(out: &mut String, pattern: &impl WritePattern, prefixes: &PrefixMap) {
    pattern.write(out, prefixes);
}

fn write_predicate_pattern(out: &mut String, pattern: &TermPattern, prefixes: &PrefixMap) {
    match pattern {
        TermPattern::Term(Term::Iri(iri)) if iri.as_str() == rdf::TYPE => out.push('a'),
        other => other.write(out, prefixes),
    }
}

fn write_triple_pattern(out: &mut String, tp: &TriplePattern, prefixes: &PrefixMap) {
    tp.subject.write(out, prefixes);
    out.push(' ');
    write_predicate_pattern(out, &tp.predicate, prefixes);
    out.push(' ');
    tp.object.write(out, prefixes);
}

fn render_condition_with(pattern: &GraphPattern, prefixes: &PrefixMap) -> String {
    let mut elements = Vec::new();
    group_elements(pattern, true, prefixes, &mut elements);
    elements.join(" ")
}

fn braced(pattern: &GraphPattern, prefixes: &PrefixMap) -> String {
    let body = render_condition_with(pattern, prefixes);
    if body.is_empty() {
        "{ }".to_owned()
    } else {
        format!("{{ {body} }}")
    }
}

fn union_chain(pattern: &GraphPattern, prefixes: &PrefixMap) -> String {
    match pattern {
        GraphPattern::Union(l, r) => {
            let left = match l.as_ref() {
                GraphPattern::Union(..) => union_chain(l, prefixes),
                other => braced(other, prefixes),
            };
            format!("{left} UNION {}", braced(r, prefixes))
        }
        other => braced(other, prefixes),
    }
}

/// `trailing` is true when nothing follows in the enclosing group, so
/// FILTERs may be written inline.
fn group_elements(pattern: &GraphPattern, trailing: bool, prefixes: &PrefixMap, out: &mut Vec<String>) {
    match pattern {
        GraphPattern::Empty => {}
        GraphPattern::Triple(tp) => {
            let mut s = String::new();
            write_triple_pattern(&mut s, tp, prefixes);
            s.push_str(" .");
            out.push(s);
        }
        GraphPattern::And(l, r) => {
            group_elements(l, false, prefixes, out);
            match r.as_ref() {
                GraphPattern::Triple(_) => group_elements(r, false, prefixes, out),
                GraphPattern::Union(..) => out.push(union_chain(r, prefixes)),
                other => out.push(braced(other, prefixes)),
            }
        }
        GraphPattern::Union(..) => out.push(union_chain(pattern, prefixes)),
        GraphPattern::Optional(l, r) => {
            group_elements(l, false, prefixes, out);
            out.push(format!("OPTIONAL {}", braced(r, prefixes)));
        }
        GraphPattern::Minus(l, r) => {
            group_elements(l, false, prefixes, out);
            out.push(format!("MINUS {}", braced(r, prefixes)));
        }
        GraphPattern::Filter(inner, e) => {
            if trailing {
                group_elements(inner, true, prefixes, out);
                out.push(format!("FILTER ({})", render_expression_with(e, prefixes)));
            } else {
                out.push(braced(pattern, prefixes));
            }
        }
        GraphPattern::Bind(inner, v, e) => {
            group_elements(inner, false, prefixes, out);
            out.push(format!(
                "BIND ({} AS ?{})",
                render_expression_with(e, prefixes),
                v.name()
            ));
        }
    }
}

/// Fully parenthesized expression text.
pub fn render_expression(expr: &Expression) -> String {
    render_expression_with(expr, &PrefixMap::bundled())
}

fn render_expression_with(expr: &Expression, prefixes: &PrefixMap) -> String {
    let bin = |op: &str, a: &Expression, b: &Expression| {
        format!(
            "({} {op} {})",
            render_expression_with(a, prefixes),
            render_expression_with(b, prefixes)
        )
    };
    match expr {
        Expression::Constant(t) => {
            let mut s = String::new();
            write_term(&mut s, t, prefixes);
            s
        }
        Expression::Variable(v) => format!("?{}", v.name()),
        Expression::Or(a, b) => bin("||", a, b),
        Expression::And(a, b) => bin("&&", a, b),
        Expression::Equal(a, b) => bin("=", a, b),
        Expression::NotEqual(a, b) => bin("!=", a, b),
        Expression::Less(a, b) => bin("<", a, b),
        Expression::LessOrEqual(a, b) => bin("<=", a, b),
        Expression::Greater(a, b) => bin(">", a, b),
        Expression::GreaterOrEqual(a, b) => bin(">=", a, b),
        Expression::Add(a, b) => bin("+", a, b),
        Expression::Subtract(a, b) => bin("-", a, b),
        Expression::Multiply(a, b) => bin("*", a, b),
        Expression::Divide(a, b) => bin("/", a, b),
        Expression::Not(a) => format!("(!{})", render_expression_with(a, prefixes)),
        Expression::Negate(a) => format!("(-{})", render_expression_with(a, prefixes)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::HC;

    const HOSPITAL: &str = r#"{?doctor a hc:Doctor .
?diagnosisReport a hc:DiagnosisReport .
?admission a hc:Admission .
?admission hc:hasPatient ?patient .
?admission hc:hasActualAdmissionEndDate
    ?actualAdmissionEndDate .
?diagnosisReport hc:hasAdmission  ?admission .
?patient hc:hasResponsibleDoctor ?doctor .
BIND (?actualAdmissionEndDate AS ?startTime) .
BIND(?startTime +"PT12H"^^xsd:duration AS ?deadline)}
->
O
{
<<?doctor gucon:sign ?diagnosisReport >>
gucon:startTime ?startTime; gucon:deadline ?deadline.
}"#;

    #[test]
    fn parses_scenario_three_rule() {
        let rule = parse_rule_text(HOSPITAL).unwrap();
        assert_eq!(rule.condition.triple_pattern_count(), 7);
        assert_eq!(rule.condition.bind_count(), 2);
        assert_eq!(rule.action.actor, TermPattern::var("doctor"));
        assert_eq!(
            rule.action.action,
            TermPattern::iri(&format!("{}sign", crate::vocab::GUCON))
        );
        assert_eq!(rule.action.resource, TermPattern::var("diagnosisReport"));
        assert_eq!(rule.start, Some(TermPattern::var("startTime")));
        assert_eq!(rule.deadline, Some(TermPattern::var("deadline")));
        assert_eq!(rule.iri.as_str(), format!("{EXP}rule-1"));
    }

    #[test]
    fn deadline_only_rule() {
        let rule = parse_rule_text(
            "{ ?p a hc:Patient . ?p hc:deadline ?d } -> O { << ?p gucon:sign hc:form >> gucon:deadline ?d }",
        )
        .unwrap();
        assert!(rule.start.is_none());
        assert_eq!(rule.action.resource, TermPattern::iri(&format!("{HC}form")));
    }

    #[test]
    fn unsafe_rule_lists_offenders() {
        let err = parse_rule_text("{?e ?p ?r} -> O {<<?e gucon:act ?x>> gucon:deadline ?r}").unwrap_err();
        assert_eq!(
            err,
            RuleError::Validation(ValidationError::UnsafeVariables(vec!["x".into()]))
        );
    }

    #[test]
    fn missing_both_bounds_rejected() {
        let err = parse_rule_text("{?e ?p ?r} -> O {<<?e gucon:act ?r>>}").unwrap_err();
        assert_eq!(err, RuleError::Validation(ValidationError::MissingBounds));
    }

    #[test]
    fn bound_validation() {
        let err = parse_rule_text("{?e ?p ?r} -> O {<<?e gucon:act ?r>> gucon:deadline 5}").unwrap_err();
        assert!(matches!(err, RuleError::Syntax(_)));
        let err =
            parse_rule_text("{?e ?p ?r} -> O {<<?e gucon:act ?r>> gucon:deadline ?r ; gucon:deadline ?r}").unwrap_err();
        assert!(matches!(
            err,
            RuleError::Validation(ValidationError::DuplicateBound { .. })
        ));
        let err = parse_rule_text("{?e ?p ?r} -> O {<<?e gucon:act ?r>> ex:other ?r}").unwrap_err();
        assert!(matches!(
            err,
            RuleError::Validation(ValidationError::UnexpectedActionPredicate(_))
        ));
        let ok = parse_rule_text(
            "{?e ?p ?r} -> O {<<?e gucon:act ?r>> gucon:deadline \"2025-01-01T00:00:00Z\"^^xsd:dateTime}",
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn reserved_and_rebinding_variables() {
        assert!(parse_rule_text("{?__gucon_exec ?p ?r} -> O {<<?r gucon:act ?r>> gucon:deadline ?r}").is_err());
        let err =
            parse_rule_text("{?e ?p ?r BIND(?e AS ?r)} -> O {<<?e gucon:act ?r>> gucon:deadline ?r}").unwrap_err();
        assert!(err.to_string().contains("already in scope"), "{err}");
    }

    #[test]
    fn template_without_braces_or_separator() {
        let text = "{?e ex:p1 ?r . ?e ex:p2 ?v .
BIND (\"2025-01-01T00:00:00Z\"^^xsd:dateTime as ?startTime)
BIND (\"2025-01-02T00:00:00Z\"^^xsd:dateTime as ?deadline)}
-> O <<?e gucon:act ?r>> gucon:startTime ?startTime gucon:deadline ?deadline";
        let rule = parse_rule_text(text).unwrap();
        assert!(rule.start.is_some() && rule.deadline.is_some());
    }

    #[test]
    fn document_with_named_and_unnamed_rules() {
        let text = "PREFIX my: <http://my.org/>\n\
            my:first { ?a my:p ?b } -> O { <<?a my:do ?b>> gucon:deadline ?b }\n\
            { ?a my:q ?b } -> O <<?a my:do ?b>> gucon:startTime ?b\n\
            my:third { ?a my:r ?b } -> O <<?a my:do ?b>> gucon:startTime ?b";
        let doc = parse_rule_document(text).unwrap();
        let names: Vec<_> = doc.rules.iter().map(|r| r.iri.as_str().to_owned()).collect();
        assert_eq!(
            names,
            ["http://my.org/first", &format!("{EXP}rule-2"), "http://my.org/third"]
        );
    }

    #[test]
    fn group_operators() {
        let p = parse_condition_text(
            "?a ex:p ?b OPTIONAL { ?b ex:q ?c } MINUS { ?a ex:r ?d } { ?a ex:s ?e } UNION { ?a ex:t ?e } FILTER (?b != ex:x)",
            &PrefixMap::bundled(),
        )
        .unwrap();
        let GraphPattern::Filter(inner, _) = &p else {
            panic!("{p:?}")
        };
        let GraphPattern::And(left, right) = inner.as_ref() else {
            panic!()
        };
        assert!(matches!(right.as_ref(), GraphPattern::Union(..)));
        assert!(matches!(left.as_ref(), GraphPattern::Minus(..)));
    }

    #[test]
    fn expression_precedence() {
        let p = parse_condition_text(
            "?a ex:p ?b FILTER (?b > 1 + 2 * 3 || !(?b = 4) && ?b < -5)",
            &PrefixMap::bundled(),
        )
        .unwrap();
        let GraphPattern::Filter(_, e) = p else { panic!() };
        assert_eq!(
            render_expression(&e),
            "((?b > (\"1\"^^xsd:integer + (\"2\"^^xsd:integer * \"3\"^^xsd:integer))) || ((!(?b = \"4\"^^xsd:integer)) && (?b < (-\"5\"^^xsd:integer))))"
        );
    }

    #[test]
    fn render_round_trips() {
        let rule = parse_rule_text(HOSPITAL).unwrap();
        let text = render_rule(&rule);
        assert_eq!(parse_rule_text(&text).unwrap().condition, rule.condition);
        assert_eq!(parse_rule_text(&text).unwrap(), rule);
        let tricky = "ex:r { { ?a ex:p ?b FILTER (?b = ex:c) } OPTIONAL { ?a ex:q ?c FILTER(bound) } \
            ?a ex:z ?z { ?x ex:p ?y } UNION { ?y ex:p ?x } UNION { { ?x ex:k ?k } UNION { ?x ex:j ?k } } \
            BIND (?z + 1 AS ?w) FILTER (?w > 2) FILTER (?z < 9) } -> O { <<?a ex:do ?b>> gucon:deadline ?b }";
        let tricky = tricky.replace("FILTER(bound)", "FILTER (?c != ?a)");
        let rule = parse_rule_text(&tricky).unwrap();
        let again = parse_rule_text(&render_rule(&rule)).unwrap();
        assert_eq!(again, rule);
    }
}
