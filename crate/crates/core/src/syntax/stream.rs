use crate::error::SyntaxError;
use crate::term::{Iri, Literal};
use crate::vocab::xsd;

use super::lexer::{tokenize, Span, Spanned, Token};
use super::prefixes::PrefixMap;

/// Cursor over a token vector. The last token is always `Eof`.
pub(crate) struct Stream {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Stream {
    pub fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Stream {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    pub fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].token
    }

    pub fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    pub fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Token::Eof
    }

    pub fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == token {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        if self.peek().is_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &Token) -> Result<Span, SyntaxError> {
        if self.peek() == token {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&token.describe()))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let span = self.span();
        SyntaxError::new(span.line, span.column, message)
    }

    pub fn error_at(span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(span.line, span.column, message)
    }

    pub fn unexpected(&self, expected: &str) -> SyntaxError {
        self.error(format!("expected {expected}, found {}", self.peek().describe()))
    }

    /// An IRI reference or prefixed name at the cursor.
    pub fn iri(&mut self, prefixes: &PrefixMap) -> Result<Option<Iri>, SyntaxError> {
        match self.peek().clone() {
            Token::IriRef(reference) => {
                self.next();
                Ok(Some(Iri::new(prefixes.resolve(&reference))))
            }
            Token::PrefixedName { prefix, local } => {
                let span = self.span();
                match prefixes.expand(&prefix, &local) {
                    Some(iri) => {
                        self.next();
                        Ok(Some(Iri::new(iri)))
                    }
                    None => Err(Stream::error_at(span, format!("undeclared prefix '{prefix}:'"))),
                }
            }
            _ => Ok(None),
        }
    }

    /// A literal at the cursor: quoted string with optional datatype,
    /// signed or unsigned number, or boolean.
    pub fn literal(&mut self, prefixes: &PrefixMap) -> Result<Option<Literal>, SyntaxError> {
        match self.peek().clone() {
            Token::String(value) => {
                self.next();
                match self.peek().clone() {
                    Token::Carets => {
                        self.next();
                        match self.iri(prefixes)? {
                            Some(datatype) => Ok(Some(Literal::new(value, datatype))),
                            None => Err(self.unexpected("datatype IRI after '^^'")),
                        }
                    }
                    Token::At(_) => Err(self.error("language-tagged literals are not supported")),
                    _ => Ok(Some(Literal::string(value))),
                }
            }
            Token::Integer(_) | Token::Decimal(_) | Token::Double(_) => Ok(Some(self.number(""))),
            Token::Plus | Token::Minus
                if matches!(
                    self.peek_at(1),
                    Token::Integer(_) | Token::Decimal(_) | Token::Double(_)
                ) =>
            {
                let sign = if self.next().token == Token::Minus { "-" } else { "+" };
                Ok(Some(self.number(sign)))
            }
            Token::Word(w) if w == "true" || w == "false" => {
                self.next();
                Ok(Some(Literal::new(w, Iri::new(xsd::BOOLEAN))))
            }
            _ => Ok(None),
        }
    }

    fn number(&mut self, sign: &str) -> Literal {
        let (text, datatype) = match self.next().token {
            Token::Integer(t) => (t, xsd::INTEGER),
            Token::Decimal(t) => (t, xsd::DECIMAL),
            Token::Double(t) => (t, xsd::DOUBLE),
            _ => unreachable!("caller checked for a number token"),
        };
        Literal::new(format!("{sign}{text}"), Iri::new(datatype))
    }

    /// `@prefix`, `PREFIX`, `@base` or `BASE` at the cursor. Returns whether
    /// a directive was consumed.
    pub fn directive(&mut self, prefixes: &mut PrefixMap) -> Result<bool, SyntaxError> {
        let (sparql_style, is_prefix) = match self.peek() {
            Token::At(w) if w == "prefix" => (false, true),
            Token::At(w) if w == "base" => (false, false),
            t if t.is_word("PREFIX") => (true, true),
            t if t.is_word("BASE") => (true, false),
            Token::At(w) => {
                let w = w.clone();
                return Err(self.error(format!("unknown directive '@{w}'")));
            }
            _ => return Ok(false),
        };
        self.next();
        if is_prefix {
            let prefix = match self.next() {
                Spanned {
                    token: Token::PrefixedName { prefix, local },
                    ..
                } if local.is_empty() => prefix,
                other => {
                    return Err(Stream::error_at(
                        other.span,
                        format!("expected prefix name, found {}", other.token.describe()),
                    ))
                }
            };
            let namespace = match self.next() {
                Spanned {
                    token: Token::IriRef(iri),
                    ..
                } => prefixes.resolve(&iri),
                other => {
                    return Err(Stream::error_at(
                        other.span,
                        format!("expected namespace IRI, found {}", other.token.describe()),
                    ))
                }
            };
            prefixes.insert(prefix, namespace);
        } else {
            let base = match self.next() {
                Spanned {
                    token: Token::IriRef(iri),
                    ..
                } => prefixes.resolve(&iri),
                other => {
                    return Err(Stream::error_at(
                        other.span,
                        format!("expected base IRI, found {}", other.token.describe()),
                    ))
                }
            };
            prefixes.set_base(base);
        }
        if !sparql_style {
            self.expect(&Token::Dot)?;
        }
        Ok(true)
    }
}
