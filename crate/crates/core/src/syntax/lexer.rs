//! Tokenizer shared by the Turtle-star reader and the rule grammar.

use std::fmt;

use crate::error::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    IriRef(String),
    PrefixedName {
        prefix: String,
        local: String,
    },
    Variable(String),
    String(String),
    Integer(String),
    Decimal(String),
    Double(String),
    /// A bare word such as `a`, `O`, `FILTER` or `true`.
    Word(String),
    /// `@prefix`, `@base`, or a language tag after a string.
    At(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Semicolon,
    Comma,
    Carets,
    QuoteOpen,
    QuoteClose,
    Arrow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    AndAnd,
    OrOr,
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::IriRef(iri) => format!("<{iri}>"),
            Token::PrefixedName { prefix, local } => format!("{prefix}:{local}"),
            Token::Variable(v) => format!("?{v}"),
            Token::String(_) => "string literal".to_owned(),
            Token::Integer(n) | Token::Decimal(n) | Token::Double(n) => format!("number {n}"),
            Token::Word(w) => format!("'{w}'"),
            Token::At(w) => format!("'@{w}'"),
            Token::LBrace => "'{'".to_owned(),
            Token::RBrace => "'}'".to_owned(),
            Token::LParen => "'('".to_owned(),
            Token::RParen => "')'".to_owned(),
            Token::Dot => "'.'".to_owned(),
            Token::Semicolon => "';'".to_owned(),
            Token::Comma => "','".to_owned(),
            Token::Carets => "'^^'".to_owned(),
            Token::QuoteOpen => "'<<'".to_owned(),
            Token::QuoteClose => "'>>'".to_owned(),
            Token::Arrow => "'->'".to_owned(),
            Token::Eq => "'='".to_owned(),
            Token::Ne => "'!='".to_owned(),
            Token::Lt => "'<'".to_owned(),
            Token::Le => "'<='".to_owned(),
            Token::Gt => "'>'".to_owned(),
            Token::Ge => "'>='".to_owned(),
            Token::Plus => "'+'".to_owned(),
            Token::Minus => "'-'".to_owned(),
            Token::Star => "'*'".to_owned(),
            Token::Slash => "'/'".to_owned(),
            Token::Bang => "'!'".to_owned(),
            Token::AndAnd => "'&&'".to_owned(),
            Token::OrOr => "'||'".to_owned(),
            Token::Eof => "end of input".to_owned(),
        }
    }

    pub fn is_word(&self, word: &str) -> bool {
        matches!(self, Token::Word(w) if w.eq_ignore_ascii_case(word))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub span: Span,
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut lexer = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let token = lexer.next_token()?;
        let done = token.token == Token::Eof;
        out.push(token);
        if done {
            return Ok(out);
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, span: Span, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(span.line, span.column, message)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Spanned, SyntaxError> {
        self.skip_trivia();
        let span = self.span();
        let Some(c) = self.peek() else {
            return Ok(Spanned {
                token: Token::Eof,
                span,
            });
        };
        let token = match c {
            '{' => self.single(Token::LBrace),
            '}' => self.single(Token::RBrace),
            '(' => self.single(Token::LParen),
            ')' => self.single(Token::RParen),
            ';' => self.single(Token::Semicolon),
            ',' => self.single(Token::Comma),
            '*' => self.single(Token::Star),
            '/' => self.single(Token::Slash),
            '+' => self.single(Token::Plus),
            '[' => return Err(self.error(span, "blank node property lists are not supported")),
            ']' => return Err(self.error(span, "unexpected ']'")),
            '.' => {
                if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                    self.number(span)?
                } else {
                    self.single(Token::Dot)
                }
            }
            '-' => {
                if self.peek_at(1) == Some('>') {
                    self.bump();
                    self.bump();
                    Token::Arrow
                } else {
                    self.single(Token::Minus)
                }
            }
            '^' => {
                if self.peek_at(1) == Some('^') {
                    self.bump();
                    self.bump();
                    Token::Carets
                } else {
                    return Err(self.error(span, "expected '^^'"));
                }
            }
            '=' => self.single(Token::Eq),
            '!' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Token::Ne
                } else {
                    Token::Bang
                }
            }
            '&' => {
                if self.peek_at(1) == Some('&') {
                    self.bump();
                    self.bump();
                    Token::AndAnd
                } else {
                    return Err(self.error(span, "expected '&&'"));
                }
            }
            '|' => {
                if self.peek_at(1) == Some('|') {
                    self.bump();
                    self.bump();
                    Token::OrOr
                } else {
                    return Err(self.error(span, "expected '||'"));
                }
            }
            '<' => self.angle_open()?,
            '>' => {
                self.bump();
                match self.peek() {
                    Some('>') => {
                        self.bump();
                        Token::QuoteClose
                    }
                    Some('=') => {
                        self.bump();
                        Token::Ge
                    }
                    _ => Token::Gt,
                }
            }
            '?' | '$' => {
                self.bump();
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                if self.pos == start {
                    return Err(self.error(span, "expected variable name"));
                }
                Token::Variable(self.chars[start..self.pos].iter().collect())
            }
            '"' | '\'' => self.string(span)?,
            '@' => {
                self.bump();
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '-') {
                    self.bump();
                }
                if self.pos == start {
                    return Err(self.error(span, "expected a name after '@'"));
                }
                Token::At(self.chars[start..self.pos].iter().collect())
            }
            '_' if self.peek_at(1) == Some(':') => {
                return Err(self.error(span, "blank nodes are not supported"));
            }
            c if c.is_ascii_digit() => self.number(span)?,
            ':' => self.prefixed_name(String::new())?,
            c if is_name_start(c) => self.word()?,
            other => return Err(self.error(span, format!("unexpected character {other:?}"))),
        };
        Ok(Spanned { token, span })
    }

    fn single(&mut self, token: Token) -> Token {
        self.bump();
        token
    }

    /// `<<`, `<=`, an IRI reference, or the `<` operator.
    fn angle_open(&mut self) -> Result<Token, SyntaxError> {
        match self.peek_at(1) {
            Some('<') => {
                self.bump();
                self.bump();
                return Ok(Token::QuoteOpen);
            }
            Some('=') => {
                self.bump();
                self.bump();
                return Ok(Token::Le);
            }
            _ => {}
        }
        let mut end = self.pos + 1;
        while let Some(&c) = self.chars.get(end) {
            match c {
                '>' => break,
                c if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    end = usize::MAX;
                    break;
                }
                _ => end += 1,
            }
        }
        if end >= self.chars.len() {
            self.bump();
            return Ok(Token::Lt);
        }
        self.bump();
        let mut iri = String::new();
        while self.pos < end {
            let c = self.bump().expect("bounded by end");
            if c == '\\' {
                let esc_span = self.span();
                match self.bump() {
                    Some('u') => iri.push(self.hex_escape(4, esc_span)?),
                    Some('U') => iri.push(self.hex_escape(8, esc_span)?),
                    _ => return Err(self.error(esc_span, "invalid escape in IRI")),
                }
            } else {
                iri.push(c);
            }
        }
        self.bump();
        Ok(Token::IriRef(iri))
    }

    fn hex_escape(&mut self, digits: usize, span: Span) -> Result<char, SyntaxError> {
        if self.pos + digits > self.chars.len() {
            return Err(self.error(span, "truncated unicode escape"));
        }
        let text: String = self.chars[self.pos..self.pos + digits].iter().collect();
        let code = u32::from_str_radix(&text, 16).map_err(|_| self.error(span, "invalid unicode escape"))?;
        let c = char::from_u32(code).ok_or_else(|| self.error(span, "invalid unicode code point"))?;
        for _ in 0..digits {
            self.bump();
        }
        Ok(c)
    }

    fn string(&mut self, span: Span) -> Result<Token, SyntaxError> {
        let quote = self.bump().expect("caller checked");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.error(span, "unterminated string literal"));
            };
            if c == quote {
                if !long {
                    self.bump();
                    break;
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    self.bump();
                    self.bump();
                    self.bump();
                    break;
                }
                value.push(c);
                self.bump();
                continue;
            }
            if (c == '\n' || c == '\r') && !long {
                return Err(self.error(span, "line break in short string literal"));
            }
            self.bump();
            if c == '\\' {
                let esc_span = self.span();
                let e = self
                    .bump()
                    .ok_or_else(|| self.error(span, "unterminated string literal"))?;
                match e {
                    't' => value.push('\t'),
                    'b' => value.push('\u{8}'),
                    'n' => value.push('\n'),
                    'r' => value.push('\r'),
                    'f' => value.push('\u{c}'),
                    '"' => value.push('"'),
                    '\'' => value.push('\''),
                    '\\' => value.push('\\'),
                    'u' => value.push(self.hex_escape(4, esc_span)?),
                    'U' => value.push(self.hex_escape(8, esc_span)?),
                    other => return Err(self.error(esc_span, format!("invalid escape '\\{other}'"))),
                }
            } else {
                value.push(c);
            }
        }
        Ok(Token::String(value))
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.pos - start
    }

    fn number(&mut self, span: Span) -> Result<Token, SyntaxError> {
        let start = self.pos;
        self.digits();
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.digits();
            decimal = true;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.digits() == 0 {
                return Err(self.error(span, "malformed exponent"));
            }
            return Ok(Token::Double(self.chars[start..self.pos].iter().collect()));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        Ok(if decimal {
            Token::Decimal(text)
        } else {
            Token::Integer(text)
        })
    }

    fn word(&mut self) -> Result<Token, SyntaxError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_name_char(c) || (c == '.' && self.peek_at(1).is_some_and(is_name_char)) {
                self.bump();
            } else {
                break;
            }
        }
        let word: String = self.chars[start..self.pos].iter().collect();
        if self.peek() == Some(':') {
            return self.prefixed_name(word);
        }
        Ok(Token::Word(word))
    }

    fn prefixed_name(&mut self, prefix: String) -> Result<Token, SyntaxError> {
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == ':' {
                local.push(c);
                self.bump();
            } else if c == '.' {
                // A trailing dot ends the statement rather than the name.
                if self.peek_at(1).is_some_and(|n| is_name_char(n) || n == ':' || n == '.') {
                    let mut look = 1;
                    while self.peek_at(look) == Some('.') {
                        look += 1;
                    }
                    if self.peek_at(look).is_some_and(|n| is_name_char(n) || n == ':') {
                        local.push(c);
                        self.bump();
                        continue;
                    }
                }
                break;
            } else if c == '%' {
                let h1 = self.peek_at(1).filter(char::is_ascii_hexdigit);
                let h2 = self.peek_at(2).filter(char::is_ascii_hexdigit);
                match (h1, h2) {
                    (Some(a), Some(b)) => {
                        local.push('%');
                        local.push(a);
                        local.push(b);
                        self.bump();
                        self.bump();
                        self.bump();
                    }
                    _ => return Err(self.error(self.span(), "invalid percent escape in local name")),
                }
            } else if c == '\\' {
                match self.peek_at(1) {
                    Some(
                        e @ ('_' | '~' | '.' | '-' | '!' | '$' | '&' | '\'' | '(' | ')' | '*' | '+' | ',' | ';' | '='
                        | '/' | '?' | '#' | '@' | '%'),
                    ) => {
                        local.push(e);
                        self.bump();
                        self.bump();
                    }
                    _ => return Err(self.error(self.span(), "invalid escape in local name")),
                }
            } else {
                break;
            }
        }
        Ok(Token::PrefixedName { prefix, local })
    }
}
