use thiserror::Error;

/// A positioned parse failure. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// A rule that parsed but is not well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("action variables not bound by the condition: {}", .0.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(", "))]
    UnsafeVariables(Vec<String>),
    #[error("an obligation needs a start time, a deadline, or both")]
    MissingBounds,
    #[error("{which} is given more than once")]
    DuplicateBound { which: &'static str },
    #[error("{which} must be a variable or an xsd:dateTime literal, found {found}")]
    InvalidBound { which: &'static str, found: String },
    #[error("unexpected predicate {0} in action block, expected gucon:startTime or gucon:deadline")]
    UnexpectedActionPredicate(String),
    #[error("variable ?{variable} is already in scope and cannot be the target of BIND")]
    BindRebinds { variable: String },
    #[error("variable names starting with __gucon are reserved: ?{0}")]
    ReservedVariable(String),
}

/// Failure to parse or validate a rule, with context.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Validation(#[from] ValidationError),
}

/// Failure to interpret a UCP policy graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("rule {rule}: missing mandatory property {property}")]
    MissingProperty { rule: String, property: &'static str },
    #[error("rule {rule}: property {property} must be a string literal")]
    NotAString { rule: String, property: &'static str },
    #[error("rule {rule}: property {property} must be an IRI")]
    NotAnIri { rule: String, property: &'static str },
    #[error("rule {rule}: {property} has more than one value")]
    Ambiguous { rule: String, property: &'static str },
    #[error("rule {rule}: {source}")]
    Pattern {
        rule: String,
        #[source]
        source: RuleError,
    },
    #[error("{0}")]
    Document(#[from] RuleError),
    #[error("{0}")]
    Turtle(#[from] SyntaxError),
}

/// Failure to split a graph into facts and events.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("execution time statement needs a quoted-triple subject: {0}")]
    NonQuotedSubject(String),
    #[error("execution time must be an xsd:dateTime literal: {0}")]
    NonDateTimeObject(String),
}

/// Failure while grounding or classifying obligations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rule {rule}: {which} grounded to non-dateTime value {value} under {mapping}")]
    NonDateTimeBound {
        rule: String,
        which: &'static str,
        value: String,
        mapping: String,
    },
    #[error("rule {rule}: {which} is unbound under {mapping}")]
    UnboundBound {
        rule: String,
        which: &'static str,
        mapping: String,
    },
    #[error("rule {rule}: start {start} is after deadline {deadline} under {mapping}")]
    InvertedWindow {
        rule: String,
        start: String,
        deadline: String,
        mapping: String,
    },
    #[error("rule {rule}: {source}")]
    Substitution {
        rule: String,
        #[source]
        source: SubstitutionError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("variable ?{0} is unbound")]
    Unbound(String),
    #[error("a literal cannot be the subject of a triple")]
    LiteralSubject,
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
}

/// Failure to read back a compliance report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("no gc:Report node in graph")]
    NoReport,
    #[error("more than one gc:Report node in graph")]
    MultipleReports,
    #[error("{node}: missing {property}")]
    Missing { node: String, property: &'static str },
    #[error("{node}: {property} has an invalid value {value}")]
    Invalid {
        node: String,
        property: &'static str,
        value: String,
    },
}
