//! FILTER and BIND expressions with SPARQL-style error handling.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{Literal, Term};
use crate::time::{DateTime, DayTimeDuration};
use crate::vocab::xsd;

use super::mapping::SolutionMapping;
use super::pattern::Variable;

#[derive(Clone, PartialEq, Debug)]
pub enum Expression {
    Constant(Term),
    Variable(Variable),
    Or(Box<Expression>, Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Not(Box<Expression>),
    Equal(Box<Expression>, Box<Expression>),
    NotEqual(Box<Expression>, Box<Expression>),
    Less(Box<Expression>, Box<Expression>),
    LessOrEqual(Box<Expression>, Box<Expression>),
    Greater(Box<Expression>, Box<Expression>),
    GreaterOrEqual(Box<Expression>, Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Subtract(Box<Expression>, Box<Expression>),
    Multiply(Box<Expression>, Box<Expression>),
    Divide(Box<Expression>, Box<Expression>),
    Negate(Box<Expression>),
}

impl Expression {
    pub fn var(name: &str) -> Self {
        Expression::Variable(Variable::new(name))
    }

    pub fn constant(term: impl Into<Term>) -> Self {
        Expression::Constant(term.into())
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Expression::Constant(_) => {}
            Expression::Variable(v) => {
                out.insert(v.clone());
            }
            Expression::Not(e) | Expression::Negate(e) => e.collect_variables(out),
            Expression::Or(a, b)
            | Expression::And(a, b)
            | Expression::Equal(a, b)
            | Expression::NotEqual(a, b)
            | Expression::Less(a, b)
            | Expression::LessOrEqual(a, b)
            | Expression::Greater(a, b)
            | Expression::GreaterOrEqual(a, b)
            | Expression::Add(a, b)
            | Expression::Subtract(a, b)
            | Expression::Multiply(a, b)
            | Expression::Divide(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }
}

/// The error marker produced by a failed evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("variable {0} is unbound")]
    Unbound(Variable),
    #[error("type error: {0}")]
    Type(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow")]
    Overflow,
}

/// A typed expression value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Boolean(bool),
    Integer(i64),
    /// Decimals are carried as binary floating point.
    Decimal(f64),
    Double(f64),
    String(Arc<str>),
    DateTime(DateTime),
    Duration(DayTimeDuration),
    /// IRIs, quoted triples and literals of other datatypes.
    Other(Term),
}

impl Value {
    pub fn from_term(term: &Term) -> Value {
        let Term::Literal(lit) = term else {
            return Value::Other(term.clone());
        };
        let lex = lit.lexical();
        let parsed = match lit.datatype().as_str() {
            xsd::STRING => Some(Value::String(lex.into())),
            xsd::BOOLEAN => match lex {
                "true" | "1" => Some(Value::Boolean(true)),
                "false" | "0" => Some(Value::Boolean(false)),
                _ => None,
            },
            xsd::INTEGER | xsd::INT | xsd::LONG => lex.trim_start_matches('+').parse().ok().map(Value::Integer),
            xsd::DECIMAL => parse_decimal(lex).map(Value::Decimal),
            xsd::DOUBLE | xsd::FLOAT => parse_double(lex).map(Value::Double),
            xsd::DATE_TIME => lit.as_datetime().map(Value::DateTime),
            xsd::DURATION | xsd::DAY_TIME_DURATION => DayTimeDuration::parse(lex).ok().map(Value::Duration),
            _ => None,
        };
        parsed.unwrap_or_else(|| Value::Other(term.clone()))
    }

    pub fn to_term(&self) -> Term {
        match self {
            Value::Boolean(b) => Literal::boolean(*b).into(),
            Value::Integer(i) => Literal::integer(*i).into(),
            Value::Decimal(d) => Literal::decimal(*d).into(),
            Value::Double(d) => Literal::double(*d).into(),
            Value::String(s) => Literal::string(s.clone()).into(),
            Value::DateTime(dt) => Literal::datetime(*dt).into(),
            Value::Duration(d) => Literal::duration(*d).into(),
            Value::Other(t) => t.clone(),
        }
    }

    /// Effective boolean value.
    pub fn ebv(&self) -> Result<bool, ExprError> {
        match self {
            Value::Boolean(b) => Ok(*b),
            Value::Integer(i) => Ok(*i != 0),
            Value::Decimal(d) | Value::Double(d) => Ok(*d != 0.0 && !d.is_nan()),
            Value::String(s) => Ok(!s.is_empty()),
            _ => Err(ExprError::Type("no effective boolean value")),
        }
    }

    fn numeric(&self) -> Option<Numeric> {
        match self {
            Value::Integer(i) => Some(Numeric::Integer(*i)),
            Value::Decimal(d) => Some(Numeric::Decimal(*d)),
            Value::Double(d) => Some(Numeric::Double(*d)),
            _ => None,
        }
    }
}

fn parse_decimal(lex: &str) -> Option<f64> {
    let body = lex.strip_prefix(['+', '-']).unwrap_or(lex);
    let valid = !body.is_empty()
        && body.chars().all(|c| c.is_ascii_digit() || c == '.')
        && body.matches('.').count() <= 1
        && body != ".";
    valid.then(|| lex.parse().ok()).flatten()
}

fn parse_double(lex: &str) -> Option<f64> {
    match lex {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ if lex
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) =>
        {
            lex.parse().ok()
        }
        _ => None,
    }
}

#[derive(Clone, Copy)]
enum Numeric {
    Integer(i64),
    Decimal(f64),
    Double(f64),
}

impl Numeric {
    fn rank(self) -> u8 {
        match self {
            Numeric::Integer(_) => 0,
            Numeric::Decimal(_) => 1,
            Numeric::Double(_) => 2,
        }
    }

    fn as_f64(self) -> f64 {
        match self {
            Numeric::Integer(i) => i as f64,
            Numeric::Decimal(d) | Numeric::Double(d) => d,
        }
    }
}

pub type ExprResult = Result<Value, ExprError>;

/// Evaluates an expression under a mapping. Errors are returned as values
/// for the caller to interpret.
pub fn eval_filter_expr(expr: &Expression, mapping: &SolutionMapping) -> ExprResult {
    match expr {
        Expression::Constant(t) => Ok(Value::from_term(t)),
        Expression::Variable(v) => mapping
            .get(v)
            .map(Value::from_term)
            .ok_or_else(|| ExprError::Unbound(v.clone())),
        Expression::Or(a, b) => {
            let left = eval_filter_expr(a, mapping).and_then(|v| v.ebv());
            let right = eval_filter_expr(b, mapping).and_then(|v| v.ebv());
            match (left, right) {
                (Ok(true), _) | (_, Ok(true)) => Ok(Value::Boolean(true)),
                (Ok(false), Ok(false)) => Ok(Value::Boolean(false)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expression::And(a, b) => {
            let left = eval_filter_expr(a, mapping).and_then(|v| v.ebv());
            let right = eval_filter_expr(b, mapping).and_then(|v| v.ebv());
            match (left, right) {
                (Ok(false), _) | (_, Ok(false)) => Ok(Value::Boolean(false)),
                (Ok(true), Ok(true)) => Ok(Value::Boolean(true)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expression::Not(e) => eval_filter_expr(e, mapping)?.ebv().map(|b| Value::Boolean(!b)),
        Expression::Equal(a, b) => {
            equals(&eval_filter_expr(a, mapping)?, &eval_filter_expr(b, mapping)?).map(Value::Boolean)
        }
        Expression::NotEqual(a, b) => {
            equals(&eval_filter_expr(a, mapping)?, &eval_filter_expr(b, mapping)?).map(|e| Value::Boolean(!e))
        }
        Expression::Less(a, b) => ordered(a, b, mapping, |o| o == Ordering::Less),
        Expression::LessOrEqual(a, b) => ordered(a, b, mapping, |o| o != Ordering::Greater),
        Expression::Greater(a, b) => ordered(a, b, mapping, |o| o == Ordering::Greater),
        Expression::GreaterOrEqual(a, b) => ordered(a, b, mapping, |o| o != Ordering::Less),
        Expression::Add(a, b) => add(eval_filter_expr(a, mapping)?, eval_filter_expr(b, mapping)?),
        Expression::Subtract(a, b) => subtract(eval_filter_expr(a, mapping)?, eval_filter_expr(b, mapping)?),
        Expression::Multiply(a, b) => numeric_op(
            eval_filter_expr(a, mapping)?,
            eval_filter_expr(b, mapping)?,
            i64::checked_mul,
            |x, y| x * y,
        ),
        Expression::Divide(a, b) => divide(eval_filter_expr(a, mapping)?, eval_filter_expr(b, mapping)?),
        Expression::Negate(e) => match eval_filter_expr(e, mapping)? {
            Value::Integer(i) => i.checked_neg().map(Value::Integer).ok_or(ExprError::Overflow),
            Value::Decimal(d) => Ok(Value::Decimal(-d)),
            Value::Double(d) => Ok(Value::Double(-d)),
            Value::Duration(d) => d.checked_neg().map(Value::Duration).ok_or(ExprError::Overflow),
            _ => Err(ExprError::Type("negation of a non-numeric value")),
        },
    }
}

/// Whether the expression holds under `mapping`; errors count as false.
pub fn holds(expr: &Expression, mapping: &SolutionMapping) -> bool {
    matches!(eval_filter_expr(expr, mapping).and_then(|v| v.ebv()), Ok(true))
}

fn compare(a: &Value, b: &Value) -> Result<Ordering, ExprError> {
    if let (Some(x), Some(y)) = (a.numeric(), b.numeric()) {
        return match (x, y) {
            (Numeric::Integer(i), Numeric::Integer(j)) => Ok(i.cmp(&j)),
            _ => x
                .as_f64()
                .partial_cmp(&y.as_f64())
                .ok_or(ExprError::Type("NaN is unordered")),
        };
    }
    match (a, b) {
        (Value::DateTime(x), Value::DateTime(y)) => Ok(x.cmp(y)),
        (Value::Duration(x), Value::Duration(y)) => Ok(x.cmp(y)),
        (Value::String(x), Value::String(y)) => Ok(x.cmp(y)),
        (Value::Boolean(x), Value::Boolean(y)) => Ok(x.cmp(y)),
        _ => Err(ExprError::Type("values are not comparable")),
    }
}

fn equals(a: &Value, b: &Value) -> Result<bool, ExprError> {
    match (a, b) {
        (Value::Other(x), Value::Other(y)) => Ok(x == y),
        (Value::Other(Term::Literal(_)), _) | (_, Value::Other(Term::Literal(_))) => {
            Err(ExprError::Type("cannot compare literals of unknown datatype"))
        }
        (Value::Other(_), _) | (_, Value::Other(_)) => Ok(false),
        _ => compare(a, b).map(|o| o == Ordering::Equal),
    }
}

fn ordered(a: &Expression, b: &Expression, mapping: &SolutionMapping, test: impl Fn(Ordering) -> bool) -> ExprResult {
    let x = eval_filter_expr(a, mapping)?;
    let y = eval_filter_expr(b, mapping)?;
    compare(&x, &y).map(|o| Value::Boolean(test(o)))
}

fn numeric_op(a: Value, b: Value, int_op: fn(i64, i64) -> Option<i64>, float_op: fn(f64, f64) -> f64) -> ExprResult {
    let (Some(x), Some(y)) = (a.numeric(), b.numeric()) else {
        return Err(ExprError::Type("arithmetic on non-numeric values"));
    };
    match (x, y) {
        (Numeric::Integer(i), Numeric::Integer(j)) => int_op(i, j).map(Value::Integer).ok_or(ExprError::Overflow),
        _ => {
            let r = float_op(x.as_f64(), y.as_f64());
            Ok(if x.rank().max(y.rank()) == 2 {
                Value::Double(r)
            } else {
                Value::Decimal(r)
            })
        }
    }
}

fn add(a: Value, b: Value) -> ExprResult {
    match (&a, &b) {
        (Value::DateTime(t), Value::Duration(d)) | (Value::Duration(d), Value::DateTime(t)) => {
            t.checked_add(*d).map(Value::DateTime).map_err(|_| ExprError::Overflow)
        }
        (Value::Duration(x), Value::Duration(y)) => x.checked_add(*y).map(Value::Duration).ok_or(ExprError::Overflow),
        _ => numeric_op(a, b, i64::checked_add, |x, y| x + y),
    }
}

fn subtract(a: Value, b: Value) -> ExprResult {
    match (&a, &b) {
        (Value::DateTime(t), Value::Duration(d)) => {
            t.checked_sub(*d).map(Value::DateTime).map_err(|_| ExprError::Overflow)
        }
        (Value::DateTime(x), Value::DateTime(y)) => Ok(Value::Duration(x.since(y))),
        (Value::Duration(x), Value::Duration(y)) => y
            .checked_neg()
            .and_then(|ny| x.checked_add(ny))
            .map(Value::Duration)
            .ok_or(ExprError::Overflow),
        _ => numeric_op(a, b, i64::checked_sub, |x, y| x - y),
    }
}

fn divide(a: Value, b: Value) -> ExprResult {
    let (Some(x), Some(y)) = (a.numeric(), b.numeric()) else {
        return Err(ExprError::Type("arithmetic on non-numeric values"));
    };
    if x.rank().max(y.rank()) == 2 {
        return Ok(Value::Double(x.as_f64() / y.as_f64()));
    }
    if y.as_f64() == 0.0 {
        return Err(ExprError::DivisionByZero);
    }
    Ok(Value::Decimal(x.as_f64() / y.as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Iri;

    fn dt(s: &str) -> Expression {
        Expression::Constant(Literal::new(s, Iri::new(xsd::DATE_TIME)).into())
    }

    fn b(e: Expression) -> Box<Expression> {
        Box::new(e)
    }

    #[test]
    fn datetime_comparison_uses_timeline() {
        let e = Expression::Greater(b(dt("2025-07-21T10:00:00+02:00")), b(dt("2025-07-20T22:30:00+02:00")));
        assert_eq!(eval_filter_expr(&e, &SolutionMapping::new()), Ok(Value::Boolean(true)));
        let e = Expression::Equal(b(dt("2025-07-20T08:30:00Z")), b(dt("2025-07-20T10:30:00+02:00")));
        assert_eq!(eval_filter_expr(&e, &SolutionMapping::new()), Ok(Value::Boolean(true)));
    }

    #[test]
    fn reflexive_equality() {
        let m = SolutionMapping::new().with(Variable::new("x"), Term::iri("http://a"));
        let e = Expression::Equal(b(Expression::var("x")), b(Expression::var("x")));
        assert!(holds(&e, &m));
        assert!(!holds(&e, &SolutionMapping::new()));
    }

    #[test]
    fn datetime_plus_duration() {
        let d = Expression::Constant(Literal::new("PT12H", Iri::new(xsd::DURATION)).into());
        let e = Expression::Add(b(dt("2025-07-20T10:30:00+02:00")), b(d));
        let v = eval_filter_expr(&e, &SolutionMapping::new()).unwrap();
        assert_eq!(
            v.to_term().to_string(),
            Term::from(crate::time::DateTime::parse("2025-07-20T22:30:00+02:00").unwrap()).to_string()
        );
    }

    #[test]
    fn mixed_types_are_errors() {
        let e = Expression::Less(
            b(Expression::Constant(Literal::integer(1).into())),
            b(dt("2025-07-20T10:30:00Z")),
        );
        assert!(matches!(
            eval_filter_expr(&e, &SolutionMapping::new()),
            Err(ExprError::Type(_))
        ));
        let e = Expression::Equal(
            b(Expression::Constant(Term::iri("http://a"))),
            b(Expression::Constant(Literal::integer(1).into())),
        );
        assert_eq!(eval_filter_expr(&e, &SolutionMapping::new()), Ok(Value::Boolean(false)));
    }

    #[test]
    fn arithmetic() {
        let i = |n| b(Expression::Constant(Literal::integer(n).into()));
        let m = SolutionMapping::new();
        assert_eq!(
            eval_filter_expr(&Expression::Add(i(2), i(3)), &m),
            Ok(Value::Integer(5))
        );
        assert_eq!(
            eval_filter_expr(&Expression::Divide(i(3), i(2)), &m),
            Ok(Value::Decimal(1.5))
        );
        assert_eq!(
            eval_filter_expr(&Expression::Divide(i(3), i(0)), &m),
            Err(ExprError::DivisionByZero)
        );
        assert_eq!(
            eval_filter_expr(&Expression::Add(i(i64::MAX), i(1)), &m),
            Err(ExprError::Overflow)
        );
    }

    /// SPARQL's three-valued logic, written out as a table.
    #[test]
    fn three_valued_connectives() {
        #[derive(Clone, Copy, Debug, PartialEq)]
        enum T {
            True,
            False,
            Error,
        }
        let expr = |t: T| match t {
            T::True => Expression::Constant(Literal::boolean(true).into()),
            T::False => Expression::Constant(Literal::boolean(false).into()),
            T::Error => Expression::var("unbound"),
        };
        let eval = |e: &Expression| match eval_filter_expr(e, &SolutionMapping::new()).and_then(|v| v.ebv()) {
            Ok(true) => T::True,
            Ok(false) => T::False,
            Err(_) => T::Error,
        };
        use T::*;
        let and_table = [
            (True, True, True),
            (True, False, False),
            (True, Error, Error),
            (False, True, False),
            (False, False, False),
            (False, Error, False),
            (Error, True, Error),
            (Error, False, False),
            (Error, Error, Error),
        ];
        let or_table = [
            (True, True, True),
            (True, False, True),
            (True, Error, True),
            (False, True, True),
            (False, False, False),
            (False, Error, Error),
            (Error, True, True),
            (Error, False, Error),
            (Error, Error, Error),
        ];
        for (x, y, want) in and_table {
            assert_eq!(eval(&Expression::And(b(expr(x)), b(expr(y)))), want, "{x:?} && {y:?}");
        }
        for (x, y, want) in or_table {
            assert_eq!(eval(&Expression::Or(b(expr(x)), b(expr(y)))), want, "{x:?} || {y:?}");
        }
        for (x, want) in [(True, False), (False, True), (Error, Error)] {
            assert_eq!(eval(&Expression::Not(b(expr(x)))), want);
        }
    }
}
