//! Graph patterns, solution mappings and their evaluation.

mod eval;
mod expr;
mod mapping;
mod pattern;

pub use eval::{apply_bind, evaluate, evaluate_unordered, substitute, Substitute};
pub use expr::{eval_filter_expr, holds, ExprError, ExprResult, Expression, Value};
pub use mapping::SolutionMapping;
pub use pattern::{GraphPattern, TermPattern, TriplePattern, Variable};
