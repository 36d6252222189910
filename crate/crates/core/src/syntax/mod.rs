//! Readers and writers for Turtle-star and the arrow rule syntax.

pub mod lexer;
mod prefixes;
mod rule;
mod stream;
mod turtle;

pub use prefixes::PrefixMap;
pub use rule::{
    parse_action_text, parse_atemporal_rule_text, parse_condition_text, parse_rule_document, parse_rule_document_with,
    parse_rule_text, render_action, render_condition, render_document, render_expression, render_rule,
    RESERVED_VARIABLE_PREFIX,
};
pub use turtle::{parse_turtle_star, parse_with_prefixes, serialize_turtle_star, serialize_with_prefixes};
