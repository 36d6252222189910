//! Temporal obligation compliance over RDF-star knowledge bases.

pub mod algebra;
pub mod engine;
pub mod error;
pub mod graph;
pub mod kb;
pub mod policy;
pub mod report;
pub mod syntax;
pub mod term;
pub mod time;
pub mod ucp;
pub mod vocab;

pub use graph::Graph;
pub use term::{Iri, Literal, Term, Triple};
pub use time::{add_duration, compare_instants, parse_datetime, DateTime, DayTimeDuration, TimeInstant};
