//! Knowledge bases split into facts and timestamped events.

use rustc_hash::FxHashMap as HashMap;

use crate::error::KbError;
use crate::graph::Graph;
use crate::term::{Iri, Literal, Term, Triple};
use crate::time::DateTime;
use crate::vocab::gucon;

/// An executed action `(n, c, r)` at `exec`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub exec: DateTime,
    pub actor: Term,
    pub action: Iri,
    pub resource: Term,
}

impl Event {
    pub fn new(actor: Term, action: Iri, resource: Term, exec: DateTime) -> Self {
        Event {
            exec,
            actor,
            action,
            resource,
        }
    }

    pub fn action_triple(&self) -> Triple {
        Triple::new(self.actor.clone(), self.action.clone(), self.resource.clone())
    }

    /// `<< n c r >> gucon:executionTime exec`.
    pub fn to_statement(&self) -> Triple {
        Triple::new(
            Term::Triple(self.action_triple().into()),
            Iri::new(gucon::EXECUTION_TIME),
            Literal::datetime(self.exec).into(),
        )
    }
}

/// Facts plus events. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct TemporalKB {
    iri: Iri,
    dkb: Graph,
    /// Sorted by execution time.
    events: Vec<Event>,
    by_action: HashMap<Triple, Vec<DateTime>>,
}

impl PartialEq for TemporalKB {
    fn eq(&self, other: &Self) -> bool {
        self.iri == other.iri && self.dkb == other.dkb && self.events == other.events
    }
}

/// Splits `graph`: every `gucon:executionTime` statement becomes an event,
/// everything else is a fact.
pub fn load_kb(graph: &Graph, iri: Iri) -> Result<TemporalKB, KbError> {
    let exec_predicate = Iri::new(gucon::EXECUTION_TIME);
    let mut dkb = Graph::new();
    let mut events = Vec::new();
    for triple in graph.iter() {
        if triple.predicate != exec_predicate {
            dkb.insert(triple.clone());
            continue;
        }
        let Term::Triple(action) = &triple.subject else {
            return Err(KbError::NonQuotedSubject(triple.to_string()));
        };
        let exec = triple
            .object
            .as_datetime()
            .ok_or_else(|| KbError::NonDateTimeObject(triple.to_string()))?;
        events.push(Event::new(
            action.subject.clone(),
            action.predicate.clone(),
            action.object.clone(),
            exec,
        ));
    }
    Ok(TemporalKB::new(iri, dkb, events))
}

impl TemporalKB {
    pub fn new(iri: Iri, dkb: Graph, mut events: Vec<Event>) -> Self {
        events.sort();
        events.dedup();
        let mut by_action: HashMap<Triple, Vec<DateTime>> = HashMap::default();
        for e in &events {
            by_action.entry(e.action_triple()).or_default().push(e.exec);
        }
        TemporalKB {
            iri,
            dkb,
            events,
            by_action,
        }
    }

    pub fn iri(&self) -> &Iri {
        &self.iri
    }

    pub fn dkb(&self) -> &Graph {
        &self.dkb
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Execution times of a ground action, ascending.
    pub fn executions(&self, action: &Triple) -> &[DateTime] {
        self.by_action.get(action).map_or(&[], Vec::as_slice)
    }

    /// Facts plus the events with `exec <= t`. The bound is inclusive.
    pub fn snapshot(&self, t: DateTime) -> Graph {
        let mut g = self.dkb.clone();
        let visible = self.events.partition_point(|e| e.exec <= t);
        g.extend(self.events[..visible].iter().map(Event::to_statement));
        g
    }

    /// Facts plus all events as `gucon:executionTime` statements.
    pub fn render(&self) -> Graph {
        let mut g = self.dkb.clone();
        g.extend(self.events.iter().map(Event::to_statement));
        g
    }
}
