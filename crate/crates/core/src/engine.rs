//! Obligation states and compliance.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::algebra::{
    evaluate_unordered, GraphPattern, SolutionMapping, Substitute, TermPattern, TriplePattern, Variable,
};
use crate::error::EngineError;
use crate::graph::Graph;
use crate::kb::TemporalKB;
use crate::policy::{AtemporalRule, ObligationRule, PolicyDocument};
use crate::syntax::RESERVED_VARIABLE_PREFIX;
use crate::term::{Iri, Term, Triple};
use crate::time::{DateTime, TimeInstant};
use crate::vocab::gucon;

/// The variable the augmented rule binds execution times to.
pub fn exec_variable() -> Variable {
    Variable::new(format!("{RESERVED_VARIABLE_PREFIX}_exec"))
}

/// `cond OPTIONAL { << np cp rp >> gucon:executionTime ?__gucon_exec }`.
pub fn augment_rule(rule: &ObligationRule) -> GraphPattern {
    let probe = TriplePattern::new(
        rule.action.as_quoted(),
        TermPattern::iri(gucon::EXECUTION_TIME),
        TermPattern::Variable(exec_variable()),
    );
    rule.condition.clone().optional(GraphPattern::Triple(probe))
}

/// A set of obligation states, as bit flags.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(u8);

impl StateSet {
    pub const ACTIVE: StateSet = StateSet(1);
    pub const NOT_SATISFIED: StateSet = StateSet(2);
    pub const FULFILLED: StateSet = StateSet(4);
    pub const VIOLATED: StateSet = StateSet(8);
    pub const EXPIRED: StateSet = StateSet(16);

    /// Display order.
    pub const ALL: [StateSet; 5] = [
        StateSet::ACTIVE,
        StateSet::NOT_SATISFIED,
        StateSet::FULFILLED,
        StateSet::VIOLATED,
        StateSet::EXPIRED,
    ];

    pub const fn empty() -> Self {
        StateSet(0)
    }

    pub fn contains(self, other: StateSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn insert(&mut self, other: StateSet) {
        self.0 |= other.0;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = StateSet> {
        StateSet::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    /// Name of a single state.
    pub fn name(self) -> &'static str {
        match self {
            StateSet::ACTIVE => "ACTIVE",
            StateSet::NOT_SATISFIED => "NOT_SATISFIED",
            StateSet::FULFILLED => "FULFILLED",
            StateSet::VIOLATED => "VIOLATED",
            StateSet::EXPIRED => "EXPIRED",
            _ => "MIXED",
        }
    }

    /// IRI of a single state.
    pub fn iri(self) -> &'static str {
        match self {
            StateSet::ACTIVE => gucon::ACTIVE,
            StateSet::NOT_SATISFIED => gucon::NOT_SATISFIED,
            StateSet::FULFILLED => gucon::FULFILLED,
            StateSet::VIOLATED => gucon::VIOLATED,
            StateSet::EXPIRED => gucon::EXPIRED,
            _ => panic!("iri() needs a single state"),
        }
    }

    pub fn from_iri(iri: &str) -> Option<StateSet> {
        StateSet::ALL.into_iter().find(|s| s.iri() == iri)
    }

    pub fn from_name(name: &str) -> Option<StateSet> {
        StateSet::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

impl std::ops::BitOr for StateSet {
    type Output = StateSet;
    fn bitor(self, rhs: StateSet) -> StateSet {
        StateSet(self.0 | rhs.0)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(StateSet::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// States of one grounded obligation at `t`.
///
/// Fulfillment needs an execution inside `[start, deadline]`, whatever
/// the position of `t`.
pub fn classify(start: TimeInstant, deadline: TimeInstant, execs: &[DateTime], t: DateTime) -> StateSet {
    let now = TimeInstant::Finite(t);
    let fulfilled = execs.iter().any(|e| {
        let e = TimeInstant::Finite(*e);
        start <= e && e <= deadline
    });
    let mut states = StateSet::empty();
    if start <= now && now <= deadline {
        states.insert(StateSet::ACTIVE);
        if !fulfilled {
            states.insert(StateSet::NOT_SATISFIED);
        }
    }
    if now > deadline {
        states.insert(StateSet::EXPIRED);
        if !fulfilled {
            states.insert(StateSet::VIOLATED);
        }
    }
    if fulfilled {
        states.insert(StateSet::FULFILLED);
    }
    states
}

type ObligationKey = (Iri, Term, Iri, Term, TimeInstant, TimeInstant);

/// A rule instantiated by one solution mapping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundedObligation {
    pub rule: Iri,
    pub actor: Term,
    pub action: Iri,
    pub resource: Term,
    pub start: TimeInstant,
    pub deadline: TimeInstant,
    /// Ascending, without duplicates.
    pub exec_times: Vec<DateTime>,
    /// The smallest condition mapping producing this obligation.
    pub mapping: SolutionMapping,
}

impl GroundedObligation {
    pub fn action_triple(&self) -> Triple {
        Triple::new(self.actor.clone(), self.action.clone(), self.resource.clone())
    }

    fn key(&self) -> ObligationKey {
        (
            self.rule.clone(),
            self.actor.clone(),
            self.action.clone(),
            self.resource.clone(),
            self.start,
            self.deadline,
        )
    }
}

/// Result of evaluating a policy at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObligationStates {
    pub evaluated_at: DateTime,
    /// Sorted by obligation.
    pub entries: Vec<(GroundedObligation, StateSet)>,
}

impl ObligationStates {
    pub fn with_state(&self, state: StateSet) -> impl Iterator<Item = &GroundedObligation> {
        self.entries
            .iter()
            .filter(move |(_, s)| s.contains(state))
            .map(|(o, _)| o)
    }

    pub fn active(&self) -> impl Iterator<Item = &GroundedObligation> {
        self.with_state(StateSet::ACTIVE)
    }

    pub fn fulfilled(&self) -> impl Iterator<Item = &GroundedObligation> {
        self.with_state(StateSet::FULFILLED)
    }

    pub fn violated(&self) -> impl Iterator<Item = &GroundedObligation> {
        self.with_state(StateSet::VIOLATED)
    }

    pub fn expired(&self) -> impl Iterator<Item = &GroundedObligation> {
        self.with_state(StateSet::EXPIRED)
    }

    pub fn not_satisfied(&self) -> impl Iterator<Item = &GroundedObligation> {
        self.with_state(StateSet::NOT_SATISFIED)
    }

    /// Non-compliant iff some obligation is both expired and violated.
    pub fn status(&self) -> ComplianceStatus {
        let all = StateSet::EXPIRED | StateSet::VIOLATED;
        if self.entries.iter().any(|(_, s)| s.contains(all)) {
            ComplianceStatus::NonCompliant
        } else {
            ComplianceStatus::Compliant
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplianceStatus {
    Compliant,
    NonCompliant,
}

impl ComplianceStatus {
    pub fn iri(self) -> &'static str {
        match self {
            ComplianceStatus::Compliant => gucon::COMPLIANT,
            ComplianceStatus::NonCompliant => gucon::NON_COMPLIANT,
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        match iri {
            gucon::COMPLIANT => Some(ComplianceStatus::Compliant),
            gucon::NON_COMPLIANT => Some(ComplianceStatus::NonCompliant),
            _ => None,
        }
    }

    pub fn is_compliant(self) -> bool {
        self == ComplianceStatus::Compliant
    }
}

impl fmt::Display for ComplianceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplianceStatus::Compliant => "COMPLIANT",
            ComplianceStatus::NonCompliant => "NON_COMPLIANT",
        })
    }
}

fn ground_bound(
    rule: &ObligationRule,
    which: &'static str,
    bound: Option<&TermPattern>,
    mapping: &SolutionMapping,
    absent: TimeInstant,
) -> Result<TimeInstant, EngineError> {
    let Some(bound) = bound else {
        return Ok(absent);
    };
    let term = match bound {
        TermPattern::Variable(v) => mapping.get(v).ok_or_else(|| EngineError::UnboundBound {
            rule: rule.iri.to_string(),
            which,
            mapping: mapping.to_string(),
        })?,
        TermPattern::Term(t) => t,
        TermPattern::Triple(_) => {
            return Err(EngineError::NonDateTimeBound {
                rule: rule.iri.to_string(),
                which,
                value: format!("{bound:?}"),
                mapping: mapping.to_string(),
            })
        }
    };
    term.as_datetime()
        .map(TimeInstant::Finite)
        .ok_or_else(|| EngineError::NonDateTimeBound {
            rule: rule.iri.to_string(),
            which,
            value: term.to_string(),
            mapping: mapping.to_string(),
        })
}

/// Grounded obligations of one rule over a snapshot, merged on
/// `(rule, actor, action, resource, start, deadline)`.
pub fn ground_rule(rule: &ObligationRule, snapshot: &Graph) -> Result<Vec<GroundedObligation>, EngineError> {
    let exec = exec_variable();
    let mut merged: BTreeMap<ObligationKey, GroundedObligation> = BTreeMap::new();
    for augmented in evaluate_unordered(&augment_rule(rule), snapshot) {
        let exec_time = augmented.get(&exec).and_then(Term::as_datetime);
        let mapping: SolutionMapping = augmented
            .iter()
            .filter(|(v, _)| **v != exec)
            .map(|(v, t)| (v.clone(), t.clone()))
            .collect();
        let action = rule
            .action
            .substitute(&mapping)
            .map_err(|source| EngineError::Substitution {
                rule: rule.iri.to_string(),
                source,
            })?;
        let start = ground_bound(
            rule,
            "gucon:startTime",
            rule.start.as_ref(),
            &mapping,
            TimeInstant::NegInfinity,
        )?;
        let deadline = ground_bound(
            rule,
            "gucon:deadline",
            rule.deadline.as_ref(),
            &mapping,
            TimeInstant::PosInfinity,
        )?;
        if start > deadline {
            return Err(EngineError::InvertedWindow {
                rule: rule.iri.to_string(),
                start: start.to_string(),
                deadline: deadline.to_string(),
                mapping: mapping.to_string(),
            });
        }
        let obligation = GroundedObligation {
            rule: rule.iri.clone(),
            actor: action.subject,
            action: action.predicate,
            resource: action.object,
            start,
            deadline,
            exec_times: exec_time.into_iter().collect(),
            mapping,
        };
        match merged.get_mut(&obligation.key()) {
            Some(existing) => {
                existing.exec_times.extend(obligation.exec_times);
                if obligation.mapping < existing.mapping {
                    existing.mapping = obligation.mapping;
                }
            }
            None => {
                merged.insert(obligation.key(), obligation);
            }
        }
    }
    Ok(merged
        .into_values()
        .map(|mut o| {
            o.exec_times.sort();
            o.exec_times.dedup();
            o
        })
        .collect())
}

/// Grounds every rule against the snapshot at `t` and classifies each
/// obligation. Rules are evaluated in parallel; the output order is fixed.
pub fn get_obligation_states(
    policy: &PolicyDocument,
    kb: &TemporalKB,
    t: DateTime,
) -> Result<ObligationStates, EngineError> {
    let snapshot = kb.snapshot(t);
    states_over_snapshot(&policy.rules, &snapshot, t)
}

/// As [`get_obligation_states`] over an already built snapshot.
pub fn states_over_snapshot(
    rules: &[ObligationRule],
    snapshot: &Graph,
    t: DateTime,
) -> Result<ObligationStates, EngineError> {
    let per_rule: Vec<Result<Vec<GroundedObligation>, EngineError>> =
        rules.par_iter().map(|rule| ground_rule(rule, snapshot)).collect();
    let mut entries = Vec::new();
    for result in per_rule {
        for o in result? {
            let states = classify(o.start, o.deadline, &o.exec_times, t);
            entries.push((o, states));
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries.dedup_by(|a, b| a.0.key() == b.0.key());
    Ok(ObligationStates {
        evaluated_at: t,
        entries,
    })
}

pub fn check_compliance(
    policy: &PolicyDocument,
    kb: &TemporalKB,
    t: DateTime,
) -> Result<ComplianceStatus, EngineError> {
    Ok(get_obligation_states(policy, kb, t)?.status())
}

pub fn active_rules(
    policy: &PolicyDocument,
    kb: &TemporalKB,
    t: DateTime,
) -> Result<Vec<GroundedObligation>, EngineError> {
    Ok(get_obligation_states(policy, kb, t)?.active().cloned().collect())
}

/// Ground actions an atemporal rule demands of `graph`. A mapping whose
/// action cannot be formed as a triple demands an action that can never
/// be present, and yields `None`.
pub fn atemporal_requirements(rule: &AtemporalRule, graph: &Graph) -> Vec<Option<Triple>> {
    evaluate_unordered(&rule.condition, graph)
        .iter()
        .map(|mu| rule.action.substitute(mu).ok())
        .collect()
}

/// Whether every mapping of the condition has its action in `graph`.
pub fn check_rule_compliance_atemporal(rule: &AtemporalRule, graph: &Graph) -> bool {
    atemporal_requirements(rule, graph)
        .iter()
        .all(|a| a.as_ref().is_some_and(|t| graph.contains(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::load_kb;
    use crate::syntax::{parse_atemporal_rule_text, parse_rule_document, parse_turtle_star};

    fn dt(s: &str) -> DateTime {
        s.parse().unwrap()
    }

    fn fin(s: &str) -> TimeInstant {
        TimeInstant::Finite(dt(s))
    }

    #[test]
    fn classification_table() {
        let s = fin("2025-01-02T00:00:00Z");
        let d = fin("2025-01-04T00:00:00Z");
        let inside = [dt("2025-01-03T00:00:00Z")];
        let late = [dt("2025-01-05T00:00:00Z")];
        let t_in = dt("2025-01-03T12:00:00Z");
        let t_after = dt("2025-01-06T00:00:00Z");
        let t_before = dt("2025-01-01T00:00:00Z");
        assert_eq!(classify(s, d, &[], t_in), StateSet::ACTIVE | StateSet::NOT_SATISFIED);
        assert_eq!(
            classify(s, d, &inside, t_after),
            StateSet::FULFILLED | StateSet::EXPIRED
        );
        assert_eq!(classify(s, d, &late, t_after), StateSet::VIOLATED | StateSet::EXPIRED);
        assert_eq!(classify(s, d, &[], t_before), StateSet::empty());
        assert_eq!(classify(s, d, &inside, t_in), StateSet::ACTIVE | StateSet::FULFILLED);
        assert_eq!(
            classify(TimeInstant::NegInfinity, TimeInstant::PosInfinity, &[], t_in),
            StateSet::ACTIVE | StateSet::NOT_SATISFIED
        );
        // Window ends are inclusive.
        assert_eq!(
            classify(s, d, &[dt("2025-01-04T00:00:00Z")], t_after),
            StateSet::FULFILLED | StateSet::EXPIRED
        );
        assert_eq!(
            classify(s, d, &[], dt("2025-01-04T00:00:00Z")),
            StateSet::ACTIVE | StateSet::NOT_SATISFIED
        );
    }

    #[test]
    fn state_display_order() {
        let all = StateSet::EXPIRED | StateSet::ACTIVE | StateSet::VIOLATED;
        assert_eq!(all.to_string(), "{ACTIVE, VIOLATED, EXPIRED}");
    }

    const KB: &str = r#"
ex:p1 a ex:Patient ; ex:due "2025-01-10T00:00:00Z"^^xsd:dateTime .
ex:p2 a ex:Patient ; ex:due "2025-01-20T00:00:00Z"^^xsd:dateTime .
<< ex:p1 ex:sign ex:form >> gucon:executionTime "2025-01-05T00:00:00Z"^^xsd:dateTime .
<< ex:p1 ex:sign ex:form >> gucon:executionTime "2025-01-06T00:00:00Z"^^xsd:dateTime .
"#;

    fn fixture() -> (PolicyDocument, TemporalKB) {
        let policy = parse_rule_document(
            "{ ?p a ex:Patient . ?p ex:due ?d } -> O { << ?p ex:sign ex:form >> gucon:deadline ?d }",
        )
        .unwrap();
        let kb = load_kb(&parse_turtle_star(KB).unwrap(), Iri::new("http://example.org/kb")).unwrap();
        (policy, kb)
    }

    #[test]
    fn grounding_merges_execution_times() {
        let (policy, kb) = fixture();
        let states = get_obligation_states(&policy, &kb, dt("2025-01-15T00:00:00Z")).unwrap();
        assert_eq!(states.len(), 2);
        let (p1, s1) = &states.entries[0];
        assert_eq!(p1.exec_times.len(), 2);
        assert_eq!(p1.start, TimeInstant::NegInfinity);
        assert_eq!(*s1, StateSet::FULFILLED | StateSet::EXPIRED);
        let (_, s2) = &states.entries[1];
        assert_eq!(*s2, StateSet::ACTIVE | StateSet::NOT_SATISFIED);
        assert!(states.status().is_compliant());
        assert_eq!(active_rules(&policy, &kb, dt("2025-01-15T00:00:00Z")).unwrap().len(), 1);
        assert!(!p1.mapping.contains(&exec_variable()));
    }

    #[test]
    fn later_events_are_invisible() {
        let (policy, kb) = fixture();
        let states = get_obligation_states(&policy, &kb, dt("2025-01-05T12:00:00Z")).unwrap();
        assert_eq!(states.entries[0].0.exec_times, vec![dt("2025-01-05T00:00:00Z")]);
    }

    #[test]
    fn violation_makes_kb_non_compliant() {
        let (policy, kb) = fixture();
        assert_eq!(
            check_compliance(&policy, &kb, dt("2025-02-01T00:00:00Z")).unwrap(),
            ComplianceStatus::NonCompliant
        );
        assert!(
            check_compliance(&PolicyDocument::default(), &kb, dt("2025-02-01T00:00:00Z"))
                .unwrap()
                .is_compliant()
        );
    }

    #[test]
    fn non_datetime_bound_is_an_error() {
        let policy =
            parse_rule_document("{ ?p a ex:Patient } -> O { << ?p ex:sign ex:form >> gucon:deadline ?p }").unwrap();
        let (_, kb) = fixture();
        let err = get_obligation_states(&policy, &kb, dt("2025-01-15T00:00:00Z")).unwrap_err();
        assert!(matches!(err, EngineError::NonDateTimeBound { .. }), "{err}");
    }

    #[test]
    fn atemporal_compliance() {
        let graph = parse_turtle_star("ex:p a hc:Patient .").unwrap();
        let rule = parse_atemporal_rule_text("{ ?p a hc:Patient } -> O { ?p gucon:sign hc:form }").unwrap();
        assert!(!check_rule_compliance_atemporal(&rule, &graph));
        let mut with_sign = graph.clone();
        with_sign.extend(parse_turtle_star("ex:p gucon:sign hc:form .").unwrap().iter().cloned());
        assert!(check_rule_compliance_atemporal(&rule, &with_sign));
        let vacuous = parse_atemporal_rule_text("{ ?p a hc:Doctor } -> O { ?p gucon:sign hc:form }").unwrap();
        assert!(check_rule_compliance_atemporal(&vacuous, &graph));
    }
}
