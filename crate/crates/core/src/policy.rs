//! Obligation rules and policies.

use std::collections::BTreeSet;

use crate::algebra::{GraphPattern, SolutionMapping, Substitute, TermPattern, TriplePattern, Variable};
use crate::error::{SubstitutionError, ValidationError};
use crate::term::{Iri, Term, Triple};
use crate::vocab::gucon;

/// The `(np, cp, rp)` part of an obligation: who must do what to which
/// resource.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionPattern {
    pub actor: TermPattern,
    pub action: TermPattern,
    pub resource: TermPattern,
}

impl ActionPattern {
    pub fn new(
        actor: impl Into<TermPattern>,
        action: impl Into<TermPattern>,
        resource: impl Into<TermPattern>,
    ) -> Self {
        ActionPattern {
            actor: actor.into(),
            action: action.into(),
            resource: resource.into(),
        }
    }

    pub fn as_triple_pattern(&self) -> TriplePattern {
        TriplePattern::new(self.actor.clone(), self.action.clone(), self.resource.clone())
    }

    /// The quoted form `<< np cp rp >>` used as an annotation subject.
    pub fn as_quoted(&self) -> TermPattern {
        TermPattern::quoted(self.actor.clone(), self.action.clone(), self.resource.clone())
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.as_triple_pattern().variables()
    }
}

impl Substitute for ActionPattern {
    type Output = Triple;

    fn substitute(&self, mapping: &SolutionMapping) -> Result<Triple, SubstitutionError> {
        self.as_triple_pattern().substitute(mapping)
    }
}

/// A temporal bound position: a variable or an `xsd:dateTime` constant.
pub type BoundTerm = TermPattern;

/// `cond -> O { << np cp rp >> gucon:startTime s ; gucon:deadline d }`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObligationRule {
    pub iri: Iri,
    pub condition: GraphPattern,
    pub action: ActionPattern,
    /// Absent means the obligation starts at −∞.
    pub start: Option<BoundTerm>,
    /// Absent means the obligation never expires.
    pub deadline: Option<BoundTerm>,
    pub policy: Option<Iri>,
}

impl ObligationRule {
    /// Builds a rule and checks it.
    pub fn new(
        iri: Iri,
        condition: GraphPattern,
        action: ActionPattern,
        start: Option<BoundTerm>,
        deadline: Option<BoundTerm>,
    ) -> Result<Self, ValidationError> {
        let rule = ObligationRule {
            iri,
            condition,
            action,
            start,
            deadline,
            policy: None,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn with_policy(mut self, policy: Iri) -> Self {
        self.policy = Some(policy);
        self
    }

    /// Variables of the action and the temporal bounds.
    pub fn action_variables(&self) -> BTreeSet<Variable> {
        let mut vars = self.action.variables();
        for bound in [&self.start, &self.deadline].into_iter().flatten() {
            bound.collect_variables(&mut vars);
        }
        vars
    }

    /// Safety: every action variable must be in scope in the condition.
    /// Also: bounds must be variables or dateTime constants, not both absent.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.start.is_none() && self.deadline.is_none() {
            return Err(ValidationError::MissingBounds);
        }
        for (which, bound) in [("gucon:startTime", &self.start), ("gucon:deadline", &self.deadline)] {
            match bound {
                None | Some(TermPattern::Variable(_)) => {}
                Some(TermPattern::Term(Term::Literal(l))) if l.as_datetime().is_some() => {}
                Some(other) => {
                    return Err(ValidationError::InvalidBound {
                        which,
                        found: format!("{other:?}"),
                    })
                }
            }
        }
        check_safety(&self.condition, self.action_variables())
    }
}

fn check_safety(condition: &GraphPattern, needed: BTreeSet<Variable>) -> Result<(), ValidationError> {
    let scope = condition.in_scope_variables();
    let missing: Vec<String> = needed
        .iter()
        .filter(|v| !scope.contains(v))
        .map(|v| v.name().to_owned())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(ValidationError::UnsafeVariables(missing))
    }
}

/// A rule without temporal bounds: `cond -> O { np cp rp }`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtemporalRule {
    pub iri: Iri,
    pub condition: GraphPattern,
    pub action: ActionPattern,
}

impl AtemporalRule {
    pub fn new(iri: Iri, condition: GraphPattern, action: ActionPattern) -> Result<Self, ValidationError> {
        check_safety(&condition, action.variables())?;
        Ok(AtemporalRule { iri, condition, action })
    }
}

/// Descriptive attributes of a policy.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolicyMetadata {
    pub iri: Option<Iri>,
    pub creator: Option<Term>,
    pub description: Option<String>,
    pub modified: Option<Term>,
}

impl PolicyMetadata {
    pub fn named(iri: Iri) -> Self {
        PolicyMetadata {
            iri: Some(iri),
            ..PolicyMetadata::default()
        }
    }
}

/// An ordered set of obligation rules plus policy metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolicyDocument {
    pub rules: Vec<ObligationRule>,
    pub policies: Vec<PolicyMetadata>,
}

impl PolicyDocument {
    pub fn new(rules: Vec<ObligationRule>) -> Self {
        PolicyDocument {
            rules,
            policies: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// The IRI reports are generated for: the first named policy, then the
    /// first rule's policy.
    pub fn primary_iri(&self) -> Option<&Iri> {
        self.policies
            .iter()
            .find_map(|p| p.iri.as_ref())
            .or_else(|| self.rules.iter().find_map(|r| r.policy.as_ref()))
    }

    pub fn metadata(&self, iri: &Iri) -> Option<&PolicyMetadata> {
        self.policies.iter().find(|p| p.iri.as_ref() == Some(iri))
    }
}

pub(crate) fn is_bound_predicate(iri: &str) -> Option<bool> {
    match iri {
        gucon::START_TIME => Some(true),
        gucon::DEADLINE => Some(false),
        _ => None,
    }
}
