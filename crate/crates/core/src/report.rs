//! Compliance reports as RDF-star graphs.

use sha2::{Digest, Sha256};

use crate::engine::{ComplianceStatus, GroundedObligation, ObligationStates, StateSet};
use crate::error::ReportError;
use crate::graph::Graph;
use crate::term::{Iri, Literal, Term, Triple};
use crate::time::{DateTime, TimeInstant};
use crate::vocab::{gc, gucon, rdf, EXP};

/// What a report is about, beyond the states themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    /// Namespace minted IRIs live in.
    pub base: String,
    pub policy: Iri,
    pub kb: Iri,
    pub report_time: DateTime,
}

impl ReportMeta {
    pub fn new(policy: Iri, kb: Iri, report_time: DateTime) -> Self {
        ReportMeta {
            base: EXP.to_owned(),
            policy,
            kb,
            report_time,
        }
    }

    pub fn with_base(mut self, base: impl Into<String>) -> Self {
        self.base = base.into();
        self
    }
}

fn digest_hex(parts: &[&str], len: usize) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0x1f]);
    }
    let mut h = hex::encode(hasher.finalize());
    h.truncate(len);
    h
}

fn local_name(iri: &str) -> String {
    let tail = iri.rsplit(['/', '#']).find(|s| !s.is_empty()).unwrap_or("rule");
    tail.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn grounding_hash(o: &GroundedObligation) -> String {
    digest_hex(
        &[
            o.rule.as_str(),
            &o.actor.to_string(),
            o.action.as_str(),
            &o.resource.to_string(),
            &o.start.to_string(),
            &o.deadline.to_string(),
        ],
        16,
    )
}

/// `{base}instance-{rule}-{hash}-{seq}`: the hash covers the rule and the
/// ground extended action, `sequence` is the position among the rule's
/// groundings.
pub fn mint_mapped_rule_iri(base: &str, obligation: &GroundedObligation, sequence: usize) -> Iri {
    Iri::new(format!(
        "{base}instance-{}-{}-{sequence:02}",
        local_name(obligation.rule.as_str()),
        grounding_hash(obligation)
    ))
}

fn action_node_iri(base: &str, o: &GroundedObligation) -> Iri {
    let h = digest_hex(
        &[
            &o.actor.to_string(),
            o.action.as_str(),
            &o.resource.to_string(),
            &o.start.to_string(),
            &o.deadline.to_string(),
        ],
        16,
    );
    Iri::new(format!("{base}action-{h}"))
}

fn report_iri(states: &ObligationStates, meta: &ReportMeta) -> Iri {
    let eval = states.evaluated_at.as_chrono().naive_utc().format("%Y%m%dT%H%M%S");
    let h = digest_hex(
        &[
            meta.policy.as_str(),
            meta.kb.as_str(),
            &states.evaluated_at.to_string(),
            &meta.report_time.to_string(),
        ],
        8,
    );
    Iri::new(format!("{}report-{eval}Z-{h}", meta.base))
}

/// Builds the report graph: one mapped rule per grounded obligation, one
/// action node per grounding, the report node and the KB status.
pub fn build_report(states: &ObligationStates, status: ComplianceStatus, meta: &ReportMeta) -> Graph {
    let mut g = Graph::new();
    let add = |g: &mut Graph, s: &Iri, p: &str, o: Term| {
        g.insert(Triple::new(Term::Iri(s.clone()), Iri::new(p), o));
    };
    let report = report_iri(states, meta);
    add(&mut g, &report, rdf::TYPE, Term::iri(gc::REPORT));
    add(
        &mut g,
        &report,
        gucon::HAS_EVALUATION_TIME,
        Literal::datetime(states.evaluated_at).into(),
    );
    add(
        &mut g,
        &report,
        gucon::HAS_REPORT_TIME,
        Literal::datetime(meta.report_time).into(),
    );
    add(&mut g, &report, gucon::IS_GENERATED_FOR, Term::Iri(meta.policy.clone()));
    add(&mut g, &report, gucon::IS_GENERATED_FROM, Term::Iri(meta.kb.clone()));
    add(&mut g, &meta.kb, rdf::TYPE, Term::iri(gc::KNOWLEDGE_BASE));
    add(&mut g, &meta.kb, gucon::HAS_COMPLIANCE_STATUS, Term::iri(status.iri()));

    let mut sequence = 0;
    let mut previous_rule: Option<&Iri> = None;
    for (o, state) in &states.entries {
        if previous_rule != Some(&o.rule) {
            sequence = 0;
            previous_rule = Some(&o.rule);
        }
        sequence += 1;
        let mapped = mint_mapped_rule_iri(&meta.base, o, sequence);
        let action = action_node_iri(&meta.base, o);
        add(&mut g, &report, gucon::INCLUDES, Term::Iri(mapped.clone()));
        add(&mut g, &mapped, rdf::TYPE, Term::iri(gc::MAPPED_OBLIGATION_RULE));
        add(&mut g, &mapped, gucon::HAS_EXTENDED_ACTION, Term::Iri(action.clone()));
        add(&mut g, &mapped, gucon::IS_DERIVED_FROM, Term::Iri(o.rule.clone()));
        for s in state.iter() {
            add(&mut g, &mapped, gucon::HAS_OBLIGATION_STATE, Term::iri(s.iri()));
        }
        let class = if o.exec_times.is_empty() {
            gucon::EXTENDED_ACTION
        } else {
            gucon::EVENT
        };
        add(&mut g, &action, rdf::TYPE, Term::iri(class));
        add(&mut g, &action, gucon::HAS_ENTITY, o.actor.clone());
        add(&mut g, &action, gucon::HAS_ACTION, Term::Iri(o.action.clone()));
        add(&mut g, &action, gucon::HAS_RESOURCE, o.resource.clone());
        if let TimeInstant::Finite(s) = o.start {
            add(&mut g, &action, gucon::HAS_START_TIME, Literal::datetime(s).into());
        }
        if let TimeInstant::Finite(d) = o.deadline {
            add(&mut g, &action, gucon::HAS_DEADLINE, Literal::datetime(d).into());
        }
        for e in &o.exec_times {
            add(&mut g, &action, gucon::HAS_EXECUTION_TIME, Literal::datetime(*e).into());
        }
    }
    g
}

/// One mapped rule read back from a report.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReportEntry {
    pub rule: Iri,
    pub actor: Term,
    pub action: Iri,
    pub resource: Term,
    pub start: TimeInstant,
    pub deadline: TimeInstant,
    pub exec_times: Vec<DateTime>,
    pub states: StateSet,
}

impl From<&(GroundedObligation, StateSet)> for ReportEntry {
    fn from((o, states): &(GroundedObligation, StateSet)) -> Self {
        ReportEntry {
            rule: o.rule.clone(),
            actor: o.actor.clone(),
            action: o.action.clone(),
            resource: o.resource.clone(),
            start: o.start,
            deadline: o.deadline,
            exec_times: o.exec_times.clone(),
            states: *states,
        }
    }
}

/// Everything a report graph states.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportContents {
    pub report: Iri,
    pub policy: Iri,
    pub kb: Iri,
    pub evaluated_at: DateTime,
    pub report_time: DateTime,
    pub status: ComplianceStatus,
    /// Sorted.
    pub entries: Vec<ReportEntry>,
}

impl ReportContents {
    /// Whether the report describes exactly `states`, solution mappings aside.
    pub fn describes(&self, states: &ObligationStates) -> bool {
        let mut expected: Vec<ReportEntry> = states.entries.iter().map(ReportEntry::from).collect();
        expected.sort();
        self.evaluated_at == states.evaluated_at && self.entries == expected
    }
}

struct Reader<'g> {
    graph: &'g Graph,
}

impl<'g> Reader<'g> {
    fn values(&self, node: &Iri, property: &'static str) -> Vec<&'g Term> {
        let subject = Term::Iri(node.clone());
        let mut v: Vec<&Term> = self
            .graph
            .matching(Some(&subject), Some(&Iri::new(property)), None)
            .map(|t| &t.object)
            .collect();
        v.sort();
        v
    }

    fn one(&self, node: &Iri, property: &'static str) -> Result<&'g Term, ReportError> {
        match self.values(node, property).as_slice() {
            [t] => Ok(t),
            [] => Err(ReportError::Missing {
                node: node.to_string(),
                property,
            }),
            [_, second, ..] => Err(self.invalid(node, property, second)),
        }
    }

    fn optional(&self, node: &Iri, property: &'static str) -> Result<Option<&'g Term>, ReportError> {
        match self.values(node, property).as_slice() {
            [] => Ok(None),
            [t] => Ok(Some(t)),
            [_, second, ..] => Err(self.invalid(node, property, second)),
        }
    }

    fn invalid(&self, node: &Iri, property: &'static str, value: &Term) -> ReportError {
        ReportError::Invalid {
            node: node.to_string(),
            property,
            value: value.to_string(),
        }
    }

    fn iri(&self, node: &Iri, property: &'static str) -> Result<Iri, ReportError> {
        let t = self.one(node, property)?;
        t.as_iri().cloned().ok_or_else(|| self.invalid(node, property, t))
    }

    fn datetime(&self, node: &Iri, property: &'static str, t: &Term) -> Result<DateTime, ReportError> {
        t.as_datetime().ok_or_else(|| self.invalid(node, property, t))
    }

    fn bound(&self, node: &Iri, property: &'static str, absent: TimeInstant) -> Result<TimeInstant, ReportError> {
        match self.optional(node, property)? {
            None => Ok(absent),
            Some(t) => Ok(TimeInstant::Finite(self.datetime(node, property, t)?)),
        }
    }

    fn entry(&self, mapped: &Iri) -> Result<ReportEntry, ReportError> {
        let action = self.iri(mapped, gucon::HAS_EXTENDED_ACTION)?;
        let mut states = StateSet::empty();
        for t in self.values(mapped, gucon::HAS_OBLIGATION_STATE) {
            let s = t
                .as_iri()
                .and_then(|i| StateSet::from_iri(i.as_str()))
                .ok_or_else(|| self.invalid(mapped, gucon::HAS_OBLIGATION_STATE, t))?;
            states.insert(s);
        }
        let exec_times = self
            .values(&action, gucon::HAS_EXECUTION_TIME)
            .into_iter()
            .map(|t| self.datetime(&action, gucon::HAS_EXECUTION_TIME, t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut exec_times = exec_times;
        exec_times.sort();
        Ok(ReportEntry {
            rule: self.iri(mapped, gucon::IS_DERIVED_FROM)?,
            actor: self.one(&action, gucon::HAS_ENTITY)?.clone(),
            action: self.iri(&action, gucon::HAS_ACTION)?,
            resource: self.one(&action, gucon::HAS_RESOURCE)?.clone(),
            start: self.bound(&action, gucon::HAS_START_TIME, TimeInstant::NegInfinity)?,
            deadline: self.bound(&action, gucon::HAS_DEADLINE, TimeInstant::PosInfinity)?,
            exec_times,
            states,
        })
    }
}

/// Reads a report graph produced by [`build_report`].
pub fn read_report(graph: &Graph) -> Result<ReportContents, ReportError> {
    let reader = Reader { graph };
    let reports: Vec<Iri> = graph
        .matching(None, Some(&Iri::new(rdf::TYPE)), Some(&Term::iri(gc::REPORT)))
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect();
    let report = match reports.as_slice() {
        [] => return Err(ReportError::NoReport),
        [r] => r.clone(),
        _ => return Err(ReportError::MultipleReports),
    };
    let kb = reader.iri(&report, gucon::IS_GENERATED_FROM)?;
    let status_term = reader.one(&kb, gucon::HAS_COMPLIANCE_STATUS)?;
    let status = status_term
        .as_iri()
        .and_then(|i| ComplianceStatus::from_iri(i.as_str()))
        .ok_or_else(|| reader.invalid(&kb, gucon::HAS_COMPLIANCE_STATUS, status_term))?;
    let eval = reader.one(&report, gucon::HAS_EVALUATION_TIME)?;
    let time = reader.one(&report, gucon::HAS_REPORT_TIME)?;
    let mut entries = Vec::new();
    for t in reader.values(&report, gucon::INCLUDES) {
        let mapped = t.as_iri().ok_or_else(|| reader.invalid(&report, gucon::INCLUDES, t))?;
        entries.push(reader.entry(mapped)?);
    }
    entries.sort();
    Ok(ReportContents {
        policy: reader.iri(&report, gucon::IS_GENERATED_FOR)?,
        evaluated_at: reader.datetime(&report, gucon::HAS_EVALUATION_TIME, eval)?,
        report_time: reader.datetime(&report, gucon::HAS_REPORT_TIME, time)?,
        report,
        kb,
        status,
        entries,
    })
}
