//! Policies encoded as RDF with the UCP vocabulary. Condition and action
//! patterns are string literals in the arrow sub-grammars.

use crate::error::{PolicyError, RuleError};
use crate::graph::Graph;
use crate::policy::{ObligationRule, PolicyDocument, PolicyMetadata};
use crate::syntax::lexer::{tokenize, Token};
use crate::syntax::{
    parse_action_text, parse_condition_text, parse_rule_document_with, parse_with_prefixes, render_action,
    render_condition, PrefixMap,
};
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab::{dcat, rdf, ucp, EXP};

/// Policy IRI used when encoding rules that belong to no named policy.
pub fn default_policy_iri() -> Iri {
    Iri::new(format!("{EXP}policy-1"))
}

/// Reads every `ucp:ObligationRule` in the graph, sorted by rule IRI.
pub fn parse_policy_graph(graph: &Graph) -> Result<PolicyDocument, PolicyError> {
    parse_policy_graph_with(graph, &PrefixMap::bundled())
}

/// As [`parse_policy_graph`], resolving prefixed names in pattern strings
/// against `prefixes`.
pub fn parse_policy_graph_with(graph: &Graph, prefixes: &PrefixMap) -> Result<PolicyDocument, PolicyError> {
    let rdf_type = Iri::new(rdf::TYPE);
    let mut rule_nodes: Vec<Iri> = graph
        .matching(None, Some(&rdf_type), Some(&Term::iri(ucp::OBLIGATION_RULE)))
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect();
    rule_nodes.sort();
    rule_nodes.dedup();

    let mut rules = Vec::with_capacity(rule_nodes.len());
    let mut policy_iris: Vec<Iri> = Vec::new();
    for node in rule_nodes {
        let rule = read_rule(graph, &node, prefixes)?;
        if let Some(p) = &rule.policy {
            if !policy_iris.contains(p) {
                policy_iris.push(p.clone());
            }
        }
        rules.push(rule);
    }
    // Policies declared without rules still carry metadata.
    let mut declared: Vec<Iri> = graph
        .matching(None, Some(&rdf_type), Some(&Term::iri(ucp::POLICY)))
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect();
    declared.sort();
    for p in declared {
        if !policy_iris.contains(&p) {
            policy_iris.push(p);
        }
    }
    let policies = policy_iris.into_iter().map(|p| read_metadata(graph, p)).collect();
    Ok(PolicyDocument { rules, policies })
}

fn single<'g>(graph: &'g Graph, node: &Iri, property: &'static str) -> Result<Option<&'g Term>, PolicyError> {
    let subject = Term::Iri(node.clone());
    let mut values = graph
        .matching(Some(&subject), Some(&Iri::new(property)), None)
        .map(|t| &t.object);
    let first = values.next();
    if values.next().is_some() {
        return Err(PolicyError::Ambiguous {
            rule: node.to_string(),
            property,
        });
    }
    Ok(first)
}

fn required<'g>(graph: &'g Graph, node: &Iri, property: &'static str) -> Result<&'g Term, PolicyError> {
    single(graph, node, property)?.ok_or_else(|| PolicyError::MissingProperty {
        rule: node.to_string(),
        property,
    })
}

fn required_string<'g>(graph: &'g Graph, node: &Iri, property: &'static str) -> Result<&'g str, PolicyError> {
    match required(graph, node, property)? {
        Term::Literal(l) if l.is_string() => Ok(l.lexical()),
        _ => Err(PolicyError::NotAString {
            rule: node.to_string(),
            property,
        }),
    }
}

fn read_rule(graph: &Graph, node: &Iri, prefixes: &PrefixMap) -> Result<ObligationRule, PolicyError> {
    let condition_text = required_string(graph, node, ucp::HAS_CONDITION_PATTERN)?;
    let action_text = required_string(graph, node, ucp::HAS_ACTION_PATTERN)?;
    // The operator value is not interpreted: every UCP rule is an obligation.
    required(graph, node, ucp::HAS_DEONTIC_OPERATOR)?;
    let policy = match required(graph, node, ucp::IS_PART_OF_POLICY)? {
        Term::Iri(p) => p.clone(),
        _ => {
            return Err(PolicyError::NotAnIri {
                rule: node.to_string(),
                property: ucp::IS_PART_OF_POLICY,
            })
        }
    };
    let wrap = |source: RuleError| PolicyError::Pattern {
        rule: node.to_string(),
        source,
    };
    let condition = parse_condition_text(condition_text, prefixes).map_err(wrap)?;
    let (action, start, deadline) = parse_action_text(action_text, prefixes).map_err(wrap)?;
    let rule = ObligationRule::new(node.clone(), condition, action, start, deadline)
        .map_err(|e| wrap(RuleError::Validation(e)))?;
    Ok(rule.with_policy(policy))
}

fn read_metadata(graph: &Graph, iri: Iri) -> PolicyMetadata {
    let subject = Term::Iri(iri.clone());
    let first = |p: &str| {
        graph
            .matching(Some(&subject), Some(&Iri::new(p)), None)
            .map(|t| t.object.clone())
            .min()
    };
    PolicyMetadata {
        description: first(dcat::DESCRIPTION).and_then(|t| t.as_literal().map(|l| l.lexical().to_owned())),
        creator: first(dcat::CREATOR),
        modified: first(dcat::MODIFIED),
        iri: Some(iri),
    }
}

/// Encodes a document as UCP triples. Rules without a policy are attached
/// to the document's primary policy, or [`default_policy_iri`].
pub fn encode_ucp(doc: &PolicyDocument) -> Graph {
    let fallback = doc.primary_iri().cloned().unwrap_or_else(default_policy_iri);
    let mut graph = Graph::new();
    let rdf_type = Iri::new(rdf::TYPE);
    let mut policies: Vec<Iri> = Vec::new();
    for rule in &doc.rules {
        let node = Term::Iri(rule.iri.clone());
        let policy = rule.policy.clone().unwrap_or_else(|| fallback.clone());
        let add = |g: &mut Graph, p: &str, o: Term| {
            g.insert(Triple::new(node.clone(), Iri::new(p), o));
        };
        add(&mut graph, rdf::TYPE, Term::iri(ucp::OBLIGATION_RULE));
        add(
            &mut graph,
            ucp::HAS_CONDITION_PATTERN,
            Literal::string(render_condition(&rule.condition)).into(),
        );
        add(
            &mut graph,
            ucp::HAS_ACTION_PATTERN,
            Literal::string(render_action(rule)).into(),
        );
        add(&mut graph, ucp::HAS_DEONTIC_OPERATOR, Term::iri(ucp::OBLIGATION));
        add(&mut graph, ucp::IS_PART_OF_POLICY, Term::Iri(policy.clone()));
        if !policies.contains(&policy) {
            policies.push(policy);
        }
    }
    for meta in &doc.policies {
        if let Some(iri) = &meta.iri {
            if !policies.contains(iri) {
                policies.push(iri.clone());
            }
        }
    }
    for policy in policies {
        let node = Term::Iri(policy.clone());
        graph.insert(Triple::new(node.clone(), rdf_type.clone(), Term::iri(ucp::POLICY)));
        if let Some(meta) = doc.metadata(&policy) {
            if let Some(d) = &meta.description {
                graph.insert(Triple::new(
                    node.clone(),
                    Iri::new(dcat::DESCRIPTION),
                    Literal::string(d.as_str()).into(),
                ));
            }
            if let Some(c) = &meta.creator {
                graph.insert(Triple::new(node.clone(), Iri::new(dcat::CREATOR), c.clone()));
            }
            if let Some(m) = &meta.modified {
                graph.insert(Triple::new(node.clone(), Iri::new(dcat::MODIFIED), m.clone()));
            }
        }
    }
    graph
}

/// The two policy file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyFormat {
    /// `{ ... } -> O { ... }` blocks.
    Arrow,
    /// UCP-vocabulary Turtle.
    Ucp,
}

impl PolicyFormat {
    /// Arrow files contain a `->` token outside of string literals; UCP
    /// Turtle never does.
    pub fn detect(text: &str) -> PolicyFormat {
        match tokenize(text) {
            Ok(tokens) if !tokens.iter().any(|t| t.token == Token::Arrow) => PolicyFormat::Ucp,
            Ok(_) => PolicyFormat::Arrow,
            Err(_) => {
                if text.contains("->") {
                    PolicyFormat::Arrow
                } else {
                    PolicyFormat::Ucp
                }
            }
        }
    }
}

/// Reads a policy file in either format, detecting it when `format` is
/// `None`.
pub fn parse_policy_text(text: &str, format: Option<PolicyFormat>) -> Result<PolicyDocument, PolicyError> {
    let mut prefixes = PrefixMap::bundled();
    match format.unwrap_or_else(|| PolicyFormat::detect(text)) {
        PolicyFormat::Arrow => Ok(parse_rule_document_with(text, &mut prefixes)?),
        PolicyFormat::Ucp => {
            let graph = parse_with_prefixes(text, &mut prefixes)?;
            parse_policy_graph_with(&graph, &prefixes)
        }
    }
}
