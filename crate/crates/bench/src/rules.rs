//! Template rules over predicate pairs, their selectivity and the events
//! that exercise them.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gucon_core::algebra::evaluate;
use gucon_core::kb::{Event, TemporalKB};
use gucon_core::policy::{ObligationRule, PolicyDocument};
use gucon_core::syntax::parse_rule_text;
use gucon_core::vocab::{rdf, GUCON};
use gucon_core::{DateTime, DayTimeDuration, Graph, Iri, Term};

use crate::config::GenerationConfig;
use crate::error::BenchError;

/// Fact triples at full scale: 100 patients, 372 admissions and 110 107
/// lab results.
pub const REFERENCE_TRIPLES: u64 = 1_786_964;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selectivity {
    Low,
    Medium,
    High,
}

impl fmt::Display for Selectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selectivity::Low => "low",
            Selectivity::Medium => "medium",
            Selectivity::High => "high",
        })
    }
}

impl FromStr for Selectivity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "low" => Ok(Selectivity::Low),
            "medium" => Ok(Selectivity::Medium),
            "high" => Ok(Selectivity::High),
            other => Err(format!("unknown selectivity class {other:?}")),
        }
    }
}

/// Upper match counts of the low and medium classes at `reference_triples`
/// facts. Both scale linearly with the fact count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectivityBands {
    pub low_max: f64,
    pub medium_max: f64,
    pub reference_triples: f64,
}

impl Default for SelectivityBands {
    fn default() -> Self {
        SelectivityBands {
            low_max: 400.0,
            medium_max: 1488.0,
            reference_triples: REFERENCE_TRIPLES as f64,
        }
    }
}

impl SelectivityBands {
    pub fn classify_count(&self, matches: usize, fact_triples: usize) -> Selectivity {
        let scale = fact_triples as f64 / self.reference_triples;
        let m = matches as f64;
        if m <= self.low_max * scale {
            Selectivity::Low
        } else if m <= self.medium_max * scale {
            Selectivity::Medium
        } else {
            Selectivity::High
        }
    }
}

/// Match count of a rule's condition over the snapshot at `at`, and its class.
pub fn classify_selectivity(
    rule: &ObligationRule,
    kb: &TemporalKB,
    at: DateTime,
    bands: &SelectivityBands,
) -> (Selectivity, usize) {
    let matches = evaluate(&rule.condition, &kb.snapshot(at)).len();
    (bands.classify_count(matches, kb.dkb().len()), matches)
}

/// Two attribute predicates of the same entity class, with the number of
/// solutions of `?e p1 ?r . ?e p2 ?v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PredicatePair {
    pub first: Iri,
    pub second: Iri,
    pub matches: usize,
}

/// All attribute pairs of the graph's schema. A predicate is an attribute
/// unless it is `rdf:type` or it points at a typed entity.
pub fn predicate_pairs(graph: &Graph) -> Vec<PredicatePair> {
    let type_predicate = Iri::new(rdf::TYPE);
    let mut classes: HashMap<&Term, Vec<&Term>> = HashMap::new();
    for t in graph.matching(None, Some(&type_predicate), None) {
        classes.entry(&t.subject).or_default().push(&t.object);
    }
    let links: HashSet<&Iri> = graph
        .iter()
        .filter(|t| t.predicate != type_predicate && classes.contains_key(&t.object))
        .map(|t| &t.predicate)
        .collect();
    let mut degree: HashMap<&Term, BTreeMap<&Iri, usize>> = HashMap::new();
    for t in graph.iter() {
        if t.predicate != type_predicate && !links.contains(&t.predicate) {
            *degree.entry(&t.subject).or_default().entry(&t.predicate).or_default() += 1;
        }
    }
    let mut attributes: BTreeMap<&Term, BTreeSet<&Iri>> = BTreeMap::new();
    for (subject, types) in &classes {
        if let Some(preds) = degree.get(subject) {
            for class in types {
                attributes.entry(class).or_default().extend(preds.keys());
            }
        }
    }
    let mut pairs: BTreeSet<(&Iri, &Iri)> = BTreeSet::new();
    for preds in attributes.values() {
        let preds: Vec<&&Iri> = preds.iter().collect();
        for (i, a) in preds.iter().enumerate() {
            for b in &preds[i + 1..] {
                pairs.insert((**a, **b));
            }
        }
    }
    let mut matches: HashMap<(&Iri, &Iri), usize> = HashMap::new();
    for preds in degree.values() {
        for &(a, b) in &pairs {
            if let (Some(x), Some(y)) = (preds.get(a), preds.get(b)) {
                *matches.entry((a, b)).or_default() += x * y;
            }
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| PredicatePair {
            first: a.clone(),
            second: b.clone(),
            matches: matches.get(&(a, b)).copied().unwrap_or(0),
        })
        .collect()
}

const ACTIONS: [&str; 6] = ["sign", "share", "review", "notify", "archive", "approve"];

/// One instantiated template with its events.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedRule {
    pub rule: ObligationRule,
    pub text: String,
    pub pair: PredicatePair,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub class: Selectivity,
    pub rules: Vec<GeneratedRule>,
}

impl RuleSet {
    /// The first `n` rules with their events. Rule sets of different sizes
    /// from the same seed nest.
    pub fn prefix(&self, n: usize) -> RuleSet {
        RuleSet {
            class: self.class,
            rules: self.rules[..n.min(self.rules.len())].to_vec(),
        }
    }

    pub fn document(&self) -> PolicyDocument {
        PolicyDocument::new(self.rules.iter().map(|r| r.rule.clone()).collect())
    }

    /// The rules in arrow syntax.
    pub fn policy_text(&self) -> String {
        self.rules
            .iter()
            .map(|r| r.text.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn events(&self) -> Vec<Event> {
        self.rules.iter().flat_map(|r| r.events.iter().cloned()).collect()
    }
}

fn class_salt(class: Selectivity) -> u64 {
    match class {
        Selectivity::Low => 0x6c6f77,
        Selectivity::Medium => 0x6d6564,
        Selectivity::High => 0x686967,
    }
}

/// Minutes since the origin, as an instant.
fn at_minute(origin: DateTime, minute: i64) -> DateTime {
    origin
        .checked_add(DayTimeDuration::from_millis(minute * 60_000))
        .expect("instant inside the horizon")
}

/// A window in minutes, drawn from one of three strata around the
/// evaluation minute `t`: containing it, wholly before, wholly after.
fn window(rng: &mut impl Rng, stratum: usize, t: i64, horizon: i64) -> (i64, i64) {
    match stratum {
        0 => (rng.random_range(0..=t - 60), rng.random_range(t + 60..=horizon)),
        1 => {
            let start = rng.random_range(0..=t - 120);
            (start, rng.random_range(start + 60..=t - 60))
        }
        _ => {
            let start = rng.random_range(t + 60..=horizon - 60);
            (start, rng.random_range(start + 60..=horizon))
        }
    }
}

fn exec_minute(rng: &mut impl Rng, (start, deadline): (i64, i64), horizon: i64) -> i64 {
    let outside = start + (horizon - deadline);
    if rng.random_bool(0.5) || outside == 0 {
        return rng.random_range(start..=deadline);
    }
    let k = rng.random_range(0..outside);
    if k < start {
        k
    } else {
        deadline + 1 + (k - start)
    }
}

/// `(e, r)` for every `?e p1 ?r . ?e p2 ?v` solution, without repeats.
fn groundings(graph: &Graph, pair: &PredicatePair) -> Vec<(Term, Term)> {
    let mut out: Vec<(Term, Term)> = graph
        .matching(None, Some(&pair.first), None)
        .filter(|t| {
            graph
                .matching(Some(&t.subject), Some(&pair.second), None)
                .next()
                .is_some()
        })
        .map(|t| (t.subject.clone(), t.object.clone()))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn write_iri(out: &mut String, iri: &str) {
    out.push('<');
    out.push_str(iri);
    out.push('>');
}

fn rule_text(iri: &Iri, pair: &PredicatePair, action: &str, start: DateTime, deadline: DateTime) -> String {
    let mut s = String::new();
    write_iri(&mut s, iri.as_str());
    s.push_str(" {\n    ?e ");
    write_iri(&mut s, pair.first.as_str());
    s.push_str(" ?r .\n    ?e ");
    write_iri(&mut s, pair.second.as_str());
    s.push_str(" ?v .\n");
    for (value, var) in [(start, "startTime"), (deadline, "deadline")] {
        s.push_str(&format!(
            "    BIND (\"{}\"^^xsd:dateTime AS ?{var})\n",
            value.to_lexical()
        ));
    }
    s.push_str(&format!(
        "}} -> O {{\n    << ?e gucon:{action} ?r >> gucon:startTime ?startTime ; gucon:deadline ?deadline .\n}}\n"
    ));
    s
}

/// `n` distinct template rules of one selectivity class, plus execution
/// events for about `event_fraction` of their groundings.
pub fn generate_rules(
    graph: &Graph,
    n: usize,
    class: Selectivity,
    config: &GenerationConfig,
    bands: &SelectivityBands,
) -> Result<RuleSet, BenchError> {
    let origin = config.origin()?;
    let horizon = config.horizon()?.as_millis() / 60_000;
    let t = config.evaluation_time()?.since(&origin).as_millis() / 60_000;
    let mut candidates: Vec<PredicatePair> = predicate_pairs(graph)
        .into_iter()
        .filter(|p| p.matches > 0 && bands.classify_count(p.matches, graph.len()) == class)
        .collect();
    if candidates.len() < n {
        return Err(BenchError::InsufficientPairs {
            class,
            requested: n,
            available: candidates.len(),
        });
    }
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed ^ class_salt(class)));
    let mut rules = Vec::with_capacity(n);
    for (i, pair) in candidates.into_iter().take(n).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ class_salt(class));
        rng.set_stream(i as u64 + 1);
        let (start, deadline) = window(&mut rng, i % 3, t, horizon);
        let action = *ACTIONS.choose(&mut rng).expect("non-empty");
        let iri = Iri::new(format!("{}rule-{class}-{:02}", config.base, i + 1));
        let text = rule_text(
            &iri,
            &pair,
            action,
            at_minute(origin, start),
            at_minute(origin, deadline),
        );
        let rule = parse_rule_text(&text).map_err(|e| BenchError::Config(format!("generated rule {iri}: {e}")))?;
        let action_iri = Iri::new(format!("{GUCON}{action}"));
        let mut events = Vec::new();
        for (e, r) in groundings(graph, &pair) {
            if rng.random_bool(config.event_fraction) {
                let exec = at_minute(origin, exec_minute(&mut rng, (start, deadline), horizon));
                events.push(Event::new(e, action_iri.clone(), r, exec));
            }
        }
        rules.push(GeneratedRule {
            rule,
            text,
            pair,
            events,
        });
    }
    Ok(RuleSet { class, rules })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_edges_at_full_scale() {
        let b = SelectivityBands::default();
        let full = REFERENCE_TRIPLES as usize;
        assert_eq!(b.classify_count(0, full), Selectivity::Low);
        assert_eq!(b.classify_count(400, full), Selectivity::Low);
        assert_eq!(b.classify_count(401, full), Selectivity::Medium);
        assert_eq!(b.classify_count(1488, full), Selectivity::Medium);
        assert_eq!(b.classify_count(1489, full), Selectivity::High);
        assert_eq!(b.classify_count(200, full / 2), Selectivity::Low);
        assert_eq!(b.classify_count(201, full / 2), Selectivity::Medium);
    }

    #[test]
    fn windows_respect_their_stratum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (t, h) = (180, 360);
        for _ in 0..500 {
            let (s, d) = window(&mut rng, 0, t, h);
            assert!(s < t && t < d && d <= h);
            let (s, d) = window(&mut rng, 1, t, h);
            assert!(0 <= s && s < d && d < t);
            let (s, d) = window(&mut rng, 2, t, h);
            assert!(t < s && s < d && d <= h);
            let x = exec_minute(&mut rng, (s, d), h);
            assert!((0..=h).contains(&x));
        }
    }

    #[test]
    fn selectivity_names() {
        for c in [Selectivity::Low, Selectivity::Medium, Selectivity::High] {
            assert_eq!(c.to_string().parse::<Selectivity>().unwrap(), c);
        }
        assert!("extreme".parse::<Selectivity>().is_err());
    }
}
