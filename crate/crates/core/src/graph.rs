//! An in-memory set of ground triples with per-position indexes.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt;

use crate::term::{Iri, Term, Triple};

#[derive(Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    members: HashSet<Triple>,
    by_subject: HashMap<Term, Vec<u32>>,
    by_predicate: HashMap<Iri, Vec<u32>>,
    by_object: HashMap<Term, Vec<u32>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Inserts a triple. Returns `false` if it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.members.contains(&triple) {
            return false;
        }
        let id = u32::try_from(self.triples.len()).expect("graph exceeds u32::MAX triples");
        self.by_subject.entry(triple.subject.clone()).or_default().push(id);
        self.by_predicate.entry(triple.predicate.clone()).or_default().push(id);
        self.by_object.entry(triple.object.clone()).or_default().push(id);
        self.members.insert(triple.clone());
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.members.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    /// Triples in canonical term order.
    pub fn sorted(&self) -> Vec<&Triple> {
        let mut out: Vec<&Triple> = self.triples.iter().collect();
        out.sort_unstable();
        out
    }

    pub fn is_subset(&self, other: &Graph) -> bool {
        self.len() <= other.len() && self.triples.iter().all(|t| other.contains(t))
    }

    /// Triples agreeing with every given position. Uses the smallest
    /// applicable index.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&Term>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        if let (Some(s), Some(p), Some(o)) = (subject, predicate, object) {
            let probe = Triple::new(s.clone(), p.clone(), o.clone());
            return match self.members.get(&probe) {
                Some(t) => Box::new(std::iter::once(t)),
                None => Box::new(std::iter::empty()),
            };
        }
        const EMPTY: &[u32] = &[];
        let mut best: Option<&[u32]> = None;
        let mut consider = |ids: &'a [u32]| {
            if best.is_none_or(|b| ids.len() < b.len()) {
                best = Some(ids);
            }
        };
        if let Some(s) = subject {
            consider(self.by_subject.get(s).map_or(EMPTY, Vec::as_slice));
        }
        if let Some(p) = predicate {
            consider(self.by_predicate.get(p).map_or(EMPTY, Vec::as_slice));
        }
        if let Some(o) = object {
            consider(self.by_object.get(o).map_or(EMPTY, Vec::as_slice));
        }
        let subject = subject.cloned();
        let predicate = predicate.cloned();
        let object = object.cloned();
        let keep = move |t: &&Triple| {
            subject.as_ref().is_none_or(|s| &t.subject == s)
                && predicate.as_ref().is_none_or(|p| &t.predicate == p)
                && object.as_ref().is_none_or(|o| &t.object == o)
        };
        match best {
            Some(ids) => Box::new(ids.iter().map(|&i| &self.triples[i as usize]).filter(keep)),
            None => Box::new(self.triples.iter()),
        }
    }

    /// Number of distinct predicates.
    pub fn predicate_count(&self) -> usize {
        self.by_predicate.len()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Iri> {
        self.by_predicate.keys()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.is_subset(other)
    }
}

impl Eq for Graph {}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::slice::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(Term::iri(s), Iri::new(p), Term::iri(o))
    }

    #[test]
    fn insertion_is_idempotent() {
        let mut g = Graph::new();
        assert!(g.insert(t("a", "p", "b")));
        let before = g.clone();
        assert!(!g.insert(t("a", "p", "b")));
        assert_eq!(g, before);
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn equality_ignores_order() {
        let a: Graph = [t("a", "p", "b"), t("c", "p", "d")].into_iter().collect();
        let b: Graph = [t("c", "p", "d"), t("a", "p", "b")].into_iter().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn matching_respects_all_positions() {
        let g: Graph = [t("a", "p", "b"), t("a", "q", "b"), t("c", "p", "b")]
            .into_iter()
            .collect();
        let hits: Vec<_> = g.matching(Some(&Term::iri("a")), None, Some(&Term::iri("b"))).collect();
        assert_eq!(hits.len(), 2);
        let hits: Vec<_> = g.matching(None, Some(&Iri::new("p")), None).collect();
        assert_eq!(hits.len(), 2);
        assert_eq!(g.matching(Some(&Term::iri("z")), None, None).count(), 0);
        assert_eq!(g.matching(None, None, None).count(), 3);
        let exact = Term::iri("c");
        assert_eq!(
            g.matching(Some(&exact), Some(&Iri::new("p")), Some(&Term::iri("b")))
                .count(),
            1
        );
    }
}
