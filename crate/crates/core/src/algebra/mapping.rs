use std::fmt;

use crate::term::Term;

use super::pattern::Variable;

/// A partial function from variables to ground terms, kept sorted by
/// variable.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionMapping {
    bindings: Vec<(Variable, Term)>,
}

impl SolutionMapping {
    pub fn new() -> Self {
        SolutionMapping::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `None` means the variable is outside the domain.
    pub fn get(&self, variable: &Variable) -> Option<&Term> {
        self.bindings
            .binary_search_by(|(v, _)| v.cmp(variable))
            .ok()
            .map(|i| &self.bindings[i].1)
    }

    pub fn contains(&self, variable: &Variable) -> bool {
        self.get(variable).is_some()
    }

    /// Binds `variable`, replacing any previous value.
    pub fn insert(&mut self, variable: Variable, term: Term) {
        match self.bindings.binary_search_by(|(v, _)| v.cmp(&variable)) {
            Ok(i) => self.bindings[i].1 = term,
            Err(i) => self.bindings.insert(i, (variable, term)),
        }
    }

    pub fn with(mut self, variable: Variable, term: Term) -> Self {
        self.insert(variable, term);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.bindings.iter().map(|(v, t)| (v, t))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.bindings.iter().map(|(v, _)| v)
    }

    /// Agreement on every shared variable.
    pub fn is_compatible(&self, other: &SolutionMapping) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.bindings.len() && j < other.bindings.len() {
            let (va, ta) = &self.bindings[i];
            let (vb, tb) = &other.bindings[j];
            match va.cmp(vb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if ta != tb {
                        return false;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        true
    }

    pub fn shares_variable(&self, other: &SolutionMapping) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.bindings.len() && j < other.bindings.len() {
            match self.bindings[i].0.cmp(&other.bindings[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// The union of two compatible mappings, or `None` if they conflict.
    pub fn merge(&self, other: &SolutionMapping) -> Option<SolutionMapping> {
        let mut out = Vec::with_capacity(self.bindings.len() + other.bindings.len());
        let (mut i, mut j) = (0, 0);
        while i < self.bindings.len() && j < other.bindings.len() {
            let (va, ta) = &self.bindings[i];
            let (vb, tb) = &other.bindings[j];
            match va.cmp(vb) {
                std::cmp::Ordering::Less => {
                    out.push((va.clone(), ta.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb.clone(), tb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if ta != tb {
                        return None;
                    }
                    out.push((va.clone(), ta.clone()));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.bindings[i..].iter().cloned());
        out.extend(other.bindings[j..].iter().cloned());
        Some(SolutionMapping { bindings: out })
    }

    /// Restriction to the given variables.
    pub fn project<'a>(&self, keep: impl IntoIterator<Item = &'a Variable>) -> SolutionMapping {
        let keep: Vec<&Variable> = keep.into_iter().collect();
        SolutionMapping {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep.contains(&v))
                .cloned()
                .collect(),
        }
    }
}

impl FromIterator<(Variable, Term)> for SolutionMapping {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        let mut m = SolutionMapping::new();
        for (v, t) in iter {
            m.insert(v, t);
        }
        m
    }
}

impl fmt::Debug for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(&str, &str)]) -> SolutionMapping {
        pairs.iter().map(|(v, t)| (Variable::new(*v), Term::iri(t))).collect()
    }

    #[test]
    fn compatibility_and_merge() {
        let a = m(&[("x", "1"), ("y", "2")]);
        let b = m(&[("y", "2"), ("z", "3")]);
        let c = m(&[("y", "9")]);
        assert!(a.is_compatible(&b));
        assert!(!a.is_compatible(&c));
        assert_eq!(a.merge(&b).unwrap(), m(&[("x", "1"), ("y", "2"), ("z", "3")]));
        assert!(a.merge(&c).is_none());
        assert!(a.shares_variable(&c));
        assert!(!m(&[("x", "1")]).shares_variable(&m(&[("z", "1")])));
    }

    #[test]
    fn unbound_is_distinguishable() {
        let a = m(&[("x", "1")]);
        assert!(a.get(&Variable::new("y")).is_none());
        assert_eq!(a.get(&Variable::new("x")), Some(&Term::iri("1")));
    }
}
