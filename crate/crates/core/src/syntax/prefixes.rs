use std::collections::BTreeMap;
use std::sync::LazyLock;

const BUNDLED: &str = include_str!("prefixes.ttl");

static BUNDLED_MAP: LazyLock<PrefixMap> = LazyLock::new(|| {
    let mut map = PrefixMap::empty();
    super::turtle::parse_with_prefixes(BUNDLED, &mut map).expect("bundled prefix file is valid");
    map
});

/// Prefix declarations plus an optional base IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap::default()
    }

    /// The pre-declared prefixes: rdf, rdfs, xsd, dcat, gucon, gc, ucp, hc, exp and ex.
    pub fn bundled() -> Self {
        BUNDLED_MAP.clone()
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        let ns = self.prefixes.get(prefix)?;
        let mut out = String::with_capacity(ns.len() + local.len());
        out.push_str(ns);
        // Local-name escapes have already been stripped by the lexer.
        out.push_str(local);
        Some(out)
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn set_base(&mut self, base: String) {
        self.base = Some(base);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    /// Resolves an IRI reference against the base, if any.
    pub fn resolve(&self, reference: &str) -> String {
        if has_scheme(reference) {
            return reference.to_owned();
        }
        let Some(base) = self.base.as_deref() else {
            return reference.to_owned();
        };
        if reference.is_empty() {
            return strip_fragment(base).to_owned();
        }
        if reference.starts_with('#') {
            return format!("{}{reference}", strip_fragment(base));
        }
        if let Some(rest) = reference.strip_prefix("//") {
            let scheme = base.split(':').next().unwrap_or("");
            return format!("{scheme}://{rest}");
        }
        if reference.starts_with('/') {
            return format!("{}{reference}", authority_prefix(base));
        }
        let base = strip_fragment(base);
        let base = base.split('?').next().unwrap_or(base);
        match base.rfind('/') {
            Some(i) if i + 1 > authority_prefix(base).len() => format!("{}{reference}", &base[..=i]),
            _ => format!("{}/{reference}", authority_prefix(base)),
        }
    }

    /// The shortest prefixed form of `iri` that lexes back unchanged.
    pub fn compact(&self, iri: &str) -> Option<String> {
        let mut best: Option<(usize, &str, &str)> = None;
        for (prefix, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                if is_safe_local(local) && best.is_none_or(|(len, _, _)| ns.len() > len) {
                    best = Some((ns.len(), prefix, local));
                }
            }
        }
        best.map(|(_, p, l)| format!("{p}:{l}"))
    }
}

fn has_scheme(reference: &str) -> bool {
    let mut chars = reference.chars();
    if !chars.next().is_some_and(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    for c in chars {
        match c {
            ':' => return true,
            c if c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.') => {}
            _ => return false,
        }
    }
    false
}

fn strip_fragment(iri: &str) -> &str {
    iri.split('#').next().unwrap_or(iri)
}

fn authority_prefix(iri: &str) -> &str {
    match iri.find("://") {
        Some(i) => {
            let rest = &iri[i + 3..];
            let end = rest.find('/').map_or(iri.len(), |j| i + 3 + j);
            &iri[..end]
        }
        None => iri.split(':').next().map_or(iri, |s| &iri[..s.len() + 1]),
    }
}

fn is_safe_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    let ok_char = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-';
    let first = local.chars().next().expect("non-empty");
    let last = local.chars().last().expect("non-empty");
    (first.is_ascii_alphanumeric() || first == '_')
        && ok_char(last)
        && local.chars().all(|c| ok_char(c) || c == '.')
        && !local.contains("..")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_has_fixed_namespaces() {
        let map = PrefixMap::bundled();
        assert_eq!(map.get("gucon"), Some("https://w3id.org/gucon#"));
        assert_eq!(map.get("exp"), Some("http://example.org/gucon/"));
        assert_eq!(map.get("ex"), Some("http://example.org/"));
    }

    #[test]
    fn compact_prefers_longest_namespace() {
        let map = PrefixMap::bundled();
        assert_eq!(
            map.compact("http://example.org/gucon/rule-1").as_deref(),
            Some("exp:rule-1")
        );
        assert_eq!(map.compact("http://example.org/a/b"), None);
        assert_eq!(map.compact("http://example.org/x.").as_deref(), None);
    }

    #[test]
    fn resolves_relative_references() {
        let mut map = PrefixMap::empty();
        map.set_base("http://example.org/dir/doc#frag".into());
        assert_eq!(map.resolve("other"), "http://example.org/dir/other");
        assert_eq!(map.resolve("#x"), "http://example.org/dir/doc#x");
        assert_eq!(map.resolve("/root"), "http://example.org/root");
        assert_eq!(map.resolve("urn:x"), "urn:x");
    }
}
