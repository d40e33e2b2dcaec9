use std::collections::{BTreeMap, BTreeSet};

const KEYWORDS: [&str; 6] = ["node", "edge", "graph", "digraph", "subgraph", "strict"];

/// Maps model ids onto distinct bare DOT identifiers.
///
/// `-` and `.` become `_`; a leading digit or a DOT keyword gets an `n_`
/// prefix; collisions get `_2`, `_3`, ... in allocation order.
#[derive(Debug, Default)]
pub(crate) struct DotNames {
    taken: BTreeSet<String>,
    assigned: BTreeMap<(u8, String), String>,
}

impl DotNames {
    /// `namespace` separates entities that may share an id (processes,
    /// assets, metrics).
    pub(crate) fn name(&mut self, namespace: u8, id: &str) -> String {
        if let Some(name) = self.assigned.get(&(namespace, id.to_string())) {
            return name.clone();
        }
        let mut base: String = id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if base.is_empty()
            || base.starts_with(|c: char| c.is_ascii_digit())
            || KEYWORDS.contains(&base.to_ascii_lowercase().as_str())
        {
            base = format!("n_{base}");
        }
        let mut candidate = base.clone();
        let mut n = 2;
        while self.taken.contains(&candidate) {
            candidate = format!("{base}_{n}");
            n += 1;
        }
        self.taken.insert(candidate.clone());
        self.assigned.insert((namespace, id.to_string()), candidate.clone());
        candidate
    }
}

pub(crate) fn quote(label: &str) -> String {
    let mut out = String::from("\"");
    for c in super::text::ascii_safe(label).chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
