//! Turns an issue-tracker export into debt items.
//!
//! The export is a JSON array of objects, each with at least `id` (string or
//! number), `title` and `labels`. Issues carrying any label from the mapping's
//! filter become debt items; labels starting with the CI prefix name the
//! affected configuration items.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::model::{DebtItem, Diagnostic, DiagnosticCode, Id, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebtField {
    Id,
    Title,
    DebtType,
    Source,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportMapping {
    pub label_filter: BTreeSet<String>,
    /// Export field name -> debt item field. Issue `id` feeds `source` and
    /// `title` feeds `title` unless another export field is mapped there.
    #[serde(default)]
    pub field_map: BTreeMap<String, DebtField>,
    pub ci_label_prefix: String,
    /// Prepended to the sanitized source to form debt item ids when no
    /// export field maps to `id`.
    #[serde(default = "default_id_prefix")]
    pub id_prefix: String,
}

fn default_id_prefix() -> String {
    "td-".to_string()
}

impl ImportMapping {
    pub fn new(label_filter: impl IntoIterator<Item = impl Into<String>>, ci_label_prefix: impl Into<String>) -> Self {
        ImportMapping {
            label_filter: label_filter.into_iter().map(Into::into).collect(),
            field_map: BTreeMap::new(),
            ci_label_prefix: ci_label_prefix.into(),
            id_prefix: default_id_prefix(),
        }
    }

    fn check(&self) -> Result<(), ImportError> {
        if self.label_filter.is_empty() {
            return Err(ImportError::Mapping("label_filter must not be empty".into()));
        }
        if self.ci_label_prefix.is_empty() {
            return Err(ImportError::Mapping("ci_label_prefix must not be empty".into()));
        }
        Ok(())
    }

    /// Export field feeding each debt item field.
    fn sources(&self) -> BTreeMap<DebtField, &str> {
        let mut out: BTreeMap<DebtField, &str> = [(DebtField::Source, "id"), (DebtField::Title, "title")].into();
        let mapped: BTreeSet<DebtField> = self.field_map.values().copied().collect();
        out.retain(|field, _| !mapped.contains(field));
        for (export_field, field) in &self.field_map {
            out.insert(*field, export_field);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImportError {
    #[error("export is not valid JSON: {0}")]
    Syntax(String),
    #[error("issue {index}: {message}")]
    Issue { index: usize, message: String },
    #[error("invalid mapping: {0}")]
    Mapping(String),
}

/// One export entry after shape checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueRecord {
    pub id: String,
    pub title: String,
    pub labels: Vec<String>,
    pub fields: Map<String, Value>,
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn read_export(export: &[u8]) -> Result<Vec<IssueRecord>, ImportError> {
    let raw: Vec<Map<String, Value>> =
        serde_json::from_slice(export).map_err(|e| ImportError::Syntax(e.to_string()))?;
    raw.into_iter()
        .enumerate()
        .map(|(index, fields)| {
            let bad = |message: &str| ImportError::Issue {
                index,
                message: message.to_string(),
            };
            let id = fields
                .get("id")
                .and_then(scalar)
                .ok_or_else(|| bad("missing string or numeric \"id\""))?;
            let title = fields
                .get("title")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("missing string \"title\""))?
                .to_string();
            let labels = fields
                .get("labels")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing \"labels\" array"))?
                .iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| bad("labels must be strings"))
                })
                .collect::<Result<_, _>>()?;
            Ok(IssueRecord {
                id,
                title,
                labels,
                fields,
            })
        })
        .collect()
}

fn sanitize(raw: &str) -> String {
    raw.chars()
        .filter(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        .collect()
}

/// Converts matching issues into debt items without touching `model`.
///
/// Issues whose CI labels resolve to nothing in `model` are skipped with
/// `UNMAPPED_ISSUE`; unresolvable CI labels on otherwise mapped issues are
/// dropped with a `MISSING_REF` warning. Repeated sources keep the first.
pub fn import_issues(
    export: &[u8],
    mapping: &ImportMapping,
    model: &Model,
) -> Result<(Vec<DebtItem>, Vec<Diagnostic>), ImportError> {
    mapping.check()?;
    let issues = read_export(export)?;
    let sources = mapping.sources();
    let mut items: Vec<DebtItem> = Vec::new();
    let mut seen_sources = BTreeSet::new();
    let mut diagnostics = Vec::new();

    for issue in issues {
        if !issue.labels.iter().any(|l| mapping.label_filter.contains(l)) {
            continue;
        }
        let field = |f: DebtField| {
            sources
                .get(&f)
                .and_then(|name| issue.fields.get(*name))
                .and_then(scalar)
        };
        let source = field(DebtField::Source).unwrap_or_else(|| issue.id.clone());
        if !seen_sources.insert(source.clone()) {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::DuplicateId,
                source.clone(),
                format!("issue {source} appears more than once in the export; keeping the first"),
            ));
            continue;
        }

        let mut affected = BTreeSet::new();
        for label in &issue.labels {
            let Some(name) = label.strip_prefix(&mapping.ci_label_prefix) else {
                continue;
            };
            match model.configuration_item(name) {
                Some(ci) => {
                    affected.insert(ci.id.clone());
                }
                None => diagnostics.push(Diagnostic::warning(
                    DiagnosticCode::MissingRef,
                    name.to_string(),
                    format!("issue {source} names unknown configuration item {name:?}"),
                )),
            }
        }
        if affected.is_empty() {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::UnmappedIssue,
                source.clone(),
                format!("issue {source} names no known configuration item; not imported"),
            ));
            continue;
        }

        let raw_id = match field(DebtField::Id) {
            Some(value) => value,
            None => format!("{}{}", mapping.id_prefix, sanitize(&source)),
        };
        let Ok(id) = Id::new(raw_id.clone()) else {
            diagnostics.push(Diagnostic::warning(
                DiagnosticCode::InvalidId,
                source.clone(),
                format!("issue {source} yields invalid debt item id {raw_id:?}; not imported"),
            ));
            continue;
        };
        items.push(DebtItem {
            id,
            title: field(DebtField::Title).unwrap_or_else(|| issue.title.clone()),
            debt_type: field(DebtField::DebtType),
            affected_cis: affected,
            source: Some(source),
        });
    }
    crate::model::sort_diagnostics(&mut diagnostics);
    Ok((items, diagnostics))
}

/// Merges imported items into a copy of `model`.
///
/// An item whose `source` matches an existing item replaces that item's
/// contents in place (keeping its id); otherwise it is appended unless its id
/// is already taken.
pub fn merge_imported(model: &Model, items: &[DebtItem]) -> (Model, Vec<Diagnostic>) {
    let mut out = model.clone();
    let mut diagnostics = Vec::new();
    for item in items {
        let existing = out
            .debt_items
            .iter()
            .position(|d| d.source.is_some() && d.source == item.source);
        match existing {
            Some(index) => {
                let id = out.debt_items[index].id.clone();
                out.debt_items[index] = DebtItem { id, ..item.clone() };
            }
            None if out.debt_item(item.id.as_str()).is_some() => diagnostics.push(Diagnostic::warning(
                DiagnosticCode::DuplicateId,
                item.id.as_str(),
                format!(
                    "debt item id {} already exists with another source; not merged",
                    item.id
                ),
            )),
            None => out.debt_items.push(item.clone()),
        }
    }
    crate::model::sort_diagnostics(&mut diagnostics);
    (out.canonicalized(), diagnostics)
}
