use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    default_rule, BusinessProcess, ConfigurationItem, DebtItem, Diagnostic, DiagnosticCode, EdgeSet, ItAsset, Metric,
    Model, PrioritizationRule, DEFAULT_HORIZONS, FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    /// Input is not UTF-8.
    Encoding,
    Syntax,
    /// Well-formed JSON of the wrong shape, including bad identifiers.
    Type,
    UnsupportedVersion,
    UnknownField,
}

/// A structural problem in a model document.
///
/// `line`/`column` are 1-based; `path` is set for unknown fields instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column, &self.path) {
            (Some(line), Some(column), _) => write!(f, "line {line}, column {column}: {}", self.message),
            (_, _, Some(path)) => write!(f, "at {path}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    fn from_json(err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let kind = match err.classify() {
            Category::Data => ParseErrorKind::Type,
            Category::Io | Category::Syntax | Category::Eof => ParseErrorKind::Syntax,
        };
        // serde_json appends " at line L column C"; the position is kept separately.
        let text = err.to_string();
        let message = match text.rfind(" at line ") {
            Some(cut) => text[..cut].to_string(),
            None => text,
        };
        ParseError {
            kind,
            line: Some(err.line()),
            column: Some(err.column()),
            path: None,
            message,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown fields. When false they are reported as warnings.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

/// A structurally sound model plus warnings raised while reading it.
/// Referential checks still need [`crate::model::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedModel {
    pub model: Model,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct ModelDocument {
    version: String,
    horizons: Option<Vec<String>>,
    business_processes: Vec<BusinessProcess>,
    it_assets: Vec<ItAsset>,
    configuration_items: Vec<ConfigurationItem>,
    debt_items: Vec<DebtItem>,
    metrics: Vec<Metric>,
    edges: EdgeSet,
    rule: Option<PrioritizationRule>,
}

pub fn parse_model(document: &[u8]) -> Result<ParsedModel, Vec<ParseError>> {
    parse_model_with(document, ParseOptions::default())
}

pub fn parse_model_with(document: &[u8], options: ParseOptions) -> Result<ParsedModel, Vec<ParseError>> {
    let text = std::str::from_utf8(document).map_err(|err| {
        let (line, column) = position_of(document, err.valid_up_to());
        vec![ParseError {
            kind: ParseErrorKind::Encoding,
            line: Some(line),
            column: Some(column),
            path: None,
            message: "document is not valid UTF-8".into(),
        }]
    })?;

    let probe: VersionProbe = serde_json::from_str(text).map_err(|e| vec![ParseError::from_json(e)])?;
    match probe.version {
        Some(serde_json::Value::String(ref v)) if v == FORMAT_VERSION => {}
        Some(other) => {
            return Err(vec![ParseError {
                kind: ParseErrorKind::UnsupportedVersion,
                line: None,
                column: None,
                path: Some("version".into()),
                message: format!("unsupported document version {other}, expected \"{FORMAT_VERSION}\""),
            }])
        }
        None => {}
    }

    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ModelDocument = serde_ignored::deserialize(&mut de, |path| unknown.push(path.to_string()))
        .map_err(|e| vec![ParseError::from_json(e)])?;
    de.end().map_err(|e| vec![ParseError::from_json(e)])?;

    let mut warnings = Vec::new();
    if !unknown.is_empty() {
        if options.strict {
            return Err(unknown
                .into_iter()
                .map(|path| ParseError {
                    kind: ParseErrorKind::UnknownField,
                    line: None,
                    column: None,
                    message: format!("unknown field {path:?}"),
                    path: Some(path),
                })
                .collect());
        }
        for path in unknown {
            warnings.push(Diagnostic::warning(
                DiagnosticCode::UnknownField,
                path.clone(),
                format!("ignored unknown field {path:?}"),
            ));
        }
    }

    let horizons = doc.horizons.unwrap_or_else(|| {
        warnings.push(Diagnostic::warning(
            DiagnosticCode::HorizonsDefaulted,
            "horizons",
            format!("no horizons declared; using {}", DEFAULT_HORIZONS.join(", ")),
        ));
        DEFAULT_HORIZONS.iter().map(|h| h.to_string()).collect()
    });
    let rule = doc.rule.unwrap_or_else(|| {
        warnings.push(Diagnostic::warning(
            DiagnosticCode::RuleDefaulted,
            "rule",
            "no rule declared; using the default rule",
        ));
        default_rule()
    });
    crate::model::sort_diagnostics(&mut warnings);

    Ok(ParsedModel {
        model: Model {
            version: doc.version,
            horizons,
            business_processes: doc.business_processes,
            it_assets: doc.it_assets,
            configuration_items: doc.configuration_items,
            debt_items: doc.debt_items,
            metrics: doc.metrics,
            edges: doc.edges,
            rule,
        },
        warnings,
    })
}

fn position_of(bytes: &[u8], offset: usize) -> (usize, usize) {
    let before = &bytes[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = offset - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Canonical document bytes.
///
/// Keys appear in a fixed order (`version`, `horizons`, `business_processes`,
/// `it_assets`, `configuration_items`, `debt_items`, `metrics`, `edges`,
/// `rule`), entities and edges are sorted, horizons keep their declared order,
/// two-space indentation, trailing newline. Absent optional fields are
/// omitted.
pub fn serialize_model(model: &Model) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&model.canonicalized()).expect("model serialization is infallible");
    out.push(b'\n');
    out
}
