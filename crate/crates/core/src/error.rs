use std::fmt;

use crate::model::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    BusinessProcess,
    ItAsset,
    ConfigurationItem,
    DebtItem,
    /// A business process or an IT asset.
    Entity,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::BusinessProcess => "business process",
            EntityKind::ItAsset => "IT asset",
            EntityKind::ConfigurationItem => "configuration item",
            EntityKind::DebtItem => "debt item",
            EntityKind::Entity => "business process or IT asset",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown {kind} {id:?}")]
    UnknownReference { kind: EntityKind, id: String },
    /// The model has error-severity diagnostics; engine operations refuse it.
    #[error("model is invalid ({} error(s))", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
}

impl EngineError {
    pub(crate) fn unknown(kind: EntityKind, id: impl Into<String>) -> Self {
        EngineError::UnknownReference { kind, id: id.into() }
    }
}
