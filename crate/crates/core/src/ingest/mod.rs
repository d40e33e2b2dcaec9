//! Model document parsing and serialization, and debt import from issue
//! tracker exports.

mod document;
mod issues;

pub use document::{
    parse_model, parse_model_with, serialize_model, ParseError, ParseErrorKind, ParseOptions, ParsedModel,
};
pub use issues::{import_issues, merge_imported, DebtField, ImportError, ImportMapping, IssueRecord};
