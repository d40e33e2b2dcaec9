//! A small bundled model: three processes, three assets, five configuration
//! items and five debt items, with business metrics on the sales process and
//! the sales web asset. Handy for demos, docs and tests.

use crate::ingest::parse_model;
use crate::model::Model;

/// Canonical document bytes of the sample model.
pub const SALES_DOCUMENT: &str = include_str!("../fixtures/sales.json");

pub fn sales_model() -> Model {
    parse_model(SALES_DOCUMENT.as_bytes())
        .expect("bundled sample parses")
        .model
}
