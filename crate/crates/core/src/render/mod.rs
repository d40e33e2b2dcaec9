//! Text, DOT, CSV and structured renderings of canvases and reports.
//!
//! Every renderer is a pure function of its input and produces identical
//! bytes for identical input. Human-oriented output is plain ASCII.

mod canvas;
mod dot;
mod table;
mod text;
mod value;

pub use canvas::{layout_prioritization_canvas, render_canvas, CanvasEdge, CanvasLayout, Quadrants};
pub use table::{priority_table_columns, render_impact_report, render_priority_table, TableFormat};
pub use text::ascii_safe;
pub use value::{business_value_canvas, render_business_value_canvas, BusinessValueCanvas, Selector, ValueRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanvasFormat {
    Text,
    Dot,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error(transparent)]
    Engine(#[from] crate::error::EngineError),
    #[error("impact reports do not match the prioritized items: {0}")]
    ImpactMismatch(String),
}

pub(crate) fn to_json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("render types serialize");
    out.push(b'\n');
    out
}
