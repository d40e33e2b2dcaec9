use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::dot::{quote, DotNames};
use super::text::ascii_safe;
use super::{to_json_bytes, CanvasFormat};
use crate::error::EngineError;
use crate::model::{group_of, has_errors, validate, AssetState, Id, Model, ProcessGroup};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrants {
    pub core_support: Vec<Id>,
    pub other: Vec<Id>,
    pub operational: Vec<Id>,
    pub to_be_operational: Vec<Id>,
}

/// A dependency arrow: `process` depends on `asset`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanvasEdge {
    pub process: Id,
    pub asset: Id,
}

/// The four-quadrant prioritization canvas: processes on the left split by
/// group, assets on the right split by state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanvasLayout {
    pub quadrants: Quadrants,
    pub edges: Vec<CanvasEdge>,
}

pub fn layout_prioritization_canvas(model: &Model) -> Result<CanvasLayout, EngineError> {
    let diagnostics = validate(model);
    if has_errors(&diagnostics) {
        return Err(EngineError::InvalidModel(diagnostics));
    }
    let mut quadrants = Quadrants::default();
    for process in &model.business_processes {
        match group_of(process.class) {
            ProcessGroup::CoreSupport => quadrants.core_support.push(process.id.clone()),
            ProcessGroup::Other => quadrants.other.push(process.id.clone()),
        }
    }
    for asset in &model.it_assets {
        match asset.state {
            AssetState::Operational => quadrants.operational.push(asset.id.clone()),
            AssetState::ToBeOperational => quadrants.to_be_operational.push(asset.id.clone()),
        }
    }
    for cell in [
        &mut quadrants.core_support,
        &mut quadrants.other,
        &mut quadrants.operational,
        &mut quadrants.to_be_operational,
    ] {
        cell.sort();
    }
    let mut edges: Vec<CanvasEdge> = model
        .edges
        .asset_supports_bp
        .iter()
        .map(|(asset, process)| CanvasEdge {
            process: process.clone(),
            asset: asset.clone(),
        })
        .collect();
    edges.sort();
    edges.dedup();
    Ok(CanvasLayout { quadrants, edges })
}

pub fn render_canvas(layout: &CanvasLayout, format: CanvasFormat) -> Vec<u8> {
    match format {
        CanvasFormat::Text => canvas_text(layout).into_bytes(),
        CanvasFormat::Dot => canvas_dot(layout).into_bytes(),
        CanvasFormat::Structured => to_json_bytes(layout),
    }
}

const MIN_CELL: usize = 28;

fn canvas_text(layout: &CanvasLayout) -> String {
    let q = &layout.quadrants;
    let cell_lines = |title: &str, ids: &[Id]| -> Vec<String> {
        std::iter::once(title.to_string())
            .chain(ids.iter().map(|id| format!("  {}", ascii_safe(id.as_str()))))
            .collect()
    };
    let rows = [
        (
            cell_lines("core/support", &q.core_support),
            cell_lines("operational", &q.operational),
        ),
        (
            cell_lines("other", &q.other),
            cell_lines("to-be operational", &q.to_be_operational),
        ),
    ];
    let width = rows
        .iter()
        .flat_map(|(l, r)| l.iter().chain(r))
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max(MIN_CELL);

    let rule = format!("+{0}+{0}+\n", "-".repeat(width + 2));
    let line = |left: &str, right: &str| format!("| {left:<width$} | {right:<width$} |\n");

    let mut out = String::from("PRIORITIZATION CANVAS\n");
    out.push_str(&rule);
    out.push_str(&line("BUSINESS PROCESSES", "IT ASSETS"));
    out.push_str(&rule);
    for (left, right) in &rows {
        for i in 0..left.len().max(right.len()) {
            out.push_str(&line(
                left.get(i).map(String::as_str).unwrap_or(""),
                right.get(i).map(String::as_str).unwrap_or(""),
            ));
        }
        out.push_str(&rule);
    }
    out.push_str("dependencies (process <- asset):\n");
    if layout.edges.is_empty() {
        out.push_str("  (none)\n");
    }
    for edge in &layout.edges {
        let _ = writeln!(
            out,
            "  {} <- {}",
            ascii_safe(edge.process.as_str()),
            ascii_safe(edge.asset.as_str())
        );
    }
    out
}

const PROCESS_NS: u8 = 0;
const ASSET_NS: u8 = 1;

fn canvas_dot(layout: &CanvasLayout) -> String {
    let q = &layout.quadrants;
    let mut names = DotNames::default();
    let mut out = String::from("digraph prioritization_canvas {\n  rankdir=LR;\n  node [shape=box];\n");
    let clusters: [(&str, &str, u8, &[Id]); 4] = [
        ("core_support", "core/support processes", PROCESS_NS, &q.core_support),
        ("other", "other processes", PROCESS_NS, &q.other),
        ("operational", "operational assets", ASSET_NS, &q.operational),
        (
            "to_be_operational",
            "to-be operational assets",
            ASSET_NS,
            &q.to_be_operational,
        ),
    ];
    for (cluster, label, namespace, ids) in clusters {
        let _ = writeln!(out, "  subgraph cluster_{cluster} {{");
        let _ = writeln!(out, "    label={};", quote(label));
        for id in ids {
            let _ = writeln!(
                out,
                "    {} [label={}];",
                names.name(namespace, id.as_str()),
                quote(id.as_str())
            );
        }
        out.push_str("  }\n");
    }
    // Assets support processes: arrows point from asset to process.
    for edge in &layout.edges {
        let asset = names.name(ASSET_NS, edge.asset.as_str());
        let process = names.name(PROCESS_NS, edge.process.as_str());
        let _ = writeln!(out, "  {asset} -> {process};");
    }
    out.push_str("}\n");
    out
}
