use std::fmt::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::dot::{quote, DotNames};
use super::text::ascii_table;
use super::{to_json_bytes, CanvasFormat};
use crate::error::{EngineError, EntityKind};
use crate::model::{Id, Metric, Model};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    All,
    Entity(Id),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Process,
    Asset,
}

/// One entity's metrics, by horizon. Cells hold metric ids sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRow {
    pub entity: Id,
    pub kind: RowKind,
    pub cells: IndexMap<String, Vec<Id>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessValueCanvas {
    pub horizons: Vec<String>,
    pub rows: Vec<ValueRow>,
}

/// Rows for the selected entities: processes first, then assets, each
/// sorted by id. An id naming both a process and an asset yields two rows.
pub fn business_value_canvas(model: &Model, selector: &Selector) -> Result<BusinessValueCanvas, EngineError> {
    let wanted = |id: &Id| match selector {
        Selector::All => true,
        Selector::Entity(target) => id == target,
    };
    let mut entities: Vec<(RowKind, &Id)> = Vec::new();
    let mut processes: Vec<&Id> = model
        .business_processes
        .iter()
        .map(|p| &p.id)
        .filter(|id| wanted(id))
        .collect();
    processes.sort();
    entities.extend(processes.into_iter().map(|id| (RowKind::Process, id)));
    let mut assets: Vec<&Id> = model.it_assets.iter().map(|a| &a.id).filter(|id| wanted(id)).collect();
    assets.sort();
    entities.extend(assets.into_iter().map(|id| (RowKind::Asset, id)));

    if let Selector::Entity(target) = selector {
        if entities.is_empty() {
            return Err(EngineError::unknown(EntityKind::Entity, target.as_str()));
        }
    }

    let rows = entities
        .into_iter()
        .map(|(kind, entity)| {
            let mut cells: IndexMap<String, Vec<Id>> = model.horizons.iter().map(|h| (h.clone(), Vec::new())).collect();
            for metric in model.metrics.iter().filter(|m| &m.owner == entity) {
                if let Some(cell) = cells.get_mut(&metric.horizon) {
                    cell.push(metric.id.clone());
                }
            }
            for cell in cells.values_mut() {
                cell.sort();
            }
            ValueRow {
                entity: entity.clone(),
                kind,
                cells,
            }
        })
        .collect();
    Ok(BusinessValueCanvas {
        horizons: model.horizons.clone(),
        rows,
    })
}

pub fn render_business_value_canvas(
    model: &Model,
    selector: &Selector,
    format: CanvasFormat,
) -> Result<Vec<u8>, EngineError> {
    let canvas = business_value_canvas(model, selector)?;
    Ok(match format {
        CanvasFormat::Structured => to_json_bytes(&canvas),
        CanvasFormat::Text => value_text(model, &canvas).into_bytes(),
        CanvasFormat::Dot => value_dot(model, &canvas).into_bytes(),
    })
}

fn metric<'m>(model: &'m Model, id: &Id) -> &'m Metric {
    model
        .metrics
        .iter()
        .find(|m| &m.id == id)
        .expect("canvas metrics come from the model")
}

fn entity_label(model: &Model, row: &ValueRow) -> String {
    let (name, kind) = match row.kind {
        RowKind::Process => (model.process(row.entity.as_str()).map(|p| p.name.as_str()), "process"),
        RowKind::Asset => (model.asset(row.entity.as_str()).map(|a| a.name.as_str()), "asset"),
    };
    format!("{} ({kind})", name.unwrap_or(row.entity.as_str()))
}

fn value_text(model: &Model, canvas: &BusinessValueCanvas) -> String {
    let mut headers = vec!["entity".to_string()];
    headers.extend(canvas.horizons.iter().cloned());
    let rows: Vec<Vec<String>> = canvas
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![entity_label(model, row)];
            cells.extend(row.cells.values().map(|ids| {
                ids.iter()
                    .map(|id| metric(model, id).name.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            }));
            cells
        })
        .collect();
    format!("BUSINESS-VALUE CANVAS\n{}", ascii_table(&headers, &[rows]))
}

const ENTITY_NS: u8 = 0;
const ASSET_NS: u8 = 1;
const METRIC_NS: u8 = 2;

fn value_dot(model: &Model, canvas: &BusinessValueCanvas) -> String {
    let mut names = DotNames::default();
    let mut out = String::from("digraph business_value_canvas {\n  rankdir=LR;\n  node [shape=box];\n");
    let node_of = |names: &mut DotNames, row: &ValueRow| match row.kind {
        RowKind::Process => names.name(ENTITY_NS, row.entity.as_str()),
        RowKind::Asset => names.name(ASSET_NS, row.entity.as_str()),
    };
    for row in &canvas.rows {
        let node = node_of(&mut names, row);
        let _ = writeln!(out, "  {node} [label={}];", quote(&entity_label(model, row)));
    }
    for (index, horizon) in canvas.horizons.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_h{index} {{");
        let _ = writeln!(out, "    label={};", quote(horizon));
        for row in &canvas.rows {
            for id in &row.cells[horizon] {
                let node = names.name(METRIC_NS, id.as_str());
                let _ = writeln!(
                    out,
                    "    {node} [label={}, shape=ellipse];",
                    quote(&metric(model, id).name)
                );
            }
        }
        out.push_str("  }\n");
    }
    for row in &canvas.rows {
        let entity = node_of(&mut names, row);
        for ids in row.cells.values() {
            for id in ids {
                let _ = writeln!(out, "  {entity} -> {};", names.name(METRIC_NS, id.as_str()));
            }
        }
    }
    out.push_str("}\n");
    out
}
