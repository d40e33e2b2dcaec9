use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use super::text::{ascii_safe, ascii_table};
use super::{to_json_bytes, RenderError};
use crate::model::Id;
use crate::prioritizer::{ImpactReport, ItemEntry, MetricRef, PrioritizedReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Structured,
    Csv,
}

#[derive(Serialize)]
struct StructuredTable<'a> {
    columns: &'a [String],
    rows: &'a [Vec<String>],
}

pub fn priority_table_columns(impacts: Option<&[ImpactReport]>) -> Vec<String> {
    let mut columns = vec!["item".to_string(), "rank".to_string(), "witnesses".to_string()];
    if let Some(first) = impacts.and_then(|list| list.first()) {
        columns.extend(first.metrics_by_horizon.keys().cloned());
    }
    columns
}

/// Rows grouped by rank, most urgent first. With impacts, one extra column
/// per horizon lists metric names (text) or metric ids (CSV, structured).
pub fn render_priority_table(
    report: &PrioritizedReport,
    impacts: Option<&[ImpactReport]>,
    format: TableFormat,
) -> Result<Vec<u8>, RenderError> {
    let by_item: Option<BTreeMap<&Id, &ImpactReport>> = match impacts {
        None => None,
        Some(list) => {
            let map: BTreeMap<&Id, &ImpactReport> = list.iter().map(|i| (&i.item, i)).collect();
            let expected: BTreeSet<&Id> = report
                .groups
                .iter()
                .flat_map(|g| g.items.iter().map(|e| &e.item))
                .collect();
            let given: BTreeSet<&Id> = map.keys().copied().collect();
            if expected != given || map.len() != list.len() {
                let missing: Vec<&str> = expected.difference(&given).map(|id| id.as_str()).collect();
                let extra: Vec<&str> = given.difference(&expected).map(|id| id.as_str()).collect();
                return Err(RenderError::ImpactMismatch(format!(
                    "missing {missing:?}, unexpected {extra:?}"
                )));
            }
            Some(map)
        }
    };
    let columns = priority_table_columns(impacts);
    let human = format == TableFormat::Text;

    let sections: Vec<Vec<Vec<String>>> = report
        .groups
        .iter()
        .map(|group| {
            group
                .items
                .iter()
                .map(|entry| {
                    let mut row = vec![entry.item.to_string(), group.rank.to_string(), witness_cell(entry)];
                    if let Some(map) = &by_item {
                        let impact = map[&entry.item];
                        row.extend(
                            impact
                                .metrics_by_horizon
                                .values()
                                .map(|metrics| metric_cell(metrics, human)),
                        );
                    }
                    row
                })
                .collect()
        })
        .collect();

    Ok(match format {
        TableFormat::Text => ascii_table(&columns, &sections).into_bytes(),
        TableFormat::Structured => {
            let rows: Vec<Vec<String>> = sections.into_iter().flatten().collect();
            to_json_bytes(&StructuredTable {
                columns: &columns,
                rows: &rows,
            })
        }
        TableFormat::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(Vec::new());
            writer.write_record(&columns).expect("in-memory csv write");
            for row in sections.iter().flatten() {
                writer.write_record(row).expect("in-memory csv write");
            }
            writer.into_inner().expect("in-memory csv flush")
        }
    })
}

fn witness_cell(entry: &ItemEntry) -> String {
    let pairs: BTreeSet<(&Id, &Id)> = entry.witnesses.iter().map(|w| (&w.asset, &w.bp)).collect();
    pairs
        .into_iter()
        .map(|(asset, bp)| format!("{asset}->{bp}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn metric_cell(metrics: &[MetricRef], human: bool) -> String {
    if human {
        metrics.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join(", ")
    } else {
        metrics.iter().map(|m| m.metric.as_str()).collect::<Vec<_>>().join("; ")
    }
}

/// Plain-text listing of one item's reachable entities and metrics.
pub fn render_impact_report(report: &ImpactReport) -> Vec<u8> {
    let join = |ids: &[Id]| {
        if ids.is_empty() {
            "(none)".to_string()
        } else {
            ids.iter().map(Id::as_str).collect::<Vec<_>>().join(", ")
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "item: {}", report.item);
    let _ = writeln!(out, "assets: {}", join(&report.assets));
    let _ = writeln!(out, "processes: {}", join(&report.processes));
    for (horizon, metrics) in &report.metrics_by_horizon {
        let _ = writeln!(out, "{}:", ascii_safe(horizon));
        if metrics.is_empty() {
            out.push_str("  (none)\n");
        }
        for m in metrics {
            let _ = writeln!(out, "  {} ({} @ {})", ascii_safe(&m.name), m.metric, m.owner);
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let report = PrioritizedReport::default();
        let text = render_priority_table(&report, None, TableFormat::Text).unwrap();
        assert_eq!(
            String::from_utf8(text).unwrap(),
            "+------+------+-----------+\n| item | rank | witnesses |\n+------+------+-----------+\n"
        );
        let csv = render_priority_table(&report, None, TableFormat::Csv).unwrap();
        assert_eq!(csv, b"item,rank,witnesses\r\n");
        let json = render_priority_table(&report, Some(&[]), TableFormat::Structured).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(value["rows"].as_array().unwrap().len(), 0);
    }
}
