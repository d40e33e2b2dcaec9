//! Technical debt prioritization by business impact.
//!
//! Debt items attach to configuration items. Impact flows from a
//! configuration item to everything that depends on it, on to the IT assets
//! those support and the business processes the assets support. A 2x2 rule
//! table turns each reached (process group, asset state) pair into an urgency
//! rank; an item's effective rank is the most urgent one it reaches. Business
//! metrics attached to reached processes and assets describe the potential
//! impact per time horizon.
//!
//! ```
//! use tracy_core::{ingest, prioritizer, sample};
//!
//! let model = ingest::parse_model(sample::SALES_DOCUMENT.as_bytes()).unwrap().model;
//! let report = prioritizer::prioritize(&model).unwrap();
//! let top: Vec<&str> = report.groups[0].items.iter().map(|e| e.item.as_str()).collect();
//! assert_eq!(top, ["d2", "d5"]);
//! ```

pub mod error;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod prioritizer;
pub mod render;
pub mod sample;

pub use error::{EngineError, EntityKind};
pub use graph::{detect_cycles, reachable_pairs, upstream_closure, ImpactGraph, PairWitness};
pub use model::{
    default_rule, group_of, validate, AssetState, BusinessProcess, ConfigurationItem, DebtItem, Diagnostic,
    DiagnosticCode, EdgeSet, Id, ItAsset, Metric, Model, PrioritizationRule, ProcessClass, ProcessGroup, Severity,
};
pub use prioritizer::{
    apply_whatif, impact_of, prioritize, rank_of, EffectiveRank, ImpactReport, PrioritizedReport, Prioritizer,
    RankChange, WhatIfOutcome, WhatIfOverrides,
};
pub use render::CanvasLayout;
