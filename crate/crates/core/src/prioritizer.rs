//! Rule application, grouping by effective rank, business impact per
//! horizon, and what-if evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EntityKind};
use crate::graph::{ImpactGraph, PairWitness};
use crate::model::{
    group_of, has_errors, validate, AssetState, BusinessProcess, DebtItem, Id, ItAsset, Model, PrioritizationRule,
    ProcessClass,
};

/// A debt item's most urgent rule rank over everything it reaches.
///
/// `Unlinked` (nothing reachable) orders after every numeric rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EffectiveRank {
    Rank(u32),
    Unlinked,
}

impl EffectiveRank {
    pub const UNLINKED_LABEL: &'static str = "UNLINKED";

    pub fn value(self) -> Option<u32> {
        match self {
            EffectiveRank::Rank(rank) => Some(rank),
            EffectiveRank::Unlinked => None,
        }
    }
}

impl fmt::Display for EffectiveRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectiveRank::Rank(rank) => write!(f, "{rank}"),
            EffectiveRank::Unlinked => f.write_str(Self::UNLINKED_LABEL),
        }
    }
}

impl Serialize for EffectiveRank {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            EffectiveRank::Rank(rank) => serializer.serialize_u32(*rank),
            EffectiveRank::Unlinked => serializer.serialize_str(Self::UNLINKED_LABEL),
        }
    }
}

impl<'de> Deserialize<'de> for EffectiveRank {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Rank(u32),
            Label(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Rank(rank) => Ok(EffectiveRank::Rank(rank)),
            Raw::Label(label) if label == Self::UNLINKED_LABEL => Ok(EffectiveRank::Unlinked),
            Raw::Label(label) => Err(serde::de::Error::custom(format!(
                "expected a rank or {:?}, got {label:?}",
                Self::UNLINKED_LABEL
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemEntry {
    pub item: Id,
    /// Only the witnesses that achieve the item's effective rank.
    pub witnesses: Vec<PairWitness>,
    /// Number of distinct (asset, process) pairs the item reaches.
    pub all_pairs_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriorityGroup {
    pub rank: EffectiveRank,
    pub items: Vec<ItemEntry>,
}

/// Debt items grouped by effective rank, most urgent first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrioritizedReport {
    pub groups: Vec<PriorityGroup>,
}

impl PrioritizedReport {
    pub fn rank_of_item(&self, item: &str) -> Option<EffectiveRank> {
        self.groups
            .iter()
            .find(|g| g.items.iter().any(|e| e.item.as_str() == item))
            .map(|g| g.rank)
    }

    pub fn ranks(&self) -> BTreeMap<Id, EffectiveRank> {
        self.groups
            .iter()
            .flat_map(|g| g.items.iter().map(move |e| (e.item.clone(), g.rank)))
            .collect()
    }

    /// Group membership as plain id lists, in report order.
    pub fn membership(&self) -> Vec<Vec<Id>> {
        self.groups
            .iter()
            .map(|g| g.items.iter().map(|e| e.item.clone()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MetricRef {
    pub metric: Id,
    pub owner: Id,
    pub name: String,
}

/// Business metrics a debt item may affect, per horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub item: Id,
    pub assets: Vec<Id>,
    pub processes: Vec<Id>,
    /// Keys follow the model's declared horizon order.
    pub metrics_by_horizon: IndexMap<String, Vec<MetricRef>>,
}

/// Non-persisted modifications evaluated to preview priority changes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfOverrides {
    #[serde(default)]
    pub asset_state_changes: BTreeMap<Id, AssetState>,
    #[serde(default)]
    pub process_class_changes: BTreeMap<Id, ProcessClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_replacement: Option<PrioritizationRule>,
}

impl WhatIfOverrides {
    pub fn is_empty(&self) -> bool {
        self.asset_state_changes.is_empty() && self.process_class_changes.is_empty() && self.rule_replacement.is_none()
    }

    /// Returns a modified copy of `model`.
    pub fn apply(&self, model: &Model) -> Result<Model, EngineError> {
        let mut out = model.clone();
        for (asset_id, state) in &self.asset_state_changes {
            let asset = out
                .it_assets
                .iter_mut()
                .find(|a| &a.id == asset_id)
                .ok_or_else(|| EngineError::unknown(EntityKind::ItAsset, asset_id.as_str()))?;
            asset.state = *state;
        }
        for (process_id, class) in &self.process_class_changes {
            let process = out
                .business_processes
                .iter_mut()
                .find(|p| &p.id == process_id)
                .ok_or_else(|| EngineError::unknown(EntityKind::BusinessProcess, process_id.as_str()))?;
            process.class = *class;
        }
        if let Some(rule) = self.rule_replacement {
            out.rule = rule;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankChange {
    pub item: Id,
    pub old: EffectiveRank,
    pub new: EffectiveRank,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfOutcome {
    pub report: PrioritizedReport,
    pub delta: Vec<RankChange>,
}

/// Engine bound to one validated model.
#[derive(Debug)]
pub struct Prioritizer<'m> {
    model: &'m Model,
    graph: ImpactGraph<'m>,
    processes: BTreeMap<&'m str, &'m BusinessProcess>,
    assets: BTreeMap<&'m str, &'m ItAsset>,
}

impl<'m> Prioritizer<'m> {
    /// Fails with [`EngineError::InvalidModel`] if validation reports errors.
    pub fn new(model: &'m Model) -> Result<Self, EngineError> {
        let diagnostics = validate(model);
        if has_errors(&diagnostics) {
            return Err(EngineError::InvalidModel(diagnostics));
        }
        Ok(Prioritizer {
            model,
            graph: ImpactGraph::new(model),
            processes: model.business_processes.iter().map(|p| (p.id.as_str(), p)).collect(),
            assets: model.it_assets.iter().map(|a| (a.id.as_str(), a)).collect(),
        })
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn graph(&self) -> &ImpactGraph<'m> {
        &self.graph
    }

    fn item(&self, item_id: &str) -> Result<&'m DebtItem, EngineError> {
        self.model
            .debt_item(item_id)
            .ok_or_else(|| EngineError::unknown(EntityKind::DebtItem, item_id))
    }

    fn pair_rank(&self, witness: &PairWitness) -> u32 {
        let class = self.processes[witness.bp.as_str()].class;
        let state = self.assets[witness.asset.as_str()].state;
        self.model.rule.rank(group_of(class), state)
    }

    pub fn reachable_pairs(&self, item: &DebtItem) -> Result<BTreeSet<PairWitness>, EngineError> {
        self.graph.reachable_pairs(item)
    }

    pub fn rank_of(&self, item: &DebtItem) -> Result<EffectiveRank, EngineError> {
        Ok(self.rank_with_witnesses(item)?.0)
    }

    fn rank_with_witnesses(&self, item: &DebtItem) -> Result<(EffectiveRank, Vec<PairWitness>, usize), EngineError> {
        let pairs = self.reachable_pairs(item)?;
        let distinct = pairs.iter().map(|w| (&w.asset, &w.bp)).collect::<BTreeSet<_>>().len();
        let Some(best) = pairs.iter().map(|w| self.pair_rank(w)).min() else {
            return Ok((EffectiveRank::Unlinked, Vec::new(), 0));
        };
        let witnesses = pairs.into_iter().filter(|w| self.pair_rank(w) == best).collect();
        Ok((EffectiveRank::Rank(best), witnesses, distinct))
    }

    pub fn prioritize(&self) -> Result<PrioritizedReport, EngineError> {
        let mut groups: BTreeMap<EffectiveRank, Vec<ItemEntry>> = BTreeMap::new();
        for item in &self.model.debt_items {
            let (rank, witnesses, all_pairs_count) = self.rank_with_witnesses(item)?;
            groups.entry(rank).or_default().push(ItemEntry {
                item: item.id.clone(),
                witnesses,
                all_pairs_count,
            });
        }
        Ok(PrioritizedReport {
            groups: groups
                .into_iter()
                .map(|(rank, mut items)| {
                    items.sort_by(|a, b| a.item.cmp(&b.item));
                    PriorityGroup { rank, items }
                })
                .collect(),
        })
    }

    pub fn impact_of(&self, item_id: &str) -> Result<ImpactReport, EngineError> {
        let item = self.item(item_id)?;
        let pairs = self.reachable_pairs(item)?;
        let assets: BTreeSet<&Id> = pairs.iter().map(|w| &w.asset).collect();
        let processes: BTreeSet<&Id> = pairs.iter().map(|w| &w.bp).collect();

        let mut metrics_by_horizon: IndexMap<String, Vec<MetricRef>> =
            self.model.horizons.iter().map(|h| (h.clone(), Vec::new())).collect();
        for metric in &self.model.metrics {
            let reached = if self.processes.contains_key(metric.owner.as_str()) {
                processes.contains(&metric.owner)
            } else {
                assets.contains(&metric.owner)
            };
            if !reached {
                continue;
            }
            if let Some(list) = metrics_by_horizon.get_mut(&metric.horizon) {
                list.push(MetricRef {
                    metric: metric.id.clone(),
                    owner: metric.owner.clone(),
                    name: metric.name.clone(),
                });
            }
        }
        for list in metrics_by_horizon.values_mut() {
            list.sort();
            list.dedup();
        }

        Ok(ImpactReport {
            item: item.id.clone(),
            assets: assets.into_iter().cloned().collect(),
            processes: processes.into_iter().cloned().collect(),
            metrics_by_horizon,
        })
    }
}

pub fn rank_of(model: &Model, item: &DebtItem) -> Result<EffectiveRank, EngineError> {
    Prioritizer::new(model)?.rank_of(item)
}

pub fn prioritize(model: &Model) -> Result<PrioritizedReport, EngineError> {
    Prioritizer::new(model)?.prioritize()
}

pub fn impact_of(model: &Model, item_id: &str) -> Result<ImpactReport, EngineError> {
    Prioritizer::new(model)?.impact_of(item_id)
}

/// Prioritizes a modified copy of `model` and lists every item whose rank
/// changed, ordered by item id. `model` itself is left untouched.
pub fn apply_whatif(model: &Model, overrides: &WhatIfOverrides) -> Result<WhatIfOutcome, EngineError> {
    let before = prioritize(model)?;
    let changed = overrides.apply(model)?;
    let report = prioritize(&changed)?;
    let old_ranks = before.ranks();
    let delta = report
        .ranks()
        .into_iter()
        .filter_map(|(item, new)| {
            let old = old_ranks[&item];
            (old != new).then_some(RankChange { item, old, new })
        })
        .collect();
    Ok(WhatIfOutcome { report, delta })
}
