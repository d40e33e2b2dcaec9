//! Exhaustive path enumeration.
//!
//! Every simple path through the dependency edges (walked from dependency to
//! dependent) is enumerated explicitly; nothing is memoized or indexed.

use std::collections::{BTreeMap, BTreeSet};

use tracy_core::model::{AssetState, DebtItem, Id, Model, ProcessClass};

/// (asset, process, via configuration item, origin configuration item)
pub type Witness = (Id, Id, Id, Id);

/// All simple paths starting at `origin`, each as a node list.
pub fn simple_paths(model: &Model, origin: &Id) -> Vec<Vec<Id>> {
    fn extend(model: &Model, path: &mut Vec<Id>, out: &mut Vec<Vec<Id>>) {
        out.push(path.clone());
        let last = path.last().expect("path is nonempty").clone();
        for (dependent, dependency) in &model.edges.ci_depends_on {
            if *dependency == last && !path.contains(dependent) {
                path.push(dependent.clone());
                extend(model, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(model, &mut vec![origin.clone()], &mut out);
    out
}

pub fn pairs(model: &Model, item: &DebtItem) -> BTreeSet<Witness> {
    let mut out = BTreeSet::new();
    for origin in &item.affected_cis {
        for path in simple_paths(model, origin) {
            let via = path.last().expect("path is nonempty");
            for (ci, asset) in &model.edges.ci_supports_asset {
                if ci != via {
                    continue;
                }
                for (supporting, bp) in &model.edges.asset_supports_bp {
                    if supporting == asset {
                        out.insert((asset.clone(), bp.clone(), via.clone(), origin.clone()));
                    }
                }
            }
        }
    }
    out
}

fn cell_rank(model: &Model, asset: &Id, bp: &Id) -> u32 {
    let class = model
        .business_processes
        .iter()
        .find(|p| &p.id == bp)
        .expect("process exists")
        .class;
    let state = model
        .it_assets
        .iter()
        .find(|a| &a.id == asset)
        .expect("asset exists")
        .state;
    let key = format!(
        "{}.{}",
        match class {
            ProcessClass::Core | ProcessClass::Support => "core_support",
            ProcessClass::Other => "other",
        },
        match state {
            AssetState::Operational => "operational",
            AssetState::ToBeOperational => "to_be_operational",
        }
    );
    rule_cells(model)[&key]
}

/// The rule as a plain key -> rank map.
fn rule_cells(model: &Model) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for (group, state, rank) in model.rule.entries() {
        out.insert(format!("{}.{}", group.as_str(), state.as_str()), rank);
    }
    out
}

/// `None` means nothing is reachable.
pub fn rank(model: &Model, item: &DebtItem) -> Option<u32> {
    pairs(model, item)
        .iter()
        .map(|(asset, bp, _, _)| cell_rank(model, asset, bp))
        .min()
}

/// Item ids grouped by rank, `None` last.
pub fn groups(model: &Model) -> Vec<(Option<u32>, Vec<Id>)> {
    let mut by_rank: BTreeMap<(bool, u32), Vec<Id>> = BTreeMap::new();
    for item in &model.debt_items {
        let key = match rank(model, item) {
            Some(r) => (false, r),
            None => (true, 0),
        };
        by_rank.entry(key).or_default().push(item.id.clone());
    }
    by_rank
        .into_iter()
        .map(|((unlinked, r), mut ids)| {
            ids.sort();
            ((!unlinked).then_some(r), ids)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Impact {
    pub assets: BTreeSet<Id>,
    pub processes: BTreeSet<Id>,
    /// horizon -> {(metric, owner)}
    pub metrics: BTreeMap<String, BTreeSet<(Id, Id)>>,
}

pub fn impact(model: &Model, item: &DebtItem) -> Impact {
    let reached = pairs(model, item);
    let assets: BTreeSet<Id> = reached.iter().map(|w| w.0.clone()).collect();
    let processes: BTreeSet<Id> = reached.iter().map(|w| w.1.clone()).collect();
    let mut metrics: BTreeMap<String, BTreeSet<(Id, Id)>> =
        model.horizons.iter().map(|h| (h.clone(), BTreeSet::new())).collect();
    for metric in &model.metrics {
        let owner_is_process = model.business_processes.iter().any(|p| p.id == metric.owner);
        let hit = if owner_is_process {
            processes.contains(&metric.owner)
        } else {
            assets.contains(&metric.owner)
        };
        if hit {
            metrics
                .entry(metric.horizon.clone())
                .or_default()
                .insert((metric.id.clone(), metric.owner.clone()));
        }
    }
    Impact {
        assets,
        processes,
        metrics,
    }
}
