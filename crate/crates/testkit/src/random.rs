//! Seeded random models within small size limits.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracy_core::model::{
    AssetState, BusinessProcess, ConfigurationItem, DebtItem, Id, ItAsset, Metric, Model, PrioritizationRule,
    ProcessClass,
};

use crate::id;

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_cis: usize,
    pub max_assets: usize,
    pub max_processes: usize,
    pub max_edges: usize,
    pub max_items: usize,
    pub max_metrics: usize,
    pub max_rank: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cis: 12,
            max_assets: 5,
            max_processes: 5,
            max_edges: 15,
            max_items: 10,
            max_metrics: 8,
            max_rank: 4,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NAMES: [&str; 6] = [
    "Sales",
    "Billing",
    "Caf\u{e9} orders",
    "Ops \"core\"",
    "x",
    "Stock, incoming",
];

fn name(rng: &mut impl RngCore) -> String {
    NAMES.choose(rng).expect("nonempty").to_string()
}

pub fn random_rule(rng: &mut impl RngCore, max_rank: u32) -> PrioritizationRule {
    let mut draw = || rng.random_range(0..=max_rank);
    PrioritizationRule::new(draw(), draw(), draw(), draw())
}

/// A valid, canonical (sorted) model. Dependency cycles may occur; self
/// dependencies and duplicate edges never do.
pub fn random_model(rng: &mut impl RngCore, limits: &Limits) -> Model {
    let ci_ids: Vec<Id> = (0..rng.random_range(1..=limits.max_cis))
        .map(|i| id(&format!("ci-{i:02}")))
        .collect();
    let asset_ids: Vec<Id> = (0..rng.random_range(0..=limits.max_assets))
        .map(|i| id(&format!("as-{i}")))
        .collect();
    let process_ids: Vec<Id> = (0..rng.random_range(0..=limits.max_processes))
        .map(|i| id(&format!("bp-{i}")))
        .collect();

    let mut depends = BTreeSet::new();
    let mut supports_asset = BTreeSet::new();
    let mut supports_bp = BTreeSet::new();
    for _ in 0..rng.random_range(0..=limits.max_edges) {
        match rng.random_range(0..3) {
            0 => {
                let a = ci_ids.choose(rng).expect("at least one ci");
                let b = ci_ids.choose(rng).expect("at least one ci");
                if a != b {
                    depends.insert((a.clone(), b.clone()));
                }
            }
            1 => {
                if let Some(asset) = asset_ids.choose(rng) {
                    let ci = ci_ids.choose(rng).expect("at least one ci");
                    supports_asset.insert((ci.clone(), asset.clone()));
                }
            }
            _ => {
                if let (Some(asset), Some(bp)) = (asset_ids.choose(rng), process_ids.choose(rng)) {
                    supports_bp.insert((asset.clone(), bp.clone()));
                }
            }
        }
    }

    let mut model = Model {
        business_processes: process_ids
            .iter()
            .map(|i| BusinessProcess {
                id: i.clone(),
                name: name(rng),
                class: *ProcessClass::ALL.choose(rng).expect("nonempty"),
            })
            .collect(),
        it_assets: asset_ids
            .iter()
            .map(|i| ItAsset {
                id: i.clone(),
                name: name(rng),
                state: *AssetState::ALL.choose(rng).expect("nonempty"),
            })
            .collect(),
        configuration_items: ci_ids
            .iter()
            .map(|i| ConfigurationItem {
                id: i.clone(),
                name: name(rng),
                kind: rng.random_bool(0.5).then(|| "module".to_string()),
            })
            .collect(),
        rule: random_rule(rng, limits.max_rank),
        ..Model::default()
    };
    model.edges.ci_depends_on = depends.into_iter().collect();
    model.edges.ci_supports_asset = supports_asset.into_iter().collect();
    model.edges.asset_supports_bp = supports_bp.into_iter().collect();

    for i in 0..rng.random_range(0..=limits.max_items) {
        let affected: BTreeSet<Id> = (0..rng.random_range(1..=3))
            .map(|_| ci_ids.choose(rng).expect("at least one ci").clone())
            .collect();
        model.debt_items.push(DebtItem {
            id: id(&format!("d{i:02}")),
            title: name(rng),
            debt_type: rng.random_bool(0.5).then(|| "architectural".to_string()),
            affected_cis: affected,
            source: rng.random_bool(0.3).then(|| format!("#{i}")),
        });
    }

    let owners: Vec<&Id> = process_ids.iter().chain(&asset_ids).collect();
    if !owners.is_empty() {
        for i in 0..rng.random_range(0..=limits.max_metrics) {
            let horizon = model.horizons.choose(rng).expect("default horizons").clone();
            model.metrics.push(Metric {
                id: id(&format!("m{i:02}")),
                name: name(rng),
                owner: (*owners.choose(rng).expect("nonempty")).clone(),
                horizon,
            });
        }
    }
    model.canonicalized()
}

/// Adds one edge not already present. Returns false if the attempt drew an
/// impossible or duplicate edge.
pub fn add_random_edge(rng: &mut impl RngCore, model: &mut Model) -> bool {
    let cis: Vec<Id> = model.configuration_items.iter().map(|c| c.id.clone()).collect();
    let assets: Vec<Id> = model.it_assets.iter().map(|a| a.id.clone()).collect();
    let processes: Vec<Id> = model.business_processes.iter().map(|p| p.id.clone()).collect();
    let (list, pair) = match rng.random_range(0..3) {
        0 => {
            let (a, b) = (cis.choose(rng).cloned(), cis.choose(rng).cloned());
            match (a, b) {
                (Some(a), Some(b)) if a != b => (&mut model.edges.ci_depends_on, (a, b)),
                _ => return false,
            }
        }
        1 => match (cis.choose(rng).cloned(), assets.choose(rng).cloned()) {
            (Some(c), Some(a)) => (&mut model.edges.ci_supports_asset, (c, a)),
            _ => return false,
        },
        _ => match (assets.choose(rng).cloned(), processes.choose(rng).cloned()) {
            (Some(a), Some(b)) => (&mut model.edges.asset_supports_bp, (a, b)),
            _ => return false,
        },
    };
    if list.contains(&pair) {
        return false;
    }
    list.push(pair);
    list.sort();
    true
}
