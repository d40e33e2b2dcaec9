//! Impact propagation over the configuration-item dependency graph.
//!
//! Debt in a configuration item hurts every item that (transitively) depends
//! on it. Any of those that supports an IT asset carries the impact on to the
//! asset and from there to every business process the asset supports.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EntityKind};
use crate::model::{DebtItem, Id, Model};

/// One (asset, process) pair reached by a debt item, with the path that
/// reaches it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairWitness {
    pub asset: Id,
    pub bp: Id,
    /// The configuration item on the path that directly supports `asset`.
    pub via_ci: Id,
    /// The affected configuration item the path starts from.
    pub origin_ci: Id,
}

impl Ord for PairWitness {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.asset, &self.bp, &self.origin_ci, &self.via_ci).cmp(&(
            &other.asset,
            &other.bp,
            &other.origin_ci,
            &other.via_ci,
        ))
    }
}

impl PartialOrd for PairWitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Adjacency index over a model, built once and queried many times.
#[derive(Debug)]
pub struct ImpactGraph<'m> {
    cis: BTreeSet<&'m str>,
    /// dependency -> configuration items depending on it
    dependents: BTreeMap<&'m str, Vec<&'m Id>>,
    /// configuration item -> assets it supports
    supported_assets: BTreeMap<&'m str, Vec<&'m Id>>,
    /// asset -> processes it supports
    supported_processes: BTreeMap<&'m str, Vec<&'m Id>>,
}

impl<'m> ImpactGraph<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut dependents: BTreeMap<&str, Vec<&Id>> = BTreeMap::new();
        for (dependent, dependency) in &model.edges.ci_depends_on {
            dependents.entry(dependency.as_str()).or_default().push(dependent);
        }
        let mut supported_assets: BTreeMap<&str, Vec<&Id>> = BTreeMap::new();
        for (ci, asset) in &model.edges.ci_supports_asset {
            supported_assets.entry(ci.as_str()).or_default().push(asset);
        }
        let mut supported_processes: BTreeMap<&str, Vec<&Id>> = BTreeMap::new();
        for (asset, bp) in &model.edges.asset_supports_bp {
            supported_processes.entry(asset.as_str()).or_default().push(bp);
        }
        ImpactGraph {
            cis: model.configuration_items.iter().map(|c| c.id.as_str()).collect(),
            dependents,
            supported_assets,
            supported_processes,
        }
    }

    /// The configuration item itself plus everything that transitively
    /// depends on it. Terminates on cyclic graphs.
    pub fn upstream_closure(&self, ci: &str) -> Result<BTreeSet<Id>, EngineError> {
        if !self.cis.contains(ci) {
            return Err(EngineError::unknown(EntityKind::ConfigurationItem, ci));
        }
        Ok(self.closure_unchecked(ci))
    }

    fn closure_unchecked(&self, ci: &str) -> BTreeSet<Id> {
        let mut seen: BTreeSet<&str> = BTreeSet::from([ci]);
        let mut stack = vec![ci];
        while let Some(next) = stack.pop() {
            for dependent in self.dependents.get(next).into_iter().flatten() {
                if seen.insert(dependent.as_str()) {
                    stack.push(dependent.as_str());
                }
            }
        }
        seen.into_iter()
            .map(|s| Id::new(s).expect("model ids are valid"))
            .collect()
    }

    /// Witnesses for every (asset, process) pair the item reaches.
    pub fn reachable_pairs(&self, item: &DebtItem) -> Result<BTreeSet<PairWitness>, EngineError> {
        let mut pairs = BTreeSet::new();
        for origin in &item.affected_cis {
            for via in self.upstream_closure(origin.as_str())? {
                for asset in self.supported_assets.get(via.as_str()).into_iter().flatten() {
                    for bp in self.supported_processes.get(asset.as_str()).into_iter().flatten() {
                        pairs.insert(PairWitness {
                            asset: (*asset).clone(),
                            bp: (*bp).clone(),
                            via_ci: via.clone(),
                            origin_ci: origin.clone(),
                        });
                    }
                }
            }
        }
        Ok(pairs)
    }

    /// Assets reachable from a configuration item, whether or not they
    /// support any process.
    pub fn assets_reached_from(&self, ci: &Id) -> BTreeSet<&'m Id> {
        self.closure_unchecked(ci.as_str())
            .iter()
            .flat_map(|via| self.supported_assets.get(via.as_str()).into_iter().flatten())
            .copied()
            .collect()
    }
}

pub fn upstream_closure(model: &Model, ci: &str) -> Result<BTreeSet<Id>, EngineError> {
    ImpactGraph::new(model).upstream_closure(ci)
}

pub fn reachable_pairs(model: &Model, item: &DebtItem) -> Result<BTreeSet<PairWitness>, EngineError> {
    ImpactGraph::new(model).reachable_pairs(item)
}

/// Reports each dependency cycle once.
///
/// Every strongly connected component with two or more members, or a single
/// member depending on itself, becomes one entry. Members are listed in
/// depth-first order starting from the smallest id and following successors
/// in id order, so a simple cycle comes out as its rotation beginning at the
/// smallest id.
pub fn detect_cycles(model: &Model) -> Vec<Vec<Id>> {
    let mut graph: DiGraphMap<&str, ()> = DiGraphMap::new();
    for ci in &model.configuration_items {
        graph.add_node(ci.id.as_str());
    }
    for (from, to) in &model.edges.ci_depends_on {
        graph.add_edge(from.as_str(), to.as_str(), ());
    }

    let mut cycles: Vec<Vec<Id>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let members: BTreeSet<&str> = scc.into_iter().collect();
            let start = *members.iter().next().expect("scc is nonempty");
            let mut order = Vec::with_capacity(members.len());
            let mut visited = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(node) = stack.pop() {
                if !visited.insert(node) {
                    continue;
                }
                order.push(Id::new(node).expect("model ids are valid"));
                let mut next: Vec<&str> = graph
                    .neighbors(node)
                    .filter(|n| members.contains(n) && !visited.contains(n))
                    .collect();
                next.sort_unstable_by(|a, b| b.cmp(a));
                stack.extend(next);
            }
            order
        })
        .collect();
    cycles.sort();
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConfigurationItem;

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    fn ci_model(names: &[&str], depends: &[(&str, &str)]) -> Model {
        Model {
            configuration_items: names
                .iter()
                .map(|n| ConfigurationItem {
                    id: id(n),
                    name: n.to_string(),
                    kind: None,
                })
                .collect(),
            edges: crate::model::EdgeSet {
                ci_depends_on: depends.iter().map(|(a, b)| (id(a), id(b))).collect(),
                ..Default::default()
            },
            ..Model::default()
        }
    }

    fn ids(list: &[&str]) -> BTreeSet<Id> {
        list.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn closure_of_isolated_node_is_itself() {
        let model = ci_model(&["orders-db"], &[]);
        assert_eq!(upstream_closure(&model, "orders-db").unwrap(), ids(&["orders-db"]));
    }

    #[test]
    fn closure_follows_dependents() {
        let model = ci_model(
            &["sales-app", "sales-api", "auth-svc"],
            &[("sales-app", "sales-api"), ("sales-api", "auth-svc")],
        );
        assert_eq!(
            upstream_closure(&model, "auth-svc").unwrap(),
            ids(&["auth-svc", "sales-api", "sales-app"])
        );
        assert_eq!(upstream_closure(&model, "sales-app").unwrap(), ids(&["sales-app"]));
    }

    #[test]
    fn closure_terminates_on_two_cycle() {
        let model = ci_model(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert_eq!(upstream_closure(&model, "a").unwrap(), ids(&["a", "b"]));
        assert_eq!(upstream_closure(&model, "b").unwrap(), ids(&["a", "b"]));
    }

    #[test]
    fn closure_of_unknown_ci_fails() {
        let model = ci_model(&["a"], &[]);
        assert_eq!(
            upstream_closure(&model, "ghost"),
            Err(EngineError::unknown(EntityKind::ConfigurationItem, "ghost"))
        );
    }

    #[test]
    fn acyclic_graph_has_no_cycles() {
        let model = ci_model(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert!(detect_cycles(&model).is_empty());
    }

    #[test]
    fn two_cycle_reported_once() {
        let model = ci_model(&["a", "b"], &[("b", "a"), ("a", "b")]);
        assert_eq!(detect_cycles(&model), vec![vec![id("a"), id("b")]]);
    }

    #[test]
    fn three_cycle_with_tail() {
        let model = ci_model(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "a"), ("d", "a")]);
        assert_eq!(detect_cycles(&model), vec![vec![id("a"), id("b"), id("c")]]);
    }

    #[test]
    fn rotation_starts_at_smallest_id() {
        let model = ci_model(&["x", "m", "q"], &[("x", "q"), ("q", "m"), ("m", "x")]);
        assert_eq!(detect_cycles(&model), vec![vec![id("m"), id("x"), id("q")]]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let model = ci_model(&["a", "b"], &[("a", "a"), ("a", "b")]);
        assert_eq!(detect_cycles(&model), vec![vec![id("a")]]);
    }

    #[test]
    fn disjoint_cycles_sorted() {
        let model = ci_model(&["a", "b", "c", "d"], &[("d", "c"), ("c", "d"), ("b", "a"), ("a", "b")]);
        assert_eq!(
            detect_cycles(&model),
            vec![vec![id("a"), id("b")], vec![id("c"), id("d")]]
        );
    }
}
