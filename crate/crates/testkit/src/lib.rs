//! Shared test support: the hand-built sales fixture, a seeded random model
//! generator and brute-force oracles.
//!
//! The oracles only read the model's plain data (entity lists and edge
//! lists). They never call into the engine's graph or prioritizer code.

pub mod oracle;
pub mod random;

use std::collections::BTreeSet;

use tracy_core::model::{
    AssetState, BusinessProcess, ConfigurationItem, DebtItem, EdgeSet, Id, ItAsset, Metric, Model, ProcessClass,
};

pub fn id(s: &str) -> Id {
    Id::new(s).expect("test id")
}

fn pairs(list: &[(&str, &str)]) -> Vec<(Id, Id)> {
    list.iter().map(|(a, b)| (id(a), id(b))).collect()
}

fn cis(list: &[&str]) -> BTreeSet<Id> {
    list.iter().map(|s| id(s)).collect()
}

/// The canonical sales fixture, built field by field.
pub fn fixture() -> Model {
    let process = |i: &str, name: &str, class| BusinessProcess {
        id: id(i),
        name: name.into(),
        class,
    };
    let asset = |i: &str, name: &str, state| ItAsset {
        id: id(i),
        name: name.into(),
        state,
    };
    let ci = |i: &str, name: &str, kind: &str| ConfigurationItem {
        id: id(i),
        name: name.into(),
        kind: Some(kind.into()),
    };
    let debt = |i: &str, title: &str, debt_type: &str, affected: &[&str]| DebtItem {
        id: id(i),
        title: title.into(),
        debt_type: Some(debt_type.into()),
        affected_cis: cis(affected),
        source: None,
    };
    let metric = |i: &str, name: &str, owner: &str, horizon: &str| Metric {
        id: id(i),
        name: name.into(),
        owner: id(owner),
        horizon: horizon.into(),
    };
    Model {
        business_processes: vec![
            process("offers", "Send offers to customers", ProcessClass::Other),
            process("payment", "Payment", ProcessClass::Support),
            process("sales", "Sales", ProcessClass::Core),
        ],
        it_assets: vec![
            asset("offers-svc", "Offers service", AssetState::Operational),
            asset("sales-mobile", "SalesMobile", AssetState::ToBeOperational),
            asset("sales-web", "Sales web", AssetState::Operational),
        ],
        configuration_items: vec![
            ci("auth-svc", "Auth service", "service"),
            ci("offers-ci", "Offers engine", "module"),
            ci("orders-db", "Orders database", "database"),
            ci("sales-api", "Sales API", "service"),
            ci("sales-app", "Sales App", "application"),
        ],
        debt_items: vec![
            debt("d1", "Offer templates are copy-pasted", "code", &["offers-ci"]),
            debt("d2", "Sales API lacks integration tests", "test", &["sales-api"]),
            debt("d3", "Sales App bundles an outdated UI kit", "ux", &["sales-app"]),
            debt(
                "d4",
                "Orders database has no index on customer",
                "database",
                &["orders-db"],
            ),
            debt(
                "d5",
                "Auth service stores plain session tokens",
                "security",
                &["auth-svc"],
            ),
        ],
        metrics: vec![
            metric("availability", "Availability", "sales-web", "immediate"),
            metric("cost", "Cost", "sales-web", "short_term"),
            metric("customer-relationship", "Customer relationship", "sales", "immediate"),
            metric(
                "planned-sales-volume-increase",
                "Planned increased sales volume",
                "sales",
                "long_term",
            ),
            metric("revenue", "Revenue", "sales", "short_term"),
            metric("sales-volume", "Sales volume", "sales", "immediate"),
        ],
        edges: EdgeSet {
            ci_depends_on: pairs(&[("sales-api", "auth-svc"), ("sales-app", "sales-api")]),
            ci_supports_asset: pairs(&[
                ("offers-ci", "offers-svc"),
                ("sales-api", "sales-web"),
                ("sales-app", "sales-mobile"),
            ]),
            asset_supports_bp: pairs(&[
                ("offers-svc", "offers"),
                ("sales-mobile", "sales"),
                ("sales-web", "sales"),
            ]),
        },
        ..Model::default()
    }
}
