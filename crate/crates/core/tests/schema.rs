//! The schema files under `schemas/` must describe what the serializer writes.

use std::collections::BTreeSet;

use serde_json::Value;
use tracy_core::ingest::{serialize_model, ImportMapping};
use tracy_core::sample::sales_model;
use tracy_core::{AssetState, ProcessClass};
use tracy_testkit::random::{random_model, rng, Limits};

fn schema(name: &str) -> Value {
    let path = format!("{}/../../schemas/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

fn strings(v: &Value) -> BTreeSet<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn model_schema_matches_serialized_keys() {
    let schema = schema("model.schema.json");
    let doc: Value = serde_json::from_slice(&serialize_model(&sales_model())).unwrap();
    assert_eq!(keys(&schema["properties"]), keys(&doc));
    let defs = &schema["$defs"];
    for (list, def) in [
        ("business_processes", "business_process"),
        ("it_assets", "it_asset"),
        ("configuration_items", "configuration_item"),
        ("debt_items", "debt_item"),
        ("metrics", "metric"),
    ] {
        let allowed = keys(&defs[def]["properties"]);
        let required = strings(&defs[def]["required"]);
        for entry in doc[list].as_array().unwrap() {
            let present = keys(entry);
            assert!(present.is_subset(&allowed), "{def}: {present:?}");
            assert!(required.is_subset(&present), "{def}: {present:?}");
        }
    }
    assert_eq!(keys(&defs["edges"]["properties"]), keys(&doc["edges"]));
    assert_eq!(keys(&defs["rule"]["properties"]), keys(&doc["rule"]));
}

#[test]
fn model_schema_enums_match_types() {
    let defs = &schema("model.schema.json")["$defs"];
    let classes: BTreeSet<String> = ProcessClass::ALL.iter().map(|c| c.as_str().to_string()).collect();
    assert_eq!(
        strings(&defs["business_process"]["properties"]["class"]["enum"]),
        classes
    );
    let states: BTreeSet<String> = AssetState::ALL.iter().map(|s| s.as_str().to_string()).collect();
    assert_eq!(strings(&defs["it_asset"]["properties"]["state"]["enum"]), states);
}

#[test]
fn optional_fields_appear_in_random_documents() {
    let schema = schema("model.schema.json");
    let allowed = keys(&schema["$defs"]["debt_item"]["properties"]);
    for seed in 0..20 {
        let doc: Value =
            serde_json::from_slice(&serialize_model(&random_model(&mut rng(seed), &Limits::default()))).unwrap();
        for item in doc["debt_items"].as_array().unwrap() {
            assert!(keys(item).is_subset(&allowed));
        }
    }
}

#[test]
fn mapping_schema_matches_type() {
    let schema = schema("import-mapping.schema.json");
    let mapping: Value = serde_json::to_value(ImportMapping::new(["tech-debt"], "ci:")).unwrap();
    assert_eq!(keys(&schema["properties"]), keys(&mapping));
    assert_eq!(schema["properties"]["id_prefix"]["default"], mapping["id_prefix"]);
}
