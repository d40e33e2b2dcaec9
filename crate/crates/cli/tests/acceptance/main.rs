//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use rand::Rng;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;
use tracy_core::ingest::{parse_model, serialize_model};
use tracy_core::render::{
    layout_prioritization_canvas, render_business_value_canvas, render_canvas, CanvasFormat, Selector,
};
use tracy_core::sample::{sales_model, SALES_DOCUMENT};
use tracy_core::{EffectiveRank, Id, Model, PrioritizedReport, Prioritizer, ProcessClass};
use tracy_service::{router, ModelStore};
use tracy_testkit::oracle;
use tracy_testkit::random::{add_random_edge, random_model, rng, Limits};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ids(list: &[&str]) -> Vec<Id> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

fn fixture_groups() -> Verdict {
    let start = Instant::now();
    let model = parse_model(SALES_DOCUMENT.as_bytes())
        .map_err(|e| format!("{e:?}"))?
        .model;
    let report = tracy_core::prioritize(&model).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let got: Vec<(EffectiveRank, Vec<Id>)> = report
        .groups
        .iter()
        .map(|g| (g.rank, g.items.iter().map(|e| e.item.clone()).collect()))
        .collect();
    let expected = vec![
        (EffectiveRank::Rank(0), ids(&["d2", "d5"])),
        (EffectiveRank::Rank(1), ids(&["d3"])),
        (EffectiveRank::Rank(2), ids(&["d1"])),
        (EffectiveRank::Unlinked, ids(&["d4"])),
    ];
    ensure!(got == expected, "groups {got:?}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("[0: d2, d5] [1: d3] [2: d1] [UNLINKED: d4] in {elapsed:.2?}"))
}

fn d3_chain() -> Verdict {
    let model = sales_model();
    let engine = Prioritizer::new(&model).map_err(|e| e.to_string())?;
    let d3 = model.debt_item("d3").ok_or("no d3")?;
    let pairs: BTreeSet<(String, String)> = engine
        .reachable_pairs(d3)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|w| (w.asset.to_string(), w.bp.to_string()))
        .collect();
    let expected: BTreeSet<(String, String)> = [("sales-mobile".to_string(), "sales".to_string())].into();
    ensure!(pairs == expected, "pairs {pairs:?}");
    Ok("{(sales-mobile, sales)}".into())
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let limits = Limits::default();
    let mut items = 0usize;
    for seed in 0..1000u64 {
        let model = random_model(&mut rng(seed), &limits);
        let engine = Prioritizer::new(&model).map_err(|e| format!("seed {seed}: {e}"))?;
        for item in &model.debt_items {
            items += 1;
            let pairs: BTreeSet<_> = engine
                .reachable_pairs(item)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|w| (w.asset, w.bp, w.via_ci, w.origin_ci))
                .collect();
            ensure!(
                pairs == oracle::pairs(&model, item),
                "seed {seed} item {}: pairs differ",
                item.id
            );

            let rank = engine.rank_of(item).map_err(|e| e.to_string())?;
            ensure!(
                rank.value() == oracle::rank(&model, item),
                "seed {seed} item {}: rank {rank}",
                item.id
            );

            let impact = engine.impact_of(item.id.as_str()).map_err(|e| e.to_string())?;
            let expected = oracle::impact(&model, item);
            ensure!(
                impact.assets.iter().cloned().collect::<BTreeSet<_>>() == expected.assets
                    && impact.processes.iter().cloned().collect::<BTreeSet<_>>() == expected.processes,
                "seed {seed} item {}: reached entities differ",
                item.id
            );
            ensure!(
                impact.metrics_by_horizon.keys().eq(model.horizons.iter()),
                "seed {seed}: horizon order"
            );
            for (horizon, refs) in &impact.metrics_by_horizon {
                let got: Vec<(Id, Id)> = refs.iter().map(|m| (m.metric.clone(), m.owner.clone())).collect();
                let want: Vec<(Id, Id)> = expected.metrics[horizon].iter().cloned().collect();
                ensure!(
                    got == want,
                    "seed {seed} item {} {horizon}: {got:?} vs {want:?}",
                    item.id
                );
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("1000 models, {items} items, {elapsed:.2?}"))
}

fn rule_order_isomorphism() -> Verdict {
    let limits = Limits::default();
    for seed in 0..200u64 {
        let mut r = rng(10_000 + seed);
        let model = random_model(&mut r, &limits);
        // f(k) = sum of positive steps up to k: strictly increasing.
        let steps: Vec<u32> = (0..=limits.max_rank).map(|_| r.random_range(1..=7)).collect();
        let offset = r.random_range(0..=20);
        let relabel = |k: u32| offset + steps[..=k as usize].iter().sum::<u32>();
        let mut mapped = model.clone();
        mapped.rule = model.rule.map_ranks(relabel);

        let before = tracy_core::prioritize(&model).map_err(|e| e.to_string())?;
        let after = tracy_core::prioritize(&mapped).map_err(|e| e.to_string())?;
        ensure!(
            before.membership() == after.membership(),
            "seed {seed}: membership changed"
        );
        for (a, b) in before.groups.iter().zip(&after.groups) {
            let expected = match a.rank {
                EffectiveRank::Rank(k) => EffectiveRank::Rank(relabel(k)),
                EffectiveRank::Unlinked => EffectiveRank::Unlinked,
            };
            ensure!(b.rank == expected, "seed {seed}: rank {} became {}", a.rank, b.rank);
        }
    }
    Ok("200 models".into())
}

fn edge_monotonicity() -> Verdict {
    let limits = Limits::default();
    let mut pairs = 0;
    let mut seed = 20_000u64;
    while pairs < 200 {
        seed += 1;
        let mut r = rng(seed);
        let model = random_model(&mut r, &limits);
        let mut grown = model.clone();
        if !(0..32).any(|_| add_random_edge(&mut r, &mut grown)) {
            continue;
        }
        pairs += 1;
        let before = tracy_core::prioritize(&model).map_err(|e| e.to_string())?.ranks();
        let after = tracy_core::prioritize(&grown).map_err(|e| e.to_string())?.ranks();
        for (item, rank) in &before {
            ensure!(
                after[item] <= *rank,
                "seed {seed} item {item}: {rank} -> {}",
                after[item]
            );
        }
    }
    Ok(format!("{pairs} (model, edge) pairs"))
}

fn round_trip() -> Verdict {
    let limits = Limits::default();
    for seed in 0..100u64 {
        let model = random_model(&mut rng(30_000 + seed), &limits);
        let bytes = serialize_model(&model);
        let parsed = parse_model(&bytes).map_err(|e| format!("seed {seed}: {e:?}"))?;
        ensure!(parsed.model == model, "seed {seed}: parse(serialize(m)) != m");
    }
    let fixture = parse_model(SALES_DOCUMENT.as_bytes())
        .map_err(|e| format!("{e:?}"))?
        .model;
    ensure!(
        serialize_model(&fixture) == SALES_DOCUMENT.as_bytes(),
        "fixture document is not reproduced byte for byte"
    );
    Ok("100 models; fixture byte-identical".into())
}

fn impact_of_d2() -> Verdict {
    let report = tracy_core::impact_of(&sales_model(), "d2").map_err(|e| e.to_string())?;
    let at = |h: &str| -> BTreeSet<String> {
        report
            .metrics_by_horizon
            .get(h)
            .map(|refs| refs.iter().map(|m| format!("{}@{}", m.metric, m.owner)).collect())
            .unwrap_or_default()
    };
    let set = |xs: &[&str]| -> BTreeSet<String> { xs.iter().map(|s| s.to_string()).collect() };
    let immediate = set(&[
        "sales-volume@sales",
        "customer-relationship@sales",
        "availability@sales-web",
    ]);
    let short_term = set(&["revenue@sales", "cost@sales-web"]);
    ensure!(at("immediate") == immediate, "immediate {:?}", at("immediate"));
    ensure!(at("short_term") == short_term, "short_term {:?}", at("short_term"));
    Ok("immediate {sales-volume, customer-relationship, availability}; short_term {revenue, cost}".into())
}

fn canvas_invariants() -> Verdict {
    let limits = Limits::default();
    let mut models = vec![sales_model()];
    models.extend((0..100u64).map(|seed| random_model(&mut rng(40_000 + seed), &limits)));
    for (n, model) in models.iter().enumerate() {
        let layout = layout_prioritization_canvas(model).map_err(|e| e.to_string())?;
        let q = &layout.quadrants;
        let sorted = |v: &[Id]| -> Vec<Id> {
            let mut v = v.to_vec();
            v.sort();
            v
        };
        let mut processes: Vec<Id> = q.core_support.iter().chain(&q.other).cloned().collect();
        processes.sort();
        ensure!(
            processes
                == sorted(
                    &model
                        .business_processes
                        .iter()
                        .map(|p| p.id.clone())
                        .collect::<Vec<_>>()
                ),
            "model {n}: processes not partitioned"
        );
        ensure!(
            processes.windows(2).all(|w| w[0] != w[1]),
            "model {n}: a process appears twice"
        );
        for p in &model.business_processes {
            let in_core = q.core_support.contains(&p.id);
            ensure!(
                in_core == (p.class != ProcessClass::Other),
                "model {n}: {} in wrong cell",
                p.id
            );
        }
        let mut assets: Vec<Id> = q.operational.iter().chain(&q.to_be_operational).cloned().collect();
        assets.sort();
        ensure!(
            assets == sorted(&model.it_assets.iter().map(|a| a.id.clone()).collect::<Vec<_>>()),
            "model {n}: assets not partitioned"
        );
        ensure!(
            assets.windows(2).all(|w| w[0] != w[1]),
            "model {n}: an asset appears twice"
        );

        let mut drawn: Vec<(Id, Id)> = layout
            .edges
            .iter()
            .map(|e| (e.asset.clone(), e.process.clone()))
            .collect();
        drawn.sort();
        let mut declared = model.edges.asset_supports_bp.clone();
        declared.sort();
        ensure!(drawn == declared, "model {n}: edges {drawn:?} vs {declared:?}");

        let dot = String::from_utf8(render_canvas(&layout, CanvasFormat::Dot)).map_err(|e| e.to_string())?;
        graphviz_rust::parse(&dot).map_err(|e| format!("model {n}: canvas DOT: {e}"))?;
        let value =
            render_business_value_canvas(model, &Selector::All, CanvasFormat::Dot).map_err(|e| e.to_string())?;
        graphviz_rust::parse(&String::from_utf8(value).map_err(|e| e.to_string())?)
            .map_err(|e| format!("model {n}: value DOT: {e}"))?;
    }
    Ok("fixture + 100 models; DOT parses".into())
}

struct CliRun {
    code: Option<i32>,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn tracy(args: &[&str]) -> Result<CliRun, String> {
    let output = Command::new(env!("CARGO_BIN_EXE_tracy"))
        .args(args)
        .env("TRACY_NO_COLOR", "1")
        .output()
        .map_err(|e| e.to_string())?;
    Ok(CliRun {
        code: output.status.code(),
        stdout: output.stdout,
        stderr: output.stderr,
    })
}

fn write_import_inputs(dir: &Path) -> Result<(String, String), String> {
    let export = dir.join("export.json");
    let mapping = dir.join("mapping.json");
    let issues = json!([
        { "id": 7, "title": "Offers service retries", "labels": ["tech-debt", "ci:offers-ci"] },
        { "id": 8, "title": "Unrelated", "labels": ["bug"] }
    ]);
    fs::write(&export, issues.to_string()).map_err(|e| e.to_string())?;
    fs::write(
        &mapping,
        json!({ "label_filter": ["tech-debt"], "ci_label_prefix": "ci:" }).to_string(),
    )
    .map_err(|e| e.to_string())?;
    Ok((export.display().to_string(), mapping.display().to_string()))
}

fn cli_determinism() -> Verdict {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let path = dir.path().join("sales.json");
    fs::write(&path, SALES_DOCUMENT).map_err(|e| e.to_string())?;
    let (export, mapping) = write_import_inputs(dir.path())?;
    let p = path.to_str().ok_or("path")?;
    let mut commands: Vec<Vec<&str>> = vec![
        vec!["validate", p],
        vec!["prioritize", p],
        vec!["prioritize", p, "--impact"],
        vec!["impact", p, "--item", "d2"],
        vec![
            "whatif",
            p,
            "--asset",
            "sales-mobile=operational",
            "--bp",
            "offers=core",
        ],
        vec!["import-issues", p, &export, "--mapping", &mapping],
        vec!["canvas", p, "--kind", "business-value", "--entity", "sales"],
    ];
    for format in ["table", "json", "csv"] {
        commands.push(vec!["prioritize", p, "--format", format]);
    }
    for kind in ["prioritization", "business-value"] {
        for format in ["text", "dot", "json"] {
            commands.push(vec!["canvas", p, "--kind", kind, "--format", format]);
        }
    }
    for args in &commands {
        let a = tracy(args)?;
        let b = tracy(args)?;
        ensure!(
            a.code == Some(0),
            "{args:?} exited {:?}: {}",
            a.code,
            String::from_utf8_lossy(&a.stderr)
        );
        ensure!(
            a.stdout == b.stdout && a.stderr == b.stderr,
            "{args:?} output differs between runs"
        );
        ensure!(!a.stdout.is_empty(), "{args:?} printed nothing");
    }
    let after = fs::read(&path).map_err(|e| e.to_string())?;
    ensure!(after == SALES_DOCUMENT.as_bytes(), "model file changed");
    Ok(format!("{} invocations twice each; file unchanged", commands.len()))
}

async fn call(app: &axum::Router, request: Request<Body>) -> Result<(StatusCode, Vec<u8>), String> {
    let response = app.clone().oneshot(request).await.map_err(|e| e.to_string())?;
    let status = response.status();
    let body = response
        .into_body()
        .collect()
        .await
        .map_err(|e| e.to_string())?
        .to_bytes()
        .to_vec();
    Ok((status, body))
}

async fn service_checks(dir: &Path) -> Verdict {
    let path = dir.join("sales.json");
    fs::write(&path, SALES_DOCUMENT).map_err(|e| e.to_string())?;
    let store = Arc::new(ModelStore::open(&path).map_err(|e| e.to_string())?);
    let app = router(Arc::clone(&store), None);

    let (status, body) = call(&app, Request::get("/api/state").body(Body::empty()).unwrap()).await?;
    ensure!(status == StatusCode::OK, "GET /api/state: {status}");
    let state: Value = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
    let revision = state["revision"].as_str().ok_or("no revision")?.to_string();

    let mut edited: Model = sales_model();
    edited.debt_items[0].title = "Edited".into();
    let stale = Request::put("/api/model")
        .header(header::IF_MATCH, "\"0000\"")
        .body(Body::from(serialize_model(&edited)))
        .unwrap();
    let (status, _) = call(&app, stale).await?;
    ensure!(status == StatusCode::CONFLICT, "stale PUT returned {status}");
    ensure!(
        fs::read(&path).map_err(|e| e.to_string())? == SALES_DOCUMENT.as_bytes(),
        "stale PUT changed the file"
    );

    let whatif = json!({
        "base_revision": revision,
        "overrides": { "asset_state_changes": { "sales-mobile": "operational" } }
    });
    let request = Request::post("/api/whatif")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(whatif.to_string()))
        .unwrap();
    let (status, body) = call(&app, request).await?;
    ensure!(status == StatusCode::OK, "what-if returned {status}");
    let outcome: Value = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
    ensure!(
        outcome["delta"] == json!([{ "item": "d3", "old": 1, "new": 0 }]),
        "delta {}",
        outcome["delta"]
    );
    ensure!(
        fs::read(&path).map_err(|e| e.to_string())? == SALES_DOCUMENT.as_bytes(),
        "what-if changed the file"
    );

    let cli = tracy(&["prioritize", path.to_str().ok_or("path")?, "--format", "json"])?;
    ensure!(cli.code == Some(0), "CLI exited {:?}", cli.code);
    let cli_report: Value = serde_json::from_slice(&cli.stdout).map_err(|e| e.to_string())?;
    ensure!(
        state["report"] == cli_report,
        "GET /api/state report differs from CLI output"
    );
    let typed: PrioritizedReport = serde_json::from_value(cli_report).map_err(|e| e.to_string())?;
    ensure!(
        typed == store.snapshot().report,
        "CLI report differs from the service snapshot"
    );
    Ok("409 on stale PUT, delta [(d3, 1, 0)], state report == CLI json".into())
}

fn service_contract() -> Verdict {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    runtime.block_on(service_checks(dir.path()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fixture prioritization groups", fixture_groups),
        ("d3 reaches exactly (sales-mobile, sales)", d3_chain),
        ("oracle equivalence on random models", oracle_equivalence),
        ("rule order-isomorphism", rule_order_isomorphism),
        ("edge monotonicity", edge_monotonicity),
        ("document round-trip", round_trip),
        ("impact of d2 by horizon", impact_of_d2),
        ("canvas invariants", canvas_invariants),
        ("CLI determinism", cli_determinism),
        ("service contract", service_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
