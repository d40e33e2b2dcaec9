//! Workloads for the engine benchmarks.

use tracy_core::Model;
use tracy_testkit::random::{random_model, rng, Limits};

/// Seeded model whose entity counts scale with `scale`; `scale = 1` matches
/// the property-test limits.
pub fn workload(scale: usize, seed: u64) -> Model {
    let limits = Limits {
        max_cis: 12 * scale,
        max_assets: 5 * scale,
        max_processes: 5 * scale,
        max_edges: 15 * scale,
        max_items: 10 * scale,
        max_metrics: 8 * scale,
        max_rank: 4,
    };
    random_model(&mut rng(seed), &limits)
}

/// Sizes exercised by the benches.
pub const SCALES: [usize; 3] = [1, 8, 64];
