//! Edge cache sizing and what it costs in storage.
//!
//! `cargo run --example storage_plan`

use fcdn::harness::{ExperimentConfig, Scenario};
use fcdn::placement::storage_report;
use fcdn::Algorithm;

fn main() -> fcdn::Result<()> {
    let mut cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/geant_grid.toml"))?;
    cfg.trials = 1;
    let s = Scenario::prepare(cfg)?;
    let placement = s.placement(Algorithm::Pop, 2, 6, 0)?;
    let plan = s.cache_plan(&placement, 0)?;

    for e in plan.edges() {
        println!(
            "edge {:>3} capacity {:>8.0} MB holds {:>4} items ({:.0} MB)",
            s.graph.id(e.node),
            e.capacity_mb,
            e.items.len(),
            e.stored_mb(&s.catalogue)
        );
    }
    let r = storage_report(&plan, &s.catalogue);
    println!(
        "full replication {:.0} MB, stored {:.0} MB ({:.1}%), advertised but not stored {:.0} MB",
        r.theoretical_mb,
        r.cached_mb,
        100.0 * r.cached_mb / r.theoretical_mb,
        r.advertised_not_cached_mb
    );
    Ok(())
}
