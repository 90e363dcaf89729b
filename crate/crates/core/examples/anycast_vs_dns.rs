//! Path lengths under anycast binding and under LDNS redirection.
//!
//! `cargo run --example anycast_vs_dns`

use fcdn::harness::{ecdf, ecdf_at, ExperimentConfig, Scenario};
use fcdn::mapping::path_lengths;
use fcdn::Algorithm;

fn main() -> fcdn::Result<()> {
    let mut cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/geant_grid.toml"))?;
    cfg.trials = 1;
    let s = Scenario::prepare(cfg)?;
    let demand = s.demand(0)?;
    let placement = s.placement(Algorithm::Swing, 4, 4, 0)?;
    let plan = s.cache_plan(&placement, 0)?;

    let anycast = s.match_fcdn(&placement, &plan, &demand)?;
    report("anycast", &path_lengths(&anycast));
    for k_d in [2, 4, 8] {
        let ldns = s.ldns(Algorithm::Swing, k_d, 0)?;
        let dns = s.match_dns(&placement, &ldns, &plan, &demand)?;
        report(&format!("dns K_d={k_d}"), &path_lengths(&dns));
    }
    Ok(())
}

fn report(label: &str, hops: &[u32]) {
    let values: Vec<f64> = hops.iter().map(|&h| h as f64).collect();
    let points = ecdf(&values).expect("non-empty demand");
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    println!(
        "{label:<12} mean {mean:.2} hops, at most 1 hop {:.1}%, at most 2 hops {:.1}%",
        100.0 * ecdf_at(&points, 1.0),
        100.0 * ecdf_at(&points, 2.0)
    );
}
