//! Backhaul load with unicast delivery versus catchment-window multicast.
//!
//! `cargo run --example multicast_capacity`

use fcdn::capacity::{multicast_gain, unicast_link_loads, MulticastParams, MulticastTrees};
use fcdn::harness::{ExperimentConfig, Scenario};
use fcdn::Algorithm;

fn main() -> fcdn::Result<()> {
    let mut cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/geant_grid.toml"))?;
    cfg.trials = 1;
    let s = Scenario::prepare(cfg)?;
    let demand = s.demand(0)?;
    let placement = s.placement(Algorithm::Swing, 2, 6, 0)?;
    let plan = s.cache_plan(&placement, 0)?;
    let rel = s.match_fcdn(&placement, &plan, &demand)?;

    let unicast = unicast_link_loads(&rel, &s.catalogue, &s.graph);
    println!(
        "offered {:.1} Gb/s, unicast backhaul {:.1} Gb/s",
        demand.offered_gbps(&s.catalogue),
        unicast.total_gbps()
    );
    let trees = MulticastTrees::new(&rel, &s.catalogue, &s.graph);
    println!("{} delivery trees", trees.group_count());
    for t in [900.0, 3600.0] {
        for tau in [0.1, 1.0, 10.0] {
            let multicast = trees.loads(&MulticastParams::new(t, tau)?);
            println!(
                "T={t:<6} tau={tau:<4} multicast {:>7.1} Gb/s  gain {:.2}",
                multicast.total_gbps(),
                multicast_gain(&unicast, &multicast)
            );
        }
    }
    Ok(())
}
