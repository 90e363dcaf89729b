//! Swing picks for growing K and the resulting K-center radius.
//!
//! `cargo run --example swing_placement`

use fcdn::placement::swing;
use fcdn::topology::{all_pairs_hop_distance, load_topology};

fn main() -> fcdn::Result<()> {
    let g = load_topology(concat!(env!("CARGO_MANIFEST_DIR"), "/data/Geant2012.graphml"))?;
    let dist = all_pairs_hop_distance(&g);
    for k in [1, 2, 4, 8, 16] {
        let picks = swing(&g, k, &dist)?;
        let radius = g
            .nodes()
            .map(|v| picks.iter().map(|&c| dist.hops(c, v)).min().unwrap())
            .max()
            .unwrap();
        let names: Vec<&str> = picks.iter().map(|&v| g.id(v)).collect();
        println!("K={k:<2} radius {radius}  [{}]", names.join(" "));
    }
    Ok(())
}
