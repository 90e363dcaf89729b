//! Load the GEANT backbone and print basic structure.
//!
//! `cargo run --example load_topology [path.graphml]`

use fcdn::topology::{all_pairs_hop_distance, closeness_scores, load_topology};

fn main() -> fcdn::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/Geant2012.graphml").into());
    let g = load_topology(&path)?;
    let dist = all_pairs_hop_distance(&g);
    let close = closeness_scores(&g, &dist)?;

    println!("{} nodes, {} arcs, diameter {}", g.node_count(), g.arc_count(), dist.diameter());
    let mut ranked: Vec<_> = g.nodes().collect();
    ranked.sort_by(|a, b| close.raw[b.idx()].total_cmp(&close.raw[a.idx()]));
    println!("most central:");
    for v in ranked.iter().take(5) {
        println!(
            "  {:>3} {:<12} degree {} closeness {:.3}",
            g.id(*v),
            g.display_name(*v),
            g.neighbours(*v).len(),
            close.raw[v.idx()]
        );
    }
    Ok(())
}
