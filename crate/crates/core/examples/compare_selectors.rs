//! Swing, population-weighted and closeness-weighted selection side by side.
//!
//! `cargo run --example compare_selectors`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcdn::catalogue::load_population_table;
use fcdn::placement::Selector;
use fcdn::topology::{all_pairs_hop_distance, load_topology};
use fcdn::Algorithm;

fn main() -> fcdn::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let g = load_topology(format!("{data}/Geant2012.graphml"))?;
    let dist = all_pairs_hop_distance(&g);
    let pops = load_population_table(&g, format!("{data}/Geant2012.population.csv"))?;
    let selector = Selector::new(&g, &dist, &pops)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    for algo in Algorithm::ALL {
        let picks = selector.select(algo, 6, &mut rng)?;
        let covered: u64 = picks.iter().map(|&v| pops.get(v)).sum();
        let mean_hops = g
            .nodes()
            .map(|v| picks.iter().map(|&c| dist.hops(c, v)).min().unwrap() as f64)
            .sum::<f64>()
            / g.node_count() as f64;
        let ids: Vec<&str> = picks.iter().map(|&v| g.id(v)).collect();
        println!(
            "{:<5} [{}] hosts {:.1}% of users, mean distance {mean_hops:.2} hops",
            algo.name(),
            ids.join(" "),
            100.0 * covered as f64 / pops.total() as f64
        );
    }
    Ok(())
}
