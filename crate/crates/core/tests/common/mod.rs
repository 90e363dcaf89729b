#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fcdn::topology::GraphBuilder;
use fcdn::NetworkGraph;

/// Connected undirected graph on `n` vertices named "0".."n-1": a random
/// spanning tree plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> NetworkGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::undirected();
    for v in 0..n {
        b = b.node(v.to_string());
    }
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.insert((u, v));
            }
        }
    }
    for (u, v) in edges {
        b = b.edge(u.to_string(), v.to_string());
    }
    b.build().unwrap()
}

pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> NetworkGraph {
    let mut b = GraphBuilder::undirected();
    for v in 0..n {
        b = b.node(v.to_string());
    }
    for &(u, v) in edges {
        b = b.edge(u.to_string(), v.to_string());
    }
    b.build().unwrap()
}

/// Floyd–Warshall over the adjacency lists; `u32::MAX` for unreachable.
pub fn floyd(g: &NetworkGraph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let mut d = vec![vec![u32::MAX; n]; n];
    for u in g.nodes() {
        d[u.idx()][u.idx()] = 0;
        for v in g.neighbours(u) {
            d[u.idx()][v.idx()] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].saturating_add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn geant_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/Geant2012.graphml")
}

pub fn geant_grid() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/geant_grid.toml")
}
