mod common;

use proptest::prelude::*;

use fcdn::topology::{
    all_pairs_hop_distance, closeness_scores, load_topology, load_topology_with, LoadOptions,
    PathTable,
};
use fcdn::{NetworkGraph, NodeIx};

fn all_shortest(g: &NetworkGraph, d: &[Vec<u32>], s: NodeIx, t: NodeIx) -> Vec<Vec<NodeIx>> {
    if s == t {
        return vec![vec![s]];
    }
    let mut out = Vec::new();
    for &v in g.neighbours(s) {
        if d[v.idx()][t.idx()] + 1 == d[s.idx()][t.idx()] {
            for mut rest in all_shortest(g, d, v, t) {
                rest.insert(0, s);
                out.push(rest);
            }
        }
    }
    out
}

#[test]
fn geant_loads_with_expected_size() {
    let g = load_topology(common::geant_path()).unwrap();
    assert_eq!(g.node_count(), 37);
    assert_eq!(g.arc_count(), 116);
    assert!(g.is_symmetric());
    let d = all_pairs_hop_distance(&g);
    assert!(d.is_connected());
    assert!(g.lookup("10").is_none());

    let all = load_topology_with(common::geant_path(), LoadOptions::keep_all()).unwrap();
    assert_eq!(all.node_count(), 40);
    assert_eq!(all.arc_count(), 122);
}

#[test]
fn geant_closeness_is_normalised() {
    let g = load_topology(common::geant_path()).unwrap();
    let d = all_pairs_hop_distance(&g);
    let c = closeness_scores(&g, &d).unwrap();
    assert!((c.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let best = (0..37).max_by(|&a, &b| c.raw[a].total_cmp(&c.raw[b])).unwrap();
    let min_sum = g.nodes().map(|v| d.row_sum(v).unwrap()).min().unwrap();
    assert_eq!(d.row_sum(NodeIx(best as u32)).unwrap(), min_sum);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bfs_matches_floyd(n in 1usize..=8, p in 0.0f64..0.8, seed: u64) {
        let g = common::random_connected(n, p, seed);
        let d = all_pairs_hop_distance(&g);
        let f = common::floyd(&g);
        for u in g.nodes() {
            for v in g.nodes() {
                prop_assert_eq!(d.get(u, v), Some(f[u.idx()][v.idx()]));
                prop_assert_eq!(d.get(u, v), d.get(v, u));
            }
        }
    }

    #[test]
    fn paths_are_smallest_shortest(n in 1usize..=8, p in 0.0f64..0.8, seed: u64) {
        let g = common::random_connected(n, p, seed);
        let d = all_pairs_hop_distance(&g);
        let f = common::floyd(&g);
        let table = PathTable::new(&g, &d);
        for s in g.nodes() {
            for t in g.nodes() {
                let path = table.path(s, t).unwrap();
                let best = all_shortest(&g, &f, s, t).into_iter().min().unwrap();
                prop_assert_eq!(&path, &best);
                let arcs: Vec<usize> = table.arcs_back(s, t).collect();
                prop_assert_eq!(arcs.len() as u32, d.hops(s, t));
                for a in arcs {
                    let (u, v) = g.arc(a);
                    let i = path.iter().position(|&x| x == u).unwrap();
                    prop_assert_eq!(path[i + 1], v);
                }
            }
        }
    }

    #[test]
    fn closeness_sums_to_one(n in 2usize..=8, p in 0.0f64..0.8, seed: u64) {
        let g = common::random_connected(n, p, seed);
        let d = all_pairs_hop_distance(&g);
        let c = closeness_scores(&g, &d).unwrap();
        prop_assert!((c.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for v in g.nodes() {
            let want = (n - 1) as f64 / d.row_sum(v).unwrap() as f64;
            prop_assert!((c.raw[v.idx()] - want).abs() < 1e-12);
        }
    }
}
