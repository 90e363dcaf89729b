mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fcdn::capacity::{
    expected_group_count, multicast_link_loads, unicast_link_loads, MulticastParams,
};
use fcdn::catalogue::{generate_catalogue, generate_demand, Catalogue, DemandMatrix, Populations};
use fcdn::mapping::{match_dns, match_fcdn, RelationSet, Tier};
use fcdn::placement::{
    build_cache_plan, split_roles, storage_report, swing, Algorithm, CachePlan, PlacementResult,
    Selector,
};
use fcdn::topology::{all_pairs_hop_distance, DistanceMatrix, PathTable};
use fcdn::{NetworkGraph, NodeIx};

struct Instance {
    g: NetworkGraph,
    dist: DistanceMatrix,
    paths: Arc<PathTable>,
    catalogue: Catalogue,
    placement: PlacementResult,
    plan: CachePlan,
    demand: DemandMatrix,
    floyd: Vec<Vec<u32>>,
}

fn instance(n: usize, p: f64, items: usize, seed: u64) -> Instance {
    let g = common::random_connected(n, p, seed);
    let dist = all_pairs_hop_distance(&g);
    let paths = Arc::new(PathTable::new(&g, &dist));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let catalogue = generate_catalogue(items, 0.8, &[20.0, 40.0, 60.0], &[20.0, 40.0, 60.0], &mut rng)
        .unwrap();
    let pops = Populations((0..n).map(|_| rng.random_range(1..500)).collect());
    let mut order: Vec<NodeIx> = g.nodes().collect();
    order.shuffle(&mut rng);
    let k_o = rng.random_range(1..=n);
    let k_e = rng.random_range(0..=n - k_o);
    let placement = split_roles(Algorithm::Pop, &order[..k_o + k_e], k_o, k_e).unwrap();
    let plan = build_cache_plan(&placement, &catalogue, &pops, rng.random(), &mut rng).unwrap();
    let demand = generate_demand(&catalogue, &pops, 0.4, &mut rng).unwrap();
    let floyd = common::floyd(&g);
    Instance {
        g,
        dist,
        paths,
        catalogue,
        placement,
        plan,
        demand,
        floyd,
    }
}

/// Lexicographically smallest shortest path, stepping greedily on Floyd
/// distances.
fn walk(g: &NetworkGraph, f: &[Vec<u32>], from: NodeIx, to: NodeIx) -> Vec<NodeIx> {
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        cur = *g
            .neighbours(cur)
            .iter()
            .filter(|v| f[v.idx()][to.idx()] + 1 == f[cur.idx()][to.idx()])
            .min()
            .unwrap();
        path.push(cur);
    }
    path
}

fn rewalk_unicast(inst: &Instance, rel: &RelationSet) -> Vec<f64> {
    let mut loads = vec![0.0; inst.g.arc_count()];
    for r in rel.all() {
        let beta = inst.catalogue.item(r.item as usize).bitrate_mbps * r.clients as f64;
        let path = walk(&inst.g, &inst.floyd, r.publisher, r.subscriber);
        for w in path.windows(2) {
            loads[inst.g.arc_index(w[0], w[1]).unwrap()] += beta / 1000.0;
        }
    }
    loads
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn swing_selection_is_valid(n in 1usize..=9, p in 0.0f64..0.7, seed: u64, k in 1usize..=9) {
        let g = common::random_connected(n, p, seed);
        let d = all_pairs_hop_distance(&g);
        let k = k.min(n);
        let a = swing(&g, k, &d).unwrap();
        prop_assert_eq!(a.len(), k);
        let mut s = a.clone();
        s.sort();
        s.dedup();
        prop_assert_eq!(s.len(), k);
        prop_assert_eq!(a, swing(&g, k, &d).unwrap());
    }

    #[test]
    fn sampled_selections_are_distinct(n in 1usize..=9, p in 0.0f64..0.7, seed: u64, k in 0usize..=9) {
        let g = common::random_connected(n, p, seed);
        let d = all_pairs_hop_distance(&g);
        let pops = Populations((1..=n as u64).collect());
        let sel = Selector::new(&g, &d, &pops).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for algo in [Algorithm::Pop, Algorithm::Cls] {
            let r = sel.select(algo, k, &mut rng);
            if k > n {
                prop_assert!(r.is_err());
            } else {
                let mut v = r.unwrap();
                prop_assert_eq!(v.len(), k);
                v.sort();
                v.dedup();
                prop_assert_eq!(v.len(), k);
            }
        }
    }

    #[test]
    fn caches_respect_capacity(n in 2usize..=8, seed: u64, items in 1usize..=10) {
        let inst = instance(n, 0.3, items, seed);
        for e in inst.plan.edges() {
            prop_assert!(e.stored_mb(&inst.catalogue) <= e.capacity_mb);
        }
        let s = storage_report(&inst.plan, &inst.catalogue);
        prop_assert!(s.cached_mb <= s.theoretical_mb + 1e-9);
        prop_assert!((s.cached_mb + s.advertised_not_cached_mb - s.theoretical_mb).abs() < 1e-6);
    }

    #[test]
    fn demand_rows_sum_to_active(n in 1usize..=8, seed: u64, items in 1usize..=10) {
        let inst = instance(n, 0.3, items, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pops = Populations((0..n).map(|_| rng.random_range(1..1000)).collect());
        let d = generate_demand(&inst.catalogue, &pops, 0.4, &mut rng).unwrap();
        for v in inst.g.nodes() {
            prop_assert_eq!(d.node_total(v), (0.4 * pops.get(v) as f64).round() as u64);
        }
    }

    #[test]
    fn fcdn_never_longer_than_dns(n in 1usize..=8, p in 0.0f64..0.7, seed: u64, items in 1usize..=10) {
        let inst = instance(n, p, items, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k_d = rng.random_range(1..=n);
        let mut ldns: Vec<NodeIx> = inst.g.nodes().collect();
        ldns.shuffle(&mut rng);
        ldns.truncate(k_d);
        let f = match_fcdn(&inst.g, &inst.placement, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let d = match_dns(&inst.g, &inst.placement, &ldns, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let dns: BTreeMap<(u32, NodeIx), u32> = d.consumer().map(|r| ((r.item, r.subscriber), r.hops)).collect();
        prop_assert_eq!(dns.len(), f.consumer().count());
        for r in f.consumer() {
            prop_assert!(r.hops <= dns[&(r.item, r.subscriber)]);
            let nearest = inst.placement.publishers().map(|p| inst.floyd[p.idx()][r.subscriber.idx()]).min().unwrap();
            prop_assert_eq!(r.hops, nearest);
        }

        let everywhere: Vec<NodeIx> = inst.g.nodes().collect();
        let same = match_dns(&inst.g, &inst.placement, &everywhere, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        prop_assert_eq!(same.all(), f.all());
    }

    #[test]
    fn unicast_matches_rewalk(n in 1usize..=8, p in 0.0f64..0.7, seed: u64, items in 1usize..=10) {
        let inst = instance(n, p, items, seed);
        let rel = match_fcdn(&inst.g, &inst.placement, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let report = unicast_link_loads(&rel, &inst.catalogue, &inst.g);
        let oracle = rewalk_unicast(&inst, &rel);
        for (a, want) in oracle.iter().enumerate() {
            prop_assert!((report.arc_gbps(a) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn publisher_loads_are_conserved(n in 1usize..=8, p in 0.0f64..0.7, seed: u64, items in 1usize..=10) {
        let inst = instance(n, p, items, seed);
        let rel = match_fcdn(&inst.g, &inst.placement, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let consumer = RelationSet::new(rel.consumer().cloned().collect(), Arc::clone(&inst.paths));
        let report = unicast_link_loads(&consumer, &inst.catalogue, &inst.g);
        let chi: f64 = report.publishers().map(|(_, x)| x).sum();
        let out: f64 = inst
            .placement
            .publishers()
            .flat_map(|p| inst.g.out_arcs(p))
            .map(|a| report.arc_gbps(a))
            .sum();
        prop_assert!((chi - out).abs() < 1e-9);
    }

    #[test]
    fn multicast_matches_tree_oracle(n in 1usize..=8, p in 0.0f64..0.7, seed: u64, items in 1usize..=10,
                                     tau in 0.05f64..50.0, t in 60.0f64..4000.0) {
        prop_assume!(tau < t);
        let inst = instance(n, p, items, seed);
        let rel = match_fcdn(&inst.g, &inst.placement, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let params = MulticastParams::new(t, tau).unwrap();
        let report = multicast_link_loads(&rel, &inst.catalogue, &inst.g, &params);

        let mut groups: BTreeMap<(Tier, u32, NodeIx), Vec<(NodeIx, u64)>> = BTreeMap::new();
        for r in rel.all() {
            groups.entry((r.tier, r.item, r.publisher)).or_default().push((r.subscriber, r.clients));
        }
        let mut oracle = vec![0.0; inst.g.arc_count()];
        for ((tier, item, publisher), subs) in groups {
            let total: u64 = subs.iter().map(|s| s.1).sum();
            let w = match tier {
                Tier::Cdn => 1.0,
                Tier::Consumer => expected_group_count(t, tau, total as f64 / t).unwrap(),
            };
            let mut down = vec![0u64; inst.g.arc_count()];
            for (s, m) in subs {
                for pair in walk(&inst.g, &inst.floyd, publisher, s).windows(2) {
                    down[inst.g.arc_index(pair[0], pair[1]).unwrap()] += m;
                }
            }
            let eta = inst.catalogue.item(item as usize).bitrate_mbps;
            for (a, &d) in down.iter().enumerate() {
                if d > 0 {
                    oracle[a] += eta * w.min(d as f64) / 1000.0;
                }
            }
        }
        let unicast = unicast_link_loads(&rel, &inst.catalogue, &inst.g);
        for (a, want) in oracle.iter().enumerate() {
            prop_assert!((report.arc_gbps(a) - want).abs() < 1e-9);
            prop_assert!(report.arc_gbps(a) <= unicast.arc_gbps(a) + 1e-12);
        }
    }

    #[test]
    fn gain_monotone_in_tau_and_t(n in 1usize..=8, p in 0.0f64..0.7, seed: u64, items in 1usize..=10) {
        let inst = instance(n, p, items, seed);
        let rel = match_fcdn(&inst.g, &inst.placement, &inst.plan, &inst.demand, &inst.dist, &inst.paths).unwrap();
        let total = |t: f64, tau: f64| {
            multicast_link_loads(&rel, &inst.catalogue, &inst.g, &MulticastParams::new(t, tau).unwrap()).total_gbps()
        };
        let mut last = f64::INFINITY;
        for tau in [0.1, 1.0, 10.0] {
            let x = total(900.0, tau);
            prop_assert!(x <= last + 1e-9);
            last = x;
        }
        let mut last = 0.0;
        for t in [900.0, 1800.0, 2700.0, 3600.0] {
            let x = total(t, 1.0);
            prop_assert!(x >= last - 1e-9);
            last = x;
        }
    }
}
