use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::select::weighted_order;
use super::PlacementResult;
use crate::catalogue::{Catalogue, Populations};
use crate::error::{Error, Result};
use crate::topology::{NetworkGraph, NodeIx};

/// Which items each publisher stores. Every publisher advertises the whole
/// catalogue; origins store all of it, edges a capacity-bounded subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachePlan {
    items: usize,
    origins: Vec<NodeIx>,
    edges: Vec<EdgeCache>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCache {
    pub node: NodeIx,
    pub capacity_mb: f64,
    /// Item indices in admission order.
    pub items: Vec<usize>,
    stored: Vec<bool>,
}

impl EdgeCache {
    fn new(node: NodeIx, capacity_mb: f64, items: Vec<usize>, n_items: usize) -> Self {
        let mut stored = vec![false; n_items];
        for &i in &items {
            stored[i] = true;
        }
        Self {
            node,
            capacity_mb,
            items,
            stored,
        }
    }

    /// `theta(p)`.
    pub fn stored_mb(&self, catalogue: &Catalogue) -> f64 {
        self.items.iter().map(|&i| catalogue.item(i).volume_mb).sum()
    }
}

impl CachePlan {
    /// Plan with explicit edge contents, mainly for tests and audits.
    pub fn explicit(
        n_items: usize,
        origins: Vec<NodeIx>,
        edges: Vec<(NodeIx, f64, Vec<usize>)>,
    ) -> Self {
        Self {
            items: n_items,
            origins,
            edges: edges
                .into_iter()
                .map(|(node, cap, items)| EdgeCache::new(node, cap, items, n_items))
                .collect(),
        }
    }

    pub fn item_count(&self) -> usize {
        self.items
    }

    pub fn origins(&self) -> &[NodeIx] {
        &self.origins
    }

    pub fn edges(&self) -> &[EdgeCache] {
        &self.edges
    }

    pub fn edge(&self, p: NodeIx) -> Option<&EdgeCache> {
        self.edges.iter().find(|e| e.node == p)
    }

    pub fn is_publisher(&self, p: NodeIx) -> bool {
        self.origins.contains(&p) || self.edge(p).is_some()
    }

    /// Whether `p` holds a stored copy of item `i`.
    pub fn caches(&self, p: NodeIx, i: usize) -> bool {
        if self.origins.contains(&p) {
            return true;
        }
        self.edge(p).is_some_and(|e| e.stored[i])
    }

    /// Whether `p` advertises item `i`: every publisher advertises everything.
    pub fn advertises(&self, p: NodeIx, i: usize) -> bool {
        i < self.items && self.is_publisher(p)
    }

    pub fn to_document(&self, g: &NetworkGraph) -> String {
        let mut out = String::new();
        let origins: Vec<_> = self.origins.iter().map(|&o| format!("\"{}\"", g.id(o))).collect();
        let _ = writeln!(out, "origins = [{}]", origins.join(", "));
        for e in &self.edges {
            let items: Vec<_> = e.items.iter().map(|i| (i + 1).to_string()).collect();
            let _ = writeln!(
                out,
                "\n[[edge]]\nnode = \"{}\"\ncapacity_mb = {}\ncached = [{}]",
                g.id(e.node),
                e.capacity_mb,
                items.join(", ")
            );
        }
        out
    }
}

/// Size each edge cache relative to the most populous node and fill it by
/// popularity-weighted draws without replacement.
///
/// `c_max = cache_fraction * total volume`; edge `p` gets
/// `c_p = c_max * U_p / U_max`. Admission stops at the first drawn item that
/// would push the stored volume past `c_p`.
pub fn build_cache_plan<R: Rng + ?Sized>(
    placement: &PlacementResult,
    catalogue: &Catalogue,
    populations: &Populations,
    cache_fraction: f64,
    rng: &mut R,
) -> Result<CachePlan> {
    if !(0.0..=1.0).contains(&cache_fraction) {
        return Err(Error::InvalidParameter(format!(
            "cache fraction must lie in [0, 1], got {cache_fraction}"
        )));
    }
    let c_max = cache_fraction * catalogue.total_volume_mb();
    let u_max = populations.max() as f64;
    let weights: Vec<f64> = catalogue.popularities().collect();
    let edges = placement
        .edges
        .iter()
        .map(|&p| {
            let capacity = c_max * populations.get(p) as f64 / u_max;
            let mut stored = 0.0;
            let mut admitted = Vec::new();
            for i in weighted_order(&weights, weights.len(), rng) {
                let z = catalogue.item(i).volume_mb;
                if stored + z > capacity {
                    break;
                }
                stored += z;
                admitted.push(i);
            }
            EdgeCache::new(p, capacity, admitted, catalogue.len())
        })
        .collect();
    Ok(CachePlan {
        items: catalogue.len(),
        origins: placement.origins.clone(),
        edges,
    })
}

/// Storage volumes in MB.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StorageReport {
    /// Every item stored at every publisher.
    pub theoretical_mb: f64,
    /// `sum_p theta(p)` over origins and edges.
    pub cached_mb: f64,
    /// The part of `cached_mb` held by edges.
    pub edge_cached_mb: f64,
    /// Advertised by an edge without a stored copy.
    pub advertised_not_cached_mb: f64,
}

pub fn storage_report(plan: &CachePlan, catalogue: &Catalogue) -> StorageReport {
    let total = catalogue.total_volume_mb();
    let publishers = plan.origins.len() + plan.edges.len();
    let edge_cached: f64 = plan.edges.iter().map(|e| e.stored_mb(catalogue)).sum();
    StorageReport {
        theoretical_mb: total * publishers as f64,
        cached_mb: total * plan.origins.len() as f64 + edge_cached,
        edge_cached_mb: edge_cached,
        advertised_not_cached_mb: total * plan.edges.len() as f64 - edge_cached,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::ContentItem;
    use crate::placement::Algorithm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalogue(volumes: &[f64], popularity: &[f64]) -> Catalogue {
        Catalogue::from_items(
            volumes
                .iter()
                .zip(popularity)
                .enumerate()
                .map(|(k, (&v, &p))| ContentItem {
                    rank: k as u32 + 1,
                    popularity: p,
                    bitrate_mbps: 20.0,
                    volume_mb: v,
                })
                .collect(),
        )
    }

    fn placement(origins: &[u32], edges: &[u32]) -> PlacementResult {
        PlacementResult {
            algorithm: Algorithm::Swing,
            origins: origins.iter().map(|&v| NodeIx(v)).collect(),
            edges: edges.iter().map(|&v| NodeIx(v)).collect(),
            ldns: vec![],
        }
    }

    #[test]
    fn full_capacity_at_largest_node_caches_everything() {
        let c = catalogue(&[40.0; 5], &[0.4, 0.3, 0.1, 0.1, 0.1]);
        let pops = Populations(vec![10, 50, 20]);
        let plan = build_cache_plan(&placement(&[0], &[1]), &c, &pops, 1.0, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        let e = plan.edge(NodeIx(1)).unwrap();
        assert_eq!(e.items.len(), 5);
        assert_eq!(storage_report(&plan, &c).advertised_not_cached_mb, 0.0);
    }

    #[test]
    fn zero_capacity_caches_nothing_but_advertises() {
        let c = catalogue(&[20.0; 4], &[0.25; 4]);
        let pops = Populations(vec![10, 10, 10]);
        let plan = build_cache_plan(&placement(&[0], &[1, 2]), &c, &pops, 0.0, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        for e in plan.edges() {
            assert!(e.items.is_empty());
            assert!((0..4).all(|i| plan.advertises(e.node, i) && !plan.caches(e.node, i)));
        }
        let r = storage_report(&plan, &c);
        assert_eq!(r.cached_mb, c.total_volume_mb());
        assert!((0..4).all(|i| plan.caches(NodeIx(0), i)));
    }

    #[test]
    fn two_of_three_fit_and_popular_items_win() {
        // 3 items of 20 MB, c_max = 60 * 2/3 = 40 MB at the only (largest) node.
        let c = catalogue(&[20.0; 3], &[0.6, 0.3, 0.1]);
        let pops = Populations(vec![5, 5]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut freq = [0usize; 3];
        for _ in 0..10_000 {
            let plan = build_cache_plan(&placement(&[0], &[1]), &c, &pops, 2.0 / 3.0, &mut rng).unwrap();
            let e = plan.edge(NodeIx(1)).unwrap();
            assert_eq!(e.items.len(), 2);
            assert!(e.stored_mb(&c) <= e.capacity_mb);
            for &i in &e.items {
                freq[i] += 1;
            }
        }
        assert!(freq[0] > freq[1] && freq[1] > freq[2], "{freq:?}");
    }

    #[test]
    fn hand_summed_storage_ratio() {
        // 4 items, 120 MB total; two edges each hold half the volume.
        let c = catalogue(&[20.0, 40.0, 20.0, 40.0], &[0.25; 4]);
        let plan = CachePlan::explicit(
            4,
            vec![NodeIx(0)],
            vec![(NodeIx(1), 60.0, vec![0, 1]), (NodeIx(2), 60.0, vec![2, 3])],
        );
        let r = storage_report(&plan, &c);
        assert_eq!(r.theoretical_mb, 360.0);
        assert_eq!(r.cached_mb, 240.0);
        assert_eq!(r.edge_cached_mb, 120.0);
        assert_eq!(r.advertised_not_cached_mb, 120.0);
    }

    #[test]
    fn rejects_bad_fraction() {
        let c = catalogue(&[20.0], &[1.0]);
        assert!(build_cache_plan(
            &placement(&[0], &[]),
            &c,
            &Populations(vec![1]),
            1.5,
            &mut ChaCha8Rng::seed_from_u64(0)
        )
        .is_err());
    }
}
