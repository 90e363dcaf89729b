use rand::Rng;

use crate::catalogue::Populations;
use crate::error::{Error, Result};
use crate::topology::{closeness_scores, DistanceMatrix, NetworkGraph, NodeIx};

/// Weighted sampling without replacement, returning indices in draw order.
///
/// Each index gets the key `ln(u) / w` with `u` uniform on `[0, 1)`; sorting
/// keys in descending order yields the same distribution as drawing one index
/// at a time with the remaining weights renormalised after every draw.
/// Zero weights are drawn last, in index order.
pub fn weighted_order<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let u: f64 = rng.random();
            let key = if w > 0.0 { u.ln() / w } else { f64::NEG_INFINITY };
            (key, i)
        })
        .collect();
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.truncate(k);
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// `U_v / sum U`.
pub fn population_weights(populations: &Populations) -> Vec<f64> {
    let total = populations.total() as f64;
    populations.0.iter().map(|&u| u as f64 / total).collect()
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::TooManySelections {
            requested: k,
            available: n,
        });
    }
    Ok(())
}

/// Largest-first: population-weighted sampling of `k` vertices.
pub fn pop_select<R: Rng + ?Sized>(
    g: &NetworkGraph,
    populations: &Populations,
    k: usize,
    rng: &mut R,
) -> Result<Vec<NodeIx>> {
    check_k(k, g.node_count())?;
    if populations.0.len() != g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "{} populations for {} vertices",
            populations.0.len(),
            g.node_count()
        )));
    }
    if populations.0.contains(&0) {
        return Err(Error::InvalidParameter("populations must be positive".into()));
    }
    Ok(sample_nodes(&population_weights(populations), k, rng))
}

/// Closest-first: closeness-weighted sampling of `k` vertices.
pub fn cls_select<R: Rng + ?Sized>(
    g: &NetworkGraph,
    dist: &DistanceMatrix,
    k: usize,
    rng: &mut R,
) -> Result<Vec<NodeIx>> {
    check_k(k, g.node_count())?;
    let weights = closeness_scores(g, dist)?.normalized;
    Ok(sample_nodes(&weights, k, rng))
}

pub(crate) fn sample_nodes<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<NodeIx> {
    weighted_order(weights, k, rng)
        .into_iter()
        .map(|i| NodeIx(i as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{all_pairs_hop_distance, GraphBuilder};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize) -> NetworkGraph {
        let mut b = GraphBuilder::undirected();
        for i in 0..n {
            b = b.node(format!("n{i}"));
        }
        for i in 1..n {
            b = b.edge(format!("n{}", i - 1), format!("n{i}"));
        }
        b.build().unwrap()
    }

    #[test]
    fn population_ratios() {
        let w = population_weights(&Populations(vec![100, 200, 300, 400]));
        for (a, b) in w.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn full_draw_is_a_permutation() {
        let g = line(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sel = pop_select(&g, &Populations(vec![5, 1, 9, 2, 2, 7]), 6, &mut rng).unwrap();
        sel.sort();
        assert_eq!(sel, g.nodes().collect::<Vec<_>>());
    }

    #[test]
    fn dominant_population_wins() {
        let g = line(4);
        let pops = Populations(vec![1, 1_000_000_000, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hits = (0..10_000)
            .filter(|_| pop_select(&g, &pops, 1, &mut rng).unwrap()[0] == NodeIx(1))
            .count();
        assert!(hits as f64 / 10_000.0 > 0.999);
    }

    #[test]
    fn oversized_k_is_an_error() {
        let g = line(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(pop_select(&g, &Populations(vec![1; 3]), 4, &mut rng).is_err());
        let d = all_pairs_hop_distance(&g);
        assert!(cls_select(&g, &d, 4, &mut rng).is_err());
    }

    #[test]
    fn seeded_selection_is_reproducible() {
        let g = line(8);
        let d = all_pairs_hop_distance(&g);
        let a = cls_select(&g, &d, 3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = cls_select(&g, &d, 3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }
}
