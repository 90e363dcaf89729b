use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::topology::{require_connected, DistanceMatrix, NetworkGraph, NodeIx};

/// Candidate pools built from every vertex's neighbourhood.
///
/// For each vertex `u`, each neighbour `v` is scored by its connectedness
/// `delta = sum_{j != u} dist[v][j]` (lower is better connected). The best
/// neighbour goes to `primary`, the rest to `backup`. Each pool keeps one
/// entry per vertex (the smaller score if seen twice) and `backup` never
/// repeats a vertex already in `primary`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SwingCandidates {
    pub primary: BTreeMap<NodeIx, u64>,
    pub backup: BTreeMap<NodeIx, u64>,
}

pub fn swing_candidates(g: &NetworkGraph, dist: &DistanceMatrix) -> Result<SwingCandidates> {
    require_connected(g, dist)?;
    let mut c = SwingCandidates::default();
    let mut scored = Vec::new();
    for u in g.nodes() {
        scored.clear();
        scored.extend(g.neighbours(u).iter().map(|&v| {
            let total = dist.row_sum(v).expect("connected");
            (total - u64::from(dist.hops(v, u)), v)
        }));
        let Some(&(best_delta, best)) = scored.iter().min() else {
            continue;
        };
        keep_min(&mut c.primary, best, best_delta);
        for &(delta, v) in scored.iter().filter(|(_, v)| *v != best) {
            keep_min(&mut c.backup, v, delta);
        }
    }
    c.backup.retain(|v, _| !c.primary.contains_key(v));
    Ok(c)
}

fn keep_min(pool: &mut BTreeMap<NodeIx, u64>, v: NodeIx, delta: u64) {
    pool.entry(v)
        .and_modify(|d| *d = (*d).min(delta))
        .or_insert(delta);
}

/// Swing placement: `k` distinct vertices in selection order.
///
/// Odd picks take the best-connected remaining candidate, even picks the
/// worst-connected one, drawing from the primary pool while it is larger
/// than `k`, otherwise taking the whole primary pool and continuing the
/// alternation on the backup pool. Ties on connectedness go to the candidate
/// farthest from the vertices already chosen, then to the smallest id.
pub fn swing(g: &NetworkGraph, k: usize, dist: &DistanceMatrix) -> Result<Vec<NodeIx>> {
    let n = g.node_count();
    if k > n {
        return Err(Error::TooManySelections {
            requested: k,
            available: n,
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("swing needs k >= 1".into()));
    }
    let SwingCandidates {
        mut primary,
        mut backup,
    } = swing_candidates(g, dist)?;
    let mut chosen = Vec::with_capacity(k);

    if k < primary.len() {
        for step in 1..=k {
            let v = pick(&primary, step, &chosen, dist);
            primary.remove(&v);
            chosen.push(v);
        }
        return Ok(chosen);
    }

    let mut all: Vec<(u64, NodeIx)> = primary.iter().map(|(&v, &d)| (d, v)).collect();
    all.sort_unstable();
    chosen.extend(all.into_iter().map(|(_, v)| v));
    for step in chosen.len() + 1..=k {
        if backup.is_empty() {
            break;
        }
        let v = pick(&backup, step, &chosen, dist);
        backup.remove(&v);
        chosen.push(v);
    }

    if chosen.len() < k {
        // Pools exhausted: fall back to the remaining vertices, best connected first.
        let mut rest: Vec<(u64, NodeIx)> = g
            .nodes()
            .filter(|v| !chosen.contains(v))
            .map(|v| (dist.row_sum(v).expect("connected"), v))
            .collect();
        rest.sort_unstable();
        chosen.extend(rest.into_iter().take(k - chosen.len()).map(|(_, v)| v));
    }
    Ok(chosen)
}

fn pick(
    pool: &BTreeMap<NodeIx, u64>,
    step: usize,
    chosen: &[NodeIx],
    dist: &DistanceMatrix,
) -> NodeIx {
    let target = if step % 2 == 1 {
        *pool.values().min().expect("non-empty pool")
    } else {
        *pool.values().max().expect("non-empty pool")
    };
    let spread = |v: NodeIx| chosen.iter().map(|&c| dist.hops(v, c)).min().unwrap_or(0);
    // BTreeMap iterates in id order, so max_by_key's last-wins rule is undone
    // by reversing: the smallest id survives among equal spreads.
    pool.iter()
        .filter(|(_, &d)| d == target)
        .map(|(&v, _)| v)
        .rev()
        .max_by_key(|&v| spread(v))
        .expect("target taken from pool")
}
