//! Service-point placement: Swing, largest-first (Pop) and closest-first
//! (Cls) selection, origin/edge role split, LDNS placement and edge caches.

mod cache;
mod select;
mod swing;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use cache::{build_cache_plan, storage_report, CachePlan, StorageReport};
pub use select::{cls_select, pop_select, population_weights, weighted_order};
pub use swing::{swing, swing_candidates, SwingCandidates};

use crate::catalogue::Populations;
use crate::error::{Error, Result};
use crate::topology::{closeness_scores, DistanceMatrix, NetworkGraph, NodeIx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Swing,
    Pop,
    Cls,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Swing, Algorithm::Pop, Algorithm::Cls];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Swing => "swing",
            Algorithm::Pop => "pop",
            Algorithm::Cls => "cls",
        }
    }

    pub fn is_deterministic(self) -> bool {
        self == Algorithm::Swing
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "swing" => Ok(Algorithm::Swing),
            "pop" => Ok(Algorithm::Pop),
            "cls" => Ok(Algorithm::Cls),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Precomputed inputs shared by all three selection algorithms.
#[derive(Clone, Debug)]
pub struct Selector<'a> {
    graph: &'a NetworkGraph,
    dist: &'a DistanceMatrix,
    population_weights: Vec<f64>,
    closeness_weights: Vec<f64>,
}

impl<'a> Selector<'a> {
    pub fn new(
        graph: &'a NetworkGraph,
        dist: &'a DistanceMatrix,
        populations: &Populations,
    ) -> Result<Self> {
        if populations.0.len() != graph.node_count() || populations.0.contains(&0) {
            return Err(Error::InvalidParameter(
                "need one positive population per vertex".into(),
            ));
        }
        Ok(Self {
            graph,
            dist,
            population_weights: population_weights(populations),
            closeness_weights: closeness_scores(graph, dist)?.normalized,
        })
    }

    pub fn weights(&self, algorithm: Algorithm) -> Option<&[f64]> {
        match algorithm {
            Algorithm::Swing => None,
            Algorithm::Pop => Some(&self.population_weights),
            Algorithm::Cls => Some(&self.closeness_weights),
        }
    }

    /// `k` vertices in selection order. `rng` is untouched for Swing.
    pub fn select<R: Rng + ?Sized>(
        &self,
        algorithm: Algorithm,
        k: usize,
        rng: &mut R,
    ) -> Result<Vec<NodeIx>> {
        let n = self.graph.node_count();
        if k > n {
            return Err(Error::TooManySelections {
                requested: k,
                available: n,
            });
        }
        match algorithm {
            Algorithm::Swing => swing(self.graph, k, self.dist),
            Algorithm::Pop => Ok(select::sample_nodes(&self.population_weights, k, rng)),
            Algorithm::Cls => Ok(select::sample_nodes(&self.closeness_weights, k, rng)),
        }
    }
}

/// Origins `O`, edges `E` and, for the DNS baseline, LDNS resolvers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementResult {
    pub algorithm: Algorithm,
    pub origins: Vec<NodeIx>,
    pub edges: Vec<NodeIx>,
    #[serde(default)]
    pub ldns: Vec<NodeIx>,
}

impl PlacementResult {
    pub fn k_o(&self) -> usize {
        self.origins.len()
    }

    pub fn k_e(&self) -> usize {
        self.edges.len()
    }

    pub fn k_d(&self) -> usize {
        self.ldns.len()
    }

    /// `P = E ∪ O`, origins first.
    pub fn publishers(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.origins.iter().chain(&self.edges).copied()
    }

    pub fn is_origin(&self, v: NodeIx) -> bool {
        self.origins.contains(&v)
    }

    pub fn with_ldns(mut self, ldns: Vec<NodeIx>) -> Self {
        self.ldns = ldns;
        self
    }

    pub fn to_document(&self, g: &NetworkGraph) -> String {
        let names = |v: &[NodeIx]| {
            v.iter()
                .map(|&x| format!("\"{}\"", g.id(x)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "algorithm = \"{}\"\norigins = [{}]\nedges = [{}]\nldns = [{}]\n",
            self.algorithm,
            names(&self.origins),
            names(&self.edges),
            names(&self.ldns)
        )
    }
}

/// First `k_o` selections become origins, the next `k_e` edges.
pub fn split_roles(
    algorithm: Algorithm,
    selection: &[NodeIx],
    k_o: usize,
    k_e: usize,
) -> Result<PlacementResult> {
    if selection.len() != k_o + k_e {
        return Err(Error::SplitMismatch {
            expected: k_o + k_e,
            actual: selection.len(),
        });
    }
    let (origins, edges) = selection.split_at(k_o);
    debug_assert!(edges.iter().all(|e| !origins.contains(e)));
    Ok(PlacementResult {
        algorithm,
        origins: origins.to_vec(),
        edges: edges.to_vec(),
        ldns: Vec::new(),
    })
}

/// LDNS resolvers from an independent run of `algorithm`; may overlap publishers.
pub fn place_ldns<R: Rng + ?Sized>(
    selector: &Selector<'_>,
    algorithm: Algorithm,
    k_d: usize,
    rng: &mut R,
) -> Result<Vec<NodeIx>> {
    selector.select(algorithm, k_d, rng)
}
