//! Content catalogue, node populations and per-node demand.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NetworkGraph, NodeIx};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentItem {
    /// 1-based popularity rank.
    pub rank: u32,
    pub popularity: f64,
    pub bitrate_mbps: f64,
    pub volume_mb: f64,
}

/// Items in rank order; `items[k]` has rank `k + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalogue {
    items: Vec<ContentItem>,
}

impl Catalogue {
    pub fn from_items(items: Vec<ContentItem>) -> Self {
        Self { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[ContentItem] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &ContentItem {
        &self.items[i]
    }

    pub fn popularities(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().map(|c| c.popularity)
    }

    pub fn total_volume_mb(&self) -> f64 {
        self.items.iter().map(|c| c.volume_mb).sum()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("rank,popularity,bitrate_mbps,volume_mb\n");
        for c in &self.items {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                c.rank, c.popularity, c.bitrate_mbps, c.volume_mb
            );
        }
        out
    }
}

/// Zipf probabilities `i^-s / sum_j j^-s` for ranks `1..=n`.
pub fn zipf_popularity(n: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-exponent)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn generate_catalogue<R: Rng + ?Sized>(
    n: usize,
    zipf_exponent: f64,
    bitrate_choices: &[f64],
    volume_choices: &[f64],
    rng: &mut R,
) -> Result<Catalogue> {
    if n == 0 {
        return Err(Error::InvalidParameter("catalogue needs at least one item".into()));
    }
    if !(zipf_exponent >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zipf exponent must be non-negative, got {zipf_exponent}"
        )));
    }
    for (name, set) in [("bitrate", bitrate_choices), ("volume", volume_choices)] {
        if set.is_empty() {
            return Err(Error::InvalidParameter(format!("empty {name} choice set")));
        }
        if set.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter(format!("{name} choices must be positive")));
        }
    }
    let items = zipf_popularity(n, zipf_exponent)
        .into_iter()
        .enumerate()
        .map(|(k, popularity)| ContentItem {
            rank: k as u32 + 1,
            popularity,
            bitrate_mbps: *bitrate_choices.choose(rng).expect("non-empty"),
            volume_mb: *volume_choices.choose(rng).expect("non-empty"),
        })
        .collect();
    Ok(Catalogue { items })
}

/// Population `U_v` per vertex, indexed by [`NodeIx`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Populations(pub Vec<u64>);

impl Populations {
    pub fn get(&self, v: NodeIx) -> u64 {
        self.0[v.idx()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn as_weights(&self) -> Vec<f64> {
        self.0.iter().map(|&u| u as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticPopulation {
    /// Split `total` evenly; the remainder goes one apiece to the first vertices.
    Uniform { total: u64 },
    LogNormal { median: f64, sigma: f64 },
}

impl Default for SyntheticPopulation {
    fn default() -> Self {
        SyntheticPopulation::LogNormal {
            median: 10_000.0,
            sigma: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PopulationSource {
    File { path: std::path::PathBuf },
    Synthetic(SyntheticPopulation),
}

/// Parse a `node_id,population` table. A header row, blank lines and lines
/// starting with `#` are skipped. Vertices absent from the table get 1.
pub fn parse_population_table(g: &NetworkGraph, text: &str) -> Result<Populations> {
    let mut pops = vec![None; g.node_count()];
    let mut first_row = true;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| Error::MalformedPopulation {
            line: lineno + 1,
            reason: reason.to_owned(),
        };
        let (id, value) = line.split_once(',').ok_or_else(|| bad("expected two columns"))?;
        let (id, value) = (id.trim(), value.trim());
        let header = std::mem::replace(&mut first_row, false);
        let parsed = match value.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.is_finite() => v.round() as u64,
            Ok(_) => return Err(bad("population must be a non-negative number")),
            Err(_) if header => continue,
            Err(_) => return Err(bad("population is not a number")),
        };
        let v = g.lookup(id).ok_or_else(|| Error::UnknownNode(id.to_owned()))?;
        pops[v.idx()] = Some(parsed.max(1));
    }
    Ok(Populations(pops.into_iter().map(|p| p.unwrap_or(1)).collect()))
}

pub fn load_population_table(g: &NetworkGraph, path: impl AsRef<Path>) -> Result<Populations> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_population_table(g, &text)
}

pub fn synthetic_populations<R: Rng + ?Sized>(
    g: &NetworkGraph,
    spec: &SyntheticPopulation,
    rng: &mut R,
) -> Result<Populations> {
    let n = g.node_count() as u64;
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let pops = match *spec {
        SyntheticPopulation::Uniform { total } => {
            let (base, rem) = (total / n, total % n);
            (0..n).map(|i| (base + u64::from(i < rem)).max(1)).collect()
        }
        SyntheticPopulation::LogNormal { median, sigma } => {
            if !(median > 0.0) || !(sigma >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "log-normal population needs median > 0 and sigma >= 0 (got {median}, {sigma})"
                )));
            }
            let dist = LogNormal::new(median.ln(), sigma)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..n)
                .map(|_| (dist.sample(rng).round() as u64).max(1))
                .collect()
        }
    };
    Ok(Populations(pops))
}

pub fn assign_populations<R: Rng + ?Sized>(
    g: &NetworkGraph,
    source: &PopulationSource,
    rng: &mut R,
) -> Result<Populations> {
    match source {
        PopulationSource::File { path } => load_population_table(g, path),
        PopulationSource::Synthetic(spec) => synthetic_populations(g, spec, rng),
    }
}

/// `m[s,i]`: active clients at node `s` subscribed to item `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandMatrix {
    nodes: usize,
    items: usize,
    counts: Vec<u64>,
}

impl DemandMatrix {
    pub fn zeros(nodes: usize, items: usize) -> Self {
        Self {
            nodes,
            items,
            counts: vec![0; nodes * items],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let nodes = rows.len();
        let items = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == items), "ragged demand rows");
        Self {
            nodes,
            items,
            counts: rows.into_iter().flatten().collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn item_count(&self) -> usize {
        self.items
    }

    #[inline]
    pub fn get(&self, s: NodeIx, item: usize) -> u64 {
        self.counts[s.idx() * self.items + item]
    }

    pub fn set(&mut self, s: NodeIx, item: usize, m: u64) {
        self.counts[s.idx() * self.items + item] = m;
    }

    pub fn row(&self, s: NodeIx) -> &[u64] {
        &self.counts[s.idx() * self.items..(s.idx() + 1) * self.items]
    }

    /// `M_s`.
    pub fn node_total(&self, s: NodeIx) -> u64 {
        self.row(s).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Offered load `sum_{s,i} eta_i m[s,i]` in Gb/s.
    pub fn offered_gbps(&self, catalogue: &Catalogue) -> f64 {
        (0..self.nodes)
            .map(|s| {
                self.row(NodeIx(s as u32))
                    .iter()
                    .zip(catalogue.items())
                    .map(|(&m, c)| m as f64 * c.bitrate_mbps)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / 1000.0
    }

    pub fn to_table(&self, g: &NetworkGraph) -> String {
        let mut out = String::from("node_id,item,clients\n");
        for s in g.nodes() {
            for (i, &m) in self.row(s).iter().enumerate() {
                if m > 0 {
                    let _ = writeln!(out, "{},{},{}", g.id(s), i + 1, m);
                }
            }
        }
        out
    }
}

/// Active clients per node: `round(active_fraction * U_s)`.
pub fn active_counts(populations: &Populations, active_fraction: f64) -> Vec<u64> {
    populations
        .0
        .iter()
        .map(|&u| (active_fraction * u as f64).round() as u64)
        .collect()
}

/// Multinomial demand per node, sampled as a chain of conditional binomials.
pub fn generate_demand<R: Rng + ?Sized>(
    catalogue: &Catalogue,
    populations: &Populations,
    active_fraction: f64,
    rng: &mut R,
) -> Result<DemandMatrix> {
    if !(0.0..=1.0).contains(&active_fraction) {
        return Err(Error::InvalidParameter(format!(
            "active fraction must lie in [0, 1], got {active_fraction}"
        )));
    }
    let active = active_counts(populations, active_fraction);
    let mut demand = DemandMatrix::zeros(active.len(), catalogue.len());
    let probs: Vec<f64> = catalogue.popularities().collect();
    for (s, &a) in active.iter().enumerate() {
        let row = &mut demand.counts[s * catalogue.len()..(s + 1) * catalogue.len()];
        multinomial_into(a, &probs, row, rng);
    }
    Ok(demand)
}

fn multinomial_into<R: Rng + ?Sized>(trials: u64, probs: &[f64], out: &mut [u64], rng: &mut R) {
    let mut remaining = trials;
    let mut mass: f64 = probs.iter().sum();
    for (k, (&p, slot)) in probs.iter().zip(out.iter_mut()).enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            *slot = remaining;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        *slot = draw;
        remaining -= draw;
        mass -= p;
        if mass <= 0.0 {
            mass = f64::MIN_POSITIVE;
        }
    }
}

/// Population lookup keyed by node id, for reports.
pub fn populations_by_id(g: &NetworkGraph, pops: &Populations) -> HashMap<String, u64> {
    g.nodes().map(|v| (g.id(v).to_owned(), pops.get(v))).collect()
}
