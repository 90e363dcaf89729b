use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::config::System;
use super::ecdf::EcdfPoint;
use crate::placement::Algorithm;

/// Grid cell and trial a row belongs to. `k_d` is set only for DNS rows,
/// `tau` and `t` only for multicast rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowKey {
    pub system: System,
    pub algorithm: Algorithm,
    pub k_o: usize,
    pub k_e: usize,
    pub k_d: Option<usize>,
    pub tau: Option<f64>,
    pub t: Option<f64>,
    pub trial: usize,
}

impl RowKey {
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        (self.system, self.algorithm, self.k_o, self.k_e, self.k_d)
            .cmp(&(other.system, other.algorithm, other.k_o, other.k_e, other.k_d))
            .then_with(|| opt(self.tau, other.tau))
            .then_with(|| opt(self.t, other.t))
            .then(self.trial.cmp(&other.trial))
    }
}

/// Per-row measurements. Loads in Gb/s, volumes in MB.
///
/// `backhaul_gbps = consumer_gbps + cdn_gbps`. For `cdn_dns` and
/// `fcdn_unicast` both tiers are unicast; for `fcdn_multicast` the consumer
/// tier is catchment multicast and the edge-to-origin tier orchestrated
/// single-stream trees. Path statistics cover consumer relations, one sample
/// per (subscriber node, item).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub relations: usize,
    pub clients: u64,
    pub mean_path: f64,
    pub max_path: u32,
    pub zero_path_fraction: f64,
    pub backhaul_gbps: f64,
    pub consumer_gbps: f64,
    pub cdn_gbps: f64,
    pub max_publisher_gbps: f64,
    pub theoretical_mb: f64,
    pub cached_mb: f64,
    pub advertised_not_cached_mb: f64,
    /// Unicast over multicast backhaul for the same trial; multicast rows only.
    pub multicast_gain: Option<f64>,
    pub offered_gbps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub key: RowKey,
    pub metrics: Metrics,
    /// Consumer path-length distribution; empty for multicast rows, whose
    /// paths are those of the matching unicast row.
    pub ecdf: Vec<EcdfPoint>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultsDataset {
    pub rows: Vec<ResultRow>,
    /// Skipped cells and failed trials, in grid order.
    pub diagnostics: Vec<String>,
}

impl ResultsDataset {
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.key.cmp_key(&b.key));
    }

    pub fn rows_for(&self, system: System) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.key.system == system)
    }

    /// The row with exactly this key.
    pub fn find(&self, key: &RowKey) -> Option<&ResultRow> {
        self.rows
            .binary_search_by(|r| r.key.cmp_key(key))
            .ok()
            .map(|i| &self.rows[i])
    }
}
