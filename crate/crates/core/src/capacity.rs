//! Link-capacity dimensioning for unicast and multicast delivery.
//!
//! Loads are accumulated in Mb/s and reported in Gb/s.
//!
//! Multicast groups form per (item, publisher). A catchment window of length
//! `tau` opens on the first request and closes `tau` later; the next request
//! after that opens a new one. With Poisson requests at rate `mu` over a
//! content period `T`, busy windows and idle gaps alternate, giving
//! `T = w * tau + (w - 1) / mu` and so `w = (T + 1/mu) / (tau + 1/mu)`
//! windows, i.e. `w` multicast streams. A tree arc never carries more streams
//! than there are clients below it, so each arc gets
//! `min(w, downstream clients)` streams.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalogue::Catalogue;
use crate::error::{Error, Result};
use crate::mapping::{RelationSet, Tier};
use crate::topology::{NetworkGraph, NodeIx, PathTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeliveryMode {
    Unicast,
    Multicast,
}

/// Content duration `T` and catchment interval `tau`, in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MulticastParams {
    pub duration_s: f64,
    pub catchment_s: f64,
}

impl MulticastParams {
    pub fn new(duration_s: f64, catchment_s: f64) -> Result<Self> {
        if !(catchment_s > 0.0 && catchment_s < duration_s) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < tau < T, got tau = {catchment_s}, T = {duration_s}"
            )));
        }
        Ok(Self {
            duration_s,
            catchment_s,
        })
    }

    /// Request rate `m / T` for `m` clients over the content period.
    pub fn rate(&self, clients: u64) -> f64 {
        clients as f64 / self.duration_s
    }
}

/// Mean number of catchment windows (multicast streams) over `T`.
///
/// Returns 1 when fewer than one request is expected.
pub fn expected_group_count(duration_s: f64, catchment_s: f64, rate: f64) -> Result<f64> {
    if !(duration_s > 0.0 && catchment_s > 0.0 && rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need T, tau, mu > 0, got {duration_s}, {catchment_s}, {rate}"
        )));
    }
    if catchment_s >= duration_s {
        return Err(Error::InvalidParameter(format!(
            "need tau < T, got tau = {catchment_s}, T = {duration_s}"
        )));
    }
    if rate * duration_s < 1.0 {
        return Ok(1.0);
    }
    let gap = 1.0 / rate;
    Ok(((duration_s + gap) / (catchment_s + gap)).max(1.0))
}

/// Mean clients per window, counting the request that opens it: `1 + mu tau`.
pub fn expected_group_size(rate: f64, catchment_s: f64) -> Result<f64> {
    if !(rate >= 0.0 && catchment_s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need mu >= 0 and tau > 0, got {rate}, {catchment_s}"
        )));
    }
    Ok(1.0 + rate * catchment_s)
}

/// Group size when several subscribers feed one window: their rates add.
pub fn aggregate_group_size(rates: &[f64], catchment_s: f64) -> Result<f64> {
    expected_group_size(rates.iter().sum(), catchment_s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkLoadReport {
    pub mode: DeliveryMode,
    pub params: Option<MulticastParams>,
    /// Load per arc index, Mb/s.
    arc_mbps: Vec<f64>,
    /// `chi(p)`: each publisher's own load on its outgoing arcs, Mb/s.
    publisher_mbps: BTreeMap<NodeIx, f64>,
}

impl LinkLoadReport {
    fn empty(g: &NetworkGraph, mode: DeliveryMode, params: Option<MulticastParams>) -> Self {
        Self {
            mode,
            params,
            arc_mbps: vec![0.0; g.arc_count()],
            publisher_mbps: BTreeMap::new(),
        }
    }

    pub fn arc_gbps(&self, arc: usize) -> f64 {
        self.arc_mbps[arc] / 1000.0
    }

    pub fn arc_loads_gbps(&self) -> impl Iterator<Item = f64> + '_ {
        self.arc_mbps.iter().map(|x| x / 1000.0)
    }

    /// Total backhaul: sum over all arcs.
    pub fn total_gbps(&self) -> f64 {
        self.arc_mbps.iter().sum::<f64>() / 1000.0
    }

    pub fn publisher_gbps(&self, p: NodeIx) -> f64 {
        self.publisher_mbps.get(&p).copied().unwrap_or(0.0) / 1000.0
    }

    pub fn publishers(&self) -> impl Iterator<Item = (NodeIx, f64)> + '_ {
        self.publisher_mbps.iter().map(|(&p, &x)| (p, x / 1000.0))
    }

    pub fn max_publisher_gbps(&self) -> f64 {
        self.publisher_mbps.values().copied().fold(0.0, f64::max) / 1000.0
    }
}

/// Per-arc unicast and multicast loads with per-publisher and total rows.
pub fn load_table(g: &NetworkGraph, unicast: &LinkLoadReport, multicast: &LinkLoadReport) -> String {
    let mut out = String::from("u,v,unicast_gbps,multicast_gbps\n");
    for (a, (u, v)) in g.arcs().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.3}",
            g.id(u),
            g.id(v),
            unicast.arc_gbps(a),
            multicast.arc_gbps(a)
        );
    }
    let publishers: BTreeSet<NodeIx> = unicast
        .publisher_mbps
        .keys()
        .chain(multicast.publisher_mbps.keys())
        .copied()
        .collect();
    for p in publishers {
        let _ = writeln!(
            out,
            "publisher,{},{:.3},{:.3}",
            g.id(p),
            unicast.publisher_gbps(p),
            multicast.publisher_gbps(p)
        );
    }
    let _ = writeln!(
        out,
        "total,,{:.3},{:.3}",
        unicast.total_gbps(),
        multicast.total_gbps()
    );
    out
}

/// Unicast: every relation puts `eta_i * m` on each arc of its path.
pub fn unicast_link_loads(
    relations: &RelationSet,
    catalogue: &Catalogue,
    g: &NetworkGraph,
) -> LinkLoadReport {
    let mut report = LinkLoadReport::empty(g, DeliveryMode::Unicast, None);
    for r in relations.all() {
        let beta = catalogue.item(r.item as usize).bitrate_mbps * r.clients as f64;
        if r.hops == 0 || beta == 0.0 {
            continue;
        }
        for a in relations.arcs(r) {
            report.arc_mbps[a] += beta;
        }
        *report.publisher_mbps.entry(r.publisher).or_default() += beta;
    }
    report
}

/// Arc set of the source tree from `publisher` to every subscriber.
pub fn build_multicast_tree(
    g: &NetworkGraph,
    paths: &PathTable,
    publisher: NodeIx,
    subscribers: &[NodeIx],
) -> Result<BTreeSet<usize>> {
    let mut arcs = BTreeSet::new();
    for &s in subscribers {
        if paths.path(publisher, s).is_none() {
            return Err(Error::Disconnected {
                from: g.id(publisher).to_owned(),
                to: g.id(s).to_owned(),
            });
        }
        arcs.extend(paths.arcs_back(publisher, s));
    }
    Ok(arcs)
}

/// One (item, publisher) multicast group: the tree arcs with the number of
/// clients below each one.
#[derive(Clone, Debug, PartialEq)]
struct Group {
    publisher: NodeIx,
    bitrate_mbps: f64,
    clients: u64,
    tier: Tier,
    /// (arc, clients downstream, arc leaves the publisher)
    arcs: Vec<(usize, u64, bool)>,
}

/// Multicast trees for a relation set, independent of `T` and `tau`, so one
/// set of trees can be priced under many parameter choices.
#[derive(Clone, Debug)]
pub struct MulticastTrees {
    arc_count: usize,
    groups: Vec<Group>,
}

impl MulticastTrees {
    pub fn new(relations: &RelationSet, catalogue: &Catalogue, g: &NetworkGraph) -> Self {
        let mut groups = Vec::new();
        let mut start = 0;
        let all = relations.all();
        while start < all.len() {
            let head = &all[start];
            let end = start
                + all[start..]
                    .iter()
                    .take_while(|r| (r.tier, r.item, r.publisher) == (head.tier, head.item, head.publisher))
                    .count();
            let mut down: BTreeMap<usize, u64> = BTreeMap::new();
            let mut clients = 0;
            for r in &all[start..end] {
                clients += r.clients;
                for a in relations.arcs(r) {
                    *down.entry(a).or_default() += r.clients;
                }
            }
            let publisher_arcs = g.out_arcs(head.publisher);
            groups.push(Group {
                publisher: head.publisher,
                bitrate_mbps: catalogue.item(head.item as usize).bitrate_mbps,
                clients,
                tier: head.tier,
                arcs: down
                    .into_iter()
                    .map(|(a, d)| (a, d, publisher_arcs.contains(&a)))
                    .collect(),
            });
            start = end;
        }
        Self {
            arc_count: g.arc_count(),
            groups,
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    fn streams(group: &Group, params: &MulticastParams) -> f64 {
        match group.tier {
            // Orchestrated edge-to-origin subscriptions share one stream.
            Tier::Cdn => 1.0,
            Tier::Consumer => expected_group_count(
                params.duration_s,
                params.catchment_s,
                params.rate(group.clients),
            )
            .expect("validated parameters and a non-empty group"),
        }
    }

    pub fn loads(&self, params: &MulticastParams) -> LinkLoadReport {
        let mut report = LinkLoadReport {
            mode: DeliveryMode::Multicast,
            params: Some(*params),
            arc_mbps: vec![0.0; self.arc_count],
            publisher_mbps: BTreeMap::new(),
        };
        for group in &self.groups {
            if group.arcs.is_empty() {
                continue;
            }
            let w = Self::streams(group, params);
            let mut own = 0.0;
            for &(a, down, leaves_publisher) in &group.arcs {
                let load = group.bitrate_mbps * w.min(down as f64);
                report.arc_mbps[a] += load;
                if leaves_publisher {
                    own += load;
                }
            }
            *report.publisher_mbps.entry(group.publisher).or_default() += own;
        }
        report
    }

    /// Total multicast backhaul in Gb/s without building a full report.
    pub fn total_gbps(&self, params: &MulticastParams) -> f64 {
        self.sum_gbps(params, |_| true)
    }

    /// Multicast backhaul of one relation tier, Gb/s.
    pub fn tier_total_gbps(&self, tier: Tier, params: &MulticastParams) -> f64 {
        self.sum_gbps(params, |g| g.tier == tier)
    }

    fn sum_gbps(&self, params: &MulticastParams, keep: impl Fn(&Group) -> bool) -> f64 {
        self.groups
            .iter()
            .filter(|g| !g.arcs.is_empty() && keep(g))
            .map(|g| {
                let w = Self::streams(g, params);
                g.arcs
                    .iter()
                    .map(|&(_, down, _)| g.bitrate_mbps * w.min(down as f64))
                    .sum::<f64>()
            })
            .sum::<f64>()
            / 1000.0
    }
}

pub fn multicast_link_loads(
    relations: &RelationSet,
    catalogue: &Catalogue,
    g: &NetworkGraph,
    params: &MulticastParams,
) -> LinkLoadReport {
    MulticastTrees::new(relations, catalogue, g).loads(params)
}

/// Unicast backhaul over multicast backhaul; 1 when both are zero.
pub fn multicast_gain(unicast: &LinkLoadReport, multicast: &LinkLoadReport) -> f64 {
    gain(unicast.total_gbps(), multicast.total_gbps())
}

pub(crate) fn gain(unicast: f64, multicast: f64) -> f64 {
    if unicast == 0.0 && multicast == 0.0 {
        1.0
    } else {
        unicast / multicast
    }
}
