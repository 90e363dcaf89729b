//! Binding subscribers to publishers.
//!
//! fCDN anycast binds every subscriber node straight to its nearest
//! publisher. The DNS baseline first maps the subscriber to its nearest LDNS
//! and then hands it the publisher nearest to that LDNS. In both systems an
//! edge that serves an item it does not store opens a second-tier relation
//! to its nearest origin.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalogue::DemandMatrix;
use crate::error::{Error, Result};
use crate::placement::{CachePlan, PlacementResult};
use crate::topology::{DistanceMatrix, NetworkGraph, NodeIx, PathTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Client-facing router to the publisher serving it.
    Consumer,
    /// Edge to origin, for items the edge advertises but does not store.
    Cdn,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Consumer => "consumer",
            Tier::Cdn => "cdn",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PubSubRelation {
    pub tier: Tier,
    /// 0-based catalogue index.
    pub item: u32,
    pub publisher: NodeIx,
    pub subscriber: NodeIx,
    /// Clients carried; for the cdn tier, the clients the edge serves.
    pub clients: u64,
    pub hops: u32,
}

/// Relations sorted by (tier, item, publisher, subscriber), together with the
/// path table that realises each one as a publisher-to-subscriber path.
#[derive(Clone, Debug)]
pub struct RelationSet {
    relations: Vec<PubSubRelation>,
    paths: Arc<PathTable>,
}

impl RelationSet {
    pub fn new(mut relations: Vec<PubSubRelation>, paths: Arc<PathTable>) -> Self {
        relations.sort_by_key(|r| (r.tier, r.item, r.publisher, r.subscriber));
        Self { relations, paths }
    }

    pub fn all(&self) -> &[PubSubRelation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn tier(&self, tier: Tier) -> impl Iterator<Item = &PubSubRelation> {
        self.relations.iter().filter(move |r| r.tier == tier)
    }

    pub fn consumer(&self) -> impl Iterator<Item = &PubSubRelation> {
        self.tier(Tier::Consumer)
    }

    pub fn cdn(&self) -> impl Iterator<Item = &PubSubRelation> {
        self.tier(Tier::Cdn)
    }

    pub fn path_table(&self) -> &PathTable {
        &self.paths
    }

    /// Vertex sequence from publisher to subscriber.
    pub fn path(&self, r: &PubSubRelation) -> Vec<NodeIx> {
        self.paths
            .path(r.publisher, r.subscriber)
            .expect("relations are only built between connected vertices")
    }

    /// Arc indices on the relation's path (subscriber end first).
    pub fn arcs<'a>(&'a self, r: &PubSubRelation) -> impl Iterator<Item = usize> + 'a {
        self.paths.arcs_back(r.publisher, r.subscriber)
    }

    pub fn to_table(&self, g: &NetworkGraph) -> String {
        let mut out = String::from("item,subscriber,publisher,tier,clients,hops\n");
        for r in &self.relations {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.item + 1,
                g.id(r.subscriber),
                g.id(r.publisher),
                r.tier.name(),
                r.clients,
                r.hops
            );
        }
        out
    }
}

/// Publishers ordered by distance from one vertex.
struct Ranked(Vec<(u32, NodeIx)>);

impl Ranked {
    fn from(
        origin: NodeIx,
        publishers: &[NodeIx],
        dist: &DistanceMatrix,
        g: &NetworkGraph,
    ) -> Result<Self> {
        let mut v: Vec<(u32, NodeIx)> = publishers
            .iter()
            .filter_map(|&p| dist.get(origin, p).map(|h| (h, p)))
            .collect();
        if v.is_empty() {
            return Err(Error::Disconnected {
                from: g.id(origin).to_owned(),
                to: g.id(publishers[0]).to_owned(),
            });
        }
        v.sort_unstable();
        Ok(Self(v))
    }

    /// Nearest publisher for `item`; at equal distance a stored copy wins,
    /// then the smaller id.
    fn best(&self, item: usize, plan: &CachePlan) -> NodeIx {
        let nearest = self.0[0].0;
        self.0
            .iter()
            .take_while(|(h, _)| *h == nearest)
            .find(|(_, p)| plan.caches(*p, item))
            .unwrap_or(&self.0[0])
            .1
    }
}

fn publishers_of(placement: &PlacementResult) -> Result<Vec<NodeIx>> {
    let p: Vec<NodeIx> = placement.publishers().collect();
    if p.is_empty() {
        return Err(Error::NoPublishers);
    }
    Ok(p)
}

/// fCDN anycast: each subscriber node binds to its nearest publisher.
pub fn match_fcdn(
    g: &NetworkGraph,
    placement: &PlacementResult,
    plan: &CachePlan,
    demand: &DemandMatrix,
    dist: &DistanceMatrix,
    paths: &Arc<PathTable>,
) -> Result<RelationSet> {
    let publishers = publishers_of(placement)?;
    check_items(plan, demand)?;
    let mut relations = Vec::new();
    for s in g.nodes() {
        let ranked = Ranked::from(s, &publishers, dist, g)?;
        for (item, &m) in demand.row(s).iter().enumerate() {
            if m > 0 {
                let p = ranked.best(item, plan);
                relations.push(consumer(item, p, s, m, dist));
            }
        }
    }
    add_miss_relations(g, placement, plan, dist, &mut relations)?;
    Ok(RelationSet::new(relations, Arc::clone(paths)))
}

/// DNS redirection: subscriber -> nearest LDNS -> publisher nearest that LDNS.
pub fn match_dns(
    g: &NetworkGraph,
    placement: &PlacementResult,
    ldns: &[NodeIx],
    plan: &CachePlan,
    demand: &DemandMatrix,
    dist: &DistanceMatrix,
    paths: &Arc<PathTable>,
) -> Result<RelationSet> {
    if ldns.is_empty() {
        return Err(Error::NoLdns);
    }
    let publishers = publishers_of(placement)?;
    check_items(plan, demand)?;
    let mut per_ldns: BTreeMap<NodeIx, Ranked> = BTreeMap::new();
    let mut relations = Vec::new();
    for s in g.nodes() {
        if demand.node_total(s) == 0 {
            continue;
        }
        let resolver = Ranked::from(s, ldns, dist, g)?.0[0].1;
        let ranked = match per_ldns.entry(resolver) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(Ranked::from(resolver, &publishers, dist, g)?),
        };
        for (item, &m) in demand.row(s).iter().enumerate() {
            if m > 0 {
                let p = ranked.best(item, plan);
                if dist.get(p, s).is_none() {
                    return Err(Error::Disconnected {
                        from: g.id(p).to_owned(),
                        to: g.id(s).to_owned(),
                    });
                }
                relations.push(consumer(item, p, s, m, dist));
            }
        }
    }
    add_miss_relations(g, placement, plan, dist, &mut relations)?;
    Ok(RelationSet::new(relations, Arc::clone(paths)))
}

fn check_items(plan: &CachePlan, demand: &DemandMatrix) -> Result<()> {
    if plan.item_count() != demand.item_count() {
        return Err(Error::InvalidParameter(format!(
            "demand covers {} items but the cache plan {}",
            demand.item_count(),
            plan.item_count()
        )));
    }
    Ok(())
}

fn consumer(item: usize, p: NodeIx, s: NodeIx, m: u64, dist: &DistanceMatrix) -> PubSubRelation {
    PubSubRelation {
        tier: Tier::Consumer,
        item: item as u32,
        publisher: p,
        subscriber: s,
        clients: m,
        hops: dist.hops(p, s),
    }
}

fn add_miss_relations(
    g: &NetworkGraph,
    placement: &PlacementResult,
    plan: &CachePlan,
    dist: &DistanceMatrix,
    relations: &mut Vec<PubSubRelation>,
) -> Result<()> {
    let mut misses: BTreeMap<(NodeIx, u32), u64> = BTreeMap::new();
    for r in relations.iter() {
        if !placement.is_origin(r.publisher) && !plan.caches(r.publisher, r.item as usize) {
            *misses.entry((r.publisher, r.item)).or_default() += r.clients;
        }
    }
    if misses.is_empty() {
        return Ok(());
    }
    if placement.origins.is_empty() {
        return Err(Error::InvalidParameter(
            "edges miss items but no origin is placed".into(),
        ));
    }
    let mut nearest_origin = BTreeMap::new();
    for ((edge, item), clients) in misses {
        let origin = match nearest_origin.get(&edge) {
            Some(&o) => o,
            None => {
                let o = Ranked::from(edge, &placement.origins, dist, g)?.0[0].1;
                nearest_origin.insert(edge, o);
                o
            }
        };
        relations.push(PubSubRelation {
            tier: Tier::Cdn,
            item,
            publisher: origin,
            subscriber: edge,
            clients,
            hops: dist.hops(origin, edge),
        });
    }
    Ok(())
}

/// One hop count per consumer-tier relation.
pub fn path_lengths(relations: &RelationSet) -> Vec<u32> {
    relations.consumer().map(|r| r.hops).collect()
}

/// One hop count per cdn-tier relation.
pub fn cdn_path_lengths(relations: &RelationSet) -> Vec<u32> {
    relations.cdn().map(|r| r.hops).collect()
}
