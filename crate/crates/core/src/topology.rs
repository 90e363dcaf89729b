//! Network graphs, hop distances and closeness.
//!
//! Vertices are stored in canonical order: ascending byte-wise order of their
//! string ids. A [`NodeIx`] is a position in that order, so comparing two
//! indices is the same as comparing their ids, and every tie-break that says
//! "smallest id wins" can compare indices directly.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a vertex in the canonical (id-sorted) vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeIx(pub u32);

impl NodeIx {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeIx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub label: Option<String>,
}

/// Directed graph with no self-arcs. Out-arcs are kept in CSR form, sorted by
/// (tail, head), and an arc's position in that layout is its arc index.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGraph {
    nodes: Vec<Node>,
    index: HashMap<String, NodeIx>,
    out_start: Vec<usize>,
    out_heads: Vec<NodeIx>,
    arc_capacity_gbps: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<(String, String, Option<f64>)>,
    directed: bool,
}

impl GraphBuilder {
    pub fn undirected() -> Self {
        Self::default()
    }

    pub fn directed() -> Self {
        Self {
            directed: true,
            ..Self::default()
        }
    }

    pub fn node(mut self, id: impl Into<String>) -> Self {
        self.nodes.push(Node {
            id: id.into(),
            label: None,
        });
        self
    }

    pub fn labelled_node(mut self, id: impl Into<String>, label: impl Into<String>) -> Self {
        self.nodes.push(Node {
            id: id.into(),
            label: Some(label.into()),
        });
        self
    }

    pub fn edge(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.edges.push((a.into(), b.into(), None));
        self
    }

    pub fn edge_with_capacity(
        mut self,
        a: impl Into<String>,
        b: impl Into<String>,
        gbps: Option<f64>,
    ) -> Self {
        self.edges.push((a.into(), b.into(), gbps));
        self
    }

    pub fn build(self) -> Result<NetworkGraph> {
        let mut nodes = self.nodes;
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateNode(w[0].id.clone()));
        }
        let index: HashMap<String, NodeIx> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), NodeIx(i as u32)))
            .collect();

        // Parallel edges collapse into one arc; the first capacity seen is kept.
        let mut arcs: BTreeMap<(NodeIx, NodeIx), Option<f64>> = BTreeMap::new();
        for (a, b, cap) in self.edges {
            let u = *index.get(&a).ok_or_else(|| Error::DanglingEndpoint(a.clone()))?;
            let v = *index.get(&b).ok_or_else(|| Error::DanglingEndpoint(b.clone()))?;
            if u == v {
                continue;
            }
            arcs.entry((u, v)).or_insert(cap);
            if !self.directed {
                arcs.entry((v, u)).or_insert(cap);
            }
        }

        let n = nodes.len();
        let mut out_start = vec![0usize; n + 1];
        for &(u, _) in arcs.keys() {
            out_start[u.idx() + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
        }
        let out_heads = arcs.keys().map(|&(_, v)| v).collect();
        let arc_capacity_gbps = arcs.values().copied().collect();

        Ok(NetworkGraph {
            nodes,
            index,
            out_start,
            out_heads,
            arc_capacity_gbps,
        })
    }
}

impl NetworkGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out_heads.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeIx> {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn node(&self, v: NodeIx) -> &Node {
        &self.nodes[v.idx()]
    }

    pub fn id(&self, v: NodeIx) -> &str {
        &self.nodes[v.idx()].id
    }

    /// Label if present, otherwise the id.
    pub fn display_name(&self, v: NodeIx) -> &str {
        let node = &self.nodes[v.idx()];
        node.label.as_deref().unwrap_or(&node.id)
    }

    pub fn lookup(&self, id: &str) -> Option<NodeIx> {
        self.index.get(id).copied()
    }

    /// Out-neighbourhood of `u`, ascending.
    pub fn neighbours(&self, u: NodeIx) -> &[NodeIx] {
        &self.out_heads[self.out_start[u.idx()]..self.out_start[u.idx() + 1]]
    }

    /// Index of arc `u -> v`, if present.
    pub fn arc_index(&self, u: NodeIx, v: NodeIx) -> Option<usize> {
        let lo = self.out_start[u.idx()];
        self.neighbours(u).binary_search(&v).ok().map(|i| lo + i)
    }

    /// Endpoints of arc `a`.
    pub fn arc(&self, a: usize) -> (NodeIx, NodeIx) {
        let tail = self.out_start.partition_point(|&s| s <= a) - 1;
        (NodeIx(tail as u32), self.out_heads[a])
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeIx, NodeIx)> + '_ {
        self.nodes()
            .flat_map(move |u| self.neighbours(u).iter().map(move |&v| (u, v)))
    }

    /// Arc indices leaving `u`.
    pub fn out_arcs(&self, u: NodeIx) -> std::ops::Range<usize> {
        self.out_start[u.idx()]..self.out_start[u.idx() + 1]
    }

    /// Link rate recorded in the source document, in Gb/s. Informational only.
    pub fn arc_capacity_gbps(&self, a: usize) -> Option<f64> {
        self.arc_capacity_gbps[a]
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.arc_index(v, u).is_some())
    }
}

/// Which vertices of a Topology Zoo document to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Drop vertices that carry no latitude/longitude when the document
    /// declares coordinate attributes. Topology Zoo marks external or
    /// unlocated PoPs this way; they cannot be assigned a population.
    pub geolocated_only: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            geolocated_only: true,
        }
    }
}

impl LoadOptions {
    pub fn keep_all() -> Self {
        Self {
            geolocated_only: false,
        }
    }
}

pub fn load_topology(path: impl AsRef<Path>) -> Result<NetworkGraph> {
    load_topology_with(path, LoadOptions::default())
}

pub fn load_topology_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<NetworkGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graphml(&text, opts)
}

/// Parse a GraphML document as published by the Internet Topology Zoo.
pub fn parse_graphml(text: &str, opts: LoadOptions) -> Result<NetworkGraph> {
    let doc = roxmltree::Document::parse(text)
        .map_err(|e| Error::MalformedDocument(e.to_string()))?;

    let mut keys: HashMap<&str, (&str, &str)> = HashMap::new();
    for key in doc.descendants().filter(|n| n.has_tag_name("key")) {
        let id = key
            .attribute("id")
            .ok_or_else(|| Error::MalformedDocument("<key> without id".into()))?;
        let name = key.attribute("attr.name").unwrap_or(id);
        let domain = key.attribute("for").unwrap_or("all");
        keys.insert(id, (name, domain));
    }
    let key_named = |want: &str, domain: &str| {
        keys.iter()
            .find(|(_, (name, d))| name.eq_ignore_ascii_case(want) && (*d == domain || *d == "all"))
            .map(|(id, _)| *id)
    };
    let label_key = key_named("label", "node");
    let lat_key = key_named("Latitude", "node");
    let lon_key = key_named("Longitude", "node");
    let speed_key = key_named("LinkSpeedRaw", "edge");
    let filter_unlocated = opts.geolocated_only && lat_key.is_some() && lon_key.is_some();

    let graph = doc
        .descendants()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| Error::MalformedDocument("no <graph> element".into()))?;
    let mut builder = match graph.attribute("edgedefault") {
        Some("directed") => GraphBuilder::directed(),
        _ => GraphBuilder::undirected(),
    };

    let data_of = |el: roxmltree::Node<'_, '_>, key: Option<&str>| -> Option<String> {
        let key = key?;
        el.children()
            .find(|c| c.has_tag_name("data") && c.attribute("key") == Some(key))
            .and_then(|c| c.text())
            .map(|t| t.trim().to_owned())
    };

    let mut seen = BTreeSet::new();
    let mut dropped = BTreeSet::new();
    for node in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| Error::MalformedDocument("<node> without id".into()))?;
        if !seen.insert(id.to_owned()) {
            return Err(Error::DuplicateNode(id.to_owned()));
        }
        if filter_unlocated
            && (data_of(node, lat_key).is_none() || data_of(node, lon_key).is_none())
        {
            dropped.insert(id.to_owned());
            continue;
        }
        builder = match data_of(node, label_key) {
            Some(label) => builder.labelled_node(id, label),
            None => builder.node(id),
        };
    }

    for edge in graph.children().filter(|n| n.has_tag_name("edge")) {
        let (Some(src), Some(dst)) = (edge.attribute("source"), edge.attribute("target")) else {
            return Err(Error::MalformedDocument("<edge> without source/target".into()));
        };
        for end in [src, dst] {
            if !seen.contains(end) {
                return Err(Error::DanglingEndpoint(end.to_owned()));
            }
        }
        if dropped.contains(src) || dropped.contains(dst) {
            continue;
        }
        let gbps = data_of(edge, speed_key)
            .and_then(|s| s.parse::<f64>().ok())
            .map(|bps| bps / 1e9);
        builder = builder.edge_with_capacity(src, dst, gbps);
    }
    builder.build()
}

/// All-pairs hop counts. `None` marks an unreachable pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    hops: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: NodeIx, v: NodeIx) -> Option<u32> {
        self.hops[u.idx() * self.n + v.idx()]
    }

    /// Hop count for a pair known to be connected.
    ///
    /// Panics if `v` is unreachable from `u`.
    #[inline]
    pub fn hops(&self, u: NodeIx, v: NodeIx) -> u32 {
        self.get(u, v)
            .unwrap_or_else(|| panic!("{v} unreachable from {u}"))
    }

    /// Sum of hop counts from `v` to every vertex; `None` if any is unreachable.
    pub fn row_sum(&self, v: NodeIx) -> Option<u64> {
        self.hops[v.idx() * self.n..(v.idx() + 1) * self.n]
            .iter()
            .try_fold(0u64, |acc, h| h.map(|h| acc + u64::from(h)))
    }

    pub fn first_unreachable(&self) -> Option<(NodeIx, NodeIx)> {
        let pos = self.hops.iter().position(Option::is_none)?;
        Some((
            NodeIx((pos / self.n) as u32),
            NodeIx((pos % self.n) as u32),
        ))
    }

    pub fn is_connected(&self) -> bool {
        self.first_unreachable().is_none()
    }

    /// Largest finite entry.
    pub fn diameter(&self) -> u32 {
        self.hops.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Breadth-first search from every vertex.
pub fn all_pairs_hop_distance(g: &NetworkGraph) -> DistanceMatrix {
    let n = g.node_count();
    let mut hops = vec![None; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for s in g.nodes() {
        let row = &mut hops[s.idx() * n..(s.idx() + 1) * n];
        row[s.idx()] = Some(0);
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let d = row[u.idx()].expect("queued vertices are labelled");
            for &v in g.neighbours(u) {
                if row[v.idx()].is_none() {
                    row[v.idx()] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    DistanceMatrix { n, hops }
}

pub(crate) fn require_connected(g: &NetworkGraph, dist: &DistanceMatrix) -> Result<()> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    match dist.first_unreachable() {
        None => Ok(()),
        Some((u, v)) => Err(Error::Disconnected {
            from: g.id(u).to_owned(),
            to: g.id(v).to_owned(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Closeness {
    /// (|V| - 1) / sum of distances.
    pub raw: Vec<f64>,
    /// `raw` divided by its total; sums to one.
    pub normalized: Vec<f64>,
}

pub fn closeness_scores(g: &NetworkGraph, dist: &DistanceMatrix) -> Result<Closeness> {
    require_connected(g, dist)?;
    let n = g.node_count();
    if n == 1 {
        return Ok(Closeness {
            raw: vec![0.0],
            normalized: vec![1.0],
        });
    }
    let raw: Vec<f64> = g
        .nodes()
        .map(|v| (n - 1) as f64 / dist.row_sum(v).expect("connected") as f64)
        .collect();
    let total: f64 = raw.iter().sum();
    let normalized = raw.iter().map(|c| c / total).collect();
    Ok(Closeness { raw, normalized })
}

/// Lexicographically smallest shortest paths from every source.
///
/// Among equal-length paths the one whose vertex sequence is smallest wins.
/// Sub-paths of such a path are themselves lexicographically smallest, so the
/// paths from one source form a tree and every source has a parent table.
#[derive(Clone, Debug)]
pub struct PathTable {
    n: usize,
    /// `parent[src * n + v]`: arc index entering `v` on the path from `src`.
    parent_arc: Vec<Option<u32>>,
    tails: Vec<NodeIx>,
}

impl PathTable {
    pub fn new(g: &NetworkGraph, dist: &DistanceMatrix) -> Self {
        let n = g.node_count();
        let mut tails = Vec::with_capacity(g.arc_count());
        for u in g.nodes() {
            tails.extend(std::iter::repeat_n(u, g.neighbours(u).len()));
        }
        let mut parent_arc = vec![None; n * n];
        let mut rank = vec![usize::MAX; n];
        let mut levels: Vec<Vec<NodeIx>> = Vec::new();
        for s in g.nodes() {
            levels.clear();
            for v in g.nodes() {
                if let Some(d) = dist.get(s, v) {
                    let d = d as usize;
                    if levels.len() <= d {
                        levels.resize_with(d + 1, Vec::new);
                    }
                    levels[d].push(v);
                }
            }
            rank.fill(usize::MAX);
            rank[s.idx()] = 0;
            let row = &mut parent_arc[s.idx() * n..(s.idx() + 1) * n];
            let mut best: Vec<(usize, NodeIx)> = Vec::new();
            for d in 1..levels.len() {
                // Each vertex at depth d picks the predecessor whose own path
                // ranks lowest, then the level is re-ranked by (parent rank, id).
                for u in &levels[d - 1] {
                    for a in g.out_arcs(*u) {
                        let v = g.out_heads[a];
                        if dist.get(s, v) != Some(d as u32) {
                            continue;
                        }
                        let better = match row[v.idx()] {
                            None => true,
                            Some(cur) => rank[u.idx()] < rank[tails[cur as usize].idx()],
                        };
                        if better {
                            row[v.idx()] = Some(a as u32);
                        }
                    }
                }
                best.clear();
                best.extend(levels[d].iter().map(|&v| {
                    let a = row[v.idx()].expect("reachable vertex has a parent");
                    (rank[tails[a as usize].idx()], v)
                }));
                best.sort_unstable();
                for (r, &(_, v)) in best.iter().enumerate() {
                    rank[v.idx()] = r;
                }
            }
        }
        Self {
            n,
            parent_arc,
            tails,
        }
    }

    /// Arcs on the path `src -> dst`, walked backwards from `dst`.
    pub fn arcs_back(&self, src: NodeIx, dst: NodeIx) -> ArcsBack<'_> {
        ArcsBack {
            table: self,
            src,
            cur: dst,
        }
    }

    /// Vertex sequence of the path `src -> dst`, or `None` if unreachable.
    pub fn path(&self, src: NodeIx, dst: NodeIx) -> Option<Vec<NodeIx>> {
        if src != dst && self.parent_arc[src.idx() * self.n + dst.idx()].is_none() {
            return None;
        }
        let mut p = vec![dst];
        p.extend(self.arcs_back(src, dst).map(|a| self.tails[a]));
        p.reverse();
        Some(p)
    }
}

pub struct ArcsBack<'a> {
    table: &'a PathTable,
    src: NodeIx,
    cur: NodeIx,
}

impl Iterator for ArcsBack<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur == self.src {
            return None;
        }
        let t = self.table;
        let a = t.parent_arc[self.src.idx() * t.n + self.cur.idx()]? as usize;
        self.cur = t.tails[a];
        Some(a)
    }
}
