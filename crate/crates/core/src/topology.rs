//! Physical network topologies: nodes, bidirectional fiber links and the
//! channel grid carried by every fiber.
//!
//! Nodes are stored sorted by identifier, so a node index comparison is the
//! same as a lexicographic comparison of identifiers. Every tie-break in the
//! crate relies on this.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a node inside a [`Topology`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

/// Index of a directed fiber. Link `l` owns fibers `2l` (low to high node
/// index) and `2l + 1` (high to low).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiberId(pub usize);

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("malformed topology document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("topology has no nodes")]
    Empty,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("link {index} references unknown node `{node}`")]
    UnknownLinkEndpoint { index: usize, node: String },
    #[error("link {index} is a self-loop on `{node}`")]
    SelfLoop { index: usize, node: String },
    #[error("link {index} ({a}-{b}) has non-positive length {length_km} km")]
    NonPositiveLength { index: usize, a: String, b: String, length_km: f64 },
    #[error("duplicate link {a}-{b} (link {index})")]
    DuplicateLink { index: usize, a: String, b: String },
    #[error("graph is disconnected: `{0}` is unreachable")]
    Disconnected(String),
    #[error("invalid channel grid: {0}")]
    InvalidGrid(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("nodes `{0}` and `{1}` are not adjacent")]
    NotAdjacent(String, String),
    #[error("source and destination are both `{0}`")]
    SameEndpoints(String),
    #[error("k must be at least 1")]
    ZeroK,
}

/// Fixed channel grid shared by every fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelGrid {
    pub channel_count: usize,
    pub spacing_ghz: u32,
}

impl Default for ChannelGrid {
    fn default() -> Self {
        ChannelGrid { channel_count: 50, spacing_ghz: 100 }
    }
}

/// Undirected fiber link. Endpoints are normalized so that `a < b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
}

/// A loop-free node sequence with its total physical length.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub length_km: f64,
}

impl Path {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("path is never empty")
    }

    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    nodes: Vec<String>,
    links: Vec<LinkDoc>,
    #[serde(default)]
    grid: ChannelGrid,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    a: String,
    b: String,
    length_km: f64,
}

/// Validated, immutable physical topology.
#[derive(Clone, Debug)]
pub struct Topology {
    name: String,
    source: Option<String>,
    nodes: Vec<String>,
    links: Vec<Link>,
    grid: ChannelGrid,
    index: HashMap<String, NodeId>,
    /// `adjacency[u]` lists `(neighbor, link index)` sorted by neighbor.
    adjacency: Vec<Vec<(NodeId, usize)>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.source == other.source
            && self.nodes == other.nodes
            && self.links == other.links
            && self.grid == other.grid
    }
}

impl Topology {
    /// Parse and validate a JSON topology document.
    pub fn parse(text: &str) -> Result<Topology, TopologyError> {
        let doc: TopologyDoc = serde_json::from_str(text)?;
        Topology::from_doc(doc)
    }

    /// Build a topology from `(a, b, length_km)` triples.
    pub fn build(
        name: &str,
        nodes: &[&str],
        links: &[(&str, &str, f64)],
        grid: ChannelGrid,
    ) -> Result<Topology, TopologyError> {
        Topology::from_doc(TopologyDoc {
            name: name.to_string(),
            source: None,
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            links: links.iter().map(|&(a, b, length_km)| LinkDoc { a: a.into(), b: b.into(), length_km }).collect(),
            grid,
        })
    }

    fn from_doc(doc: TopologyDoc) -> Result<Topology, TopologyError> {
        if doc.nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        if doc.grid.channel_count == 0 {
            return Err(TopologyError::InvalidGrid("channel_count must be at least 1".into()));
        }
        if doc.grid.spacing_ghz == 0 {
            return Err(TopologyError::InvalidGrid("spacing_ghz must be positive".into()));
        }
        let mut nodes = doc.nodes;
        nodes.sort();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::DuplicateNode(w[0].clone()));
        }
        let index: HashMap<String, NodeId> = nodes.iter().enumerate().map(|(i, n)| (n.clone(), NodeId(i))).collect();

        let mut links = Vec::with_capacity(doc.links.len());
        let mut seen = HashSet::new();
        for (i, l) in doc.links.into_iter().enumerate() {
            let lookup = |n: &str| {
                index
                    .get(n)
                    .copied()
                    .ok_or_else(|| TopologyError::UnknownLinkEndpoint { index: i, node: n.to_string() })
            };
            let (a, b) = (lookup(&l.a)?, lookup(&l.b)?);
            if a == b {
                return Err(TopologyError::SelfLoop { index: i, node: l.a });
            }
            if !(l.length_km > 0.0 && l.length_km.is_finite()) {
                return Err(TopologyError::NonPositiveLength { index: i, a: l.a, b: l.b, length_km: l.length_km });
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((a, b)) {
                return Err(TopologyError::DuplicateLink { index: i, a: l.a, b: l.b });
            }
            links.push(Link { a, b, length_km: l.length_km });
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, l) in links.iter().enumerate() {
            adjacency[l.a.0].push((l.b, i));
            adjacency[l.b.0].push((l.a, i));
        }
        for adj in &mut adjacency {
            adj.sort();
        }

        let topology = Topology { name: doc.name, source: doc.source, nodes, links, grid: doc.grid, index, adjacency };
        topology.check_connected()?;
        Ok(topology)
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v.0] {
                    seen[v.0] = true;
                    stack.push(v.0);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(TopologyError::Disconnected(self.nodes[i].clone())),
            None => Ok(()),
        }
    }

    /// Serialize back to the JSON document format.
    pub fn to_json(&self) -> String {
        let doc = TopologyDoc {
            name: self.name.clone(),
            source: self.source.clone(),
            nodes: self.nodes.clone(),
            links: self
                .links
                .iter()
                .map(|l| LinkDoc {
                    a: self.node_name(l.a).to_string(),
                    b: self.node_name(l.b).to_string(),
                    length_km: l.length_km,
                })
                .collect(),
            grid: self.grid,
        };
        serde_json::to_string_pretty(&doc).expect("topology serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Free-text provenance note carried by the document, if any.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn grid(&self) -> ChannelGrid {
        self.grid
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.nodes[n.0]
    }

    pub fn node(&self, name: &str) -> Result<NodeId, TopologyError> {
        self.index.get(name).copied().ok_or_else(|| TopologyError::UnknownNode(name.to_string()))
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn fiber_count(&self) -> usize {
        self.links.len() * 2
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.0].len()
    }

    pub fn neighbors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[n.0].iter().map(|&(v, _)| v)
    }

    /// Link index connecting `u` and `v`, if they are adjacent.
    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.adjacency[u.0].binary_search_by(|&(w, _)| w.cmp(&v)).ok().map(|pos| self.adjacency[u.0][pos].1)
    }

    /// Directed fiber carrying traffic from `u` to `v`.
    pub fn fiber(&self, u: NodeId, v: NodeId) -> Option<FiberId> {
        self.link_between(u, v).map(|l| FiberId(2 * l + usize::from(u > v)))
    }

    /// Directed fibers traversed by `nodes`, in order.
    pub fn fibers_along(&self, nodes: &[NodeId]) -> Result<Vec<FiberId>, TopologyError> {
        nodes.windows(2).map(|w| self.fiber(w[0], w[1]).ok_or_else(|| self.not_adjacent(w[0], w[1]))).collect()
    }

    /// Per-link lengths along `nodes`.
    pub fn link_lengths(&self, nodes: &[NodeId]) -> Result<Vec<f64>, TopologyError> {
        nodes
            .windows(2)
            .map(|w| {
                self.link_between(w[0], w[1])
                    .map(|l| self.links[l].length_km)
                    .ok_or_else(|| self.not_adjacent(w[0], w[1]))
            })
            .collect()
    }

    /// Total length of a node sequence; a single node has length 0.
    pub fn path_length_km(&self, nodes: &[NodeId]) -> Result<f64, TopologyError> {
        Ok(self.link_lengths(nodes)?.iter().sum())
    }

    fn not_adjacent(&self, u: NodeId, v: NodeId) -> TopologyError {
        TopologyError::NotAdjacent(self.node_name(u).into(), self.node_name(v).into())
    }

    /// Up to `k` loop-free paths from `s` to `d`, ordered by total length and
    /// then lexicographically by node sequence.
    ///
    /// Best-first search over partial simple paths. With strictly positive
    /// link lengths every prefix of a path is popped before the path itself,
    /// so completed paths leave the heap in exact `(length, sequence)` order.
    pub fn k_shortest_paths(&self, s: NodeId, d: NodeId, k: usize) -> Result<Vec<Path>, TopologyError> {
        for n in [s, d] {
            if n.0 >= self.nodes.len() {
                return Err(TopologyError::UnknownNode(format!("#{}", n.0)));
            }
        }
        if s == d {
            return Err(TopologyError::SameEndpoints(self.node_name(s).into()));
        }
        if k == 0 {
            return Err(TopologyError::ZeroK);
        }

        let mut heap = BinaryHeap::new();
        heap.push(Partial { length_km: 0.0, nodes: vec![s] });
        let mut out = Vec::new();
        while let Some(Partial { length_km, nodes }) = heap.pop() {
            let last = *nodes.last().unwrap();
            if last == d {
                out.push(Path { nodes, length_km });
                if out.len() == k {
                    break;
                }
                continue;
            }
            for &(next, l) in &self.adjacency[last.0] {
                if nodes.contains(&next) {
                    continue;
                }
                let mut extended = nodes.clone();
                extended.push(next);
                heap.push(Partial { length_km: length_km + self.links[l].length_km, nodes: extended });
            }
        }
        Ok(out)
    }

    pub fn display_path(&self, nodes: &[NodeId]) -> String {
        nodes.iter().map(|&n| self.node_name(n)).collect::<Vec<_>>().join("-")
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} nodes, {} links)", self.name, self.nodes.len(), self.links.len())
    }
}

/// Heap entry; `BinaryHeap` is a max-heap so the ordering is reversed.
struct Partial {
    length_km: f64,
    nodes: Vec<NodeId>,
}

impl PartialEq for Partial {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Partial {}

impl PartialOrd for Partial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.length_km.total_cmp(&self.length_km).then_with(|| other.nodes.cmp(&self.nodes))
    }
}

/// Shipped reference topologies.
pub mod builtin {
    use super::{Topology, TopologyError};

    pub const J14: &str = include_str!("../data/topologies/j14.json");
    pub const G17: &str = include_str!("../data/topologies/g17.json");

    /// Load a shipped topology by name (`J14` or `G17`, case-insensitive).
    pub fn load(name: &str) -> Option<Result<Topology, TopologyError>> {
        match name.to_ascii_uppercase().as_str() {
            "J14" => Some(Topology::parse(J14)),
            "G17" => Some(Topology::parse(G17)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Topology {
        Topology::build(
            "tri",
            &["A", "B", "C"],
            &[("A", "B", 1.0), ("B", "C", 1.0), ("A", "C", 3.0)],
            ChannelGrid::default(),
        )
        .unwrap()
    }

    #[test]
    fn minimal_graph() {
        let t =
            Topology::parse(r#"{"name":"ab","nodes":["A","B"],"links":[{"a":"A","b":"B","length_km":100}]}"#).unwrap();
        assert_eq!(t.links().len(), 1);
        assert_eq!(t.degree(t.node("A").unwrap()), 1);
        assert_eq!(t.degree(t.node("B").unwrap()), 1);
        assert_eq!(t.grid(), ChannelGrid { channel_count: 50, spacing_ghz: 100 });
    }

    #[test]
    fn rejects_zero_length() {
        let err =
            Topology::parse(r#"{"name":"x","nodes":["A","B"],"links":[{"a":"A","b":"B","length_km":0}]}"#).unwrap_err();
        assert!(matches!(err, TopologyError::NonPositiveLength { .. }));
        assert!(err.to_string().contains("non-positive length"));
    }

    #[test]
    fn rejects_structural_violations() {
        let dup = Topology::build("x", &["A", "B"], &[("A", "B", 1.0), ("B", "A", 2.0)], ChannelGrid::default());
        assert!(matches!(dup, Err(TopologyError::DuplicateLink { .. })));
        let lp = Topology::build("x", &["A", "B"], &[("A", "A", 1.0)], ChannelGrid::default());
        assert!(matches!(lp, Err(TopologyError::SelfLoop { .. })));
        let disc = Topology::build("x", &["A", "B", "C"], &[("A", "B", 1.0)], ChannelGrid::default());
        assert!(matches!(disc, Err(TopologyError::Disconnected(n)) if n == "C"));
        let unknown = Topology::build("x", &["A", "B"], &[("A", "Z", 1.0)], ChannelGrid::default());
        assert!(matches!(unknown, Err(TopologyError::UnknownLinkEndpoint { .. })));
        let grid = Topology::parse(
            r#"{"name":"x","nodes":["A","B"],"links":[{"a":"A","b":"B","length_km":1}],"grid":{"channel_count":0,"spacing_ghz":100}}"#,
        );
        assert!(matches!(grid, Err(TopologyError::InvalidGrid(_))));
        assert!(matches!(Topology::parse("{"), Err(TopologyError::Schema(_))));
    }

    #[test]
    fn path_lengths() {
        let t =
            Topology::build("line", &["A", "B", "C"], &[("A", "B", 100.0), ("B", "C", 250.0)], ChannelGrid::default())
                .unwrap();
        let [a, b, c] = ["A", "B", "C"].map(|n| t.node(n).unwrap());
        assert_eq!(t.path_length_km(&[a]).unwrap(), 0.0);
        assert_eq!(t.path_length_km(&[a, b]).unwrap(), 100.0);
        assert_eq!(t.path_length_km(&[a, b, c]).unwrap(), 350.0);
        assert!(matches!(t.path_length_km(&[a, c]), Err(TopologyError::NotAdjacent(..))));
    }

    #[test]
    fn ksp_triangle() {
        let t = triangle();
        let [a, b, c] = ["A", "B", "C"].map(|n| t.node(n).unwrap());
        let paths = t.k_shortest_paths(a, c, 2).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].nodes, vec![a, b, c]);
        assert_eq!(paths[0].length_km, 2.0);
        assert_eq!(paths[1].nodes, vec![a, c]);
        assert_eq!(paths[1].length_km, 3.0);
        // saturation
        assert_eq!(t.k_shortest_paths(a, c, 10).unwrap().len(), 2);
        assert!(matches!(t.k_shortest_paths(a, a, 1), Err(TopologyError::SameEndpoints(_))));
        assert!(matches!(t.k_shortest_paths(a, NodeId(9), 1), Err(TopologyError::UnknownNode(_))));
    }

    #[test]
    fn ksp_ties_are_lexicographic() {
        let t = Topology::build(
            "square",
            &["A", "B", "C", "D"],
            &[("A", "C", 1.0), ("C", "D", 1.0), ("A", "B", 1.0), ("B", "D", 1.0)],
            ChannelGrid::default(),
        )
        .unwrap();
        let paths = t.k_shortest_paths(NodeId(0), NodeId(3), 2).unwrap();
        assert_eq!(t.display_path(&paths[0].nodes), "A-B-D");
        assert_eq!(t.display_path(&paths[1].nodes), "A-C-D");
    }

    #[test]
    fn fibers_are_directional() {
        let t = triangle();
        let [a, b] = ["A", "B"].map(|n| t.node(n).unwrap());
        let ab = t.fiber(a, b).unwrap();
        let ba = t.fiber(b, a).unwrap();
        assert_ne!(ab, ba);
        assert_eq!(ab.0 / 2, ba.0 / 2);
    }

    #[test]
    fn shipped_topologies() {
        let j14 = builtin::load("J14").unwrap().unwrap();
        assert_eq!(j14.node_count(), 14);
        assert_eq!(j14.links().len(), 21);
        let g17 = builtin::load("g17").unwrap().unwrap();
        assert_eq!(g17.node_count(), 17);
        assert_eq!(g17.links().len(), 26);
        assert!(builtin::load("X1").is_none());
        for t in [&j14, &g17] {
            assert_eq!(t.grid().channel_count, 50);
            assert!(t.node_ids().all(|n| t.degree(n) >= 1));
        }
    }

    #[test]
    fn json_round_trip() {
        let t = builtin::load("J14").unwrap().unwrap();
        let again = Topology::parse(&t.to_json()).unwrap();
        assert_eq!(t, again);
    }
}
