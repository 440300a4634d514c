//! Routing, modulation and spectrum assignment over an auxiliary graph.
//!
//! Every demand is split into sub-flows no larger than the fastest mode.
//! Each sub-flow is routed on a graph whose nodes are the routers and whose
//! edges are either existing lightpaths with enough residual capacity
//! (grooming edges, cheap) or lightpaths that could be created along one of
//! the k shortest physical paths (candidate edges, priced by length plus a
//! fixed penalty). A route through several edges terminates in the router at
//! each intermediate vertex, which is where IP grooming and IP regeneration
//! happen.
//!
//! Module counting: a lightpath owns one module at each end and two modules
//! at every back-to-back regeneration point along it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::topology::{FiberId, NodeId, Path, Topology};
use crate::traffic::{Demand, TrafficMatrix};
use crate::transceiver::{plan_regeneration, ModeCatalog, ModeId, ModuleKind, TransceiverMode};

/// The four node architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Architecture {
    /// Opaque: every hop terminates in routers.
    OpIP,
    /// Transparent with IP regeneration.
    TrIP,
    /// Transparent with back-to-back ZR regeneration and end-to-end grooming only.
    TrZR,
    /// Transparent with both IP and back-to-back ZR regeneration.
    TrIPandZR,
}

impl Architecture {
    pub const ALL: [Architecture; 4] =
        [Architecture::OpIP, Architecture::TrIP, Architecture::TrZR, Architecture::TrIPandZR];

    pub fn config(self) -> ArchitectureConfig {
        let (optical_bypass, intermediate_ip_grooming, ip_regeneration, b2b_zr_regeneration) = match self {
            Architecture::OpIP => (false, true, true, false),
            Architecture::TrIP => (true, true, true, false),
            Architecture::TrZR => (true, false, false, true),
            Architecture::TrIPandZR => (true, true, true, true),
        };
        ArchitectureConfig {
            name: self,
            optical_bypass,
            intermediate_ip_grooming,
            ip_regeneration,
            b2b_zr_regeneration,
        }
    }

    pub fn is_transparent(self) -> bool {
        self.config().optical_bypass
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::OpIP => "OpIP",
            Architecture::TrIP => "TrIP",
            Architecture::TrZR => "TrZR",
            Architecture::TrIPandZR => "TrIPandZR",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "opip" => Ok(Architecture::OpIP),
            "trip" => Ok(Architecture::TrIP),
            "trzr" | "trnoip" => Ok(Architecture::TrZR),
            "tripandzr" | "tripzr" => Ok(Architecture::TrIPandZR),
            _ => Err(format!("unknown architecture `{s}` (expected OpIP, TrIP, TrZR or TrIPandZR)")),
        }
    }
}

/// Capability flags of an architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchitectureConfig {
    pub name: Architecture,
    pub optical_bypass: bool,
    /// `false` means end-to-end grooming only.
    pub intermediate_ip_grooming: bool,
    pub ip_regeneration: bool,
    pub b2b_zr_regeneration: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandOrder {
    /// Descending rate, then source and destination identifiers.
    RateDesc,
    InputOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerConfig {
    pub k: usize,
    /// Multiplier on the physical length of a lightpath used for grooming.
    pub grooming_weight_factor: f64,
    /// Fixed weight in km added to every new lightpath. `None` uses the cost
    /// of the cheapest module pair at one maximum reach per cost unit.
    pub new_lightpath_penalty: Option<f64>,
    pub demand_order: DemandOrder,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            k: 3,
            grooming_weight_factor: 0.01,
            new_lightpath_penalty: None,
            demand_order: DemandOrder::RateDesc,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), RmsaError> {
        if self.k == 0 {
            return Err(RmsaError::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.grooming_weight_factor > 0.0 && self.grooming_weight_factor <= 1.0) {
            return Err(RmsaError::InvalidConfig("grooming weight factor must be in (0, 1]".into()));
        }
        if let Some(p) = self.new_lightpath_penalty {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(RmsaError::InvalidConfig("new lightpath penalty must be >= 0".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LightpathId(pub usize);

/// Index of a demand in the traffic matrix being provisioned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DemandId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockReason {
    NoSpectrum,
    NoFeasibleMode,
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockReason::NoSpectrum => "no_spectrum",
            BlockReason::NoFeasibleMode => "no_feasible_mode",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Blocked {
    pub demand: DemandId,
    pub reason: BlockReason,
}

#[derive(Debug, Error, PartialEq)]
pub enum RmsaError {
    #[error("demand {} blocked: {}", .0.demand.0, .0.reason)]
    Blocked(Blocked),
    #[error("demand {0} is invalid or already provisioned")]
    BadDemand(usize),
    #[error("no free channel on the requested segment")]
    NoSpectrum,
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("inconsistent state: {0}")]
    Audit(String),
}

/// A transparent stretch of a lightpath on a single channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub nodes: Vec<NodeId>,
    pub channel: usize,
    pub length_km: f64,
}

/// Traffic of one sub-flow riding a lightpath.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Carried {
    pub demand: DemandId,
    pub subflow: usize,
    pub rate_gbps: u32,
}

/// An optical channel between two router terminations, possibly crossing
/// back-to-back regenerators (one per segment boundary).
#[derive(Clone, Debug, PartialEq)]
pub struct Lightpath {
    pub id: LightpathId,
    pub mode: ModeId,
    pub rate_gbps: u32,
    pub segments: Vec<Segment>,
    pub carried: Vec<Carried>,
}

impl Lightpath {
    pub fn source(&self) -> NodeId {
        self.segments[0].nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.segments.last().unwrap().nodes.last().unwrap()
    }

    /// Node sequence across all segments.
    pub fn route(&self) -> Vec<NodeId> {
        let mut out = self.segments[0].nodes.clone();
        for s in &self.segments[1..] {
            out.extend_from_slice(&s.nodes[1..]);
        }
        out
    }

    pub fn length_km(&self) -> f64 {
        self.segments.iter().map(|s| s.length_km).sum()
    }

    /// Nodes hosting a back-to-back regenerator, in route order.
    pub fn regen_nodes(&self) -> Vec<NodeId> {
        self.segments[1..].iter().map(|s| s.nodes[0]).collect()
    }

    pub fn load_gbps(&self) -> u32 {
        self.carried.iter().map(|c| c.rate_gbps).sum()
    }

    pub fn residual_gbps(&self) -> i64 {
        self.rate_gbps as i64 - self.load_gbps() as i64
    }

    /// Modules plugged into routers at the two ends.
    pub fn terminal_modules(&self) -> usize {
        2
    }

    pub fn b2b_modules(&self) -> usize {
        2 * (self.segments.len() - 1)
    }

    pub fn modules(&self) -> usize {
        self.terminal_modules() + self.b2b_modules()
    }
}

/// How one sub-flow of a demand crosses the network.
#[derive(Clone, Debug, PartialEq)]
pub struct SubflowRecord {
    pub rate_gbps: u32,
    /// Lightpaths in order from source to destination; consecutive entries
    /// meet in a router (IP grooming or IP regeneration).
    pub hops: Vec<LightpathId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProvisionRecord {
    pub demand: DemandId,
    pub src: NodeId,
    pub dst: NodeId,
    pub rate_gbps: u32,
    pub subflows: Vec<SubflowRecord>,
}

/// Edge of the auxiliary graph.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxEdgeKind {
    Groom(LightpathId),
    /// A lightpath that would be created along `nodes` with `mode`.
    New {
        nodes: Vec<NodeId>,
        mode: ModeId,
        length_km: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
    pub kind: AuxEdgeKind,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuxGraph {
    pub edges: Vec<AuxEdge>,
}

impl AuxGraph {
    pub fn grooming_edges(&self) -> impl Iterator<Item = &AuxEdge> {
        self.edges.iter().filter(|e| matches!(e.kind, AuxEdgeKind::Groom(_)))
    }

    pub fn candidate_edges(&self) -> impl Iterator<Item = &AuxEdge> {
        self.edges.iter().filter(|e| matches!(e.kind, AuxEdgeKind::New { .. }))
    }

    /// Least-weight edge sequence from `s` to `d`. Ties keep the first
    /// relaxation, which follows edge insertion order.
    pub fn shortest_path(&self, node_count: usize, s: NodeId, d: NodeId) -> Option<Vec<usize>> {
        let mut out_edges = vec![Vec::new(); node_count];
        for (i, e) in self.edges.iter().enumerate() {
            out_edges[e.from.0].push(i);
        }
        let mut dist = vec![f64::INFINITY; node_count];
        let mut via: Vec<Option<usize>> = vec![None; node_count];
        let mut done = vec![false; node_count];
        let mut heap = BinaryHeap::new();
        dist[s.0] = 0.0;
        heap.push(HeapEntry(0.0, s.0));
        while let Some(HeapEntry(du, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == d.0 {
                break;
            }
            for &ei in &out_edges[u] {
                let e = &self.edges[ei];
                let v = e.to.0;
                let nd = du + e.weight;
                if !done[v] && nd < dist[v] {
                    dist[v] = nd;
                    via[v] = Some(ei);
                    heap.push(HeapEntry(nd, v));
                }
            }
        }
        if !done[d.0] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = d.0;
        while cur != s.0 {
            let ei = via[cur]?;
            path.push(ei);
            cur = self.edges[ei].from.0;
        }
        path.reverse();
        Some(path)
    }
}

struct HeapEntry(f64, usize);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

enum Undo {
    Created(LightpathId),
    Groomed(LightpathId),
}

/// Everything provisioned so far in one run.
#[derive(Clone, Debug)]
pub struct NetworkState {
    topology: Topology,
    catalog: ModeCatalog,
    architecture: Architecture,
    lightpaths: Vec<Lightpath>,
    /// `occupancy[fiber][channel]`
    occupancy: Vec<Vec<bool>>,
    records: Vec<ProvisionRecord>,
    path_cache: HashMap<(NodeId, NodeId, usize), Vec<Path>>,
}

impl PartialEq for NetworkState {
    fn eq(&self, other: &Self) -> bool {
        self.topology == other.topology
            && self.catalog == other.catalog
            && self.architecture == other.architecture
            && self.lightpaths == other.lightpaths
            && self.occupancy == other.occupancy
            && self.records == other.records
    }
}

impl NetworkState {
    pub fn new(topology: &Topology, catalog: &ModeCatalog, architecture: Architecture) -> NetworkState {
        let channels = topology.grid().channel_count;
        NetworkState {
            topology: topology.clone(),
            catalog: catalog.clone(),
            architecture,
            lightpaths: Vec::new(),
            occupancy: vec![vec![false; channels]; topology.fiber_count()],
            records: Vec::new(),
            path_cache: HashMap::new(),
        }
    }

    /// Rebuild a state from stored lightpaths and records. Occupancy is
    /// derived from the segments and the result must pass [`Self::audit`].
    pub fn from_parts(
        topology: &Topology,
        catalog: &ModeCatalog,
        architecture: Architecture,
        lightpaths: Vec<Lightpath>,
        records: Vec<ProvisionRecord>,
    ) -> Result<NetworkState, RmsaError> {
        let mut state = NetworkState::new(topology, catalog, architecture);
        for (i, lp) in lightpaths.iter().enumerate() {
            if lp.id != LightpathId(i) || lp.segments.is_empty() || lp.mode.0 >= catalog.modes().len() {
                return Err(RmsaError::Audit(format!("lightpath {i} is malformed")));
            }
            for seg in &lp.segments {
                let fibers = topology.fibers_along(&seg.nodes).map_err(|e| RmsaError::Audit(e.to_string()))?;
                if seg.channel >= state.topology.grid().channel_count {
                    return Err(RmsaError::Audit(format!("lightpath {i} channel out of grid")));
                }
                for f in fibers {
                    state.occupancy[f.0][seg.channel] = true;
                }
            }
        }
        if records.iter().flat_map(|r| r.subflows.iter()).flat_map(|s| s.hops.iter()).any(|h| h.0 >= lightpaths.len()) {
            return Err(RmsaError::Audit("record refers to an unknown lightpath".into()));
        }
        state.lightpaths = lightpaths;
        state.records = records;
        state.audit()?;
        Ok(state)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn catalog(&self) -> &ModeCatalog {
        &self.catalog
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn lightpaths(&self) -> &[Lightpath] {
        &self.lightpaths
    }

    pub fn lightpath(&self, id: LightpathId) -> &Lightpath {
        &self.lightpaths[id.0]
    }

    pub fn records(&self) -> &[ProvisionRecord] {
        &self.records
    }

    pub fn mode(&self, id: ModeId) -> &TransceiverMode {
        self.catalog.get(id)
    }

    pub fn is_busy(&self, fiber: FiberId, channel: usize) -> bool {
        self.occupancy[fiber.0][channel]
    }

    pub fn occupancy(&self) -> &[Vec<bool>] {
        &self.occupancy
    }

    /// Marks a channel busy without a lightpath. Meant for tests and what-if
    /// studies on pre-loaded fibers; the audit will flag it.
    pub fn reserve_channel(&mut self, fiber: FiberId, channel: usize) {
        self.occupancy[fiber.0][channel] = true;
    }

    fn first_free(occupancy: &[Vec<bool>], fibers: &[FiberId]) -> Option<usize> {
        let channels = occupancy.first().map_or(0, Vec::len);
        (0..channels).find(|&c| fibers.iter().all(|f| !occupancy[f.0][c]))
    }

    /// Lowest channel index free on every fiber of `nodes`, without claiming it.
    pub fn first_fit(&self, nodes: &[NodeId]) -> Result<usize, RmsaError> {
        let fibers = self.topology.fibers_along(nodes).map_err(|e| RmsaError::Audit(e.to_string()))?;
        Self::first_free(&self.occupancy, &fibers).ok_or(RmsaError::NoSpectrum)
    }

    /// First-fit assignment: claims and returns the lowest channel free on
    /// every directed fiber of the contiguous transparent route `nodes`.
    pub fn assign_spectrum_first_fit(&mut self, nodes: &[NodeId]) -> Result<usize, RmsaError> {
        let fibers = self.topology.fibers_along(nodes).map_err(|e| RmsaError::Audit(e.to_string()))?;
        let c = Self::first_free(&self.occupancy, &fibers).ok_or(RmsaError::NoSpectrum)?;
        for f in fibers {
            self.occupancy[f.0][c] = true;
        }
        Ok(c)
    }

    fn release(&mut self, nodes: &[NodeId], channel: usize) {
        for f in self.topology.fibers_along(nodes).expect("segment nodes are adjacent") {
            self.occupancy[f.0][channel] = false;
        }
    }

    fn k_paths(&mut self, s: NodeId, d: NodeId, k: usize) -> Vec<Path> {
        let topology = &self.topology;
        self.path_cache
            .entry((s, d, k))
            .or_insert_with(|| topology.k_shortest_paths(s, d, k).expect("valid node pair"))
            .clone()
    }

    fn penalty(&self, cfg: &PlannerConfig) -> f64 {
        cfg.new_lightpath_penalty.unwrap_or(2.0 * self.catalog.min_module_cost() as f64 * self.catalog.max_reach_km())
    }

    /// Whether `demand` may ride `lp` as a single hop of its route under the
    /// current architecture.
    fn may_groom(&self, lp: &Lightpath, demand: &Demand) -> bool {
        if self.architecture.config().intermediate_ip_grooming {
            true
        } else {
            lp.source() == demand.src && lp.destination() == demand.dst
        }
    }

    /// Auxiliary graph for routing a sub-flow of `rate_gbps` belonging to
    /// `demand`. With `check_spectrum` false, candidate edges are listed even
    /// if no channel is free.
    pub fn auxiliary_graph(
        &mut self,
        demand: &Demand,
        rate_gbps: u32,
        cfg: &PlannerConfig,
        check_spectrum: bool,
    ) -> AuxGraph {
        let mut edges = Vec::new();
        for lp in &self.lightpaths {
            if lp.residual_gbps() >= rate_gbps as i64 && self.may_groom(lp, demand) {
                edges.push(AuxEdge {
                    from: lp.source(),
                    to: lp.destination(),
                    weight: cfg.grooming_weight_factor * lp.length_km(),
                    kind: AuxEdgeKind::Groom(lp.id),
                });
            }
        }

        let penalty = self.penalty(cfg);
        let mut candidates: Vec<Vec<NodeId>> = Vec::new();
        match self.architecture {
            Architecture::OpIP => {
                for l in self.topology.links() {
                    candidates.push(vec![l.a, l.b]);
                    candidates.push(vec![l.b, l.a]);
                }
            }
            Architecture::TrZR => {
                for p in self.k_paths(demand.src, demand.dst, cfg.k) {
                    candidates.push(p.nodes);
                }
            }
            Architecture::TrIP | Architecture::TrIPandZR => {
                let mut seen = HashSet::new();
                for p in self.k_paths(demand.src, demand.dst, cfg.k) {
                    for i in 0..p.nodes.len() {
                        for j in i + 1..p.nodes.len() {
                            let sub = p.nodes[i..=j].to_vec();
                            if seen.insert(sub.clone()) {
                                candidates.push(sub);
                            }
                        }
                    }
                }
            }
        }

        for nodes in candidates {
            let lengths = self.topology.link_lengths(&nodes).expect("candidate follows links");
            let length_km: f64 = lengths.iter().sum();
            let mode = if self.architecture == Architecture::TrZR {
                // one channel of the min-channel split decides feasibility here;
                // route_demand plans the full split
                self.catalog
                    .feasible_modes(0.0)
                    .into_iter()
                    .filter(|m| m.rate_gbps >= rate_gbps && plan_regeneration(&lengths, m.reach_km).is_ok())
                    .min_by_key(|m| (plan_regeneration(&lengths, m.reach_km).unwrap().regenerators(), m.power, m.id))
                    .map(|m| m.id)
            } else {
                self.catalog.select_mode_max_rate(length_km).ok().filter(|m| m.rate_gbps >= rate_gbps).map(|m| m.id)
            };
            let Some(mode) = mode else { continue };
            if check_spectrum && !self.spectrum_available(&nodes, mode) {
                continue;
            }
            edges.push(AuxEdge {
                from: nodes[0],
                to: *nodes.last().unwrap(),
                weight: length_km + penalty,
                kind: AuxEdgeKind::New { nodes, mode, length_km },
            });
        }
        AuxGraph { edges }
    }

    fn spectrum_available(&self, nodes: &[NodeId], mode: ModeId) -> bool {
        self.segment_plan(nodes, mode).iter().all(|seg| self.first_fit(seg).is_ok())
    }

    /// Splits `nodes` into transparent segments for `mode`: one segment when
    /// back-to-back regeneration is unavailable, greedy placement otherwise.
    fn segment_plan(&self, nodes: &[NodeId], mode: ModeId) -> Vec<Vec<NodeId>> {
        let lengths = self.topology.link_lengths(nodes).expect("adjacent");
        let reach = self.catalog.get(mode).reach_km;
        if self.architecture != Architecture::TrZR {
            return vec![nodes.to_vec()];
        }
        let plan = plan_regeneration(&lengths, reach).expect("mode chosen for this path");
        plan.segments.iter().map(|s| nodes[s.first..=s.last].to_vec()).collect()
    }

    fn create_lightpath(&mut self, nodes: &[NodeId], mode: ModeId) -> Result<LightpathId, RmsaError> {
        let mut segments = Vec::new();
        for seg in self.segment_plan(nodes, mode) {
            match self.assign_spectrum_first_fit(&seg) {
                Ok(channel) => {
                    let length_km = self.topology.path_length_km(&seg).expect("adjacent");
                    segments.push(Segment { nodes: seg, channel, length_km });
                }
                Err(e) => {
                    for s in &segments {
                        self.release(&s.nodes, s.channel);
                    }
                    return Err(e);
                }
            }
        }
        let id = LightpathId(self.lightpaths.len());
        let rate_gbps = self.catalog.get(mode).rate_gbps;
        self.lightpaths.push(Lightpath { id, mode, rate_gbps, segments, carried: Vec::new() });
        Ok(id)
    }

    fn rollback(&mut self, undo: Vec<Undo>) {
        for step in undo.into_iter().rev() {
            match step {
                Undo::Groomed(id) => {
                    self.lightpaths[id.0].carried.pop();
                }
                Undo::Created(id) => {
                    debug_assert_eq!(id.0 + 1, self.lightpaths.len());
                    let lp = self.lightpaths.pop().unwrap();
                    for s in &lp.segments {
                        self.release(&s.nodes, s.channel);
                    }
                }
            }
        }
    }

    /// Provision one demand. The state is unchanged if the demand is blocked.
    pub fn route_demand(
        &mut self,
        id: DemandId,
        demand: &Demand,
        cfg: &PlannerConfig,
    ) -> Result<&ProvisionRecord, RmsaError> {
        if !demand.is_valid() || self.records.iter().any(|r| r.demand == id) {
            return Err(RmsaError::BadDemand(id.0));
        }
        let mut undo = Vec::new();
        let result = if self.architecture == Architecture::TrZR {
            self.route_end_to_end(id, demand, cfg, &mut undo)
        } else {
            self.route_groomed(id, demand, cfg, &mut undo)
        };
        match result {
            Ok(subflows) => {
                self.records.push(ProvisionRecord {
                    demand: id,
                    src: demand.src,
                    dst: demand.dst,
                    rate_gbps: demand.rate_gbps,
                    subflows,
                });
                Ok(self.records.last().unwrap())
            }
            Err(reason) => {
                self.rollback(undo);
                Err(RmsaError::Blocked(Blocked { demand: id, reason }))
            }
        }
    }

    fn carry(&mut self, lp: LightpathId, c: Carried, undo: &mut Vec<Undo>) {
        self.lightpaths[lp.0].carried.push(c);
        undo.push(Undo::Groomed(lp));
    }

    /// Sub-flows of at most the fastest mode rate, largest first.
    pub fn split_subflows(&self, rate_gbps: u32) -> Vec<u32> {
        let chunk = self.catalog.max_rate_gbps();
        let mut out = Vec::new();
        let mut left = rate_gbps;
        while left > 0 {
            let r = left.min(chunk);
            out.push(r);
            left -= r;
        }
        out
    }

    fn route_groomed(
        &mut self,
        id: DemandId,
        demand: &Demand,
        cfg: &PlannerConfig,
        undo: &mut Vec<Undo>,
    ) -> Result<Vec<SubflowRecord>, BlockReason> {
        let mut subflows = Vec::new();
        for (index, rate) in self.split_subflows(demand.rate_gbps).into_iter().enumerate() {
            let aux = self.auxiliary_graph(demand, rate, cfg, true);
            let n = self.topology.node_count();
            let Some(route) = aux.shortest_path(n, demand.src, demand.dst) else {
                let relaxed = self.auxiliary_graph(demand, rate, cfg, false);
                return Err(match relaxed.shortest_path(n, demand.src, demand.dst) {
                    Some(_) => BlockReason::NoSpectrum,
                    None => BlockReason::NoFeasibleMode,
                });
            };
            let mut hops = Vec::new();
            for ei in route {
                let lp = match &aux.edges[ei].kind {
                    AuxEdgeKind::Groom(lp) => *lp,
                    AuxEdgeKind::New { nodes, mode, .. } => {
                        // two candidate edges of one route may compete for a channel
                        let lp = self.create_lightpath(nodes, *mode).map_err(|_| BlockReason::NoSpectrum)?;
                        undo.push(Undo::Created(lp));
                        lp
                    }
                };
                self.carry(lp, Carried { demand: id, subflow: index, rate_gbps: rate }, undo);
                hops.push(lp);
            }
            subflows.push(SubflowRecord { rate_gbps: rate, hops });
        }
        Ok(subflows)
    }

    /// End-to-end provisioning: fill the spare room of lightpaths between the
    /// same endpoints, then open the fewest channels for the rest over the
    /// best of the k shortest paths, regenerating back-to-back.
    fn route_end_to_end(
        &mut self,
        id: DemandId,
        demand: &Demand,
        cfg: &PlannerConfig,
        undo: &mut Vec<Undo>,
    ) -> Result<Vec<SubflowRecord>, BlockReason> {
        let mut left = demand.rate_gbps;
        let mut subflows = Vec::new();
        let mut room: Vec<(LightpathId, u32)> = self
            .lightpaths
            .iter()
            .filter(|lp| lp.source() == demand.src && lp.destination() == demand.dst && lp.residual_gbps() > 0)
            .map(|lp| (lp.id, lp.residual_gbps() as u32))
            .collect();
        // tightest lightpath that takes it whole, else the roomiest first
        room.sort_by_key(|&(lp, r)| if r >= left { (0, r, lp) } else { (1, u32::MAX - r, lp) });
        for (lp, r) in room {
            if left == 0 {
                break;
            }
            let rate = left.min(r);
            left -= rate;
            self.carry(lp, Carried { demand: id, subflow: subflows.len(), rate_gbps: rate }, undo);
            subflows.push(SubflowRecord { rate_gbps: rate, hops: vec![lp] });
        }
        if left == 0 {
            return Ok(subflows);
        }

        let penalty = self.penalty(cfg);
        // (spectrum, regenerators, power, weight, path index), path, modes
        type Choice = ((usize, usize, crate::units::Power, f64, usize), Vec<NodeId>, Vec<ModeId>);
        let mut best: Option<Choice> = None;
        let mut any_mode = false;
        for (pi, path) in self.k_paths(demand.src, demand.dst, cfg.k).into_iter().enumerate() {
            let lengths = self.topology.link_lengths(&path.nodes).expect("adjacent");
            let Ok(split) = self.catalog.select_modes_min_channels_on_path(left, &lengths) else {
                continue;
            };
            any_mode = true;
            // every channel must find spectrum on a scratch copy of the grid
            let mut scratch = self.occupancy.clone();
            let mut fits = true;
            'channels: for &m in &split.modes {
                for seg in self.segment_plan(&path.nodes, m) {
                    let fibers = self.topology.fibers_along(&seg).expect("adjacent");
                    match Self::first_free(&scratch, &fibers) {
                        Some(c) => fibers.iter().for_each(|f| scratch[f.0][c] = true),
                        None => {
                            fits = false;
                            break 'channels;
                        }
                    }
                }
            }
            if !fits {
                continue;
            }
            let spectrum = split.channels() * (path.nodes.len() - 1);
            let key = (spectrum, split.regenerators, split.power, path.length_km + penalty, pi);
            if best.as_ref().is_none_or(|(k, _, _)| key.partial_cmp(k) == Some(Ordering::Less)) {
                best = Some((key, path.nodes, split.modes));
            }
        }
        let Some((_, nodes, modes)) = best else {
            return Err(if any_mode { BlockReason::NoSpectrum } else { BlockReason::NoFeasibleMode });
        };

        // fastest channels first so the last one carries the remainder
        let mut modes = modes;
        modes.sort_by_key(|&m| (std::cmp::Reverse(self.catalog.get(m).rate_gbps), m));
        for m in modes {
            let lp = self.create_lightpath(&nodes, m).map_err(|_| BlockReason::NoSpectrum)?;
            undo.push(Undo::Created(lp));
            let rate = left.min(self.catalog.get(m).rate_gbps);
            left -= rate;
            self.carry(lp, Carried { demand: id, subflow: subflows.len(), rate_gbps: rate }, undo);
            subflows.push(SubflowRecord { rate_gbps: rate, hops: vec![lp] });
        }
        Ok(subflows)
    }

    /// Replace IP regeneration by back-to-back regeneration wherever the
    /// router adds, drops and grooms nothing: two lightpaths meeting at a
    /// node with the same mode, the same carried sub-flows, and every one of
    /// those sub-flows continuing from the first onto the second.
    ///
    /// Only meaningful for [`Architecture::TrIPandZR`]; other architectures
    /// are left untouched. Returns the number of merges performed.
    pub fn consolidate_regenerators(&mut self) -> usize {
        if self.architecture != Architecture::TrIPandZR {
            return 0;
        }
        let mut merges = 0;
        while let Some((first, second)) = self.find_mergeable() {
            self.merge(first, second);
            merges += 1;
        }
        merges
    }

    fn next_hop(&self, c: &Carried, lp: LightpathId) -> Option<LightpathId> {
        let rec = self.records.iter().find(|r| r.demand == c.demand)?;
        let hops = &rec.subflows[c.subflow].hops;
        let pos = hops.iter().position(|&h| h == lp)?;
        hops.get(pos + 1).copied()
    }

    fn find_mergeable(&self) -> Option<(LightpathId, LightpathId)> {
        for lp in &self.lightpaths {
            let Some(first) = lp.carried.first() else { continue };
            let Some(next) = self.next_hop(first, lp.id) else { continue };
            let other = &self.lightpaths[next.0];
            if other.mode != lp.mode || other.carried.len() != lp.carried.len() {
                continue;
            }
            let all_continue = lp
                .carried
                .iter()
                .all(|c| self.next_hop(c, lp.id) == Some(next) && other.carried.iter().any(|o| o == c));
            if all_continue && other.destination() != lp.source() {
                return Some((lp.id, next));
            }
        }
        None
    }

    fn merge(&mut self, first: LightpathId, second: LightpathId) {
        let tail = self.lightpaths[second.0].segments.clone();
        self.lightpaths[first.0].segments.extend(tail);
        for rec in &mut self.records {
            for sf in &mut rec.subflows {
                sf.hops.retain(|&h| h != second);
            }
        }
        // drop `second` and renumber the lightpaths after it
        self.lightpaths.remove(second.0);
        for (i, lp) in self.lightpaths.iter_mut().enumerate() {
            lp.id = LightpathId(i);
        }
        let remap = |h: LightpathId| if h.0 > second.0 { LightpathId(h.0 - 1) } else { h };
        for rec in &mut self.records {
            for sf in &mut rec.subflows {
                for h in &mut sf.hops {
                    *h = remap(*h);
                }
            }
        }
    }

    /// Nodes where a sub-flow passes through a router between two lightpaths.
    pub fn ip_regen_nodes(&self, subflow: &SubflowRecord) -> Vec<NodeId> {
        subflow.hops[..subflow.hops.len().saturating_sub(1)]
            .iter()
            .map(|&h| self.lightpaths[h.0].destination())
            .collect()
    }

    /// Router ports used at `node`: one per lightpath terminating there.
    pub fn router_ports_at(&self, node: NodeId) -> usize {
        self.lightpaths.iter().map(|lp| usize::from(lp.source() == node) + usize::from(lp.destination() == node)).sum()
    }

    /// Ports used at nodes that are neither source nor destination of any
    /// demand carried by the terminating lightpath.
    pub fn intermediate_router_ports(&self) -> usize {
        self.lightpaths
            .iter()
            .map(|lp| {
                let ends = [lp.source(), lp.destination()];
                ends.iter()
                    .filter(|&&n| {
                        lp.carried.iter().all(|c| {
                            let rec = self.records.iter().find(|r| r.demand == c.demand).unwrap();
                            rec.src != n && rec.dst != n
                        })
                    })
                    .count()
            })
            .sum()
    }

    pub fn module_count(&self, kind: ModuleKind) -> usize {
        self.lightpaths.iter().filter(|lp| self.catalog.get(lp.mode).module == kind).map(Lightpath::modules).sum()
    }

    pub fn total_modules(&self) -> usize {
        self.lightpaths.iter().map(Lightpath::modules).sum()
    }

    pub fn b2b_modules(&self) -> usize {
        self.lightpaths.iter().map(Lightpath::b2b_modules).sum()
    }

    /// Recompute occupancy from the lightpaths and check every structural
    /// invariant of the state.
    pub fn audit(&self) -> Result<(), RmsaError> {
        let channels = self.topology.grid().channel_count;
        let mut rebuilt = vec![vec![false; channels]; self.topology.fiber_count()];
        for lp in &self.lightpaths {
            let mode = self.catalog.get(lp.mode);
            if lp.residual_gbps() < 0 {
                return Err(RmsaError::Audit(format!("lightpath {} overloaded", lp.id.0)));
            }
            if lp.rate_gbps != mode.rate_gbps {
                return Err(RmsaError::Audit(format!("lightpath {} rate differs from its mode", lp.id.0)));
            }
            for (i, seg) in lp.segments.iter().enumerate() {
                if i > 0 && lp.segments[i - 1].nodes.last() != seg.nodes.first() {
                    return Err(RmsaError::Audit(format!("lightpath {} segments are not contiguous", lp.id.0)));
                }
                let len = self.topology.path_length_km(&seg.nodes).map_err(|e| RmsaError::Audit(e.to_string()))?;
                if len > mode.reach_km {
                    return Err(RmsaError::Audit(format!("lightpath {} segment exceeds reach", lp.id.0)));
                }
                if seg.channel >= channels {
                    return Err(RmsaError::Audit(format!("lightpath {} channel out of grid", lp.id.0)));
                }
                for f in self.topology.fibers_along(&seg.nodes).map_err(|e| RmsaError::Audit(e.to_string()))? {
                    if std::mem::replace(&mut rebuilt[f.0][seg.channel], true) {
                        return Err(RmsaError::Audit(format!(
                            "channel {} clash on fiber {} (lightpath {})",
                            seg.channel, f.0, lp.id.0
                        )));
                    }
                }
            }
            match self.architecture {
                Architecture::OpIP if lp.segments.len() != 1 || lp.segments[0].nodes.len() != 2 => {
                    return Err(RmsaError::Audit(format!("opaque lightpath {} is not single-hop", lp.id.0)));
                }
                Architecture::TrIP | Architecture::OpIP if lp.segments.len() != 1 => {
                    return Err(RmsaError::Audit(format!("lightpath {} has b2b regenerators", lp.id.0)));
                }
                _ => {}
            }
        }
        if rebuilt != self.occupancy {
            return Err(RmsaError::Audit("stored occupancy differs from lightpath claims".into()));
        }

        let mut load = vec![0u32; self.lightpaths.len()];
        for rec in &self.records {
            let mut total = 0;
            for (si, sf) in rec.subflows.iter().enumerate() {
                total += sf.rate_gbps;
                let mut at = rec.src;
                for &h in &sf.hops {
                    let lp = &self.lightpaths[h.0];
                    if lp.source() != at {
                        return Err(RmsaError::Audit(format!("demand {} route is broken", rec.demand.0)));
                    }
                    if !lp.carried.contains(&Carried { demand: rec.demand, subflow: si, rate_gbps: sf.rate_gbps }) {
                        return Err(RmsaError::Audit(format!("demand {} missing on lightpath {}", rec.demand.0, h.0)));
                    }
                    if self.architecture == Architecture::TrZR
                        && (lp.source() != rec.src || lp.destination() != rec.dst)
                    {
                        return Err(RmsaError::Audit(format!("lightpath {} grooms foreign endpoints", h.0)));
                    }
                    load[h.0] += sf.rate_gbps;
                    at = lp.destination();
                }
                if at != rec.dst {
                    return Err(RmsaError::Audit(format!("demand {} does not reach its destination", rec.demand.0)));
                }
            }
            if total != rec.rate_gbps {
                return Err(RmsaError::Audit(format!("demand {} partially provisioned", rec.demand.0)));
            }
        }
        for lp in &self.lightpaths {
            if load[lp.id.0] != lp.load_gbps() {
                return Err(RmsaError::Audit(format!("lightpath {} carries unrecorded traffic", lp.id.0)));
            }
        }
        Ok(())
    }
}

/// Outcome of provisioning a whole traffic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProvisionOutcome {
    pub state: NetworkState,
    pub blocked: Vec<Blocked>,
}

/// Order in which demands are processed.
pub fn demand_order(matrix: &TrafficMatrix, order: DemandOrder) -> Vec<DemandId> {
    let mut ids: Vec<DemandId> = (0..matrix.demands.len()).map(DemandId).collect();
    if order == DemandOrder::RateDesc {
        ids.sort_by_key(|&id| {
            let d = &matrix.demands[id.0];
            (std::cmp::Reverse(d.rate_gbps), d.src, d.dst, id)
        });
    }
    ids
}

/// Provision every demand of `matrix` in `cfg.demand_order`.
pub fn provision_all(
    topology: &Topology,
    catalog: &ModeCatalog,
    matrix: &TrafficMatrix,
    architecture: Architecture,
    cfg: &PlannerConfig,
) -> Result<ProvisionOutcome, RmsaError> {
    cfg.validate()?;
    let mut state = NetworkState::new(topology, catalog, architecture);
    let mut blocked = Vec::new();
    for id in demand_order(matrix, cfg.demand_order) {
        match state.route_demand(id, &matrix.demands[id.0], cfg) {
            Ok(_) => {}
            Err(RmsaError::Blocked(b)) => blocked.push(b),
            Err(e) => return Err(e),
        }
    }
    state.consolidate_regenerators();
    state.records.sort_by_key(|r| r.demand);
    Ok(ProvisionOutcome { state, blocked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::ChannelGrid;
    use crate::traffic::TrafficScenario;

    fn line(lengths: &[f64], grid: ChannelGrid) -> Topology {
        let names: Vec<String> = (0..=lengths.len()).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
        let nodes: Vec<&str> = names.iter().map(String::as_str).collect();
        let links: Vec<(&str, &str, f64)> =
            lengths.iter().enumerate().map(|(i, &l)| (nodes[i], nodes[i + 1], l)).collect();
        Topology::build("line", &nodes, &links, grid).unwrap()
    }

    fn demand(t: &Topology, s: &str, d: &str, rate: u32) -> Demand {
        Demand { src: t.node(s).unwrap(), dst: t.node(d).unwrap(), rate_gbps: rate }
    }

    #[test]
    fn architecture_flags() {
        let c = Architecture::TrZR.config();
        assert!(c.optical_bypass && !c.intermediate_ip_grooming && !c.ip_regeneration && c.b2b_zr_regeneration);
        let c = Architecture::OpIP.config();
        assert!(!c.optical_bypass && c.intermediate_ip_grooming && c.ip_regeneration && !c.b2b_zr_regeneration);
        assert_eq!("Tr-IP&ZR".parse::<Architecture>().unwrap(), Architecture::TrIPandZR);
        assert_eq!("op-ip".parse::<Architecture>().unwrap(), Architecture::OpIP);
        assert!("foo".parse::<Architecture>().is_err());
    }

    #[test]
    fn two_node_opaque() {
        let t = line(&[100.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::OpIP);
        st.route_demand(DemandId(0), &demand(&t, "A", "B", 400), &PlannerConfig::default()).unwrap();
        assert_eq!(st.lightpaths().len(), 1);
        let lp = &st.lightpaths()[0];
        assert_eq!(c.get(lp.mode).module, ModuleKind::Zr);
        assert_eq!(lp.rate_gbps, 400);
        assert_eq!(lp.segments[0].channel, 0);
        st.audit().unwrap();
    }

    #[test]
    fn transparent_ip_regeneration() {
        let t = line(&[400.0, 400.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrIP);
        let rec = st.route_demand(DemandId(0), &demand(&t, "A", "C", 400), &PlannerConfig::default()).unwrap().clone();
        assert_eq!(rec.subflows[0].hops.len(), 2);
        assert_eq!(st.ip_regen_nodes(&rec.subflows[0]), vec![t.node("B").unwrap()]);
        for lp in st.lightpaths() {
            assert_eq!(c.get(lp.mode).rate_gbps, 400);
            assert_eq!(c.get(lp.mode).module, ModuleKind::ZrPlus);
        }
        assert_eq!(st.router_ports_at(t.node("B").unwrap()), 2);
        st.audit().unwrap();
    }

    #[test]
    fn end_to_end_b2b_regeneration() {
        let t = line(&[400.0, 400.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrZR);
        st.route_demand(DemandId(0), &demand(&t, "A", "C", 400), &PlannerConfig::default()).unwrap();
        assert_eq!(st.lightpaths().len(), 1);
        let lp = &st.lightpaths()[0];
        assert_eq!(c.get(lp.mode).rate_gbps, 400);
        assert_eq!(lp.regen_nodes(), vec![t.node("B").unwrap()]);
        assert_eq!(lp.b2b_modules(), 2);
        assert_eq!(st.router_ports_at(t.node("B").unwrap()), 0);
        assert_eq!(st.intermediate_router_ports(), 0);
        st.audit().unwrap();
    }

    #[test]
    fn first_fit_spectrum() {
        let t = line(&[100.0, 100.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrIP);
        let nodes: Vec<NodeId> = t.node_ids().collect();
        assert_eq!(st.assign_spectrum_first_fit(&nodes).unwrap(), 0);
        let bc = t.fiber(nodes[1], nodes[2]).unwrap();
        st.reserve_channel(bc, 1);
        st.reserve_channel(bc, 3);
        assert_eq!(st.assign_spectrum_first_fit(&nodes).unwrap(), 2);
        for ch in 0..50 {
            st.reserve_channel(bc, ch);
        }
        assert_eq!(st.assign_spectrum_first_fit(&nodes), Err(RmsaError::NoSpectrum));
    }

    #[test]
    fn full_grid_blocks_and_leaves_state_untouched() {
        let t = line(&[100.0], ChannelGrid { channel_count: 2, spacing_ghz: 100 });
        let c = ModeCatalog::default();
        let cfg = PlannerConfig::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrIP);
        st.route_demand(DemandId(0), &demand(&t, "A", "B", 400), &cfg).unwrap();
        st.route_demand(DemandId(1), &demand(&t, "A", "B", 400), &cfg).unwrap();
        let before = st.clone();
        let err = st.route_demand(DemandId(2), &demand(&t, "A", "B", 600), &cfg).unwrap_err();
        assert_eq!(err, RmsaError::Blocked(Blocked { demand: DemandId(2), reason: BlockReason::NoSpectrum }));
        assert_eq!(st, before);
    }

    #[test]
    fn unreachable_mode_blocks() {
        let t = line(&[3500.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrZR);
        let err = st.route_demand(DemandId(0), &demand(&t, "A", "B", 100), &PlannerConfig::default()).unwrap_err();
        assert!(matches!(err, RmsaError::Blocked(Blocked { reason: BlockReason::NoFeasibleMode, .. })));
    }

    #[test]
    fn aux_graph_on_fresh_opaque_state_mirrors_topology() {
        let t = Topology::build(
            "tri",
            &["A", "B", "C"],
            &[("A", "B", 100.0), ("B", "C", 100.0), ("A", "C", 300.0)],
            ChannelGrid::default(),
        )
        .unwrap();
        let c = ModeCatalog::default();
        let mut st = NetworkState::new(&t, &c, Architecture::OpIP);
        let aux = st.auxiliary_graph(&demand(&t, "A", "C", 100), 100, &PlannerConfig::default(), true);
        assert_eq!(aux.grooming_edges().count(), 0);
        let mut pairs: Vec<_> = aux.candidate_edges().map(|e| (e.from, e.to)).collect();
        pairs.sort();
        assert_eq!(pairs.len(), 2 * t.links().len());
        for l in t.links() {
            assert!(pairs.contains(&(l.a, l.b)) && pairs.contains(&(l.b, l.a)));
        }
    }

    #[test]
    fn aux_graph_grooming_edges() {
        let t = line(&[200.0, 200.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let cfg = PlannerConfig::default();
        for arch in [Architecture::TrIP, Architecture::TrZR] {
            let mut st = NetworkState::new(&t, &c, arch);
            st.route_demand(DemandId(0), &demand(&t, "A", "C", 200), &cfg).unwrap();
            let lp_len = st.lightpaths()[0].length_km();
            let residual = st.lightpaths()[0].residual_gbps();
            let same = st.auxiliary_graph(&demand(&t, "A", "C", 100), 100, &cfg, true);
            let other = st.auxiliary_graph(&demand(&t, "A", "B", 100), 100, &cfg, true);
            if arch == Architecture::TrIP {
                assert_eq!(residual, 200);
                let g: Vec<_> = same.grooming_edges().collect();
                assert_eq!(g.len(), 1);
                assert!((g[0].weight - 0.01 * lp_len).abs() < 1e-12);
                assert_eq!(other.grooming_edges().count(), 1);
            } else {
                // min-channel policy picked a 200G channel: no room left
                assert_eq!(residual, 0);
                assert_eq!(same.grooming_edges().count(), 0);
                assert_eq!(other.grooming_edges().count(), 0);
            }
        }
    }

    #[test]
    fn end_to_end_fills_spare_room_first() {
        let t = line(&[50.0, 50.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let cfg = PlannerConfig::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrZR);
        // within ZR reach the 400G ZR is the cheapest channel: 300G spare
        st.route_demand(DemandId(0), &demand(&t, "A", "C", 100), &cfg).unwrap();
        assert_eq!(st.lightpaths()[0].residual_gbps(), 300);
        let rec = st.route_demand(DemandId(1), &demand(&t, "A", "C", 500), &cfg).unwrap().clone();
        let rates: Vec<u32> = rec.subflows.iter().map(|s| s.rate_gbps).collect();
        assert_eq!(rates, vec![300, 200]);
        assert_eq!(rec.subflows[0].hops, vec![LightpathId(0)]);
        assert_eq!(st.lightpaths().len(), 2);
        st.audit().unwrap();
    }

    #[test]
    fn grooming_reuses_residual() {
        let t = line(&[200.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let cfg = PlannerConfig::default();
        let mut st = NetworkState::new(&t, &c, Architecture::TrIP);
        st.route_demand(DemandId(0), &demand(&t, "A", "B", 200), &cfg).unwrap();
        st.route_demand(DemandId(1), &demand(&t, "A", "B", 100), &cfg).unwrap();
        st.route_demand(DemandId(2), &demand(&t, "A", "B", 100), &cfg).unwrap();
        assert_eq!(st.lightpaths().len(), 1);
        assert_eq!(st.lightpaths()[0].residual_gbps(), 0);
        st.audit().unwrap();
    }

    #[test]
    fn consolidation_turns_pure_transit_into_b2b() {
        let t = line(&[400.0, 400.0], ChannelGrid::default());
        let c = ModeCatalog::default();
        let scenario = TrafficScenario::builtin("TS1").unwrap();
        let mut m = TrafficMatrix::empty(scenario);
        m.demands.push(demand(&t, "A", "C", 400));
        let trip = provision_all(&t, &c, &m, Architecture::TrIP, &PlannerConfig::default()).unwrap();
        let both = provision_all(&t, &c, &m, Architecture::TrIPandZR, &PlannerConfig::default()).unwrap();
        assert_eq!(trip.state.total_modules(), both.state.total_modules());
        assert_eq!(both.state.lightpaths().len(), 1);
        assert_eq!(both.state.b2b_modules(), 2);
        assert_eq!(both.state.router_ports_at(t.node("B").unwrap()), 0);
        assert_eq!(trip.state.router_ports_at(t.node("B").unwrap()), 2);
        both.state.audit().unwrap();

        // traffic dropped at B keeps the router termination
        m.demands.push(demand(&t, "A", "B", 100));
        let both = provision_all(&t, &c, &m, Architecture::TrIPandZR, &PlannerConfig::default()).unwrap();
        both.state.audit().unwrap();
        assert!(both.state.router_ports_at(t.node("B").unwrap()) >= 1);
    }

    #[test]
    fn empty_matrix() {
        let t = line(&[100.0], ChannelGrid::default());
        let m = TrafficMatrix::empty(TrafficScenario::builtin("TS1").unwrap());
        let out =
            provision_all(&t, &ModeCatalog::default(), &m, Architecture::TrIP, &PlannerConfig::default()).unwrap();
        assert!(out.state.lightpaths().is_empty());
        assert!(out.blocked.is_empty());
        out.state.audit().unwrap();
    }

    #[test]
    fn config_validation() {
        let bad = PlannerConfig { k: 0, ..PlannerConfig::default() };
        assert!(bad.validate().is_err());
        let bad = PlannerConfig { grooming_weight_factor: 0.0, ..PlannerConfig::default() };
        assert!(bad.validate().is_err());
        assert!(PlannerConfig::default().validate().is_ok());
    }

    #[test]
    fn subflow_split() {
        let t = line(&[100.0], ChannelGrid::default());
        let st = NetworkState::new(&t, &ModeCatalog::default(), Architecture::TrIP);
        assert_eq!(st.split_subflows(600), vec![400, 200]);
        assert_eq!(st.split_subflows(500), vec![400, 100]);
        assert_eq!(st.split_subflows(300), vec![300]);
    }
}
