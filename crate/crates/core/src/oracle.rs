//! Brute-force reference solvers for tiny instances.
//!
//! None of these share code with the planners they check. They are slow on
//! purpose and refuse instances above a fixed size.

use std::cmp::Ordering;

use thiserror::Error;

use crate::rmsa::Architecture;
use crate::topology::{NodeId, Path, Topology};
use crate::traffic::Demand;
use crate::transceiver::{ModeCatalog, ModeId};
use crate::units::Power;

pub const MAX_NODES: usize = 5;
pub const MAX_DEMANDS: usize = 8;
pub const MAX_CHANNELS: usize = 10;

/// Demands and lightpaths are sized in steps of this many Gb/s.
const UNIT_GBPS: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("no feasible provisioning exists")]
    Infeasible,
    #[error("demand rates must be positive multiples of 100 Gb/s")]
    BadRate,
}

/// All simple paths from `s` to `d`, ordered by (length, node sequence).
pub fn exhaustive_path_enumeration(t: &Topology, s: NodeId, d: NodeId) -> Vec<Path> {
    fn walk(t: &Topology, at: NodeId, d: NodeId, stack: &mut Vec<NodeId>, out: &mut Vec<Path>) {
        if at == d {
            let length_km = t.path_length_km(stack).expect("walk follows links");
            out.push(Path { nodes: stack.clone(), length_km });
            return;
        }
        for l in t.links() {
            let next = if l.a == at {
                l.b
            } else if l.b == at {
                l.a
            } else {
                continue;
            };
            if !stack.contains(&next) {
                stack.push(next);
                walk(t, next, d, stack, out);
                stack.pop();
            }
        }
    }
    let mut out = Vec::new();
    if s != d {
        walk(t, s, d, &mut vec![s], &mut out);
    }
    out.sort_by(|a, b| a.length_km.total_cmp(&b.length_km).then_with(|| a.nodes.cmp(&b.nodes)));
    out
}

/// Fewest regeneration sites on a path so that no transparent stretch is
/// longer than `reach_km`, found by trying every subset of interior nodes.
/// Among minimum subsets the lexicographically greatest is returned.
pub fn exhaustive_regen_placement(link_lengths_km: &[f64], reach_km: f64) -> Option<Vec<usize>> {
    let n = link_lengths_km.len();
    assert!(n <= 20, "subset enumeration over {n} links");
    let interior = n.saturating_sub(1);
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << interior) {
        let sites: Vec<usize> = (0..interior).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
        let mut run = 0.0;
        let mut ok = true;
        for (i, len) in link_lengths_km.iter().enumerate() {
            if sites.contains(&i) {
                run = 0.0;
            }
            run += len;
            if run > reach_km {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => sites.len() < b.len() || (sites.len() == b.len() && sites > *b),
        };
        if better {
            best = Some(sites);
        }
    }
    best
}

/// Best `(channels, regenerators, power)` for carrying `rate_gbps` over a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitOptimum {
    pub channels: usize,
    pub regenerators: usize,
    pub power: Power,
}

/// Every ordered tuple of catalog modes up to the channel count that the
/// slowest mode would need, scored by (channels, regenerators, power).
pub fn exhaustive_split_enumeration(
    catalog: &ModeCatalog,
    rate_gbps: u32,
    link_lengths_km: &[f64],
) -> Option<SplitOptimum> {
    let modes = catalog.modes();
    let regens: Vec<Option<usize>> =
        modes.iter().map(|m| exhaustive_regen_placement(link_lengths_km, m.reach_km).map(|s| s.len())).collect();
    let slowest = modes.iter().map(|m| m.rate_gbps).min()?;
    let max_channels = rate_gbps.div_ceil(slowest) as usize;
    let mut best: Option<SplitOptimum> = None;
    let mut tuple = Vec::new();
    fn rec(
        tuple: &mut Vec<usize>,
        max_channels: usize,
        catalog: &ModeCatalog,
        regens: &[Option<usize>],
        rate_gbps: u32,
        best: &mut Option<SplitOptimum>,
    ) {
        if !tuple.is_empty() {
            let modes = catalog.modes();
            let cap: u32 = tuple.iter().map(|&i| modes[i].rate_gbps).sum();
            if cap >= rate_gbps && tuple.iter().all(|&i| regens[i].is_some()) {
                let r: usize = tuple.iter().map(|&i| regens[i].unwrap()).sum();
                let power = tuple.iter().map(|&i| modes[i].power * (2 + 2 * regens[i].unwrap() as u64)).sum();
                let cand = SplitOptimum { channels: tuple.len(), regenerators: r, power };
                let better = match best {
                    None => true,
                    Some(b) => (cand.channels, cand.regenerators, cand.power) < (b.channels, b.regenerators, b.power),
                };
                if better {
                    *best = Some(cand);
                }
            }
        }
        if tuple.len() == max_channels {
            return;
        }
        for i in 0..catalog.modes().len() {
            tuple.push(i);
            rec(tuple, max_channels, catalog, regens, rate_gbps, best);
            tuple.pop();
        }
    }
    rec(&mut tuple, max_channels, catalog, &regens, rate_gbps, &mut best);
    best
}

/// A lightpath of an optimal design.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleLightpath {
    pub src: NodeId,
    pub dst: NodeId,
    pub nodes: Vec<NodeId>,
    pub mode: ModeId,
    pub regenerators: usize,
    /// Gb/s of demand traffic placed on it.
    pub load_gbps: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    /// Sum of module cost units, back-to-back regenerators included.
    pub module_cost: u64,
    pub router_ports: u64,
    pub lightpaths: Vec<OracleLightpath>,
}

/// Cheapest way to open a lightpath of a given capacity between two nodes.
#[derive(Clone, Debug)]
struct LpType {
    cost: u64,
    cap: u32,
    nodes: Vec<NodeId>,
    mode: ModeId,
    regenerators: usize,
}

/// Pareto set of (cost, capacity) lightpath options from `u` to `v`,
/// cheapest first.
fn lightpath_types(t: &Topology, catalog: &ModeCatalog, arch: Architecture, u: NodeId, v: NodeId) -> Vec<LpType> {
    let b2b = matches!(arch, Architecture::TrZR | Architecture::TrIPandZR);
    let mut all = Vec::new();
    for p in exhaustive_path_enumeration(t, u, v) {
        if arch == Architecture::OpIP && p.nodes.len() != 2 {
            continue;
        }
        let lengths = t.link_lengths(&p.nodes).expect("enumerated path");
        for m in catalog.modes() {
            let regenerators = if b2b {
                match exhaustive_regen_placement(&lengths, m.reach_km) {
                    Some(s) => s.len(),
                    None => continue,
                }
            } else if p.length_km <= m.reach_km {
                0
            } else {
                continue;
            };
            all.push(LpType {
                cost: m.cost_units as u64 * (2 + 2 * regenerators as u64),
                cap: m.rate_gbps / UNIT_GBPS,
                nodes: p.nodes.clone(),
                mode: m.id,
                regenerators,
            });
        }
    }
    all.sort_by(|a, b| a.cost.cmp(&b.cost).then(b.cap.cmp(&a.cap)).then(a.mode.cmp(&b.mode)));
    let mut kept: Vec<LpType> = Vec::new();
    for ty in all {
        if !kept.iter().any(|k| k.cost <= ty.cost && k.cap >= ty.cap) {
            kept.push(ty);
        }
    }
    kept
}

fn check_size(t: &Topology, demands: &[Demand]) -> Result<(), OracleError> {
    if t.node_count() > MAX_NODES {
        return Err(OracleError::InstanceTooLarge(format!("{} nodes > {MAX_NODES}", t.node_count())));
    }
    if demands.len() > MAX_DEMANDS {
        return Err(OracleError::InstanceTooLarge(format!("{} demands > {MAX_DEMANDS}", demands.len())));
    }
    if t.grid().channel_count > MAX_CHANNELS {
        return Err(OracleError::InstanceTooLarge(format!("{} channels > {MAX_CHANNELS}", t.grid().channel_count)));
    }
    if demands.iter().any(|d| d.rate_gbps == 0 || d.rate_gbps % UNIT_GBPS != 0) {
        return Err(OracleError::BadRate);
    }
    Ok(())
}

/// Minimum (module cost, router ports) provisioning of `demands` under
/// `arch`. Each demand travels as its sub-flows of at most the fastest mode
/// rate, each on one chain of lightpaths, groomed wherever the architecture
/// allows; end-to-end pairs may use any mix of channels. Spectrum is not constrained, so the result is a
/// lower bound for any spectrum-feasible plan.
pub fn exhaustive_min_cost_provision(
    t: &Topology,
    catalog: &ModeCatalog,
    demands: &[Demand],
    arch: Architecture,
) -> Result<OracleSolution, OracleError> {
    check_size(t, demands)?;
    let n = t.node_count();
    let mut types = vec![vec![Vec::new(); n]; n];
    for u in t.node_ids() {
        for v in t.node_ids() {
            if u != v {
                types[u.0][v.0] = lightpath_types(t, catalog, arch, u, v);
            }
        }
    }
    if arch == Architecture::TrZR {
        return end_to_end(&types, demands);
    }
    let max_cap = catalog.max_rate_gbps() / UNIT_GBPS;
    let mut flows = Vec::new();
    for d in demands {
        let mut left = d.rate_gbps / UNIT_GBPS;
        while left > 0 {
            let units = left.min(max_cap);
            flows.push((d.src.0, d.dst.0, units));
            left -= units;
        }
    }
    flows.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut search = Search {
        types,
        flows,
        max_cap,
        min_cost: 2 * catalog.min_module_cost() as u64,
        open: Vec::new(),
        cost: 0,
        best: None,
    };
    search.flow(0);
    let (cost, open) = search.best.ok_or(OracleError::Infeasible)?;
    Ok(solution(cost, &search.types, &open))
}

fn solution(cost: u64, types: &[Vec<Vec<LpType>>], open: &[Open]) -> OracleSolution {
    OracleSolution {
        module_cost: cost,
        router_ports: 2 * open.len() as u64,
        lightpaths: open
            .iter()
            .map(|o| {
                let ty = &types[o.src][o.dst][o.ty];
                OracleLightpath {
                    src: NodeId(o.src),
                    dst: NodeId(o.dst),
                    nodes: ty.nodes.clone(),
                    mode: ty.mode,
                    regenerators: ty.regenerators,
                    load_gbps: o.used * UNIT_GBPS,
                }
            })
            .collect(),
    }
}

/// Each endpoint pair is covered by its own lightpaths; pairs never share.
fn end_to_end(types: &[Vec<Vec<LpType>>], demands: &[Demand]) -> Result<OracleSolution, OracleError> {
    let mut pairs: Vec<((usize, usize), u32)> = Vec::new();
    for d in demands {
        let key = (d.src.0, d.dst.0);
        match pairs.iter_mut().find(|(k, _)| *k == key) {
            Some((_, units)) => *units += d.rate_gbps / UNIT_GBPS,
            None => pairs.push((key, d.rate_gbps / UNIT_GBPS)),
        }
    }
    pairs.sort();
    let mut open = Vec::new();
    let mut cost = 0;
    for ((s, d), units) in pairs {
        let options = &types[s][d];
        if options.is_empty() {
            return Err(OracleError::Infeasible);
        }
        // best[r] = cheapest (cost, lightpaths, choice) covering at least r units
        let mut best: Vec<Option<(u64, u64, usize)>> = vec![None; units as usize + 1];
        best[0] = Some((0, 0, usize::MAX));
        for r in 1..=units as usize {
            for (i, ty) in options.iter().enumerate() {
                let prev = r.saturating_sub(ty.cap as usize);
                if let Some((c, k, _)) = best[prev] {
                    let cand = (c + ty.cost, k + 1, i);
                    if best[r].is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                        best[r] = Some(cand);
                    }
                }
            }
        }
        let (c, _, _) = best[units as usize].expect("every option has positive capacity");
        cost += c;
        let mut r = units as usize;
        while r > 0 {
            let (_, _, i) = best[r].unwrap();
            let cap = options[i].cap as usize;
            open.push(Open { src: s, dst: d, ty: i, used: r.min(cap) as u32 });
            r = r.saturating_sub(cap);
        }
    }
    Ok(solution(cost, types, &open))
}

#[derive(Clone, Debug, PartialEq)]
struct Open {
    src: usize,
    dst: usize,
    ty: usize,
    used: u32,
}

struct Search {
    types: Vec<Vec<Vec<LpType>>>,
    /// Sub-flows (src, dst, units), largest first.
    flows: Vec<(usize, usize, u32)>,
    max_cap: u32,
    min_cost: u64,
    open: Vec<Open>,
    cost: u64,
    best: Option<(u64, Vec<Open>)>,
}

impl Search {
    fn key(cost: u64, open: usize) -> (u64, usize) {
        (cost, open)
    }

    fn beaten(&self, extra_cost: u64, extra_open: usize) -> bool {
        match &self.best {
            None => false,
            Some((c, o)) => {
                Self::key(self.cost + extra_cost, self.open.len() + extra_open).cmp(&Self::key(*c, o.len()))
                    != Ordering::Less
            }
        }
    }

    /// New lightpaths still needed: units leaving (entering) a node beyond
    /// the free room of open lightpaths starting (ending) there.
    fn lower_bound(&self, i: usize) -> (u64, usize) {
        let n = self.types.len();
        let (mut out, mut inn) = (vec![0i64; n], vec![0i64; n]);
        for &(s, d, units) in &self.flows[i..] {
            out[s] += units as i64;
            inn[d] += units as i64;
        }
        for o in &self.open {
            let room = (self.types[o.src][o.dst][o.ty].cap - o.used) as i64;
            out[o.src] -= room;
            inn[o.dst] -= room;
        }
        let need = |v: &[i64]| -> usize { v.iter().map(|&x| (x.max(0) as u32).div_ceil(self.max_cap) as usize).sum() };
        let k = need(&out).max(need(&inn));
        (k as u64 * self.min_cost, k)
    }

    fn flow(&mut self, i: usize) {
        if i == self.flows.len() {
            if !self.beaten(0, 0) {
                self.best = Some((self.cost, self.open.clone()));
            }
            return;
        }
        let (cost, open) = self.lower_bound(i);
        if self.beaten(cost, open) {
            return;
        }
        let (src, _, _) = self.flows[i];
        self.chain(i, src, 1 << src);
    }

    /// Extend sub-flow `i`, currently at node `at`, one lightpath at a time.
    fn chain(&mut self, i: usize, at: usize, visited: u32) {
        let (_, dst, units) = self.flows[i];
        if at == dst {
            self.flow(i + 1);
            return;
        }
        // ride an open lightpath; identical ones are tried once
        let mut tried: Vec<(usize, usize, u32)> = Vec::new();
        for j in 0..self.open.len() {
            let o = &self.open[j];
            let cap = self.types[o.src][o.dst][o.ty].cap;
            if o.src != at || visited & (1 << o.dst) != 0 || cap - o.used < units {
                continue;
            }
            let sig = (o.dst, o.ty, o.used);
            if tried.contains(&sig) {
                continue;
            }
            tried.push(sig);
            let next = o.dst;
            self.open[j].used += units;
            self.chain(i, next, visited | (1 << next));
            self.open[j].used -= units;
        }
        // or open a new one
        for v in 0..self.types.len() {
            if visited & (1 << v) != 0 {
                continue;
            }
            for ty in 0..self.types[at][v].len() {
                let (cost, cap) = (self.types[at][v][ty].cost, self.types[at][v][ty].cap);
                if cap < units {
                    continue;
                }
                if self.beaten(cost, 1) {
                    break;
                }
                self.open.push(Open { src: at, dst: v, ty, used: units });
                self.cost += cost;
                self.chain(i, v, visited | (1 << v));
                self.cost -= cost;
                self.open.pop();
            }
        }
    }
}
