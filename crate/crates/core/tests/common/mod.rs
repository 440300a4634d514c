//! Shared instance generators for the integration suites.
#![allow(dead_code)]

use ipowdm::oracle::{exhaustive_min_cost_provision, exhaustive_regen_placement, exhaustive_split_enumeration};
use ipowdm::topology::ChannelGrid;
use ipowdm::transceiver::plan_regeneration;
use ipowdm::{
    network_cost, provision_all, Architecture, Demand, ModeCatalog, NodeId, PlannerConfig, Topology, TrafficMatrix,
    TrafficScenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

/// Connected random graph: a random spanning tree plus extra links.
pub fn random_topology(rng: &mut ChaCha8Rng, nodes: usize, extra: usize, km: (f64, f64), channels: usize) -> Topology {
    let mut links: Vec<(usize, usize, f64)> = Vec::new();
    let has = |a: usize, b: usize, links: &Vec<(usize, usize, f64)>| {
        links.iter().any(|&(x, y, _)| (x, y) == (a.min(b), a.max(b)))
    };
    for v in 1..nodes {
        let u = rng.gen_range(0..v);
        links.push((u, v, rng.gen_range(km.0..km.1).round()));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b && !has(a, b, &links) {
            links.push((a.min(b), a.max(b), rng.gen_range(km.0..km.1).round()));
        }
    }
    let named: Vec<(&str, &str, f64)> = links.iter().map(|&(a, b, l)| (NAMES[a], NAMES[b], l)).collect();
    Topology::build("toy", &NAMES[..nodes], &named, ChannelGrid { channel_count: channels, spacing_ghz: 100 }).unwrap()
}

pub fn random_demands(rng: &mut ChaCha8Rng, t: &Topology, count: usize) -> Vec<Demand> {
    let n = t.node_count();
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let mut d = rng.gen_range(0..n - 1);
            if d >= s {
                d += 1;
            }
            Demand { src: NodeId(s), dst: NodeId(d), rate_gbps: 100 * rng.gen_range(1..=6) }
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One toy instance solved by both the planner and the exhaustive oracle.
pub struct OracleCase {
    pub arch: Architecture,
    pub seed: u64,
    pub nodes: usize,
    pub demands: usize,
    pub heuristic: u64,
    pub optimum: u64,
}

impl OracleCase {
    pub fn ratio(&self) -> f64 {
        self.heuristic as f64 / self.optimum as f64
    }
}

/// Random instances with 3-5 nodes and 2-8 demands. Links stay within the
/// 400G reach so every demand is routable under every architecture.
pub fn oracle_cases(per_arch: u64) -> Vec<OracleCase> {
    let catalog = ModeCatalog::default();
    let mut out = Vec::new();
    for arch in Architecture::ALL {
        for seed in 0..per_arch {
            let mut r = rng(seed);
            let nodes = r.gen_range(3..=5);
            let t = random_topology(&mut r, nodes, 2, (60.0, 580.0), 10);
            let count = r.gen_range(2..=8);
            let demands = random_demands(&mut r, &t, count);
            let matrix =
                TrafficMatrix { demands: demands.clone(), seed, scenario: TrafficScenario::builtin("TS1").unwrap() };
            let outcome = provision_all(&t, &catalog, &matrix, arch, &PlannerConfig::default()).unwrap();
            assert!(outcome.blocked.is_empty(), "{arch} seed {seed} blocked {:?}", outcome.blocked);
            let best = exhaustive_min_cost_provision(&t, &catalog, &demands, arch).unwrap();
            out.push(OracleCase {
                arch,
                seed,
                nodes,
                demands: count,
                heuristic: network_cost(&outcome.state).module_cost,
                optimum: best.module_cost,
            });
        }
    }
    out
}

/// `(rate, km)` lattice points where the min-channel split differs from the
/// enumeration oracle, out of all rates up to 600G and 100..=3000 km.
pub fn split_lattice_mismatches() -> (usize, Vec<(u32, u32)>) {
    let c = ModeCatalog::default();
    let mut checked = 0;
    let mut bad = Vec::new();
    for rate in (100..=600).step_by(100) {
        for km in (100..=3000).step_by(100) {
            let got = c.select_modes_min_channels(rate, km as f64).unwrap();
            let want = exhaustive_split_enumeration(&c, rate, &[km as f64]).unwrap();
            if (got.channels(), got.regenerators, got.power) != (want.channels, want.regenerators, want.power)
                || got.capacity_gbps < rate
            {
                bad.push((rate, km));
            }
            checked += 1;
        }
    }
    (checked, bad)
}

/// Paths of 1..=4 links on a 200 km lattice, at every catalog reach, where
/// greedy placement differs from subset enumeration.
pub fn regen_lattice_mismatches() -> (usize, Vec<(Vec<f64>, f64)>) {
    let lengths = [200.0, 400.0, 600.0, 800.0];
    let mut checked = 0;
    let mut bad = Vec::new();
    for links in 1..=4u32 {
        for code in 0..4usize.pow(links) {
            let path: Vec<f64> = (0..links).map(|i| lengths[code / 4usize.pow(i) % 4]).collect();
            for reach in [120.0, 600.0, 1800.0, 3000.0] {
                let got = plan_regeneration(&path, reach).ok().map(|p| p.regen_positions);
                if got != exhaustive_regen_placement(&path, reach) {
                    bad.push((path.clone(), reach));
                }
                checked += 1;
            }
        }
    }
    (checked, bad)
}
