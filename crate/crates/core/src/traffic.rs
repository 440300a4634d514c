//! Full-mesh traffic matrices drawn from a rate-class mix.
//!
//! Rates are drawn with ChaCha8 seeded through `seed_from_u64`. For every
//! ordered pair `(src, dst)`, iterated in node-identifier order, one 64-bit
//! word `w` is taken from the stream, mapped to `u = (w >> 11) * 2^-53` in
//! `[0, 1)`, and the first rate class whose cumulative weight exceeds `u` is
//! chosen.

use std::collections::BTreeMap;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{NodeId, Topology, TopologyError};

/// Demand rate classes in Gb/s.
pub const RATE_CLASSES: [u32; 6] = [100, 200, 300, 400, 500, 600];

const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("malformed scenario document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("unknown rate class `{0}` (expected one of 100..600 in steps of 100)")]
    UnknownClass(String),
    #[error("weight for {rate} Gb/s is {weight}, expected a finite value >= 0")]
    InvalidWeight { rate: u32, weight: f64 },
    #[error("weights sum to {0}, expected 1")]
    BadSum(f64),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("traffic csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid demand {src}->{dst} at {rate_gbps} Gb/s")]
    InvalidDemand { src: String, dst: String, rate_gbps: u32 },
}

/// A directed point-to-point rate request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Demand {
    pub src: NodeId,
    pub dst: NodeId,
    pub rate_gbps: u32,
}

impl Demand {
    pub fn is_valid(&self) -> bool {
        self.src != self.dst && RATE_CLASSES.contains(&self.rate_gbps)
    }
}

/// Probability of each rate class.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficScenario {
    name: String,
    weights: [f64; 6],
}

impl TrafficScenario {
    pub fn new(name: &str, weights: [f64; 6]) -> Result<TrafficScenario, TrafficError> {
        for (&rate, &weight) in RATE_CLASSES.iter().zip(&weights) {
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(TrafficError::InvalidWeight { rate, weight });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(TrafficError::BadSum(sum));
        }
        Ok(TrafficScenario { name: name.to_string(), weights })
    }

    /// Parse a `{"100": w, ..., "600": w}` mapping. Missing classes weigh 0.
    pub fn from_json(name: &str, text: &str) -> Result<TrafficScenario, TrafficError> {
        let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
        let mut weights = [0.0; 6];
        for (key, w) in raw {
            let pos = key
                .trim()
                .parse::<u32>()
                .ok()
                .and_then(|r| RATE_CLASSES.iter().position(|&c| c == r))
                .ok_or_else(|| TrafficError::UnknownClass(key.clone()))?;
            weights[pos] = w;
        }
        TrafficScenario::new(name, weights)
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<u32, f64> = RATE_CLASSES.iter().copied().zip(self.weights).collect();
        serde_json::to_string(&map).expect("scenario serializes")
    }

    /// One of the shipped scenarios `TS1`, `TS2`, `TS3` (case-insensitive).
    pub fn builtin(name: &str) -> Result<TrafficScenario, TrafficError> {
        let upper = name.to_ascii_uppercase();
        let text = match upper.as_str() {
            "TS1" => include_str!("../data/scenarios/ts1.json"),
            "TS2" => include_str!("../data/scenarios/ts2.json"),
            "TS3" => include_str!("../data/scenarios/ts3.json"),
            _ => return Err(TrafficError::UnknownScenario(name.to_string())),
        };
        TrafficScenario::from_json(&upper, text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weights(&self) -> &[f64; 6] {
        &self.weights
    }

    pub fn mean_rate_gbps(&self) -> f64 {
        RATE_CLASSES.iter().zip(&self.weights).map(|(&r, &w)| r as f64 * w).sum()
    }

    fn sample(&self, u: f64) -> u32 {
        let mut acc = 0.0;
        for (&rate, &w) in RATE_CLASSES.iter().zip(&self.weights) {
            acc += w;
            if u < acc {
                return rate;
            }
        }
        // u landed in the rounding gap just below 1
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        RATE_CLASSES[last]
    }
}

impl fmt::Display for TrafficScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// One demand per ordered node pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficMatrix {
    pub demands: Vec<Demand>,
    pub seed: u64,
    pub scenario: TrafficScenario,
}

/// Draw a full-mesh matrix for `topology`. Deterministic in all three inputs.
pub fn generate_traffic(topology: &Topology, scenario: &TrafficScenario, seed: u64) -> TrafficMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = topology.node_count();
    let mut demands = Vec::with_capacity(n * n.saturating_sub(1));
    for src in topology.node_ids() {
        for dst in topology.node_ids() {
            if src == dst {
                continue;
            }
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            demands.push(Demand { src, dst, rate_gbps: scenario.sample(u) });
        }
    }
    TrafficMatrix { demands, seed, scenario: scenario.clone() }
}

#[derive(Serialize, Deserialize)]
struct DemandRow {
    src: String,
    dst: String,
    rate_gbps: u32,
}

impl TrafficMatrix {
    pub fn empty(scenario: TrafficScenario) -> TrafficMatrix {
        TrafficMatrix { demands: Vec::new(), seed: 0, scenario }
    }

    pub fn total_gbps(&self) -> u64 {
        self.demands.iter().map(|d| d.rate_gbps as u64).sum()
    }

    /// `src,dst,rate_gbps` CSV with node identifiers.
    pub fn to_csv(&self, topology: &Topology) -> Result<String, TrafficError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for d in &self.demands {
            w.serialize(DemandRow {
                src: topology.node_name(d.src).to_string(),
                dst: topology.node_name(d.dst).to_string(),
                rate_gbps: d.rate_gbps,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Read demands back from CSV. The scenario and seed are supplied by the caller.
    pub fn from_csv(
        topology: &Topology,
        text: &str,
        scenario: TrafficScenario,
        seed: u64,
    ) -> Result<TrafficMatrix, TrafficError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut demands = Vec::new();
        for row in r.deserialize() {
            let row: DemandRow = row?;
            let d = Demand { src: topology.node(&row.src)?, dst: topology.node(&row.dst)?, rate_gbps: row.rate_gbps };
            if !d.is_valid() {
                return Err(TrafficError::InvalidDemand { src: row.src, dst: row.dst, rate_gbps: row.rate_gbps });
            }
            demands.push(d);
        }
        Ok(TrafficMatrix { demands, seed, scenario })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{builtin, ChannelGrid};

    fn three_nodes() -> Topology {
        Topology::build("t3", &["A", "B", "C"], &[("A", "B", 10.0), ("B", "C", 10.0)], ChannelGrid::default()).unwrap()
    }

    #[test]
    fn full_mesh_count() {
        let m = generate_traffic(&three_nodes(), &TrafficScenario::builtin("TS2").unwrap(), 1);
        assert_eq!(m.demands.len(), 6);
        assert!(m.demands.iter().all(Demand::is_valid));
    }

    #[test]
    fn degenerate_scenario() {
        let s = TrafficScenario::new("only400", [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = generate_traffic(&builtin::load("J14").unwrap().unwrap(), &s, 7);
        assert!(m.demands.iter().all(|d| d.rate_gbps == 400));
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let t = builtin::load("G17").unwrap().unwrap();
        let s = TrafficScenario::builtin("TS1").unwrap();
        let a = generate_traffic(&t, &s, 3);
        let b = generate_traffic(&t, &s, 3);
        let c = generate_traffic(&t, &s, 4);
        assert_eq!(a, b);
        assert_eq!(a.to_csv(&t).unwrap(), b.to_csv(&t).unwrap());
        assert!(a.demands.iter().zip(&c.demands).any(|(x, y)| x.rate_gbps != y.rate_gbps));
    }

    #[test]
    fn scenario_validation() {
        assert!(matches!(TrafficScenario::new("x", [0.5, 0.5, 0.1, 0.0, 0.0, 0.0]), Err(TrafficError::BadSum(_))));
        assert!(matches!(
            TrafficScenario::new("x", [1.5, -0.5, 0.0, 0.0, 0.0, 0.0]),
            Err(TrafficError::InvalidWeight { rate: 200, .. })
        ));
        assert!(matches!(TrafficScenario::from_json("x", r#"{"150": 1.0}"#), Err(TrafficError::UnknownClass(_))));
        let s = TrafficScenario::from_json("x", r#"{"200": 0.5, "600": 0.5}"#).unwrap();
        assert_eq!(s.weights(), &[0.0, 0.5, 0.0, 0.0, 0.0, 0.5]);
        assert!(matches!(TrafficScenario::builtin("TS9"), Err(TrafficError::UnknownScenario(_))));
    }

    #[test]
    fn shipped_scenarios_shift_towards_high_rates() {
        let means: Vec<f64> =
            ["TS1", "TS2", "TS3"].iter().map(|n| TrafficScenario::builtin(n).unwrap().mean_rate_gbps()).collect();
        assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
    }

    #[test]
    fn csv_round_trip() {
        let t = three_nodes();
        let s = TrafficScenario::builtin("TS3").unwrap();
        let m = generate_traffic(&t, &s, 11);
        let text = m.to_csv(&t).unwrap();
        assert!(text.starts_with("src,dst,rate_gbps\n"));
        assert_eq!(TrafficMatrix::from_csv(&t, &text, s, 11).unwrap(), m);
    }
}
