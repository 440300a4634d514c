//! JSON document for a provisioning result, keyed by node names so it can be
//! read without the internal indices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rmsa::{
    Architecture, BlockReason, Blocked, Carried, DemandId, Lightpath, LightpathId, NetworkState, ProvisionOutcome,
    ProvisionRecord, RmsaError, Segment, SubflowRecord,
};
use crate::topology::{NodeId, Topology, TopologyError};
use crate::traffic::TrafficMatrix;
use crate::transceiver::{ModeCatalog, ModeId, Modulation, ModuleKind};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("malformed plan document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("plan was made on topology {found}, expected {expected}")]
    TopologyMismatch { expected: String, found: String },
    #[error("unknown architecture {0:?}")]
    Architecture(String),
    #[error("lightpath {index}: mode {mode} is not in the catalog")]
    UnknownMode { index: usize, mode: usize },
    #[error("unknown block reason {0:?}")]
    BlockReason(String),
    #[error(transparent)]
    State(#[from] RmsaError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub topology: String,
    pub architecture: String,
    pub lightpaths: Vec<LightpathDoc>,
    pub demands: Vec<DemandDoc>,
    pub blocked: Vec<BlockedDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightpathDoc {
    pub id: usize,
    pub mode: usize,
    pub module: ModuleKind,
    pub modulation: Modulation,
    pub rate_gbps: u32,
    pub route: Vec<String>,
    pub length_km: f64,
    pub segments: Vec<SegmentDoc>,
    /// Back-to-back regenerator sites, in route order.
    pub b2b_regenerators: Vec<String>,
    pub carried: Vec<CarriedDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub nodes: Vec<String>,
    pub channel: usize,
    pub length_km: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarriedDoc {
    pub demand: usize,
    pub subflow: usize,
    pub rate_gbps: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandDoc {
    pub id: usize,
    pub src: String,
    pub dst: String,
    pub rate_gbps: u32,
    pub subflows: Vec<SubflowDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubflowDoc {
    pub rate_gbps: u32,
    pub lightpaths: Vec<usize>,
    /// Routers the sub-flow crosses between two lightpaths.
    pub ip_nodes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockedDoc {
    pub demand: usize,
    pub src: String,
    pub dst: String,
    pub rate_gbps: u32,
    pub reason: String,
}

fn names(t: &Topology, nodes: &[NodeId]) -> Vec<String> {
    nodes.iter().map(|&n| t.node_name(n).to_string()).collect()
}

fn ids(t: &Topology, nodes: &[String]) -> Result<Vec<NodeId>, TopologyError> {
    nodes.iter().map(|n| t.node(n)).collect()
}

impl PlanDocument {
    pub fn from_outcome(outcome: &ProvisionOutcome, matrix: &TrafficMatrix) -> PlanDocument {
        let state = &outcome.state;
        let t = state.topology();
        let lightpaths = state
            .lightpaths()
            .iter()
            .map(|lp| {
                let mode = state.mode(lp.mode);
                LightpathDoc {
                    id: lp.id.0,
                    mode: lp.mode.0,
                    module: mode.module,
                    modulation: mode.modulation,
                    rate_gbps: lp.rate_gbps,
                    route: names(t, &lp.route()),
                    length_km: lp.length_km(),
                    segments: lp
                        .segments
                        .iter()
                        .map(|s| SegmentDoc { nodes: names(t, &s.nodes), channel: s.channel, length_km: s.length_km })
                        .collect(),
                    b2b_regenerators: names(t, &lp.regen_nodes()),
                    carried: lp
                        .carried
                        .iter()
                        .map(|c| CarriedDoc { demand: c.demand.0, subflow: c.subflow, rate_gbps: c.rate_gbps })
                        .collect(),
                }
            })
            .collect();
        let demands = state
            .records()
            .iter()
            .map(|r| DemandDoc {
                id: r.demand.0,
                src: t.node_name(r.src).to_string(),
                dst: t.node_name(r.dst).to_string(),
                rate_gbps: r.rate_gbps,
                subflows: r
                    .subflows
                    .iter()
                    .map(|sf| SubflowDoc {
                        rate_gbps: sf.rate_gbps,
                        lightpaths: sf.hops.iter().map(|h| h.0).collect(),
                        ip_nodes: names(t, &state.ip_regen_nodes(sf)),
                    })
                    .collect(),
            })
            .collect();
        let blocked = outcome
            .blocked
            .iter()
            .map(|b| {
                let d = &matrix.demands[b.demand.0];
                BlockedDoc {
                    demand: b.demand.0,
                    src: t.node_name(d.src).to_string(),
                    dst: t.node_name(d.dst).to_string(),
                    rate_gbps: d.rate_gbps,
                    reason: b.reason.to_string(),
                }
            })
            .collect();
        PlanDocument {
            topology: t.name().to_string(),
            architecture: state.architecture().name().to_string(),
            lightpaths,
            demands,
            blocked,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<PlanDocument, PlanError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuild the state on `topology`; fails unless it passes the audit.
    pub fn to_outcome(&self, topology: &Topology, catalog: &ModeCatalog) -> Result<ProvisionOutcome, PlanError> {
        if self.topology != topology.name() {
            return Err(PlanError::TopologyMismatch { expected: topology.name().into(), found: self.topology.clone() });
        }
        let architecture: Architecture =
            self.architecture.parse().map_err(|_| PlanError::Architecture(self.architecture.clone()))?;
        let mut lightpaths = Vec::with_capacity(self.lightpaths.len());
        for (index, lp) in self.lightpaths.iter().enumerate() {
            if lp.mode >= catalog.modes().len() {
                return Err(PlanError::UnknownMode { index, mode: lp.mode });
            }
            let mut segments = Vec::new();
            for s in &lp.segments {
                let nodes = ids(topology, &s.nodes)?;
                let length_km = topology.path_length_km(&nodes)?;
                segments.push(Segment { nodes, channel: s.channel, length_km });
            }
            lightpaths.push(Lightpath {
                id: LightpathId(lp.id),
                mode: ModeId(lp.mode),
                rate_gbps: catalog.get(ModeId(lp.mode)).rate_gbps,
                segments,
                carried: lp
                    .carried
                    .iter()
                    .map(|c| Carried { demand: DemandId(c.demand), subflow: c.subflow, rate_gbps: c.rate_gbps })
                    .collect(),
            });
        }
        let mut records = Vec::with_capacity(self.demands.len());
        for d in &self.demands {
            records.push(ProvisionRecord {
                demand: DemandId(d.id),
                src: topology.node(&d.src)?,
                dst: topology.node(&d.dst)?,
                rate_gbps: d.rate_gbps,
                subflows: d
                    .subflows
                    .iter()
                    .map(|sf| SubflowRecord {
                        rate_gbps: sf.rate_gbps,
                        hops: sf.lightpaths.iter().map(|&h| LightpathId(h)).collect(),
                    })
                    .collect(),
            });
        }
        let blocked = self
            .blocked
            .iter()
            .map(|b| {
                let reason = match b.reason.as_str() {
                    "no_spectrum" => BlockReason::NoSpectrum,
                    "no_feasible_mode" => BlockReason::NoFeasibleMode,
                    other => return Err(PlanError::BlockReason(other.to_string())),
                };
                Ok(Blocked { demand: DemandId(b.demand), reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let state = NetworkState::from_parts(topology, catalog, architecture, lightpaths, records)?;
        Ok(ProvisionOutcome { state, blocked })
    }
}
