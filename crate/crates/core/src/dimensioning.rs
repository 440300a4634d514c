//! Node equipment tallies and normalized power and cost.
//!
//! Opaque nodes terminate every direction on an AWG mux/demux pair with one
//! amplifier per fiber direction. Transparent nodes put an I-ROADM on every
//! direction and reach the pluggables through add/drop blocks, each an AWG
//! with its own amplifier. I-ROADMs, amplifiers and monitoring units live in
//! shelves; AWGs sit outside them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rmsa::{Architecture, NetworkState};
use crate::topology::NodeId;
use crate::transceiver::ModuleKind;
use crate::units::Power;

#[derive(Debug, Error)]
pub enum DimensioningError {
    #[error("malformed configuration: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Normalized power of every network element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTable {
    pub zr: Power,
    pub zr_plus: Power,
    pub router_fixed: Power,
    pub router_modular_per_port: Power,
    pub shelf: Power,
    pub iroadm_bidir: Power,
    pub oa_unidir: Power,
    pub awg: Power,
    pub monitoring_opaque_bidir: Power,
    pub monitoring_transparent_bidir: Power,
}

impl Default for PowerTable {
    fn default() -> Self {
        PowerTable::from_json(include_str!("../data/config/power.json")).expect("shipped power table is valid")
    }
}

impl PowerTable {
    pub fn from_json(text: &str) -> Result<PowerTable, DimensioningError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("power table serializes")
    }

    pub fn module(&self, kind: ModuleKind) -> Power {
        match kind {
            ModuleKind::Zr => self.zr,
            ModuleKind::ZrPlus => self.zr_plus,
        }
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> PowerTable {
        PowerTable {
            zr: self.zr * factor,
            zr_plus: self.zr_plus * factor,
            router_fixed: self.router_fixed * factor,
            router_modular_per_port: self.router_modular_per_port * factor,
            shelf: self.shelf * factor,
            iroadm_bidir: self.iroadm_bidir * factor,
            oa_unidir: self.oa_unidir * factor,
            awg: self.awg * factor,
            monitoring_opaque_bidir: self.monitoring_opaque_bidir * factor,
            monitoring_transparent_bidir: self.monitoring_transparent_bidir * factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdbSizing {
    /// Sized for a fixed share of the node's line capacity, independent of traffic.
    Static,
    /// Sized for the channels actually terminated at the node.
    Provisioned,
}

/// Slot and sizing constants of the optical node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensioningConfig {
    pub shelf_slots: u32,
    pub iroadm_slots: u32,
    pub oa_slots: u32,
    pub monitoring_slots: u32,
    pub opaque_awg_per_degree: u32,
    pub opaque_oa_per_degree: u32,
    pub awg_per_adb: u32,
    pub oa_per_adb: u32,
    pub adb_capacity_channels: u32,
    pub adb_sizing: AdbSizing,
    /// Share of `degree * channel_count` channels a static ADB set can add/drop.
    pub static_add_drop_fraction: f64,
}

impl Default for DimensioningConfig {
    fn default() -> Self {
        DimensioningConfig::from_json(include_str!("../data/config/dimensioning.json"))
            .expect("shipped dimensioning config is valid")
    }
}

impl DimensioningConfig {
    pub fn from_json(text: &str) -> Result<DimensioningConfig, DimensioningError> {
        let cfg: DimensioningConfig = serde_json::from_str(text)?;
        if cfg.shelf_slots == 0 || cfg.adb_capacity_channels == 0 {
            return Err(DimensioningError::Invalid("shelf_slots and adb_capacity_channels must be positive".into()));
        }
        if !(0.0..=1.0).contains(&cfg.static_add_drop_fraction) {
            return Err(DimensioningError::Invalid("static_add_drop_fraction must be in [0, 1]".into()));
        }
        Ok(cfg)
    }
}

/// Pluggables at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModuleTally {
    pub plugged_zr: u64,
    pub plugged_zrplus: u64,
    pub b2b_zr: u64,
    pub b2b_zrplus: u64,
}

impl ModuleTally {
    pub fn at(state: &NetworkState, node: NodeId) -> ModuleTally {
        let mut t = ModuleTally::default();
        for lp in state.lightpaths() {
            let kind = state.mode(lp.mode).module;
            let plugged = u64::from(lp.source() == node) + u64::from(lp.destination() == node);
            let b2b = 2 * lp.regen_nodes().iter().filter(|&&n| n == node).count() as u64;
            match kind {
                ModuleKind::Zr => {
                    t.plugged_zr += plugged;
                    t.b2b_zr += b2b;
                }
                ModuleKind::ZrPlus => {
                    t.plugged_zrplus += plugged;
                    t.b2b_zrplus += b2b;
                }
            }
        }
        t
    }

    pub fn channels_terminated(&self) -> u64 {
        self.plugged_zr + self.plugged_zrplus + self.b2b_zr + self.b2b_zrplus
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitoringKind {
    Opaque,
    Transparent,
}

/// Device counts of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NodeEquipment {
    pub router_chassis: u64,
    pub router_ports: u64,
    pub plugged_zr: u64,
    pub plugged_zrplus: u64,
    pub b2b_zr: u64,
    pub b2b_zrplus: u64,
    pub awg: u64,
    pub iroadm: u64,
    pub oa: u64,
    pub adb: u64,
    pub monitoring_units: u64,
    pub monitoring_kind: MonitoringKind,
    pub shelves: u64,
}

/// Equipment of a node of `degree` directions hosting `modules`.
pub fn dimension_node(
    degree: usize,
    architecture: Architecture,
    modules: ModuleTally,
    channel_count: usize,
    cfg: &DimensioningConfig,
) -> NodeEquipment {
    let degree = degree as u64;
    let (awg, iroadm, oa, adb, monitoring_kind) = if architecture.is_transparent() {
        let adb_channels = match cfg.adb_sizing {
            AdbSizing::Static => (degree as f64 * channel_count as f64 * cfg.static_add_drop_fraction).ceil() as u64,
            AdbSizing::Provisioned => modules.channels_terminated(),
        };
        let adb = adb_channels.div_ceil(cfg.adb_capacity_channels as u64);
        (adb * cfg.awg_per_adb as u64, degree, adb * cfg.oa_per_adb as u64, adb, MonitoringKind::Transparent)
    } else {
        (
            degree * cfg.opaque_awg_per_degree as u64,
            0,
            degree * cfg.opaque_oa_per_degree as u64,
            0,
            MonitoringKind::Opaque,
        )
    };
    let monitoring_units = degree;
    let slots =
        iroadm * cfg.iroadm_slots as u64 + oa * cfg.oa_slots as u64 + monitoring_units * cfg.monitoring_slots as u64;
    let housed = iroadm + oa + monitoring_units;
    let shelves = if housed == 0 { 0 } else { slots.div_ceil(cfg.shelf_slots as u64).max(1) };
    NodeEquipment {
        router_chassis: 1,
        router_ports: modules.plugged_zr + modules.plugged_zrplus,
        plugged_zr: modules.plugged_zr,
        plugged_zrplus: modules.plugged_zrplus,
        b2b_zr: modules.b2b_zr,
        b2b_zrplus: modules.b2b_zrplus,
        awg,
        iroadm,
        oa,
        adb,
        monitoring_units,
        monitoring_kind,
        shelves,
    }
}

/// Three-way power split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PowerBreakdown {
    pub zr_zrplus: Power,
    pub ip_router: Power,
    pub optical: Power,
    pub total: Power,
}

impl PowerBreakdown {
    pub fn new(zr_zrplus: Power, ip_router: Power, optical: Power) -> PowerBreakdown {
        PowerBreakdown { zr_zrplus, ip_router, optical, total: zr_zrplus + ip_router + optical }
    }
}

impl std::ops::Add for PowerBreakdown {
    type Output = PowerBreakdown;
    fn add(self, rhs: PowerBreakdown) -> PowerBreakdown {
        PowerBreakdown::new(self.zr_zrplus + rhs.zr_zrplus, self.ip_router + rhs.ip_router, self.optical + rhs.optical)
    }
}

impl std::iter::Sum for PowerBreakdown {
    fn sum<I: Iterator<Item = PowerBreakdown>>(iter: I) -> PowerBreakdown {
        iter.fold(PowerBreakdown::default(), |a, b| a + b)
    }
}

pub fn power_of(e: &NodeEquipment, pt: &PowerTable) -> PowerBreakdown {
    let zr = pt.zr * (e.plugged_zr + e.b2b_zr) + pt.zr_plus * (e.plugged_zrplus + e.b2b_zrplus);
    let ip = pt.router_fixed * e.router_chassis + pt.router_modular_per_port * e.router_ports;
    let monitoring = match e.monitoring_kind {
        MonitoringKind::Opaque => pt.monitoring_opaque_bidir,
        MonitoringKind::Transparent => pt.monitoring_transparent_bidir,
    };
    let optical = pt.shelf * e.shelves
        + pt.iroadm_bidir * e.iroadm
        + pt.oa_unidir * e.oa
        + pt.awg * e.awg
        + monitoring * e.monitoring_units;
    PowerBreakdown::new(zr, ip, optical)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeReport {
    pub node: String,
    pub degree: usize,
    pub equipment: NodeEquipment,
    pub power: PowerBreakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkPower {
    pub nodes: Vec<NodeReport>,
    pub total: PowerBreakdown,
}

pub fn network_power(state: &NetworkState, pt: &PowerTable, cfg: &DimensioningConfig) -> NetworkPower {
    let t = state.topology();
    let nodes: Vec<NodeReport> = t
        .node_ids()
        .map(|n| {
            let equipment = dimension_node(
                t.degree(n),
                state.architecture(),
                ModuleTally::at(state, n),
                t.grid().channel_count,
                cfg,
            );
            NodeReport {
                node: t.node_name(n).to_string(),
                degree: t.degree(n),
                power: power_of(&equipment, pt),
                equipment,
            }
        })
        .collect();
    let total = nodes.iter().map(|r| r.power).sum();
    NetworkPower { nodes, total }
}

impl NetworkPower {
    /// Per-node equipment and power as CSV.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "node",
            "degree",
            "router_chassis",
            "router_ports",
            "plugged_zr",
            "plugged_zrplus",
            "b2b_zr",
            "b2b_zrplus",
            "awg",
            "iroadm",
            "oa",
            "adb",
            "monitoring_units",
            "shelves",
            "power_zr",
            "power_ip",
            "power_optical",
            "power_total",
        ])?;
        for r in &self.nodes {
            let e = &r.equipment;
            let counts = [
                e.router_chassis,
                e.router_ports,
                e.plugged_zr,
                e.plugged_zrplus,
                e.b2b_zr,
                e.b2b_zrplus,
                e.awg,
                e.iroadm,
                e.oa,
                e.adb,
                e.monitoring_units,
                e.shelves,
            ];
            let mut row = vec![r.node.clone(), r.degree.to_string()];
            row.extend(counts.iter().map(u64::to_string));
            row.extend([r.power.zr_zrplus, r.power.ip_router, r.power.optical, r.power.total].map(|p| p.to_string()));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Weighted module cost (b2b modules included) and router ports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub module_cost: u64,
    pub router_ports: u64,
}

pub fn cost_of(zr: u64, zrplus: u64, router_ports: u64) -> CostReport {
    CostReport { module_cost: zr + 2 * zrplus, router_ports }
}

pub fn network_cost(state: &NetworkState) -> CostReport {
    let module_cost =
        state.lightpaths().iter().map(|lp| state.mode(lp.mode).cost_units as u64 * lp.modules() as u64).sum();
    let router_ports = 2 * state.lightpaths().len() as u64;
    CostReport { module_cost, router_ports }
}
