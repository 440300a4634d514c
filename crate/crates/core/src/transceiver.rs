//! ZR/ZR+ operating modes, mode-selection policies and regenerator placement.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::Power;

#[derive(Debug, Error, PartialEq)]
pub enum TransceiverError {
    #[error("no transceiver mode reaches {distance_km} km")]
    NoFeasibleMode { distance_km: f64 },
    #[error("link {index} ({length_km} km) exceeds the {reach_km} km reach of the mode")]
    LinkExceedsReach { index: usize, length_km: f64, reach_km: f64 },
    #[error("invalid mode catalog: {0}")]
    InvalidCatalog(String),
    #[error("requested rate must be positive")]
    ZeroRate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModuleKind {
    #[serde(rename = "ZR")]
    Zr,
    #[serde(rename = "ZR+")]
    ZrPlus,
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleKind::Zr => "ZR",
            ModuleKind::ZrPlus => "ZR+",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "8QAM")]
    Qam8,
    #[serde(rename = "16QAM")]
    Qam16,
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam8 => "8QAM",
            Modulation::Qam16 => "16QAM",
        })
    }
}

/// Index of a mode inside its [`ModeCatalog`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId(pub usize);

/// One operating point of a pluggable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransceiverMode {
    pub id: ModeId,
    pub module: ModuleKind,
    pub modulation: Modulation,
    pub reach_km: f64,
    pub rate_gbps: u32,
    /// Power of a single module.
    pub power: Power,
    /// Normalized cost of a single module.
    pub cost_units: u32,
}

impl fmt::Display for TransceiverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}G/{}km", self.module, self.modulation, self.rate_gbps, self.reach_km)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleSpec {
    power: Power,
    cost: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeDoc {
    module: ModuleKind,
    modulation: Modulation,
    reach_km: f64,
    rate_gbps: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    modules: std::collections::BTreeMap<ModuleKind, ModuleSpec>,
    modes: Vec<ModeDoc>,
}

/// The set of operating modes available to the planner.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeCatalog {
    modes: Vec<TransceiverMode>,
}

/// Parallel channels chosen to carry one rate over one path.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSplit {
    /// One entry per channel, sorted by mode id.
    pub modes: Vec<ModeId>,
    /// Regenerators summed over all channels.
    pub regenerators: usize,
    /// Power of every module involved, regenerators included.
    pub power: Power,
    pub capacity_gbps: u32,
}

impl ChannelSplit {
    pub fn channels(&self) -> usize {
        self.modes.len()
    }
}

/// A contiguous run of links between two OEO points.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanSegment {
    /// Node positions `[first, last]` within the path.
    pub first: usize,
    pub last: usize,
    pub length_km: f64,
}

/// Where regenerators sit along one path for one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct RegenPlan {
    pub segments: Vec<PlanSegment>,
    /// Interior node positions where OEO happens, in path order.
    pub regen_positions: Vec<usize>,
}

impl RegenPlan {
    pub fn regenerators(&self) -> usize {
        self.regen_positions.len()
    }
}

/// Place regenerators greedily: extend each transparent segment as far as
/// the reach allows and regenerate at the last node that keeps it feasible.
/// Greedy placement is optimal for covering a path with bounded intervals.
pub fn plan_regeneration(link_lengths_km: &[f64], reach_km: f64) -> Result<RegenPlan, TransceiverError> {
    let mut segments = Vec::new();
    let mut regen_positions = Vec::new();
    let mut start = 0;
    let mut running = 0.0;
    for (i, &len) in link_lengths_km.iter().enumerate() {
        if len > reach_km {
            return Err(TransceiverError::LinkExceedsReach { index: i, length_km: len, reach_km });
        }
        if running + len > reach_km {
            segments.push(PlanSegment { first: start, last: i, length_km: running });
            regen_positions.push(i);
            start = i;
            running = 0.0;
        }
        running += len;
    }
    segments.push(PlanSegment { first: start, last: link_lengths_km.len(), length_km: running });
    Ok(RegenPlan { segments, regen_positions })
}

impl Default for ModeCatalog {
    fn default() -> Self {
        ModeCatalog::from_json(include_str!("../data/config/modes.json")).expect("shipped catalog is valid")
    }
}

impl ModeCatalog {
    pub fn from_json(text: &str) -> Result<ModeCatalog, TransceiverError> {
        let doc: CatalogDoc =
            serde_json::from_str(text).map_err(|e| TransceiverError::InvalidCatalog(e.to_string()))?;
        if doc.modes.is_empty() {
            return Err(TransceiverError::InvalidCatalog("no modes".into()));
        }
        let mut modes = Vec::with_capacity(doc.modes.len());
        for (i, m) in doc.modes.into_iter().enumerate() {
            let spec = doc
                .modules
                .get(&m.module)
                .ok_or_else(|| TransceiverError::InvalidCatalog(format!("mode {i}: module {} undefined", m.module)))?;
            if !(m.reach_km > 0.0 && m.reach_km.is_finite()) || m.rate_gbps == 0 {
                return Err(TransceiverError::InvalidCatalog(format!("mode {i}: reach and rate must be positive")));
            }
            modes.push(TransceiverMode {
                id: ModeId(i),
                module: m.module,
                modulation: m.modulation,
                reach_km: m.reach_km,
                rate_gbps: m.rate_gbps,
                power: spec.power,
                cost_units: spec.cost,
            });
        }
        Ok(ModeCatalog { modes })
    }

    pub fn modes(&self) -> &[TransceiverMode] {
        &self.modes
    }

    pub fn get(&self, id: ModeId) -> &TransceiverMode {
        &self.modes[id.0]
    }

    pub fn max_rate_gbps(&self) -> u32 {
        self.modes.iter().map(|m| m.rate_gbps).max().unwrap_or(0)
    }

    pub fn max_reach_km(&self) -> f64 {
        self.modes.iter().map(|m| m.reach_km).fold(0.0, f64::max)
    }

    /// Cheapest possible single-module cost.
    pub fn min_module_cost(&self) -> u32 {
        self.modes.iter().map(|m| m.cost_units).min().unwrap_or(0)
    }

    fn preference(a: &TransceiverMode, b: &TransceiverMode) -> Ordering {
        b.rate_gbps.cmp(&a.rate_gbps).then(a.power.cmp(&b.power)).then(a.id.cmp(&b.id))
    }

    /// Modes reaching `distance_km` without regeneration, highest rate first,
    /// lower power first among equal rates.
    pub fn feasible_modes(&self, distance_km: f64) -> Vec<&TransceiverMode> {
        let mut out: Vec<_> = self.modes.iter().filter(|m| m.reach_km >= distance_km).collect();
        out.sort_by(|a, b| Self::preference(a, b));
        out
    }

    /// Highest-rate mode covering `distance_km`; ZR wins ties with ZR+.
    pub fn select_mode_max_rate(&self, distance_km: f64) -> Result<&TransceiverMode, TransceiverError> {
        self.feasible_modes(distance_km).into_iter().next().ok_or(TransceiverError::NoFeasibleMode { distance_km })
    }

    /// Fewest parallel channels carrying `rate_gbps` over one unregenerated span.
    pub fn select_modes_min_channels(
        &self,
        rate_gbps: u32,
        distance_km: f64,
    ) -> Result<ChannelSplit, TransceiverError> {
        self.select_modes_min_channels_on_path(rate_gbps, &[distance_km])
    }

    /// Fewest parallel channels carrying `rate_gbps` along a path, where each
    /// channel may be regenerated back-to-back.
    ///
    /// Ties on channel count go to fewer regenerators, then lower power, then
    /// the smallest capacity overshoot.
    pub fn select_modes_min_channels_on_path(
        &self,
        rate_gbps: u32,
        link_lengths_km: &[f64],
    ) -> Result<ChannelSplit, TransceiverError> {
        if rate_gbps == 0 {
            return Err(TransceiverError::ZeroRate);
        }
        // (mode, regenerators needed on this path)
        let usable: Vec<(&TransceiverMode, usize)> = self
            .modes
            .iter()
            .filter_map(|m| plan_regeneration(link_lengths_km, m.reach_km).ok().map(|p| (m, p.regenerators())))
            .collect();
        let best_rate = usable
            .iter()
            .map(|(m, _)| m.rate_gbps)
            .max()
            .ok_or(TransceiverError::NoFeasibleMode { distance_km: link_lengths_km.iter().sum() })?;
        let channels = rate_gbps.div_ceil(best_rate) as usize;

        type Key = (usize, Power, u32, Vec<ModeId>);
        let mut best: Option<(ChannelSplit, Key)> = None;
        let mut pick = vec![0usize; channels];
        loop {
            let capacity: u32 = pick.iter().map(|&i| usable[i].0.rate_gbps).sum();
            if capacity >= rate_gbps {
                let regenerators: usize = pick.iter().map(|&i| usable[i].1).sum();
                let power: Power = pick.iter().map(|&i| usable[i].0.power * (2 + 2 * usable[i].1 as u64)).sum();
                let modes: Vec<ModeId> = pick.iter().map(|&i| usable[i].0.id).collect();
                let key = (regenerators, power, capacity - rate_gbps, modes.clone());
                if best.as_ref().is_none_or(|(_, k)| key < *k) {
                    best = Some((ChannelSplit { modes, regenerators, power, capacity_gbps: capacity }, key));
                }
            }
            // next non-decreasing index tuple (multisets)
            let Some(pos) = pick.iter().rposition(|&i| i + 1 < usable.len()) else { break };
            let next = pick[pos] + 1;
            for slot in &mut pick[pos..] {
                *slot = next;
            }
        }
        Ok(best.expect("`channels` copies of the fastest mode always cover the rate").0)
    }
}
