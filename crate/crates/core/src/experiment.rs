//! Batch runs over topologies, architectures, scenarios and seeds, with
//! per-cell averages and architecture comparisons.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dimensioning::{network_cost, network_power, DimensioningConfig, PowerBreakdown, PowerTable};
use crate::rmsa::{provision_all, Architecture, PlannerConfig, ProvisionOutcome, RmsaError};
use crate::topology::Topology;
use crate::traffic::{generate_traffic, TrafficScenario};
use crate::transceiver::{ModeCatalog, ModuleKind};

/// Column order of run and average tables.
pub const CSV_HEADER: &str = "topology,arch,scenario,seed,zr_count,zrplus_count,b2b_modules,router_ports,module_cost,power_zr,power_ip,power_optical,power_total,blocked";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Rmsa(#[from] RmsaError),
    #[error("{topology}/{arch}/{scenario}/seed {seed}: {blocked} demands blocked in strict mode")]
    Blocking { topology: String, arch: Architecture, scenario: String, seed: u64, blocked: usize },
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

/// Everything a batch needs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub topologies: Vec<Topology>,
    pub architectures: Vec<Architecture>,
    pub scenarios: Vec<TrafficScenario>,
    pub seeds: Vec<u64>,
    pub planner: PlannerConfig,
    pub catalog: ModeCatalog,
    pub power_table: PowerTable,
    pub dimensioning: DimensioningConfig,
    /// Fail the batch if any demand is blocked.
    pub strict: bool,
}

impl ExperimentConfig {
    /// Shipped topologies and scenarios, all architectures, seeds `0..runs`.
    pub fn shipped(runs: u64) -> ExperimentConfig {
        ExperimentConfig {
            topologies: ["J14", "G17"].iter().map(|n| crate::topology::builtin::load(n).unwrap().unwrap()).collect(),
            architectures: Architecture::ALL.to_vec(),
            scenarios: ["TS1", "TS2", "TS3"].iter().map(|n| TrafficScenario::builtin(n).unwrap()).collect(),
            seeds: (0..runs).collect(),
            planner: PlannerConfig::default(),
            catalog: ModeCatalog::default(),
            power_table: PowerTable::default(),
            dimensioning: DimensioningConfig::default(),
            strict: true,
        }
    }
}

/// Identifies one run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RunKey {
    pub topology: String,
    pub arch: Architecture,
    pub scenario: String,
    pub seed: u64,
}

/// Tallies of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub key: RunKey,
    pub zr_count: u64,
    pub zrplus_count: u64,
    pub b2b_modules: u64,
    pub router_ports: u64,
    pub module_cost: u64,
    pub power: PowerBreakdown,
    pub blocked: u64,
}

impl RunResult {
    pub fn modules(&self) -> u64 {
        self.zr_count + self.zrplus_count
    }
}

impl Serialize for Architecture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Tally a finished provisioning run.
pub fn evaluate(
    key: RunKey,
    outcome: &ProvisionOutcome,
    power_table: &PowerTable,
    dimensioning: &DimensioningConfig,
) -> RunResult {
    let state = &outcome.state;
    let power = network_power(state, power_table, dimensioning);
    let cost = network_cost(state);
    RunResult {
        key,
        zr_count: state.module_count(ModuleKind::Zr) as u64,
        zrplus_count: state.module_count(ModuleKind::ZrPlus) as u64,
        b2b_modules: state.b2b_modules() as u64,
        router_ports: cost.router_ports,
        module_cost: cost.module_cost,
        power: power.total,
        blocked: outcome.blocked.len() as u64,
    }
}

/// Provision and evaluate one `(topology, architecture, scenario, seed)`.
pub fn run_single(
    cfg: &ExperimentConfig,
    topology: &Topology,
    arch: Architecture,
    scenario: &TrafficScenario,
    seed: u64,
) -> Result<(RunResult, ProvisionOutcome), ExperimentError> {
    let matrix = generate_traffic(topology, scenario, seed);
    let outcome = provision_all(topology, &cfg.catalog, &matrix, arch, &cfg.planner)?;
    let key = RunKey { topology: topology.name().to_string(), arch, scenario: scenario.name().to_string(), seed };
    let result = evaluate(key, &outcome, &cfg.power_table, &cfg.dimensioning);
    Ok((result, outcome))
}

/// Per-run rows in key order, independent of completion order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunResult>, ExperimentError> {
    if cfg.topologies.is_empty() || cfg.architectures.is_empty() || cfg.scenarios.is_empty() || cfg.seeds.is_empty() {
        return Err(ExperimentError::Invalid("every dimension of the experiment needs at least one entry".into()));
    }
    let mut jobs = Vec::new();
    for t in &cfg.topologies {
        for &a in &cfg.architectures {
            for s in &cfg.scenarios {
                for &seed in &cfg.seeds {
                    jobs.push((t, a, s, seed));
                }
            }
        }
    }
    let mut rows = jobs
        .into_par_iter()
        .map(|(t, a, s, seed)| {
            let (row, _) = run_single(cfg, t, a, s, seed)?;
            if cfg.strict && row.blocked > 0 {
                return Err(ExperimentError::Blocking {
                    topology: row.key.topology.clone(),
                    arch: a,
                    scenario: row.key.scenario.clone(),
                    seed,
                    blocked: row.blocked as usize,
                });
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(rows)
}

/// Arithmetic means over the seeds of one `(topology, arch, scenario)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellAverage {
    pub topology: String,
    pub arch: Architecture,
    pub scenario: String,
    pub runs: usize,
    pub zr_count: f64,
    pub zrplus_count: f64,
    pub b2b_modules: f64,
    pub router_ports: f64,
    pub module_cost: f64,
    pub power_zr: f64,
    pub power_ip: f64,
    pub power_optical: f64,
    pub power_total: f64,
    pub blocked: f64,
}

impl CellAverage {
    pub fn modules(&self) -> f64 {
        self.zr_count + self.zrplus_count
    }
}

/// Cells in `(topology, arch, scenario)` order.
pub fn averages(rows: &[RunResult]) -> Vec<CellAverage> {
    let mut groups: BTreeMap<(String, Architecture, String), Vec<&RunResult>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.key.topology.clone(), r.key.arch, r.key.scenario.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((topology, arch, scenario), rs)| {
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&RunResult) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            CellAverage {
                topology,
                arch,
                scenario,
                runs: rs.len(),
                zr_count: mean(&|r| r.zr_count as f64),
                zrplus_count: mean(&|r| r.zrplus_count as f64),
                b2b_modules: mean(&|r| r.b2b_modules as f64),
                router_ports: mean(&|r| r.router_ports as f64),
                module_cost: mean(&|r| r.module_cost as f64),
                power_zr: mean(&|r| r.power.zr_zrplus.as_f64()),
                power_ip: mean(&|r| r.power.ip_router.as_f64()),
                power_optical: mean(&|r| r.power.optical.as_f64()),
                power_total: mean(&|r| r.power.total.as_f64()),
                blocked: mean(&|r| r.blocked as f64),
            }
        })
        .collect()
}

/// Relative saving of one architecture against a baseline, per category.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Savings {
    pub topology: String,
    pub scenario: String,
    pub arch: Architecture,
    pub baseline: Architecture,
    pub modules_pct: f64,
    pub module_cost_pct: f64,
    pub router_ports_pct: f64,
    pub power_zr_pct: f64,
    pub power_ip_pct: f64,
    pub power_optical_pct: f64,
    pub power_total_pct: f64,
}

fn saving(base: f64, other: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        100.0 * (base - other) / base
    }
}

/// Percentage saved by each architecture relative to `baseline`, per
/// `(topology, scenario)`. Positive means the architecture uses less.
pub fn compare(cells: &[CellAverage], architectures: &[Architecture], baseline: Architecture) -> Vec<Savings> {
    let mut out = Vec::new();
    for base in cells.iter().filter(|c| c.arch == baseline) {
        for &arch in architectures {
            let Some(c) =
                cells.iter().find(|c| c.arch == arch && c.topology == base.topology && c.scenario == base.scenario)
            else {
                continue;
            };
            out.push(Savings {
                topology: base.topology.clone(),
                scenario: base.scenario.clone(),
                arch,
                baseline,
                modules_pct: saving(base.modules(), c.modules()),
                module_cost_pct: saving(base.module_cost, c.module_cost),
                router_ports_pct: saving(base.router_ports, c.router_ports),
                power_zr_pct: saving(base.power_zr, c.power_zr),
                power_ip_pct: saving(base.power_ip, c.power_ip),
                power_optical_pct: saving(base.power_optical, c.power_optical),
                power_total_pct: saving(base.power_total, c.power_total),
            });
        }
    }
    out
}

pub fn rows_to_csv(rows: &[RunResult]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.key.topology,
            r.key.arch,
            r.key.scenario,
            r.key.seed,
            r.zr_count,
            r.zrplus_count,
            r.b2b_modules,
            r.router_ports,
            r.module_cost,
            r.power.zr_zrplus,
            r.power.ip_router,
            r.power.optical,
            r.power.total,
            r.blocked
        )
        .unwrap();
    }
    s
}

/// Averages in the run-table layout, with `mean` in the seed column.
pub fn averages_to_csv(cells: &[CellAverage]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in cells {
        writeln!(
            s,
            "{},{},{},mean,{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
            c.topology,
            c.arch,
            c.scenario,
            c.zr_count,
            c.zrplus_count,
            c.b2b_modules,
            c.router_ports,
            c.module_cost,
            c.power_zr,
            c.power_ip,
            c.power_optical,
            c.power_total,
            c.blocked
        )
        .unwrap();
    }
    s
}

pub fn savings_to_csv(savings: &[Savings]) -> String {
    let mut s = String::from(
        "topology,scenario,arch,baseline,modules_pct,module_cost_pct,router_ports_pct,power_zr_pct,power_ip_pct,power_optical_pct,power_total_pct\n",
    );
    for v in savings {
        writeln!(
            s,
            "{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
            v.topology,
            v.scenario,
            v.arch,
            v.baseline,
            v.modules_pct,
            v.module_cost_pct,
            v.router_ports_pct,
            v.power_zr_pct,
            v.power_ip_pct,
            v.power_optical_pct,
            v.power_total_pct
        )
        .unwrap();
    }
    s
}
