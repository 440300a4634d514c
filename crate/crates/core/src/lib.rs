//! Planning and power accounting for IP-over-WDM networks built from
//! pluggable ZR and ZR+ coherent transceivers.
//!
//! The pipeline runs bottom-up: a [`topology::Topology`] and a
//! [`traffic::TrafficMatrix`] go into [`rmsa::provision_all`], whose
//! [`rmsa::NetworkState`] is then dimensioned and priced by
//! [`dimensioning`]. [`experiment`] batches this over seeds and
//! architectures, and [`oracle`] holds exhaustive reference solvers for
//! small instances.

pub mod dimensioning;
pub mod experiment;
pub mod oracle;
pub mod plan;
pub mod rmsa;
pub mod topology;
pub mod traffic;
pub mod transceiver;
pub mod units;

pub use dimensioning::{network_cost, network_power, DimensioningConfig, PowerBreakdown, PowerTable};
pub use rmsa::{provision_all, Architecture, NetworkState, PlannerConfig, ProvisionOutcome};
pub use topology::{NodeId, Path, Topology};
pub use traffic::{generate_traffic, Demand, TrafficMatrix, TrafficScenario};
pub use transceiver::{ModeCatalog, ModeId, ModuleKind, TransceiverMode};
pub use units::Power;
