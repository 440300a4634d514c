//! The planner against the exhaustive optimum on a five-node ring.

use ipowdm::oracle::exhaustive_min_cost_provision;
use ipowdm::topology::ChannelGrid;
use ipowdm::{
    network_cost, provision_all, Architecture, Demand, ModeCatalog, PlannerConfig, Topology, TrafficMatrix,
    TrafficScenario,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = Topology::build(
        "ring5",
        &["A", "B", "C", "D", "E"],
        &[
            ("A", "B", 300.0),
            ("B", "C", 250.0),
            ("C", "D", 400.0),
            ("D", "E", 150.0),
            ("E", "A", 350.0),
            ("A", "C", 520.0),
        ],
        ChannelGrid { channel_count: 10, spacing_ghz: 100 },
    )?;
    let d = |s: &str, e: &str, rate| -> Result<Demand, Box<dyn std::error::Error>> {
        Ok(Demand { src: t.node(s)?, dst: t.node(e)?, rate_gbps: rate })
    };
    let demands = vec![d("A", "D", 300)?, d("B", "E", 200)?, d("A", "C", 500)?, d("E", "C", 100)?, d("D", "B", 400)?];
    let matrix = TrafficMatrix { demands: demands.clone(), seed: 0, scenario: TrafficScenario::builtin("TS1")? };
    let catalog = ModeCatalog::default();
    for arch in Architecture::ALL {
        let outcome = provision_all(&t, &catalog, &matrix, arch, &PlannerConfig::default())?;
        let planner = network_cost(&outcome.state).module_cost;
        let best = exhaustive_min_cost_provision(&t, &catalog, &demands, arch)?;
        println!(
            "{:<10} planner {planner:>3}  optimum {:>3}  ratio {:.3}",
            arch.to_string(),
            best.module_cost,
            planner as f64 / best.module_cost as f64
        );
    }
    Ok(())
}
