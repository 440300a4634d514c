//! Node equipment and power of one plan, largest consumers first.

use ipowdm::topology::builtin;
use ipowdm::{
    generate_traffic, network_cost, network_power, provision_all, Architecture, DimensioningConfig, ModeCatalog,
    PlannerConfig, PowerTable, TrafficScenario,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = builtin::load("G17").unwrap()?;
    let m = generate_traffic(&t, &TrafficScenario::builtin("TS1")?, 3);
    for arch in [Architecture::OpIP, Architecture::TrIPandZR] {
        let outcome = provision_all(&t, &ModeCatalog::default(), &m, arch, &PlannerConfig::default())?;
        let report = network_power(&outcome.state, &PowerTable::default(), &DimensioningConfig::default());
        let cost = network_cost(&outcome.state);
        let p = report.total;
        println!(
            "{arch}: zr {} ip {} optical {} total {}  (module cost {}, ports {})",
            p.zr_zrplus, p.ip_router, p.optical, p.total, cost.module_cost, cost.router_ports
        );
        let mut nodes = report.nodes.clone();
        nodes.sort_by(|a, b| b.power.total.cmp(&a.power.total).then_with(|| a.node.cmp(&b.node)));
        for n in nodes.iter().take(3) {
            let e = &n.equipment;
            println!(
                "  {:<12} degree {} ports {:>3} zr {:>3} zr+ {:>3} shelves {}  power {}",
                n.node,
                n.degree,
                e.router_ports,
                e.plugged_zr + e.b2b_zr,
                e.plugged_zrplus + e.b2b_zrplus,
                e.shelves,
                n.power.total
            );
        }
    }
    Ok(())
}
