//! Average power and module counts of every architecture on the shipped
//! topologies and scenarios, with savings against OpIP.
//!
//! `cargo run --release --example compare_architectures -- 3`

use ipowdm::experiment::{averages, compare, ExperimentConfig};
use ipowdm::Architecture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let mut cfg = ExperimentConfig::shipped(runs);
    cfg.strict = false;
    let rows = ipowdm::experiment::run_experiment(&cfg)?;
    let cells = averages(&rows);
    println!(
        "{:<5} {:<10} {:<4} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "topo", "arch", "ts", "modules", "b2b", "zr", "ip", "optical", "total", "blocked"
    );
    for c in &cells {
        println!(
            "{:<5} {:<10} {:<4} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {:>8.2}",
            c.topology,
            c.arch,
            c.scenario,
            c.modules(),
            c.b2b_modules,
            c.power_zr,
            c.power_ip,
            c.power_optical,
            c.power_total,
            c.blocked
        );
    }
    println!();
    println!("{:<5} {:<4} {:<10} {:>8} {:>8} {:>8} {:>8}", "topo", "ts", "arch", "modules", "zr", "ip", "total");
    for s in compare(&cells, &Architecture::ALL, Architecture::OpIP) {
        println!(
            "{:<5} {:<4} {:<10} {:>7.1}% {:>7.1}% {:>7.1}% {:>7.1}%",
            s.topology, s.scenario, s.arch, s.modules_pct, s.power_zr_pct, s.power_ip_pct, s.power_total_pct
        );
    }
    Ok(())
}
