//! The pluggable mode table and the two mode-selection policies.

use ipowdm::transceiver::plan_regeneration;
use ipowdm::ModeCatalog;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = ModeCatalog::default();
    println!("{:<4} {:<6} {:<6} {:>6} {:>8} {:>6} {:>5}", "id", "module", "mod", "Gb/s", "reach", "power", "cost");
    for m in c.modes() {
        println!(
            "{:<4} {:<6} {:<6} {:>6} {:>8} {:>6} {:>5}",
            m.id.0,
            m.module.to_string(),
            m.modulation.to_string(),
            m.rate_gbps,
            m.reach_km,
            m.power,
            m.cost_units
        );
    }

    println!("\nfastest single channel per distance:");
    for km in [100.0, 500.0, 1500.0, 2500.0] {
        let m = c.select_mode_max_rate(km)?;
        println!("  {km:>6} km -> {} {} {}G", m.module, m.modulation, m.rate_gbps);
    }

    println!("\nfewest channels:");
    for (rate, km) in [(400, 500.0), (600, 500.0), (100, 2000.0), (500, 1700.0)] {
        let s = c.select_modes_min_channels(rate, km)?;
        let modes: Vec<String> = s.modes.iter().map(|&id| format!("{}G", c.get(id).rate_gbps)).collect();
        println!("  {rate}G over {km} km -> {}  channels {}  power {}", modes.join(" + "), s.channels(), s.power);
    }

    let plan = plan_regeneration(&[500.0, 500.0, 500.0], 600.0)?;
    println!("\n3 x 500 km at 600 km reach: regenerate at nodes {:?}", plan.regen_positions);
    Ok(())
}
