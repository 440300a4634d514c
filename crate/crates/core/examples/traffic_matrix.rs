//! Draw a traffic matrix and compare the rate mix with the scenario weights.

use ipowdm::topology::builtin;
use ipowdm::traffic::RATE_CLASSES;
use ipowdm::{generate_traffic, TrafficScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = builtin::load("G17").unwrap()?;
    for name in ["TS1", "TS2", "TS3"] {
        let scenario = TrafficScenario::builtin(name)?;
        let m = generate_traffic(&t, &scenario, 7);
        println!(
            "{name}: {} demands, {} Gb/s total, mean {:.0} Gb/s expected",
            m.demands.len(),
            m.total_gbps(),
            scenario.mean_rate_gbps()
        );
        for (rate, w) in RATE_CLASSES.iter().zip(scenario.weights()) {
            let n = m.demands.iter().filter(|d| d.rate_gbps == *rate).count();
            println!("  {rate:>3}G  drawn {:>5.3}  weight {w:.3}", n as f64 / m.demands.len() as f64);
        }
    }
    let first = generate_traffic(&t, &TrafficScenario::builtin("TS1")?, 0);
    print!("\nfirst rows of TS1 seed 0:\n{}", first.to_csv(&t)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
