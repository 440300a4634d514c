//! Provision one matrix, print a lightpath summary and write the plan
//! document to a file that `ipowdm power --plan` reads back.
//!
//! `cargo run --example provision_plan -- TrZR /tmp/plan.json`

use ipowdm::plan::PlanDocument;
use ipowdm::topology::builtin;
use ipowdm::{generate_traffic, provision_all, Architecture, ModeCatalog, PlannerConfig, TrafficScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arch: Architecture = args.first().map_or("TrIPandZR", String::as_str).parse()?;
    let t = builtin::load("J14").unwrap()?;
    let catalog = ModeCatalog::default();
    let m = generate_traffic(&t, &TrafficScenario::builtin("TS2")?, 0);
    let outcome = provision_all(&t, &catalog, &m, arch, &PlannerConfig::default())?;
    let state = &outcome.state;

    println!("{arch} on {}: {} demands, {} blocked", t.name(), m.demands.len(), outcome.blocked.len());
    println!(
        "{} lightpaths, {} modules ({} back-to-back)",
        state.lightpaths().len(),
        state.total_modules(),
        state.b2b_modules()
    );
    for lp in state.lightpaths().iter().take(8) {
        let mode = state.mode(lp.mode);
        println!(
            "  #{:<3} {} {} {}G  {:>5.0} km  load {:>3}G  {}",
            lp.id.0,
            mode.module,
            mode.modulation,
            lp.rate_gbps,
            lp.length_km(),
            lp.load_gbps(),
            t.display_path(&lp.route())
        );
    }

    let doc = PlanDocument::from_outcome(&outcome, &m);
    if let Some(path) = args.get(1) {
        std::fs::write(path, doc.to_json())?;
        println!("plan written to {path}");
    }
    let back = PlanDocument::from_json(&doc.to_json())?.to_outcome(&t, &catalog)?;
    assert_eq!(back, outcome);
    Ok(())
}
