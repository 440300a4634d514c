//! k shortest paths between two cities of a shipped topology.
//!
//! `cargo run --example shortest_paths -- G17 Hamburg Muenchen 5`

use ipowdm::topology::builtin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("J14", String::as_str);
    let t = builtin::load(name).ok_or("unknown topology")??;
    let src = t.node(args.get(1).map_or_else(|| t.node_name(ipowdm::NodeId(0)), String::as_str))?;
    let dst = match args.get(2) {
        Some(n) => t.node(n)?,
        None => ipowdm::NodeId(t.node_count() - 1),
    };
    let k = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(3);

    println!("{}: {} nodes, {} links", t.name(), t.node_count(), t.links().len());
    for (i, p) in t.k_shortest_paths(src, dst, k)?.iter().enumerate() {
        println!("{:>2}. {:>7.0} km  {} hops  {}", i + 1, p.length_km, p.hops(), t.display_path(&p.nodes));
    }
    Ok(())
}
