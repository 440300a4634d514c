mod common;

use common::{random_demands, random_topology, rng};
use ipowdm::plan::PlanDocument;
use ipowdm::{provision_all, Architecture, ModeCatalog, PlannerConfig, TrafficMatrix, TrafficScenario};
use proptest::prelude::*;

fn instance(seed: u64, nodes: usize, demands: usize) -> (ipowdm::Topology, TrafficMatrix) {
    let mut r = rng(seed);
    let t = random_topology(&mut r, nodes, nodes, (40.0, 1400.0), 40);
    let demands = random_demands(&mut r, &t, demands);
    (t, TrafficMatrix { demands, seed, scenario: TrafficScenario::builtin("TS2").unwrap() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_plan_passes_the_audit(seed in any::<u64>(), nodes in 3usize..=8, demands in 1usize..30) {
        let (t, m) = instance(seed, nodes, demands);
        let catalog = ModeCatalog::default();
        for arch in Architecture::ALL {
            let out = provision_all(&t, &catalog, &m, arch, &PlannerConfig::default()).unwrap();
            let st = &out.state;
            st.audit().unwrap();
            prop_assert_eq!(st.records().len() + out.blocked.len(), m.demands.len());
            for lp in st.lightpaths() {
                prop_assert!(lp.residual_gbps() >= 0);
                for seg in &lp.segments {
                    prop_assert!(seg.length_km <= st.mode(lp.mode).reach_km);
                }
                match arch {
                    Architecture::OpIP => prop_assert_eq!(lp.route().len(), 2),
                    Architecture::TrZR => {
                        for c in &lp.carried {
                            let d = &m.demands[c.demand.0];
                            prop_assert_eq!((lp.source(), lp.destination()), (d.src, d.dst));
                        }
                    }
                    _ => {}
                }
            }
            if arch == Architecture::TrZR {
                prop_assert_eq!(st.intermediate_router_ports(), 0);
            }
        }
    }

    #[test]
    fn planning_is_deterministic(seed in any::<u64>(), nodes in 3usize..=7, demands in 1usize..25) {
        let (t, m) = instance(seed, nodes, demands);
        let catalog = ModeCatalog::default();
        for arch in Architecture::ALL {
            let a = provision_all(&t, &catalog, &m, arch, &PlannerConfig::default()).unwrap();
            let b = provision_all(&t, &catalog, &m, arch, &PlannerConfig::default()).unwrap();
            prop_assert_eq!(PlanDocument::from_outcome(&a, &m).to_json(), PlanDocument::from_outcome(&b, &m).to_json());
        }
    }
}

#[test]
fn transparent_never_needs_more_modules_on_shipped_runs() {
    let catalog = ModeCatalog::default();
    for name in ["J14", "G17"] {
        let t = ipowdm::topology::builtin::load(name).unwrap().unwrap();
        for ts in ["TS1", "TS3"] {
            for seed in 0..3 {
                let m = ipowdm::generate_traffic(&t, &TrafficScenario::builtin(ts).unwrap(), seed);
                let modules = |arch| {
                    provision_all(&t, &catalog, &m, arch, &PlannerConfig::default()).unwrap().state.total_modules()
                };
                assert!(modules(Architecture::TrIP) <= modules(Architecture::OpIP), "{name} {ts} {seed}");
            }
        }
    }
}
