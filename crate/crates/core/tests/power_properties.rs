use ipowdm::dimensioning::network_power;
use ipowdm::topology::builtin;
use ipowdm::{
    generate_traffic, provision_all, Architecture, DimensioningConfig, ModeCatalog, PlannerConfig, Power,
    PowerBreakdown, PowerTable, TrafficScenario,
};
use proptest::prelude::*;

fn outcome(topo: &str, arch: Architecture, ts: &str, seed: u64) -> ipowdm::ProvisionOutcome {
    let t = builtin::load(topo).unwrap().unwrap();
    let m = generate_traffic(&t, &TrafficScenario::builtin(ts).unwrap(), seed);
    provision_all(&t, &ModeCatalog::default(), &m, arch, &PlannerConfig::default()).unwrap()
}

fn scaled(b: PowerBreakdown, c: i64) -> PowerBreakdown {
    let s = |p: Power| Power::from_milli(p.milli() * c);
    PowerBreakdown { zr_zrplus: s(b.zr_zrplus), ip_router: s(b.ip_router), optical: s(b.optical), total: s(b.total) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn totals_add_up_and_scale(arch in prop::sample::select(Architecture::ALL.to_vec()), topo in prop::sample::select(vec!["J14", "G17"]), seed in 0u64..50, c in 1u64..7) {
        let out = outcome(topo, arch, "TS2", seed);
        let cfg = DimensioningConfig::default();
        let base = network_power(&out.state, &PowerTable::default(), &cfg);
        let t = base.total;
        prop_assert_eq!(t.zr_zrplus + t.ip_router + t.optical, t.total);
        let sum = |f: fn(&PowerBreakdown) -> Power| base.nodes.iter().map(|n| f(&n.power)).sum::<Power>();
        prop_assert_eq!(sum(|p| p.zr_zrplus), t.zr_zrplus);
        prop_assert_eq!(sum(|p| p.ip_router), t.ip_router);
        prop_assert_eq!(sum(|p| p.optical), t.optical);
        prop_assert_eq!(sum(|p| p.total), t.total);

        let big = network_power(&out.state, &PowerTable::default().scaled(c), &cfg);
        prop_assert_eq!(big.total, scaled(base.total, c as i64));
        for (a, b) in base.nodes.iter().zip(&big.nodes) {
            prop_assert_eq!(b.power, scaled(a.power, c as i64));
        }
    }
}

#[test]
fn optical_power_ignores_traffic() {
    let pt = PowerTable::default();
    let cfg = DimensioningConfig::default();
    for topo in ["J14", "G17"] {
        for arch in Architecture::ALL {
            let optical: Vec<Power> = [("TS1", 0), ("TS2", 5), ("TS3", 9)]
                .iter()
                .map(|&(ts, seed)| network_power(&outcome(topo, arch, ts, seed).state, &pt, &cfg).total.optical)
                .collect();
            assert!(optical.windows(2).all(|w| w[0] == w[1]), "{topo} {arch} {optical:?}");
        }
    }
}

#[test]
fn ip_regeneration_costs_two_ports_and_b2b_none() {
    for arch in Architecture::ALL {
        let out = outcome("G17", arch, "TS1", 2);
        let st = &out.state;
        let ends: usize = st.lightpaths().len() * 2;
        let ports: usize = st.topology().node_ids().map(|n| st.router_ports_at(n)).sum();
        assert_eq!(ports, ends, "{arch}");
        // each router hop of a sub-flow is one lightpath ending and the next starting
        for rec in st.records() {
            for sf in &rec.subflows {
                assert_eq!(st.ip_regen_nodes(sf).len(), sf.hops.len() - 1);
            }
        }
        let modules = st.total_modules();
        assert_eq!(modules, ends + st.b2b_modules(), "{arch}");
        if matches!(arch, Architecture::OpIP | Architecture::TrIP) {
            assert_eq!(st.b2b_modules(), 0);
        }
    }
}
