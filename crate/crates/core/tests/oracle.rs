mod common;

use proptest::prelude::*;

use common::oracle::{optimum, plan_feasible, FlowSlots, Method};
use uavsched::experiment::Scheme;
use uavsched::scenario::ScenarioConfig;
use uavsched::scheduler::SchedulerParams;
use uavsched::{FrameConfig, SimParams};

fn direct(a: u32) -> FlowSlots {
    FlowSlots {
        direct: Some(a),
        bs_to_uav: None,
        uav_to_mr: None,
    }
}

fn relay(a: u32, b: u32) -> FlowSlots {
    FlowSlots {
        direct: None,
        bs_to_uav: Some(a),
        uav_to_mr: Some(b),
    }
}

#[test]
fn direct_flows_share_one_beam() {
    let s = [direct(3), direct(4), direct(5)];
    assert_eq!(optimum(&s, 7), 2);
    assert_eq!(optimum(&s, 12), 3);
    assert_eq!(optimum(&s, 2), 0);
}

#[test]
fn relaying_overlaps_with_direct_traffic() {
    // The second hop runs on the other band while the BS serves a direct flow.
    let s = [relay(2, 4), direct(4)];
    assert!(plan_feasible(&s, &[Method::Relay, Method::Direct], 6));
    assert!(!plan_feasible(&s, &[Method::Relay, Method::Direct], 5));
}

#[test]
fn second_hop_waits_for_the_first() {
    let s = [relay(3, 3)];
    assert!(!plan_feasible(&s, &[Method::Relay], 5));
    assert!(plan_feasible(&s, &[Method::Relay], 6));
}

#[test]
fn uav_cannot_receive_while_forwarding() {
    // Two relayed flows: the second flow's first hop cannot overlap the
    // first flow's second hop.
    let s = [relay(2, 2), relay(2, 2)];
    assert!(!plan_feasible(&s, &[Method::Relay, Method::Relay], 6));
    assert!(plan_feasible(&s, &[Method::Relay, Method::Relay], 8));
}

#[test]
fn unusable_hops_are_never_planned() {
    let s = [FlowSlots {
        direct: None,
        bs_to_uav: None,
        uav_to_mr: Some(1),
    }];
    assert_eq!(optimum(&s, 100), 0);
    assert!(plan_feasible(&s, &[Method::Skip], 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn heuristic_never_beats_the_optimum(
        flows in 1usize..=3,
        m in 6u64..=16,
        d in 50.0..400.0f64,
        seed in any::<u64>(),
    ) {
        let sc = ScenarioConfig {
            flow_count: flows,
            qos_min_mbps: 20.0,
            qos_max_mbps: 600.0,
            uav_distance_m: d,
            ..ScenarioConfig::default()
        };
        let params = SimParams {
            frame: FrameConfig { slot_count: m, ..FrameConfig::default() },
            scheduler: SchedulerParams { bs_antennas: 1, uav_antennas: 1, ..SchedulerParams::default() },
            ..SimParams::default()
        };
        let world = common::world(&sc, &params, seed);
        let best = optimum(&common::oracle::flow_slots(&world), m as u32);
        for scheme in Scheme::ALL {
            prop_assert!(common::run(&world, scheme).metrics.completed_flows <= best);
        }
    }
}
