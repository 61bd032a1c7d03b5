//! Prints the per-flow link estimates and the schedule summary of one scenario.
//!
//! `cargo run --example inspect -- SEED [FLOWS] [SLOTS] [UAV_DISTANCE]`

use uavsched::experiment::{run_scheme, ExperimentConfig, Scheme};
use uavsched::relay_decision::decide_flow;
use uavsched::{build_scenario, World};

fn main() -> uavsched::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let mut config = ExperimentConfig::default();
    let seed = args.first().copied().unwrap_or(0.0) as u64;
    if let Some(&n) = args.get(1) {
        config.scenario.flow_count = n as usize;
    }
    if let Some(&m) = args.get(2) {
        config.frame.slot_count = m as u64;
    }
    if let Some(&d) = args.get(3) {
        config.scenario.uav_distance_m = d;
    }
    let world = World::new(build_scenario(&config.scenario, seed)?, config.sim_params())?;
    let g = world.geometry_at(0);
    println!(
        "eavesdropper at x = {:.1}, uav at x = {:.1}",
        g.eavesdropper.x, g.uav.x
    );
    let budget = world.budget(&g);
    for flow in &world.scenario.flows {
        let d = decide_flow(flow, &world)?;
        let e = d.estimates;
        let l1 = uavsched::Link::new(
            0,
            flow.id,
            uavsched::LinkRole::Direct,
            flow.destination,
            1.0,
        );
        let l2 = uavsched::Link::new(
            1,
            flow.id,
            uavsched::LinkRole::BsToUav,
            flow.destination,
            1.0,
        );
        println!(
            "flow {:2} -> {:>6} at x={:7.1} qos {:6.1} Mbps | l1 {:7.1} (eve {:7.1}) l2 {:7.1} (eve {:6.1}) l2' {:7.1} Mbps | {:?} est {:?}",
            flow.id,
            flow.destination.to_string(),
            g.position(flow.destination).x,
            flow.qos_bps / 1e6,
            e.rate_l1 / 1e6,
            budget.eavesdrop_rate(&l1)? / 1e6,
            e.rate_l2 / 1e6,
            budget.eavesdrop_rate(&l2)? / 1e6,
            e.rate_l2p / 1e6,
            d.verdict,
            d.estimated_slots,
        );
    }
    for scheme in Scheme::ALL {
        let r = run_scheme(&world, scheme, false)?;
        let done: Vec<usize> = (0..r.flow_completed.len())
            .filter(|&f| r.flow_completed[f])
            .collect();
        println!("{scheme:>14}: {:?} completed {:?}", r.metrics, done);
    }
    Ok(())
}
