#![allow(dead_code)]

pub mod oracle;

use uavsched::experiment::{run_scheme, Scheme};
use uavsched::scenario::{build_scenario, ScenarioConfig};
use uavsched::{ScheduleResult, SimParams, World};

pub fn world(scenario: &ScenarioConfig, params: &SimParams, seed: u64) -> World {
    World::new(build_scenario(scenario, seed).unwrap(), params.clone()).unwrap()
}

pub fn run(world: &World, scheme: Scheme) -> ScheduleResult {
    run_scheme(world, scheme, false).unwrap()
}
