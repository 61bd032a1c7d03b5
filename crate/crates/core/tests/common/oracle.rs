//! Exhaustive optimum for tiny single-epoch instances with one beam per node.
//!
//! With one BS beam and one UAV beam, the two concurrent links always sit on
//! different bands, so every link runs at its interference-free rate and a
//! link simply needs a fixed number of active slots. The oracle tries every
//! per-flow method (direct, relayed, skipped) and searches all per-slot
//! activation patterns for one that finishes every chosen flow.

use std::collections::HashSet;

use uavsched::channel::{Link, LinkRole};
use uavsched::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Skip,
    Direct,
    Relay,
}

/// Slots each hop needs, `None` where the hop cannot be used at all.
#[derive(Debug, Clone, Copy)]
pub struct FlowSlots {
    pub direct: Option<u32>,
    pub bs_to_uav: Option<u32>,
    pub uav_to_mr: Option<u32>,
}

fn slots_needed(demand: f64, rate: f64, dt: f64) -> Option<u32> {
    if !(rate > 0.0) {
        return None;
    }
    let per_slot = rate * dt;
    let mut k = (demand / per_slot).floor().max(1.0) as u32;
    while (k as f64) * per_slot < demand * (1.0 - 1e-12) {
        k += 1;
    }
    Some(k)
}

/// Per-hop slot requirements at frame-start positions. BS hops that leak too
/// much to the eavesdropper are unusable.
pub fn flow_slots(world: &World) -> Vec<FlowSlots> {
    let g = world.geometry_at(0);
    let budget = world.budget(&g);
    let frame = world.frame();
    let dt = frame.slot_duration_s();
    let ratio = world.params.scheduler.secrecy_ratio;
    world
        .scenario
        .flows
        .iter()
        .map(|f| {
            let demand = frame.demand_bits(f.qos_bps);
            let hop = |role| {
                let l = Link::new(0, f.id, role, f.destination, demand);
                let rate = budget.rate(&l, &[]).unwrap();
                if role != LinkRole::UavToMr && !(budget.eavesdrop_rate(&l).unwrap() < ratio * rate)
                {
                    return None;
                }
                slots_needed(demand, rate, dt)
            };
            FlowSlots {
                direct: hop(LinkRole::Direct),
                bs_to_uav: hop(LinkRole::BsToUav),
                uav_to_mr: hop(LinkRole::UavToMr),
            }
        })
        .collect()
}

/// Remaining slots of each chosen flow's hops: direct flows use `a` only,
/// relayed flows use `a` for the first hop and `b` for the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Job {
    relay: bool,
    a: u32,
    b: u32,
}

struct Search {
    horizon: u32,
    failed: HashSet<(u32, Vec<Job>)>,
}

impl Search {
    fn feasible(&mut self, t: u32, jobs: Vec<Job>) -> bool {
        if jobs.iter().all(|j| j.a == 0 && j.b == 0) {
            return true;
        }
        let left = self.horizon - t;
        let bs_work: u32 = jobs.iter().map(|j| j.a).sum();
        let uav_work: u32 = jobs.iter().map(|j| j.b).sum();
        if bs_work > left || uav_work > left || jobs.iter().any(|j| j.a + j.b > left) {
            return false;
        }
        if self.failed.contains(&(t, jobs.clone())) {
            return false;
        }
        // F1 choice: none or one BS hop; F2 choice: none or one ready UAV hop.
        let f1: Vec<Option<usize>> = std::iter::once(None)
            .chain((0..jobs.len()).filter(|&i| jobs[i].a > 0).map(Some))
            .collect();
        let f2: Vec<Option<usize>> = std::iter::once(None)
            .chain(
                (0..jobs.len())
                    .filter(|&i| jobs[i].relay && jobs[i].a == 0 && jobs[i].b > 0)
                    .map(Some),
            )
            .collect();
        for &x in &f1 {
            for &y in &f2 {
                if x.is_none() && y.is_none() {
                    continue;
                }
                if let (Some(i), Some(_)) = (x, y) {
                    if jobs[i].relay {
                        continue;
                    }
                }
                let mut next = jobs.clone();
                if let Some(i) = x {
                    next[i].a -= 1;
                }
                if let Some(j) = y {
                    next[j].b -= 1;
                }
                if self.feasible(t + 1, next) {
                    return true;
                }
            }
        }
        self.failed.insert((t, jobs));
        false
    }
}

/// Whether every flow of `plan` can finish within `horizon` slots.
pub fn plan_feasible(slots: &[FlowSlots], plan: &[Method], horizon: u32) -> bool {
    let mut jobs = Vec::new();
    for (s, m) in slots.iter().zip(plan) {
        match m {
            Method::Skip => {}
            Method::Direct => match s.direct {
                Some(a) => jobs.push(Job {
                    relay: false,
                    a,
                    b: 0,
                }),
                None => return false,
            },
            Method::Relay => match (s.bs_to_uav, s.uav_to_mr) {
                (Some(a), Some(b)) => jobs.push(Job { relay: true, a, b }),
                _ => return false,
            },
        }
    }
    jobs.sort_by_key(|j| (j.relay, j.a, j.b));
    Search {
        horizon,
        failed: HashSet::new(),
    }
    .feasible(0, jobs)
}

/// Largest number of flows that can all be completed.
pub fn optimum(slots: &[FlowSlots], horizon: u32) -> usize {
    let n = slots.len();
    let mut best = 0;
    let mut plan = vec![Method::Skip; n];
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        for m in plan.iter_mut() {
            *m = [Method::Skip, Method::Direct, Method::Relay][c % 3];
            c /= 3;
        }
        let count = plan.iter().filter(|&&m| m != Method::Skip).count();
        if count > best && plan_feasible(slots, &plan, horizon) {
            best = count;
        }
    }
    best
}
