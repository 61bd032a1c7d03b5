//! Transmission-method selection: every requested flow is sent directly from
//! the BS, relayed through the UAV, or abandoned.
//!
//! Decisions use interference-free rates at frame-start geometry, since which
//! links end up sharing a slot is unknown at this point.

use serde::{Deserialize, Serialize};

use crate::channel::{achieved_throughput_const, Link, LinkRole};
use crate::error::Result;
use crate::scenario::Flow;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Path {
    Direct,
    ViaUav,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Direct,
    Relayed,
    Abandoned,
}

/// Interference-free rates and per-frame throughputs of the three candidate
/// hops of one flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopEstimates {
    /// BS -> MR.
    pub rate_l1: f64,
    /// BS -> UAV.
    pub rate_l2: f64,
    /// UAV -> MR.
    pub rate_l2p: f64,
    pub q_l1: f64,
    pub q_l2: f64,
    pub q_l2p: f64,
    /// Whether the direct link keeps the eavesdropper below the secrecy ratio.
    pub direct_secure: bool,
}

impl HopEstimates {
    pub fn direct_feasible(&self, qos_bps: f64) -> bool {
        self.q_l1 >= qos_bps
    }

    pub fn relay_feasible(&self, qos_bps: f64) -> bool {
        self.q_l2.min(self.q_l2p) >= qos_bps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowDecision {
    pub flow_id: usize,
    pub verdict: Verdict,
    pub estimates: HopEstimates,
    /// Estimated slots for the chosen path; `None` when abandoned.
    pub estimated_slots: Option<u64>,
}

/// Partition of the requested flows. Each list is in flow-id order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionSets {
    pub direct: Vec<usize>,
    pub relayed: Vec<usize>,
    pub abandoned: Vec<usize>,
    pub decisions: Vec<FlowDecision>,
}

impl DecisionSets {
    /// Every flow sent directly, as the baselines do.
    pub fn all_direct(flows: &[Flow]) -> Self {
        Self {
            direct: flows.iter().map(|f| f.id).collect(),
            ..Self::default()
        }
    }
}

/// Standalone rates and throughputs of a flow's hops at slot 0.
pub fn hop_estimates(flow: &Flow, world: &World) -> Result<HopEstimates> {
    let geometry = world.geometry_at(0);
    let budget = world.budget(&geometry);
    let frame = world.frame();
    let demand = frame.demand_bits(flow.qos_bps);
    let l1 = Link::new(0, flow.id, LinkRole::Direct, flow.destination, demand);
    let l2 = Link::new(1, flow.id, LinkRole::BsToUav, flow.destination, demand);
    let l2p = Link::new(2, flow.id, LinkRole::UavToMr, flow.destination, demand);

    let rate_l1 = budget.rate(&l1, &[])?;
    let rate_l2 = budget.rate(&l2, &[])?;
    let rate_l2p = budget.rate(&l2p, &[])?;
    let ratio = world.params.scheduler.secrecy_ratio;
    Ok(HopEstimates {
        rate_l1,
        rate_l2,
        rate_l2p,
        q_l1: achieved_throughput_const(rate_l1, frame),
        q_l2: achieved_throughput_const(rate_l2, frame),
        q_l2p: achieved_throughput_const(rate_l2p, frame),
        direct_secure: budget.eavesdrop_rate(&l1)? < ratio * rate_l1,
    })
}

/// Per-frame throughput of each hop on `path` when it has the whole frame to itself.
pub fn estimate_standalone_throughput(flow: &Flow, path: Path, world: &World) -> Result<Vec<f64>> {
    let e = hop_estimates(flow, world)?;
    Ok(match path {
        Path::Direct => vec![e.q_l1],
        Path::ViaUav => vec![e.q_l2, e.q_l2p],
    })
}

/// Slots needed to move `demand_bits` at `rate_bps`, rounded up.
/// `None` when the rate is zero.
pub fn slots_for(demand_bits: f64, rate_bps: f64, slot_s: f64) -> Option<u64> {
    if !(rate_bps > 0.0) {
        return None;
    }
    let exact = demand_bits / (rate_bps * slot_s);
    // Absorb rounding noise so that a demand of exactly k slots gives k.
    Some((exact * (1.0 - 1e-12)).ceil().max(0.0) as u64)
}

/// Estimated slot count of `flow` on `path`, each hop rounded up separately.
pub fn estimate_slots(flow: &Flow, path: Path, e: &HopEstimates, world: &World) -> Option<u64> {
    let frame = world.frame();
    let demand = frame.demand_bits(flow.qos_bps);
    let dt = frame.slot_duration_s();
    match path {
        Path::Direct => slots_for(demand, e.rate_l1, dt),
        Path::ViaUav => {
            Some(slots_for(demand, e.rate_l2, dt)? + slots_for(demand, e.rate_l2p, dt)?)
        }
    }
}

/// The four-way case table of the selection algorithm.
pub fn classify(
    qos_bps: f64,
    e: &HopEstimates,
    te_direct: Option<u64>,
    te_relay: Option<u64>,
) -> Verdict {
    let direct = e.direct_feasible(qos_bps);
    let relay = e.relay_feasible(qos_bps);
    match (direct, relay) {
        (false, false) => Verdict::Abandoned,
        (false, true) => Verdict::Relayed,
        (true, false) if e.direct_secure => Verdict::Direct,
        (true, false) => Verdict::Abandoned,
        (true, true) if !e.direct_secure => Verdict::Relayed,
        (true, true) => match (te_direct, te_relay) {
            (Some(d), Some(r)) if d <= r => Verdict::Direct,
            (Some(_), None) => Verdict::Direct,
            _ => Verdict::Relayed,
        },
    }
}

pub fn decide_flow(flow: &Flow, world: &World) -> Result<FlowDecision> {
    let e = hop_estimates(flow, world)?;
    let te_direct = estimate_slots(flow, Path::Direct, &e, world);
    let te_relay = estimate_slots(flow, Path::ViaUav, &e, world);
    let verdict = classify(flow.qos_bps, &e, te_direct, te_relay);
    Ok(FlowDecision {
        flow_id: flow.id,
        verdict,
        estimates: e,
        estimated_slots: match verdict {
            Verdict::Direct => te_direct,
            Verdict::Relayed => te_relay,
            Verdict::Abandoned => None,
        },
    })
}

/// Runs the selection over every flow of the scenario.
pub fn decide_all(flows: &[Flow], world: &World) -> Result<DecisionSets> {
    let mut sets = DecisionSets::default();
    for flow in flows {
        let d = decide_flow(flow, world)?;
        match d.verdict {
            Verdict::Direct => sets.direct.push(flow.id),
            Verdict::Relayed => sets.relayed.push(flow.id),
            Verdict::Abandoned => sets.abandoned.push(flow.id),
        }
        sets.decisions.push(d);
    }
    Ok(sets)
}
