use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{Band, Link, LinkId, LinkRole};
use crate::error::Result;
use crate::scenario::NodeId;
use crate::world::World;

use super::ScheduleResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    /// A node transmits and receives in the same slot.
    HalfDuplex,
    /// Two links of one slot share a receiver.
    ReceiverCollision,
    /// A completed flow got less than its demand.
    QosShortfall,
    /// More concurrent beams at a node than it has antennas.
    AntennaLimit,
    /// The UAV forwarded more than it had received by some slot.
    RelayCausality,
    /// A BS link leaked too much to the eavesdropper.
    Secrecy,
    /// A recorded rate disagrees with the channel model, or a link carried
    /// more than its rate allows.
    RateMismatch,
    /// Completion flags or metrics disagree with the delivered bits.
    Bookkeeping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub slot: Option<u64>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.slot {
            Some(t) => write!(f, "slot {t}: {:?}: {}", self.kind, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

const REL_TOL: f64 = 1e-9;

/// Rechecks a schedule against every constraint of the scheduling problem,
/// recomputing rates from the channel model rather than trusting the scheduler.
///
/// An empty list means the schedule is valid.
pub fn validate_schedule(result: &ScheduleResult, world: &World) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let params = &world.params.scheduler;
    let frame = world.frame();
    let links = &result.links;
    let dt = frame.slot_duration_s();

    if result.slots.len() as u64 != frame.slot_count {
        out.push(Violation {
            kind: ViolationKind::Bookkeeping,
            slot: None,
            detail: format!(
                "{} slots recorded for a frame of {}",
                result.slots.len(),
                frame.slot_count
            ),
        });
    }

    let mut rate_cache: HashMap<(u64, Vec<LinkId>), Vec<(f64, Option<f64>)>> = HashMap::new();
    let mut geometry_cache = None;
    let mut delivered = vec![0.0; links.len()];
    let mut bs_side = 0.0;
    let mut uav_side = 0.0;

    for (t, slot) in result.slots.iter().enumerate() {
        let t = t as u64;
        let at = |kind, detail: String| Violation {
            kind,
            slot: Some(t),
            detail,
        };
        let set: Vec<&Link> = slot.iter().map(|a| &links[a.link]).collect();

        let from_bs = set.iter().filter(|l| l.tx == NodeId::Bs).count();
        let from_uav = set.iter().filter(|l| l.tx == NodeId::Uav).count();
        if from_bs > params.bs_antennas {
            out.push(at(
                ViolationKind::AntennaLimit,
                format!("{from_bs} BS beams"),
            ));
        }
        if from_uav > params.uav_antennas {
            out.push(at(
                ViolationKind::AntennaLimit,
                format!("{from_uav} UAV beams"),
            ));
        }
        for (i, a) in set.iter().enumerate() {
            for b in &set[i + 1..] {
                if a.id == b.id {
                    out.push(at(
                        ViolationKind::Bookkeeping,
                        format!("link {} listed twice", a.id),
                    ));
                    continue;
                }
                if a.half_duplex_clash(b) {
                    out.push(at(
                        ViolationKind::HalfDuplex,
                        format!("links {} and {}", a.id, b.id),
                    ));
                }
                if a.rx == b.rx {
                    out.push(at(
                        ViolationKind::ReceiverCollision,
                        format!("links {} and {} both deliver to {}", a.id, b.id, a.rx),
                    ));
                }
            }
        }

        let collided = out
            .iter()
            .any(|v| v.slot == Some(t) && v.kind == ViolationKind::ReceiverCollision);
        if slot.is_empty() || collided {
            continue;
        }
        let epoch = world.epoch_of(t);
        let mut ids: Vec<LinkId> = slot.iter().map(|a| a.link).collect();
        ids.sort_unstable();
        let rates = match rate_cache.get(&(epoch, ids.clone())) {
            Some(r) => r.clone(),
            None => {
                if geometry_cache.as_ref().map(|(e, _)| *e) != Some(epoch) {
                    geometry_cache = Some((epoch, world.geometry_at(t)));
                }
                let geometry = &geometry_cache.as_ref().expect("just set").1;
                let budget = world.budget(geometry);
                let members: Vec<&Link> = ids.iter().map(|&i| &links[i]).collect();
                let mut r = Vec::with_capacity(ids.len());
                for l in &members {
                    let cm = budget.rate(l, &members)?;
                    let ce = match l.band {
                        Band::F1 => Some(budget.eavesdrop_rate(l)?),
                        Band::F2 => None,
                    };
                    r.push((cm, ce));
                }
                rate_cache.insert((epoch, ids.clone()), r.clone());
                r
            }
        };

        for a in slot {
            let pos = ids.binary_search(&a.link).expect("id taken from this slot");
            let (cm, ce) = rates[pos];
            if (a.rate_bps - cm).abs() > REL_TOL * cm.max(1.0) {
                out.push(at(
                    ViolationKind::RateMismatch,
                    format!(
                        "link {} recorded {} bps, model gives {}",
                        a.link, a.rate_bps, cm
                    ),
                ));
            }
            if a.delivered_bits < 0.0 || a.delivered_bits > cm * dt * (1.0 + REL_TOL) {
                out.push(at(
                    ViolationKind::RateMismatch,
                    format!(
                        "link {} carried {} bits at {} bps",
                        a.link, a.delivered_bits, cm
                    ),
                ));
            }
            if let Some(ce) = ce {
                if !(ce < params.secrecy_ratio * cm) {
                    out.push(at(
                        ViolationKind::Secrecy,
                        format!("link {}: eavesdropper {ce} bps vs main {cm} bps", a.link),
                    ));
                }
            }
            delivered[a.link] += a.delivered_bits;
            match links[a.link].tx {
                NodeId::Bs => bs_side += a.delivered_bits,
                NodeId::Uav => uav_side += a.delivered_bits,
                _ => {}
            }
        }

        if uav_side > bs_side * (1.0 + REL_TOL) {
            out.push(at(
                ViolationKind::RelayCausality,
                format!("UAV has sent {uav_side} bits in total, BS only {bs_side}"),
            ));
        }
        for a in slot {
            let l = &links[a.link];
            if l.role != LinkRole::UavToMr {
                continue;
            }
            let first = links
                .iter()
                .find(|m| m.flow == l.flow && m.role == LinkRole::BsToUav)
                .map(|m| m.id);
            let received = first.map_or(0.0, |m| delivered[m]);
            if delivered[a.link] > received * (1.0 + REL_TOL) {
                out.push(at(
                    ViolationKind::RelayCausality,
                    format!(
                        "flow {}: forwarded {} of {} bits received",
                        l.flow, delivered[a.link], received
                    ),
                ));
            }
            if first.is_some_and(|m| ids.binary_search(&m).is_ok()) {
                out.push(at(
                    ViolationKind::RelayCausality,
                    format!("flow {}: both hops in one slot", l.flow),
                ));
            }
        }
    }

    let flows = &world.scenario.flows;
    if result.flow_completed.len() != flows.len() {
        out.push(Violation {
            kind: ViolationKind::Bookkeeping,
            slot: None,
            detail: format!(
                "{} completion flags for {} flows",
                result.flow_completed.len(),
                flows.len()
            ),
        });
        return Ok(out);
    }
    for (f, &done) in result.flow_completed.iter().enumerate() {
        if !done {
            continue;
        }
        let need = frame.demand_bits(flows[f].qos_bps) * (1.0 - REL_TOL);
        let hops: Vec<&Link> = links.iter().filter(|l| l.flow == f).collect();
        if !hops.iter().any(|l| l.is_final_hop()) {
            out.push(Violation {
                kind: ViolationKind::Bookkeeping,
                slot: None,
                detail: format!("flow {f} marked complete with no final hop"),
            });
        }
        for l in hops {
            if delivered[l.id] < need {
                out.push(Violation {
                    kind: ViolationKind::QosShortfall,
                    slot: None,
                    detail: format!(
                        "flow {f}: link {} delivered {} of {} bits",
                        l.id, delivered[l.id], need
                    ),
                });
            }
        }
    }
    let done = result.flow_completed.iter().filter(|&&d| d).count();
    if result.metrics.completed_flows != done {
        out.push(Violation {
            kind: ViolationKind::Bookkeeping,
            slot: None,
            detail: format!(
                "metrics report {} completed flows, flags say {done}",
                result.metrics.completed_flows
            ),
        });
    }
    if result.metrics.total_slots_used > frame.slot_count {
        out.push(Violation {
            kind: ViolationKind::Bookkeeping,
            slot: None,
            detail: format!(
                "{} slots used of {}",
                result.metrics.total_slots_used, frame.slot_count
            ),
        });
    }
    Ok(out)
}
