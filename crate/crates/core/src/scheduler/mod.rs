//! UAV-assisted STDMA scheduling: per-slot greedy admission of links under
//! antenna, half-duplex, receiver, secrecy and QoS contention rules, plus an
//! independent validator for the optimisation problem's constraints.

mod engine;
mod validate;

use serde::{Deserialize, Serialize};

use crate::channel::{FrameConfig, Link, LinkGainTable, LinkId};
use crate::error::{Error, Result};

pub use engine::{schedule_frame, schedule_with, Engine, GateView, Open, PhaseGate};
pub use validate::{validate_schedule, Violation, ViolationKind};

/// Order in which queued links are offered a slot, by priority value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorityOrder {
    /// Highest priority (fewest slots needed) first.
    Descending,
    /// Lowest first.
    Ascending,
}

/// Whether the contention rules and co-channel interference apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentionMode {
    Full,
    /// Every link runs at its interference-free rate; only antenna counts and
    /// the first-hop-before-second-hop order limit admission. Diagnostic only:
    /// schedules may violate constraints.
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerParams {
    pub bs_antennas: usize,
    pub uav_antennas: usize,
    pub priority_order: PriorityOrder,
    /// Eavesdropper capacity must stay strictly below this fraction of the
    /// main-channel capacity on every BS link.
    pub secrecy_ratio: f64,
    pub contention: ContentionMode,
}

impl Default for SchedulerParams {
    fn default() -> Self {
        Self {
            bs_antennas: 3,
            uav_antennas: 3,
            priority_order: PriorityOrder::Descending,
            secrecy_ratio: 0.1,
            contention: ContentionMode::Full,
        }
    }
}

impl SchedulerParams {
    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, reason: &str| Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.to_string(),
        };
        if self.bs_antennas == 0 {
            return Err(invalid("scheduler.bs_antennas", "must be at least 1"));
        }
        if self.uav_antennas == 0 {
            return Err(invalid("scheduler.uav_antennas", "must be at least 1"));
        }
        if !(self.secrecy_ratio > 0.0 && self.secrecy_ratio.is_finite()) {
            return Err(invalid("scheduler.secrecy_ratio", "must be positive"));
        }
        Ok(())
    }
}

/// Priority value: the fraction of a flow's frame demand one slot at `rate_bps`
/// delivers, i.e. the inverse of the slots the link needs.
pub fn priority_value(qos_bps: f64, rate_bps: f64, frame: &FrameConfig) -> f64 {
    rate_bps * frame.slot_duration_s() / (qos_bps * frame.frame_duration_s())
}

/// Outcome of offering a candidate link to the current active set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContentionVerdict {
    Compatible,
    /// A BS->UAV hop and a UAV->MR hop would overlap.
    HalfDuplex,
    /// Another active link already feeds the same receiver.
    ReceiverBusy,
    /// Some BS link would leak too much to the eavesdropper.
    SecrecyViolation,
    /// Some link could no longer finish its residual demand in time.
    QosConflict,
}

impl ContentionVerdict {
    pub fn is_compatible(self) -> bool {
        self == ContentionVerdict::Compatible
    }
}

/// Mutable per-link quantities consulted by the contention test.
#[derive(Debug, Clone, Copy)]
pub struct ContentionContext<'a> {
    pub links: &'a [Link],
    pub table: &'a LinkGainTable,
    pub residual_bits: &'a [f64],
    /// Slots left in the frame, counting the current one.
    pub remaining_slots: u64,
    pub slot_s: f64,
    pub secrecy_ratio: f64,
}

/// Offers `candidate` to the links in `active`.
///
/// QoS conflict means that with the candidate added some link, the candidate
/// included, can no longer clear its residual demand in the remaining slots at
/// its new rate, although it could before.
pub fn check_contention(
    candidate: LinkId,
    active: &[LinkId],
    ctx: &ContentionContext<'_>,
) -> ContentionVerdict {
    let c = &ctx.links[candidate];
    debug_assert!(!active.contains(&candidate));
    if active.iter().any(|&a| c.half_duplex_clash(&ctx.links[a])) {
        return ContentionVerdict::HalfDuplex;
    }
    if active.iter().any(|&a| ctx.links[a].rx == c.rx) {
        return ContentionVerdict::ReceiverBusy;
    }

    let mut with: Vec<LinkId> = Vec::with_capacity(active.len() + 1);
    with.extend_from_slice(active);
    with.push(candidate);

    let co_band = |i: LinkId| ctx.links[i].band == c.band;

    if c.band == crate::channel::Band::F1 {
        for &k in with.iter().filter(|&&k| co_band(k)) {
            let ce = ctx.table.eavesdrop_rate(k).unwrap_or(0.0);
            if !(ce < ctx.secrecy_ratio * ctx.table.rate_in_set(k, &with)) {
                return ContentionVerdict::SecrecyViolation;
            }
        }
    }

    let budget = ctx.remaining_slots as f64 * ctx.slot_s;
    let finishes =
        |k: LinkId, set: &[LinkId]| ctx.table.rate_in_set(k, set) * budget >= ctx.residual_bits[k];
    if !finishes(candidate, &with) {
        return ContentionVerdict::QosConflict;
    }
    for &k in active.iter().filter(|&&k| co_band(k)) {
        if finishes(k, active) && !finishes(k, &with) {
            return ContentionVerdict::QosConflict;
        }
    }
    ContentionVerdict::Compatible
}

/// One link's activity in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotActivity {
    pub link: LinkId,
    /// Shannon rate under the slot's co-channel interference.
    pub rate_bps: f64,
    /// Bits actually carried: the rate's worth, capped by what was left to send.
    pub delivered_bits: f64,
}

/// Headline numbers of one scheduled frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub completed_flows: usize,
    /// Sum over flows of the end-to-end per-frame throughput, bits/s.
    pub system_throughput_bps: f64,
    /// Index of the last slot with any activity, plus one.
    pub total_slots_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub links: Vec<Link>,
    /// One entry per slot of the frame.
    pub slots: Vec<Vec<SlotActivity>>,
    pub flow_completed: Vec<bool>,
    pub metrics: Metrics,
}

impl ScheduleResult {
    /// Bits the final hop of `flow` delivered over the frame.
    pub fn delivered_bits(&self, flow: usize) -> f64 {
        let mut total = 0.0;
        for slot in &self.slots {
            for a in slot {
                let l = &self.links[a.link];
                if l.flow == flow && l.is_final_hop() {
                    total += a.delivered_bits;
                }
            }
        }
        total
    }

    /// Slots in which `link` was active.
    pub fn active_slots(&self, link: LinkId) -> Vec<u64> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|a| a.link == link))
            .map(|(t, _)| t as u64)
            .collect()
    }
}

/// Summarises a frame. With `completed_only`, unfinished flows contribute no
/// throughput.
pub fn compute_metrics(
    links: &[Link],
    slots: &[Vec<SlotActivity>],
    flow_completed: &[bool],
    frame: &FrameConfig,
    completed_only: bool,
) -> Metrics {
    let mut per_flow = vec![0.0; flow_completed.len()];
    let mut last_used = 0;
    for (t, slot) in slots.iter().enumerate() {
        if !slot.is_empty() {
            last_used = t as u64 + 1;
        }
        for a in slot {
            let l = &links[a.link];
            if l.is_final_hop() {
                per_flow[l.flow] += a.delivered_bits;
            }
        }
    }
    let frame_s = frame.frame_duration_s();
    let system_throughput_bps = per_flow
        .iter()
        .zip(flow_completed)
        .filter(|(_, &done)| done || !completed_only)
        .map(|(bits, _)| bits / frame_s)
        .sum();
    Metrics {
        completed_flows: flow_completed.iter().filter(|&&d| d).count(),
        system_throughput_bps,
        total_slots_used: last_used,
    }
}
