use crate::channel::{Band, Link, LinkGainTable, LinkId, LinkRole};
use crate::error::Result;
use crate::relay_decision::DecisionSets;
use crate::world::World;

use super::{
    check_contention, compute_metrics, priority_value, ContentionContext, ContentionMode,
    PriorityOrder, ScheduleResult, SlotActivity,
};

/// Read-only engine state handed to a [`PhaseGate`].
#[derive(Debug, Clone, Copy)]
pub struct GateView<'a> {
    pub slot: u64,
    pub links: &'a [Link],
    pub table: &'a LinkGainTable,
    pub residual_bits: &'a [f64],
    pub completed: &'a [bool],
    pub remaining_slots: u64,
    pub slot_s: f64,
    pub secrecy_ratio: f64,
}

impl GateView<'_> {
    /// True when `link` is finished, or cannot go on the air alone at the
    /// current positions, or can no longer finish even alone.
    pub fn settled(&self, link: LinkId) -> bool {
        if self.completed[link] {
            return true;
        }
        let alone = self.table.standalone_rate(link);
        let insecure = self
            .table
            .eavesdrop_rate(link)
            .is_some_and(|ce| !(ce < self.secrecy_ratio * alone));
        insecure || alone * self.remaining_slots as f64 * self.slot_s < self.residual_bits[link]
    }
}

/// Extra admission filter layered over the contention rules.
pub trait PhaseGate {
    fn may_admit(&mut self, link: LinkId, view: &GateView<'_>) -> bool;
}

/// Admits everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Open;

impl PhaseGate for Open {
    fn may_admit(&mut self, _: LinkId, _: &GateView<'_>) -> bool {
        true
    }
}

/// Runs the UAV-assisted scheduler over one frame.
pub fn schedule_frame(
    decisions: &DecisionSets,
    world: &World,
    completed_only: bool,
) -> Result<ScheduleResult> {
    schedule_with(decisions, world, &mut Open, completed_only)
}

/// Like [`schedule_frame`] with an additional admission gate.
pub fn schedule_with(
    decisions: &DecisionSets,
    world: &World,
    gate: &mut dyn PhaseGate,
    completed_only: bool,
) -> Result<ScheduleResult> {
    let mut engine = Engine::new(decisions, world)?;
    let frame = world.frame().clone();
    for t in 0..frame.slot_count {
        engine.step(t, gate)?;
    }
    let metrics = compute_metrics(
        &engine.links,
        &engine.slots,
        &engine.flow_completed,
        &frame,
        completed_only,
    );
    Ok(ScheduleResult {
        links: engine.links,
        slots: engine.slots,
        flow_completed: engine.flow_completed,
        metrics,
    })
}

/// Link-level state of one frame.
pub struct Engine<'w> {
    world: &'w World,
    links: Vec<Link>,
    /// For each `BsToUav` link, its second hop.
    second_hop: Vec<Option<LinkId>>,
    /// For each `UavToMr` link, its first hop.
    first_hop: Vec<Option<LinkId>>,
    residual: Vec<f64>,
    completed: Vec<bool>,
    flow_completed: Vec<bool>,
    s_f1: Vec<LinkId>,
    s_f2: Vec<LinkId>,
    s_f2_dirty: bool,
    active: Vec<LinkId>,
    bs_in_use: usize,
    uav_in_use: usize,
    epoch: Option<u64>,
    table: Option<LinkGainTable>,
    slots: Vec<Vec<SlotActivity>>,
}

impl<'w> Engine<'w> {
    pub fn new(decisions: &DecisionSets, world: &'w World) -> Result<Self> {
        let flows = &world.scenario.flows;
        let frame = world.frame();
        let mut links = Vec::new();
        let mut second_hop = Vec::new();
        let mut first_hop = Vec::new();
        let mut s_f1 = Vec::new();
        for &f in &decisions.direct {
            let flow = &flows[f];
            let id = links.len();
            links.push(Link::new(
                id,
                f,
                LinkRole::Direct,
                flow.destination,
                frame.demand_bits(flow.qos_bps),
            ));
            second_hop.push(None);
            first_hop.push(None);
            s_f1.push(id);
        }
        for &f in &decisions.relayed {
            let flow = &flows[f];
            let demand = frame.demand_bits(flow.qos_bps);
            let l2 = links.len();
            links.push(Link::new(
                l2,
                f,
                LinkRole::BsToUav,
                flow.destination,
                demand,
            ));
            links.push(Link::new(
                l2 + 1,
                f,
                LinkRole::UavToMr,
                flow.destination,
                demand,
            ));
            second_hop.extend([Some(l2 + 1), None]);
            first_hop.extend([None, Some(l2)]);
            s_f1.push(l2);
        }
        let n = links.len();
        let mut engine = Self {
            world,
            residual: links.iter().map(|l| l.demand_bits).collect(),
            links,
            second_hop,
            first_hop,
            completed: vec![false; n],
            flow_completed: vec![false; flows.len()],
            s_f1,
            s_f2: Vec::new(),
            s_f2_dirty: false,
            active: Vec::new(),
            bs_in_use: 0,
            uav_in_use: 0,
            epoch: None,
            table: None,
            slots: Vec::with_capacity(frame.slot_count as usize),
        };
        engine.refresh(0)?;
        let mut s_f1 = std::mem::take(&mut engine.s_f1);
        engine.sort_queue(&mut s_f1);
        engine.s_f1 = s_f1;
        Ok(engine)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    fn table(&self) -> &LinkGainTable {
        self.table
            .as_ref()
            .expect("gain table is built before the first slot")
    }

    fn priority(&self, id: LinkId) -> f64 {
        let flow = &self.world.scenario.flows[self.links[id].flow];
        priority_value(
            flow.qos_bps,
            self.table().standalone_rate(id),
            self.world.frame(),
        )
    }

    fn sort_queue(&self, queue: &mut [LinkId]) {
        let order = self.world.params.scheduler.priority_order;
        let mut keyed: Vec<(LinkId, f64)> = queue.iter().map(|&i| (i, self.priority(i))).collect();
        keyed.sort_by(|a, b| {
            let by_priority = match order {
                PriorityOrder::Descending => b.1.total_cmp(&a.1),
                PriorityOrder::Ascending => a.1.total_cmp(&b.1),
            };
            by_priority
                .then_with(|| self.links[a.0].flow.cmp(&self.links[b.0].flow))
                .then(a.0.cmp(&b.0))
        });
        for (slot, (id, _)) in queue.iter_mut().zip(keyed) {
            *slot = id;
        }
    }

    /// Rebuilds the gain table when the slot enters a new mobility epoch and
    /// drops active BS links whose secrecy no longer holds at the new positions.
    fn refresh(&mut self, slot: u64) -> Result<()> {
        let epoch = self.world.epoch_of(slot);
        if self.epoch == Some(epoch) {
            return Ok(());
        }
        let geometry = self.world.geometry_at(slot);
        let budget = self.world.budget(&geometry);
        self.table = Some(LinkGainTable::build(&budget, &self.links)?);
        self.epoch = Some(epoch);
        self.s_f2_dirty = true;

        if self.world.params.scheduler.contention == ContentionMode::Disabled {
            return Ok(());
        }
        let ratio = self.world.params.scheduler.secrecy_ratio;
        let table = self.table();
        let insecure: Vec<LinkId> = self
            .active
            .iter()
            .copied()
            .filter(|&k| {
                table
                    .eavesdrop_rate(k)
                    .is_some_and(|ce| !(ce < ratio * table.rate_in_set(k, &self.active)))
            })
            .collect();
        for k in insecure {
            self.release(k);
        }
        Ok(())
    }

    /// Takes `k` off the air without completing it.
    fn release(&mut self, k: LinkId) {
        self.active.retain(|&a| a != k);
        match self.links[k].band {
            Band::F1 => self.bs_in_use -= 1,
            Band::F2 => self.uav_in_use -= 1,
        }
    }

    /// Whether a BS->UAV hop is on the air, which keeps every UAV->MR hop off.
    pub fn uav_receiving(&self) -> bool {
        self.active
            .iter()
            .any(|&k| self.links[k].role == LinkRole::BsToUav)
    }

    fn remaining_slots(&self, slot: u64) -> u64 {
        self.world.frame().slot_count - slot
    }

    fn try_admit(&mut self, k: LinkId, slot: u64, gate: &mut dyn PhaseGate) -> bool {
        if self.completed[k] || self.active.contains(&k) {
            return false;
        }
        if let Some(first) = self.first_hop[k] {
            if !self.completed[first] {
                return false;
            }
        }
        let params = &self.world.params.scheduler;
        let table = self.table();
        let view = GateView {
            slot,
            links: &self.links,
            table,
            residual_bits: &self.residual,
            completed: &self.completed,
            remaining_slots: self.remaining_slots(slot),
            slot_s: self.world.frame().slot_duration_s(),
            secrecy_ratio: params.secrecy_ratio,
        };
        if !gate.may_admit(k, &view) {
            return false;
        }
        if params.contention == ContentionMode::Full {
            let ctx = ContentionContext {
                links: &self.links,
                table,
                residual_bits: &self.residual,
                remaining_slots: view.remaining_slots,
                slot_s: view.slot_s,
                secrecy_ratio: params.secrecy_ratio,
            };
            if !check_contention(k, &self.active, &ctx).is_compatible() {
                return false;
            }
        }
        self.active.push(k);
        true
    }

    /// Admission and transmission for slot `t`.
    pub fn step(&mut self, t: u64, gate: &mut dyn PhaseGate) -> Result<()> {
        self.refresh(t)?;
        let n_b = self.world.params.scheduler.bs_antennas;
        let n_u = self.world.params.scheduler.uav_antennas;
        let contention = self.world.params.scheduler.contention;

        if !(self.s_f1.is_empty() && self.s_f2.is_empty()) {
            let queue = self.s_f1.clone();
            for k in queue {
                if self.bs_in_use >= n_b {
                    break;
                }
                if self.try_admit(k, t, gate) {
                    self.bs_in_use += 1;
                    if let Some(next) = self.second_hop[k] {
                        if !self.s_f2.contains(&next) {
                            self.s_f2.push(next);
                            self.s_f2_dirty = true;
                        }
                    }
                }
            }
            let latched = contention == ContentionMode::Full && self.uav_receiving();
            if !latched && !self.s_f2.is_empty() {
                if self.s_f2_dirty {
                    let mut q = std::mem::take(&mut self.s_f2);
                    self.sort_queue(&mut q);
                    self.s_f2 = q;
                    self.s_f2_dirty = false;
                }
                let queue = self.s_f2.clone();
                for k in queue {
                    if self.uav_in_use >= n_u {
                        break;
                    }
                    if self.try_admit(k, t, gate) {
                        self.uav_in_use += 1;
                    }
                }
            }
        }

        self.transmit();
        Ok(())
    }

    fn transmit(&mut self) {
        let dt = self.world.frame().slot_duration_s();
        let contention = self.world.params.scheduler.contention;
        let table = self
            .table
            .as_ref()
            .expect("gain table is built before the first slot");
        let mut activity = Vec::with_capacity(self.active.len());
        let mut done = Vec::new();
        for &k in &self.active {
            let rate = match contention {
                ContentionMode::Full => table.rate_in_set(k, &self.active),
                ContentionMode::Disabled => table.standalone_rate(k),
            };
            let delivered = (rate * dt).min(self.residual[k]);
            self.residual[k] -= delivered;
            activity.push(SlotActivity {
                link: k,
                rate_bps: rate,
                delivered_bits: delivered,
            });
            if self.residual[k] <= 1e-12 * self.links[k].demand_bits {
                done.push(k);
            }
        }
        activity.sort_by_key(|a| a.link);
        self.slots.push(activity);

        for k in done {
            self.residual[k] = 0.0;
            self.completed[k] = true;
            self.release(k);
            match self.links[k].band {
                Band::F1 => self.s_f1.retain(|&x| x != k),
                Band::F2 => self.s_f2.retain(|&x| x != k),
            }
            if self.links[k].is_final_hop() {
                self.flow_completed[self.links[k].flow] = true;
            }
        }
    }
}
