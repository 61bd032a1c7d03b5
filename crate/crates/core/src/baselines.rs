//! Comparison schedulers that never relay through the UAV.
//!
//! Both are renderings of short published descriptions rather than of the
//! cited originals: a QoS-aware concurrent scheduler and a maximum
//! independent set (MQIS) scheduler. Both obey the same secrecy constraint as
//! the UAV-assisted scheme so that comparisons isolate the relay.

use serde::{Deserialize, Serialize};

use crate::channel::{Link, LinkGainTable, LinkId, LinkRole};
use crate::error::Result;
use crate::relay_decision::{hop_estimates, DecisionSets};
use crate::scheduler::{
    check_contention, priority_value, schedule_with, ContentionContext, GateView, Open, PhaseGate,
    ScheduleResult,
};
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    QosConcurrent,
    Mqis,
}

/// Flows a BS-only scheduler can take on: those whose direct link alone meets
/// the QoS requirement without exposing the flow to the eavesdropper.
pub fn direct_only_decisions(world: &World) -> Result<DecisionSets> {
    let mut sets = DecisionSets::default();
    for flow in &world.scenario.flows {
        let e = hop_estimates(flow, world)?;
        if e.direct_feasible(flow.qos_bps) && e.direct_secure {
            sets.direct.push(flow.id);
        } else {
            sets.abandoned.push(flow.id);
        }
    }
    Ok(sets)
}

pub fn schedule_qos_concurrent(world: &World, completed_only: bool) -> Result<ScheduleResult> {
    let sets = direct_only_decisions(world)?;
    schedule_with(&sets, world, &mut Open, completed_only)
}

pub fn schedule_mqis(world: &World, completed_only: bool) -> Result<ScheduleResult> {
    let sets = direct_only_decisions(world)?;
    let phases = independent_sets(&sets, world)?;
    schedule_with(&sets, world, &mut MqisGate::new(phases), completed_only)
}

pub fn schedule_baseline(
    kind: BaselineKind,
    world: &World,
    completed_only: bool,
) -> Result<ScheduleResult> {
    match kind {
        BaselineKind::QosConcurrent => schedule_qos_concurrent(world, completed_only),
        BaselineKind::Mqis => schedule_mqis(world, completed_only),
    }
}

/// Direct links in the order the engine creates them for `sets`.
fn direct_links(sets: &DecisionSets, world: &World) -> Vec<Link> {
    let frame = world.frame();
    sets.direct
        .iter()
        .enumerate()
        .map(|(id, &f)| {
            let flow = &world.scenario.flows[f];
            Link::new(
                id,
                f,
                LinkRole::Direct,
                flow.destination,
                frame.demand_bits(flow.qos_bps),
            )
        })
        .collect()
}

/// Conflict graph over the direct links at frame start: an edge wherever one
/// link cannot join the other alone on the air. Returned as adjacency lists.
pub fn conflict_graph(sets: &DecisionSets, world: &World) -> Result<Vec<Vec<LinkId>>> {
    let links = direct_links(sets, world);
    let geometry = world.geometry_at(0);
    let table = LinkGainTable::build(&world.budget(&geometry), &links)?;
    let residual: Vec<f64> = links.iter().map(|l| l.demand_bits).collect();
    let ctx = ContentionContext {
        links: &links,
        table: &table,
        residual_bits: &residual,
        remaining_slots: world.frame().slot_count,
        slot_s: world.frame().slot_duration_s(),
        secrecy_ratio: world.params.scheduler.secrecy_ratio,
    };
    let n = links.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let clash = !check_contention(j, &[i], &ctx).is_compatible()
                || !check_contention(i, &[j], &ctx).is_compatible();
            if clash {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    Ok(adj)
}

/// Greedy maximal independent sets: repeatedly take the highest-priority
/// remaining link, drop its neighbours, and continue until the candidates run
/// out; then start the next set from what is left.
pub fn independent_sets(sets: &DecisionSets, world: &World) -> Result<Vec<Vec<LinkId>>> {
    let adj = conflict_graph(sets, world)?;
    let links = direct_links(sets, world);
    let geometry = world.geometry_at(0);
    let table = LinkGainTable::build(&world.budget(&geometry), &links)?;
    let mut order: Vec<(LinkId, f64)> = links
        .iter()
        .map(|l| {
            let q = world.scenario.flows[l.flow].qos_bps;
            (
                l.id,
                priority_value(q, table.standalone_rate(l.id), world.frame()),
            )
        })
        .collect();
    order.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(links[a.0].flow.cmp(&links[b.0].flow))
    });

    let mut placed = vec![false; links.len()];
    let mut phases = Vec::new();
    while placed.iter().any(|p| !p) {
        let mut blocked = vec![false; links.len()];
        let mut phase = Vec::new();
        for &(i, _) in &order {
            if placed[i] || blocked[i] {
                continue;
            }
            placed[i] = true;
            phase.push(i);
            for &j in &adj[i] {
                blocked[j] = true;
            }
        }
        phases.push(phase);
    }
    Ok(phases)
}

/// Lets only the current independent set on the air; the next set opens once
/// every member of the current one has finished or can no longer finish.
#[derive(Debug, Clone)]
pub struct MqisGate {
    phases: Vec<Vec<LinkId>>,
    current: usize,
}

impl MqisGate {
    pub fn new(phases: Vec<Vec<LinkId>>) -> Self {
        Self { phases, current: 0 }
    }

    pub fn current_phase(&self) -> usize {
        self.current
    }
}

impl PhaseGate for MqisGate {
    fn may_admit(&mut self, link: LinkId, view: &GateView<'_>) -> bool {
        while self.current < self.phases.len()
            && self.phases[self.current].iter().all(|&k| view.settled(k))
        {
            self.current += 1;
        }
        self.phases
            .get(self.current)
            .is_some_and(|p| p.contains(&link))
    }
}
