use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, FrameConfig, LinkBudget, ShadowMap};
use crate::error::Result;
use crate::scenario::{Geometry, Scenario};
use crate::scheduler::SchedulerParams;

/// Everything besides the scenario that a simulation run needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub channel: ChannelParams,
    pub frame: FrameConfig,
    pub scheduler: SchedulerParams,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        self.frame.validate()?;
        self.scheduler.validate()
    }
}

/// A scenario together with the radio parameters and the frame's shadowing
/// draws. Read-only once built.
#[derive(Debug, Clone)]
pub struct World {
    pub scenario: Scenario,
    pub params: SimParams,
    pub shadow: ShadowMap,
}

impl World {
    pub fn new(scenario: Scenario, params: SimParams) -> Result<Self> {
        params.validate()?;
        let nodes = 3 + scenario.mr_count();
        let c = &params.channel;
        let o = &c.path_loss_overrides;
        let shadowing = c.path_loss.shadowing_enabled
            || [
                &o.bs_to_mr,
                &o.bs_to_uav,
                &o.uav_to_mr,
                &o.bs_to_eavesdropper,
            ]
            .iter()
            .any(|p| p.as_ref().is_some_and(|p| p.shadowing_enabled));
        let shadow = if shadowing {
            ShadowMap::sample(nodes, scenario.rng_seed)
        } else {
            ShadowMap::disabled(nodes)
        };
        Ok(Self {
            scenario,
            params,
            shadow,
        })
    }

    pub fn frame(&self) -> &FrameConfig {
        &self.params.frame
    }

    pub fn geometry_at(&self, slot: u64) -> Geometry {
        self.scenario
            .positions_at_slot(slot, self.params.frame.slot_duration_s())
    }

    pub fn epoch_of(&self, slot: u64) -> u64 {
        self.scenario.epoch_of(slot)
    }

    pub fn budget<'a>(&'a self, geometry: &'a Geometry) -> LinkBudget<'a> {
        LinkBudget::new(&self.params.channel, geometry, &self.shadow)
    }
}
