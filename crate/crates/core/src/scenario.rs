//! Physical world of one HSR cell: node placement, train motion and flow
//! generation.
//!
//! Coordinates are metres: `x` along the track (the train runs towards +x),
//! `y` across the track (the track centreline is `y = 0`) and `z` height
//! above ground. The BS sits at `x = 0`.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// A point in the cell, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.z >= 0.0
    }

    pub(crate) fn sub(&self, other: &Position3D) -> [f64; 3] {
        [self.x - other.x, self.y - other.y, self.z - other.z]
    }
}

/// Euclidean distance between two points.
pub fn distance(a: &Position3D, b: &Position3D) -> f64 {
    let [dx, dy, dz] = a.sub(b);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Every radio node that can appear in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeId {
    Bs,
    Uav,
    Mr(usize),
    Eavesdropper,
}

impl NodeId {
    /// Dense index used by per-node-pair tables: BS, UAV, eavesdropper, then MRs.
    pub fn dense_index(self) -> usize {
        match self {
            NodeId::Bs => 0,
            NodeId::Uav => 1,
            NodeId::Eavesdropper => 2,
            NodeId::Mr(i) => 3 + i,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Bs => f.write_str("BS"),
            NodeId::Uav => f.write_str("UAV"),
            NodeId::Mr(i) => write!(f, "MR{i}"),
            NodeId::Eavesdropper => f.write_str("Eva"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainLayout {
    pub car_count: usize,
    pub car_length_m: f64,
    pub mr_per_car: usize,
    pub mr_height_m: f64,
}

impl Default for TrainLayout {
    fn default() -> Self {
        Self {
            car_count: 8,
            car_length_m: 25.0,
            mr_per_car: 3,
            mr_height_m: 2.5,
        }
    }
}

impl TrainLayout {
    pub fn mr_count(&self) -> usize {
        self.car_count * self.mr_per_car
    }

    pub fn train_length_m(&self) -> f64 {
        self.car_count as f64 * self.car_length_m
    }

    /// Along-track gap between consecutive MRs.
    pub fn mr_spacing_m(&self) -> f64 {
        self.train_length_m() / self.mr_count() as f64
    }

    /// Distance of MR `i` behind the train front. MRs sit at the centres of
    /// `mr_count` equal roof segments.
    pub fn mr_attachment_m(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.mr_spacing_m()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub speed_mps: f64,
    /// MR positions are refreshed every this many slots.
    pub update_period_slots: u64,
    /// Train front x-coordinate at slot 0.
    pub initial_train_offset_m: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            speed_mps: 300.0 / 3.6,
            update_period_slots: 2000,
            initial_train_offset_m: 0.0,
        }
    }
}

/// Which way along the track the UAV is displaced from the BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UavSide {
    /// Over the part of the track the train currently occupies (-x).
    TowardTrain,
    /// Ahead of the train (+x).
    AheadOfTrain,
}

impl UavSide {
    fn sign(self) -> f64 {
        match self {
            UavSide::TowardTrain => -1.0,
            UavSide::AheadOfTrain => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub flow_count: usize,
    pub qos_min_mbps: f64,
    pub qos_max_mbps: f64,
    /// Cross-track distance of the BS from the track centreline.
    pub bs_track_offset_m: f64,
    pub bs_height_m: f64,
    pub uav_height_m: f64,
    /// Horizontal BS-UAV distance.
    pub uav_distance_m: f64,
    pub uav_side: UavSide,
    pub layout: TrainLayout,
    pub mobility: MobilityConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            flow_count: 18,
            qos_min_mbps: 10.0,
            qos_max_mbps: 500.0,
            bs_track_offset_m: 5.0,
            bs_height_m: 10.0,
            uav_height_m: 100.0,
            uav_distance_m: 150.0,
            uav_side: UavSide::TowardTrain,
            layout: TrainLayout::default(),
            mobility: MobilityConfig::default(),
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn require_positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn require_non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be non-negative and finite, got {v}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let l = &self.layout;
        if l.car_count == 0 {
            return Err(invalid("scenario.layout.car_count", "must be at least 1"));
        }
        if l.mr_per_car == 0 {
            return Err(invalid("scenario.layout.mr_per_car", "must be at least 1"));
        }
        require_positive("scenario.layout.car_length_m", l.car_length_m)?;
        require_non_negative("scenario.layout.mr_height_m", l.mr_height_m)?;
        require_non_negative("scenario.bs_height_m", self.bs_height_m)?;
        require_non_negative("scenario.uav_height_m", self.uav_height_m)?;
        require_non_negative("scenario.uav_distance_m", self.uav_distance_m)?;
        if !self.bs_track_offset_m.is_finite() {
            return Err(invalid("scenario.bs_track_offset_m", "must be finite"));
        }
        require_non_negative("scenario.mobility.speed_mps", self.mobility.speed_mps)?;
        if !self.mobility.initial_train_offset_m.is_finite() {
            return Err(invalid(
                "scenario.mobility.initial_train_offset_m",
                "must be finite",
            ));
        }
        if self.mobility.update_period_slots == 0 {
            return Err(invalid(
                "scenario.mobility.update_period_slots",
                "must be at least 1",
            ));
        }
        require_positive("scenario.qos_min_mbps", self.qos_min_mbps)?;
        require_positive("scenario.qos_max_mbps", self.qos_max_mbps)?;
        if self.qos_min_mbps > self.qos_max_mbps {
            return Err(invalid(
                "scenario.qos_max_mbps",
                "must not be below qos_min_mbps",
            ));
        }
        if self.flow_count > l.mr_count() {
            return Err(invalid(
                "scenario.flow_count",
                format!(
                    "{} flows requested but the train carries only {} MRs",
                    self.flow_count,
                    l.mr_count()
                ),
            ));
        }
        Ok(())
    }
}

/// A downlink demand from the BS to one MR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: usize,
    pub destination: NodeId,
    /// Minimum throughput requirement, bits/s.
    pub qos_bps: f64,
}

/// Immutable description of one cell at frame start.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bs_position: Position3D,
    pub uav_position: Position3D,
    /// Fixed distance of the eavesdropper behind the train front.
    pub eavesdropper_attachment_m: f64,
    pub layout: TrainLayout,
    pub mobility: MobilityConfig,
    pub flows: Vec<Flow>,
    pub rng_seed: u64,
}

/// Node positions at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub bs: Position3D,
    pub uav: Position3D,
    pub eavesdropper: Position3D,
    pub mrs: Vec<Position3D>,
}

impl Geometry {
    pub fn position(&self, node: NodeId) -> Position3D {
        match node {
            NodeId::Bs => self.bs,
            NodeId::Uav => self.uav,
            NodeId::Eavesdropper => self.eavesdropper,
            NodeId::Mr(i) => self.mrs[i],
        }
    }

    pub fn node_count(&self) -> usize {
        3 + self.mrs.len()
    }
}

/// Builds a scenario; identical `(config, seed)` pairs give identical scenarios.
pub fn build_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = rng::stream(seed, Stream::Scenario);

    let train_len = config.layout.train_length_m();
    let eavesdropper_attachment_m = rng.random_range(0.0..=train_len);

    let destinations = index::sample(&mut rng, config.layout.mr_count(), config.flow_count);
    let flows = destinations
        .into_iter()
        .enumerate()
        .map(|(id, mr)| Flow {
            id,
            destination: NodeId::Mr(mr),
            qos_bps: rng.random_range(config.qos_min_mbps..=config.qos_max_mbps) * 1e6,
        })
        .collect();

    Ok(Scenario {
        bs_position: Position3D::new(0.0, config.bs_track_offset_m, config.bs_height_m),
        uav_position: Position3D::new(
            config.uav_side.sign() * config.uav_distance_m,
            config.bs_track_offset_m,
            config.uav_height_m,
        ),
        eavesdropper_attachment_m,
        layout: config.layout.clone(),
        mobility: config.mobility.clone(),
        flows,
        rng_seed: seed,
    })
}

impl Scenario {
    pub fn mr_count(&self) -> usize {
        self.layout.mr_count()
    }

    /// Train front x-coordinate as seen by the scheduler at `slot`.
    ///
    /// Positions are only refreshed every `update_period_slots`, so the value is
    /// piecewise constant.
    pub fn train_front_at_slot(&self, slot: u64, slot_duration_s: f64) -> f64 {
        let period = self.mobility.update_period_slots;
        let refreshed = (slot / period) * period;
        self.mobility.initial_train_offset_m
            + self.mobility.speed_mps * refreshed as f64 * slot_duration_s
    }

    /// Epoch index of `slot`; positions are constant within an epoch.
    pub fn epoch_of(&self, slot: u64) -> u64 {
        slot / self.mobility.update_period_slots
    }

    pub fn positions_at_slot(&self, slot: u64, slot_duration_s: f64) -> Geometry {
        let front = self.train_front_at_slot(slot, slot_duration_s);
        let z = self.layout.mr_height_m;
        let mrs = (0..self.mr_count())
            .map(|i| Position3D::new(front - self.layout.mr_attachment_m(i), 0.0, z))
            .collect();
        Geometry {
            bs: self.bs_position,
            uav: self.uav_position,
            eavesdropper: Position3D::new(front - self.eavesdropper_attachment_m, 0.0, z),
            mrs,
        }
    }
}
