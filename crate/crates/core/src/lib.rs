//! Simulation and scheduling library for UAV-assisted millimeter-wave downlinks
//! to a high-speed train.
//!
//! A base station serves rooftop mobile relays on a 28 GHz band; a UAV hovering
//! near the track can relay flows on a 60 GHz band. The crate provides the
//! channel model, the per-flow relay decision, a greedy concurrent slot
//! scheduler, two BS-only baselines and a Monte-Carlo sweep harness.

pub mod baselines;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod relay_decision;
pub mod rng;
pub mod scenario;
pub mod scheduler;
pub mod world;

pub use baselines::BaselineKind;
pub use channel::{Band, ChannelParams, FrameConfig, Link, LinkId, LinkRole};
pub use error::{Error, Result};
pub use experiment::{run_sweep, ExperimentConfig, Scheme, SweepReport};
pub use relay_decision::{decide_all, DecisionSets, Verdict};
pub use scenario::{build_scenario, Flow, NodeId, Position3D, Scenario, ScenarioConfig};
pub use scheduler::{schedule_frame, validate_schedule, Metrics, ScheduleResult, SchedulerParams};
pub use world::{SimParams, World};
