//! Physical-layer models: directional antenna gain, alpha-beta path loss,
//! SINR-based Shannon rate, per-frame throughput and secrecy capacity.
//!
//! All power quantities are carried in the dB domain (dBm, dBi, dB) and only
//! converted to milliwatts where powers are summed.

mod antenna;
mod link;
mod propagation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::NodeId;

pub use antenna::{antenna_gain, off_boresight_deg};
pub use link::{Link, LinkBudget, LinkGainTable, LinkId, LinkRole, ShadowMap};
pub use propagation::{
    achieved_throughput, achieved_throughput_const, noise_floor_dbm, path_loss, received_power_dbm,
    secrecy_capacity, shannon_rate,
};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// The two mmWave bands: F1 carries every BS transmission, F2 every UAV
/// transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    F1,
    F2,
}

impl Band {
    /// Band used by a transmitter, if it transmits at all.
    pub fn of_transmitter(node: NodeId) -> Option<Band> {
        match node {
            NodeId::Bs => Some(Band::F1),
            NodeId::Uav => Some(Band::F2),
            _ => None,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaParams {
    pub max_gain_dbi: f64,
    pub half_power_beamwidth_deg: f64,
    /// Side-lobe level. When unset it follows `-0.4111 ln(hpbw) - 10.579`.
    pub side_lobe_gain_dbi: Option<f64>,
    /// Stored for completeness; only used when `clamp_main_lobe` is set.
    pub max_attenuation_db: f64,
    /// Floor the main-lobe gain at `max_gain - max_attenuation`.
    pub clamp_main_lobe: bool,
}

impl Default for AntennaParams {
    fn default() -> Self {
        Self {
            max_gain_dbi: 20.0,
            half_power_beamwidth_deg: 15.0,
            side_lobe_gain_dbi: None,
            max_attenuation_db: 26.0,
            clamp_main_lobe: false,
        }
    }
}

impl AntennaParams {
    pub fn main_lobe_width_deg(&self) -> f64 {
        2.6 * self.half_power_beamwidth_deg
    }

    pub fn side_lobe_gain(&self) -> f64 {
        self.side_lobe_gain_dbi
            .unwrap_or_else(|| -0.4111 * self.half_power_beamwidth_deg.ln() - 10.579)
    }

    pub fn validate(&self) -> Result<()> {
        let hpbw = self.half_power_beamwidth_deg;
        if !(hpbw > 0.0 && hpbw < 180.0) {
            return Err(invalid(
                "channel.antenna.half_power_beamwidth_deg",
                "must lie in (0, 180)",
            ));
        }
        if !self.max_gain_dbi.is_finite() {
            return Err(invalid("channel.antenna.max_gain_dbi", "must be finite"));
        }
        if !(self.side_lobe_gain() < self.max_gain_dbi) {
            return Err(invalid(
                "channel.antenna.side_lobe_gain_dbi",
                "must be below max_gain_dbi",
            ));
        }
        if !(self.max_attenuation_db >= 0.0) {
            return Err(invalid(
                "channel.antenna.max_attenuation_db",
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Receive antenna assumed for the eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EavesdropperAntenna {
    /// Same pattern as the legitimate nodes, steered at the BS.
    Directional,
    /// 0 dBi in every direction.
    Omni,
}

/// Two-segment alpha-beta model with optional log-normal shadowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossParams {
    pub break_distance_m: f64,
    pub alpha_near: f64,
    pub alpha_far: f64,
    pub beta_near: f64,
    pub beta_far: f64,
    pub shadowing_sigma_db: f64,
    pub shadowing_enabled: bool,
}

impl Default for PathLossParams {
    /// Urban straight-route fit.
    fn default() -> Self {
        Self {
            break_distance_m: 153.3,
            alpha_near: 108.75,
            alpha_far: 42.34,
            beta_near: -1.45,
            beta_far: 1.59,
            shadowing_sigma_db: 5.85,
            shadowing_enabled: false,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.break_distance_m > 0.0 && self.break_distance_m.is_finite()) {
            return Err(invalid(
                &format!("{field}.break_distance_m"),
                "must be positive",
            ));
        }
        if !(self.shadowing_sigma_db >= 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(invalid(
                &format!("{field}.shadowing_sigma_db"),
                "must be non-negative",
            ));
        }
        for (name, v) in [
            ("alpha_near", self.alpha_near),
            ("alpha_far", self.alpha_far),
            ("beta_near", self.beta_near),
            ("beta_far", self.beta_far),
        ] {
            if !v.is_finite() {
                return Err(invalid(&format!("{field}.{name}"), "must be finite"));
            }
        }
        Ok(())
    }
}

/// Per-link-class replacements for the shared path-loss table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossOverrides {
    pub bs_to_mr: Option<PathLossParams>,
    pub bs_to_uav: Option<PathLossParams>,
    pub uav_to_mr: Option<PathLossParams>,
    pub bs_to_eavesdropper: Option<PathLossParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioParams {
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub transmit_power_dbm: f64,
    pub noise_density_dbm_per_mhz: f64,
    pub efficiency: f64,
}

impl RadioParams {
    pub fn f1() -> Self {
        Self {
            carrier_ghz: 28.0,
            bandwidth_mhz: 850.0,
            transmit_power_dbm: DEFAULT_TRANSMIT_POWER_DBM,
            noise_density_dbm_per_mhz: -134.0,
            efficiency: 0.5,
        }
    }

    pub fn f2() -> Self {
        Self {
            carrier_ghz: 60.0,
            bandwidth_mhz: 1500.0,
            ..Self::f1()
        }
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_mhz * 1e6
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.bandwidth_mhz > 0.0 && self.bandwidth_mhz.is_finite()) {
            return Err(invalid(
                &format!("{field}.bandwidth_mhz"),
                "must be positive",
            ));
        }
        if !(self.efficiency > 0.0 && self.efficiency < 1.0) {
            return Err(invalid(
                &format!("{field}.efficiency"),
                "must lie in (0, 1)",
            ));
        }
        if !(self.carrier_ghz > 0.0) {
            return Err(invalid(&format!("{field}.carrier_ghz"), "must be positive"));
        }
        if !self.transmit_power_dbm.is_finite() {
            return Err(invalid(
                &format!("{field}.transmit_power_dbm"),
                "must be finite",
            ));
        }
        if !self.noise_density_dbm_per_mhz.is_finite() {
            return Err(invalid(
                &format!("{field}.noise_density_dbm_per_mhz"),
                "must be finite",
            ));
        }
        Ok(())
    }
}

/// Partial radio settings: omitted keys keep the band's defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RadioPatch {
    carrier_ghz: Option<f64>,
    bandwidth_mhz: Option<f64>,
    transmit_power_dbm: Option<f64>,
    noise_density_dbm_per_mhz: Option<f64>,
    efficiency: Option<f64>,
}

impl RadioPatch {
    fn apply(self, base: RadioParams) -> RadioParams {
        RadioParams {
            carrier_ghz: self.carrier_ghz.unwrap_or(base.carrier_ghz),
            bandwidth_mhz: self.bandwidth_mhz.unwrap_or(base.bandwidth_mhz),
            transmit_power_dbm: self.transmit_power_dbm.unwrap_or(base.transmit_power_dbm),
            noise_density_dbm_per_mhz: self
                .noise_density_dbm_per_mhz
                .unwrap_or(base.noise_density_dbm_per_mhz),
            efficiency: self.efficiency.unwrap_or(base.efficiency),
        }
    }
}

fn f1_radio<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<RadioParams, D::Error> {
    Ok(RadioPatch::deserialize(d)?.apply(RadioParams::f1()))
}

fn f2_radio<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<RadioParams, D::Error> {
    Ok(RadioPatch::deserialize(d)?.apply(RadioParams::f2()))
}

/// Transmit power is not part of the published parameter set. See README.
pub const DEFAULT_TRANSMIT_POWER_DBM: f64 = -40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    pub antenna: AntennaParams,
    pub eavesdropper_antenna: EavesdropperAntenna,
    pub path_loss: PathLossParams,
    pub path_loss_overrides: PathLossOverrides,
    #[serde(deserialize_with = "f1_radio")]
    pub f1: RadioParams,
    #[serde(deserialize_with = "f2_radio")]
    pub f2: RadioParams,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            antenna: AntennaParams::default(),
            eavesdropper_antenna: EavesdropperAntenna::Directional,
            path_loss: PathLossParams::default(),
            path_loss_overrides: PathLossOverrides::default(),
            f1: RadioParams::f1(),
            f2: RadioParams::f2(),
        }
    }
}

impl ChannelParams {
    pub fn radio(&self, band: Band) -> &RadioParams {
        match band {
            Band::F1 => &self.f1,
            Band::F2 => &self.f2,
        }
    }

    /// Path-loss parameters for a transmitter/receiver pair.
    pub fn path_loss_for(&self, tx: NodeId, rx: NodeId) -> &PathLossParams {
        let o = &self.path_loss_overrides;
        let chosen = match (tx, rx) {
            (NodeId::Bs, NodeId::Mr(_)) | (NodeId::Mr(_), NodeId::Bs) => o.bs_to_mr.as_ref(),
            (NodeId::Bs, NodeId::Uav) | (NodeId::Uav, NodeId::Bs) => o.bs_to_uav.as_ref(),
            (NodeId::Uav, NodeId::Mr(_)) | (NodeId::Mr(_), NodeId::Uav) => o.uav_to_mr.as_ref(),
            (NodeId::Bs, NodeId::Eavesdropper) | (NodeId::Eavesdropper, NodeId::Bs) => {
                o.bs_to_eavesdropper.as_ref()
            }
            _ => None,
        };
        chosen.unwrap_or(&self.path_loss)
    }

    pub fn validate(&self) -> Result<()> {
        self.antenna.validate()?;
        self.path_loss.validate("channel.path_loss")?;
        let o = &self.path_loss_overrides;
        for (name, p) in [
            ("bs_to_mr", &o.bs_to_mr),
            ("bs_to_uav", &o.bs_to_uav),
            ("uav_to_mr", &o.uav_to_mr),
            ("bs_to_eavesdropper", &o.bs_to_eavesdropper),
        ] {
            if let Some(p) = p {
                p.validate(&format!("channel.path_loss_overrides.{name}"))?;
            }
        }
        self.f1.validate("channel.f1")?;
        self.f2.validate("channel.f2")?;
        Ok(())
    }
}

/// Super-frame timing: a scheduling phase followed by `slot_count` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameConfig {
    pub slot_count: u64,
    pub slot_duration_us: f64,
    pub scheduling_phase_us: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            slot_count: 8000,
            slot_duration_us: 18.0,
            scheduling_phase_us: 850.0,
        }
    }
}

impl FrameConfig {
    pub fn slot_duration_s(&self) -> f64 {
        self.slot_duration_us * 1e-6
    }

    pub fn scheduling_phase_s(&self) -> f64 {
        self.scheduling_phase_us * 1e-6
    }

    /// `T_s + M * dT`, seconds.
    pub fn frame_duration_s(&self) -> f64 {
        self.scheduling_phase_s() + self.slot_count as f64 * self.slot_duration_s()
    }

    /// Bits a flow must receive within one frame to meet `qos_bps`.
    pub fn demand_bits(&self, qos_bps: f64) -> f64 {
        qos_bps * self.frame_duration_s()
    }

    pub fn validate(&self) -> Result<()> {
        if self.slot_count == 0 {
            return Err(invalid("frame.slot_count", "must be at least 1"));
        }
        if !(self.slot_duration_us > 0.0 && self.slot_duration_us.is_finite()) {
            return Err(invalid("frame.slot_duration_us", "must be positive"));
        }
        if !(self.scheduling_phase_us >= 0.0 && self.scheduling_phase_us.is_finite()) {
            return Err(invalid("frame.scheduling_phase_us", "must be non-negative"));
        }
        Ok(())
    }
}
