use crate::error::{Error, Result};
use crate::scenario::Position3D;

use super::AntennaParams;

/// Gain of a steered directional antenna `angle_deg` off its boresight.
///
/// Inside half the main-lobe width the gain falls off quadratically from the
/// peak; beyond it the pattern is a flat side-lobe floor.
pub fn antenna_gain(angle_deg: f64, p: &AntennaParams) -> Result<f64> {
    if !(0.0..=180.0).contains(&angle_deg) {
        return Err(Error::Domain(format!(
            "off-boresight angle must lie in [0, 180] degrees, got {angle_deg}"
        )));
    }
    if angle_deg <= p.main_lobe_width_deg() / 2.0 {
        let x = 2.0 * angle_deg / p.half_power_beamwidth_deg;
        let g = p.max_gain_dbi - 3.01 * x * x;
        if p.clamp_main_lobe {
            Ok(g.max(p.max_gain_dbi - p.max_attenuation_db))
        } else {
            Ok(g)
        }
    } else {
        Ok(p.side_lobe_gain())
    }
}

/// Angle, in degrees, between the direction `origin -> boresight` and the
/// direction `origin -> other`. Degenerate (zero-length) directions give 0.
pub fn off_boresight_deg(origin: &Position3D, boresight: &Position3D, other: &Position3D) -> f64 {
    let a = boresight.sub(origin);
    let b = other.sub(origin);
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let cos = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}
