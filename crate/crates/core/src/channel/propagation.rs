use crate::error::{Error, Result};

use super::{db_to_linear, FrameConfig, PathLossParams, RadioParams};

/// Alpha-beta path loss in dB at distance `d_m`.
///
/// `shadow_db` is added only when shadowing is enabled in `p`.
pub fn path_loss(d_m: f64, p: &PathLossParams, shadow_db: f64) -> Result<f64> {
    if !(d_m > 0.0 && d_m.is_finite()) {
        return Err(Error::Domain(format!(
            "path loss needs a positive distance, got {d_m}"
        )));
    }
    let (alpha, beta) = if d_m <= p.break_distance_m {
        (p.alpha_near, p.beta_near)
    } else {
        (p.alpha_far, p.beta_far)
    };
    let x = if p.shadowing_enabled { shadow_db } else { 0.0 };
    Ok(alpha + 10.0 * beta * d_m.log10() + x)
}

/// Received power in dBm: `G_t + G_r + P_t - PL(d)`.
pub fn received_power_dbm(
    tx_gain_dbi: f64,
    rx_gain_dbi: f64,
    radio: &RadioParams,
    d_m: f64,
    p: &PathLossParams,
    shadow_db: f64,
) -> Result<f64> {
    Ok(tx_gain_dbi + rx_gain_dbi + radio.transmit_power_dbm - path_loss(d_m, p, shadow_db)?)
}

/// Thermal noise over the full band, dBm.
pub fn noise_floor_dbm(radio: &RadioParams) -> f64 {
    radio.noise_density_dbm_per_mhz + 10.0 * radio.bandwidth_mhz.log10()
}

/// `eta * W * log2(1 + S / (N0 W + sum I))` in bits/s.
///
/// `signal_dbm` is the wanted power; `interference_mw` the summed co-band
/// interference in milliwatts.
pub fn shannon_rate(signal_dbm: f64, interference_mw: f64, radio: &RadioParams) -> f64 {
    let noise_mw = db_to_linear(noise_floor_dbm(radio));
    let sinr = db_to_linear(signal_dbm) / (noise_mw + interference_mw);
    radio.efficiency * radio.bandwidth_hz() * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Throughput achieved over one frame from per-slot rates (inactive slots
/// contribute zero). `rates_bps` must not be longer than the frame.
pub fn achieved_throughput(rates_bps: &[f64], frame: &FrameConfig) -> f64 {
    debug_assert!(rates_bps.len() as u64 <= frame.slot_count);
    rates_bps.iter().sum::<f64>() * frame.slot_duration_s() / frame.frame_duration_s()
}

/// Throughput of a link that holds `rate_bps` in every slot of the frame.
pub fn achieved_throughput_const(rate_bps: f64, frame: &FrameConfig) -> f64 {
    rate_bps * frame.slot_count as f64 * frame.slot_duration_s() / frame.frame_duration_s()
}

/// Main-channel minus eavesdropper-channel capacity. May be negative.
pub fn secrecy_capacity(main_bps: f64, eavesdrop_bps: f64) -> f64 {
    main_bps - eavesdrop_bps
}
