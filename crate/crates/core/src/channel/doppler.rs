//! Doppler shift of the line-of-sight path seen by a moving train.

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT;

fn check_speed(speed_mps: f64) -> Result<()> {
    if speed_mps >= 0.0 && speed_mps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("speed must be nonnegative, got {speed_mps}")))
    }
}

/// Shift for a path arriving at `theta_deg` from the direction of travel.
pub fn doppler_shift_hz(speed_mps: f64, carrier_hz: f64, theta_deg: f64) -> Result<f64> {
    Ok(max_doppler_hz(speed_mps, carrier_hz)? * theta_deg.to_radians().cos())
}

pub fn max_doppler_hz(speed_mps: f64, carrier_hz: f64) -> Result<f64> {
    check_speed(speed_mps)?;
    Ok(speed_mps / SPEED_OF_LIGHT * carrier_hz)
}

/// Scales a relative shift in [-1, 1] (as produced by an external estimator)
/// by the maximum shift.
pub fn doppler_from_relative(rel: f64, speed_mps: f64, carrier_hz: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rel) {
        return Err(Error::Domain(format!("relative Doppler shift must lie in [-1, 1], got {rel}")));
    }
    Ok(rel * max_doppler_hz(speed_mps, carrier_hz)?)
}
