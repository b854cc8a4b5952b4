//! Decibel conversions and physical constants.
//!
//! Power arithmetic inside the crate is linear (mW); decibels only appear at
//! the configuration and reporting boundary.

/// Speed of light used for wavelengths and Doppler shifts (m/s).
///
/// The rounded value keeps the reference Doppler figure (7778 Hz at
/// 300 km/h and 28 GHz) reproducible.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}
