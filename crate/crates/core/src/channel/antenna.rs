use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::db_to_linear;

/// Directional antenna with a Gaussian-shaped main lobe and a flat side lobe.
///
/// Gains are in dBi. All values derive from the half-power beamwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub theta_3db_deg: f64,
    /// Boresight gain.
    pub g0_db: f64,
    /// Side-lobe gain.
    pub gsl_db: f64,
    /// Full main-lobe width, 2.6 times the half-power beamwidth.
    pub theta_ml_deg: f64,
}

impl AntennaPattern {
    pub fn new(theta_3db_deg: f64) -> Result<Self> {
        if !(theta_3db_deg > 0.0 && theta_3db_deg <= 180.0) {
            return Err(Error::Domain(format!(
                "half-power beamwidth must lie in (0, 180] degrees, got {theta_3db_deg}"
            )));
        }
        let half = (theta_3db_deg / 2.0).to_radians();
        let g0_db = 10.0 * (1.6162 / half.sin()).powi(2).log10();
        let gsl_db = -0.4111 * theta_3db_deg.ln() - 10.579;
        if g0_db <= gsl_db {
            return Err(Error::Domain(format!(
                "beamwidth {theta_3db_deg} deg gives a main lobe no stronger than the side lobe"
            )));
        }
        Ok(AntennaPattern {
            theta_3db_deg,
            g0_db,
            gsl_db,
            theta_ml_deg: 2.6 * theta_3db_deg,
        })
    }

    /// Gain in dBi at `theta_deg` off boresight.
    pub fn gain_db(&self, theta_deg: f64) -> Result<f64> {
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(Error::Domain(format!(
                "off-boresight angle must lie in [0, 180] degrees, got {theta_deg}"
            )));
        }
        if theta_deg <= self.theta_ml_deg / 2.0 {
            let x = 2.0 * theta_deg / self.theta_3db_deg;
            Ok(self.g0_db - 3.01 * x * x)
        } else {
            Ok(self.gsl_db)
        }
    }

    pub fn gain_linear(&self, theta_deg: f64) -> Result<f64> {
        self.gain_db(theta_deg).map(db_to_linear)
    }
}

pub fn antenna_gain_db(theta_deg: f64, pattern: &AntennaPattern) -> Result<f64> {
    pattern.gain_db(theta_deg)
}
