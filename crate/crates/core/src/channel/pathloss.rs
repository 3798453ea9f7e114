//! Large-scale attenuation: three-slope COST-Hata for user links, free-space
//! for the BS-IRS hop, and dB/linear conversion of path loss plus shadowing.

use crate::{Error, Result};

/// Three-slope COST-Hata parameters. Break points are in kilometres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Constant term `P0` (dB), positive; the loss is `-P0 - ...`.
    pub p0_db: f64,
    /// First break point (km).
    pub x0_km: f64,
    /// Second break point (km).
    pub x1_km: f64,
    /// Log-normal shadowing standard deviation (dB).
    pub sigma_sd_db: f64,
}

impl Default for PathLossParams {
    /// 1.9 GHz carrier, 15 m BS and 1.65 m UE antennas, break points at
    /// 10 m and 50 m, 8 dB shadowing.
    fn default() -> Self {
        Self {
            p0_db: 140.72,
            x0_km: 0.01,
            x1_km: 0.05,
            sigma_sd_db: 8.0,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p0_db.is_finite() && self.x0_km > 0.0 && self.x0_km < self.x1_km && self.x1_km.is_finite()) {
            return Err(Error::domain(format!(
                "path loss break points must satisfy 0 < x0 < x1 (got x0 = {} km, x1 = {} km)",
                self.x0_km, self.x1_km
            )));
        }
        if !(self.sigma_sd_db >= 0.0 && self.sigma_sd_db.is_finite()) {
            return Err(Error::domain("shadowing standard deviation must be >= 0"));
        }
        Ok(())
    }
}

/// Three-slope COST-Hata path loss in dB (a non-positive gain).
///
/// Slope 35 dB/decade beyond `x1`, 20 dB/decade between the break points,
/// flat below `x0`. The branches meet at both break points.
pub fn cost_hata_path_loss(distance_km: f64, params: &PathLossParams) -> Result<f64> {
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(Error::domain(format!(
            "link distance must be positive, got {distance_km} km"
        )));
    }
    let PathLossParams { p0_db, x0_km, x1_km, .. } = *params;
    let loss = if distance_km > x1_km {
        -p0_db - 35.0 * distance_km.log10()
    } else if distance_km > x0_km {
        -p0_db - 15.0 * x1_km.log10() - 20.0 * distance_km.log10()
    } else {
        -p0_db - 15.0 * x1_km.log10() - 20.0 * x0_km.log10()
    };
    Ok(loss)
}

/// How the BS-IRS large-scale gain `sigma_h^2` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BsIrsGain {
    /// `L0 * x^-alpha` with `x` in metres.
    FreeSpace,
    /// A fixed gain in dB, independent of the BS-IRS distance.
    Fixed { gain_db: f64 },
}

/// BS-IRS link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsIrsLinkParams {
    /// Gain at the 1 m reference distance (dB).
    pub l0_db: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Rician factor (linear).
    pub rician_factor: f64,
    pub gain: BsIrsGain,
}

impl Default for BsIrsLinkParams {
    fn default() -> Self {
        Self {
            l0_db: -30.0,
            alpha: 2.0,
            rician_factor: 5.0,
            gain: BsIrsGain::Fixed { gain_db: 0.0 },
        }
    }
}

impl BsIrsLinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::domain("path-loss exponent must be non-negative"));
        }
        if !(self.rician_factor >= 0.0 && self.rician_factor.is_finite()) {
            return Err(Error::domain("Rician factor must be >= 0"));
        }
        if !self.l0_db.is_finite() {
            return Err(Error::domain("reference gain must be finite"));
        }
        if let BsIrsGain::Fixed { gain_db } = self.gain {
            if !gain_db.is_finite() {
                return Err(Error::domain("fixed BS-IRS gain must be finite"));
            }
        }
        Ok(())
    }

    /// `sigma_h^2` for a BS-IRS separation of `distance_m`, per the configured
    /// gain model.
    pub fn sigma_h2(&self, distance_m: f64) -> Result<f64> {
        match self.gain {
            BsIrsGain::FreeSpace => bs_irs_large_scale(distance_m, self),
            BsIrsGain::Fixed { gain_db } => Ok(db_to_linear(gain_db)),
        }
    }
}

/// Free-space BS-IRS power gain `L0 * x^-alpha` (linear), `x` in metres.
pub fn bs_irs_large_scale(distance_m: f64, params: &BsIrsLinkParams) -> Result<f64> {
    if !(distance_m >= 1.0) || !distance_m.is_finite() {
        return Err(Error::domain(format!(
            "BS-IRS distance must be at least the 1 m reference, got {distance_m} m"
        )));
    }
    Ok(db_to_linear(params.l0_db) * distance_m.powf(-params.alpha))
}

/// `10^((P + S)/10)`: linear variance from path loss and shadowing in dB.
pub fn large_scale_variance(pathloss_db: f64, shadow_db: f64) -> f64 {
    db_to_linear(pathloss_db + shadow_db)
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
