//! Humid-air property helpers (Magnus saturation pressure, ideal-gas mixing).

use crate::error::{Error, Result};

/// Ratio of molar masses of water vapour and dry air.
pub const MOLAR_MASS_RATIO: f64 = 0.622;
/// Specific heat of dry air, J/(kg·K).
pub const CP_DRY_AIR: f64 = 1006.0;
/// Specific heat of water vapour, J/(kg·K).
pub const CP_VAPOUR: f64 = 1860.0;
/// Latent heat of vaporisation at 0 °C, J/kg.
pub const LATENT_HEAT: f64 = 2.501e6;
pub const STANDARD_PRESSURE: f64 = 101_325.0;

/// Saturation vapour pressure over water (Pa), Magnus form, T in °C.
pub fn saturation_pressure(t: f64) -> f64 {
    610.94 * (17.625 * t / (t + 243.04)).exp()
}

/// Absolute humidity (kg water vapour per kg dry air) from temperature (°C),
/// relative humidity fraction `r` and total pressure `p` (Pa).
pub fn absolute_humidity(t: f64, r: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("relative humidity {r} outside [0, 1]")));
    }
    let pv = r * saturation_pressure(t);
    if !(p > pv) {
        return Err(Error::InvalidParameter(format!(
            "pressure {p} Pa must exceed the vapour pressure {pv} Pa"
        )));
    }
    Ok(absolute_humidity_unchecked(t, r, p))
}

pub(crate) fn absolute_humidity_unchecked(t: f64, r: f64, p: f64) -> f64 {
    let pv = r * saturation_pressure(t);
    MOLAR_MASS_RATIO * pv / (p - pv)
}

pub fn vapour_pressure(x: f64, p: f64) -> f64 {
    x * p / (MOLAR_MASS_RATIO + x)
}

/// Relative humidity fraction of air at `t` °C holding `x` kg/kg.
pub fn relative_humidity(t: f64, x: f64, p: f64) -> f64 {
    vapour_pressure(x, p) / saturation_pressure(t)
}

/// Specific enthalpy of humid air, J per kg dry air (0 °C dry-air reference).
pub fn enthalpy(t: f64, x: f64) -> f64 {
    CP_DRY_AIR * t + x * (LATENT_HEAT + CP_VAPOUR * t)
}

/// Inverse of [`enthalpy`] for the temperature.
pub fn temperature_from_enthalpy(h: f64, x: f64) -> f64 {
    (h - LATENT_HEAT * x) / (CP_DRY_AIR + CP_VAPOUR * x)
}
