//! Fuel moisture and directional rate-of-spread kernel.

use super::{FireError, FuelModel};
use crate::compass::Bearing;
use crate::weather::BurnConditions;

/// Coefficients of the humidity/temperature fuel moisture rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoistureCoefficients {
    pub a: f64,
    pub b: f64,
    /// Drying per °C above 20 °C.
    pub temp_coeff: f64,
}

impl Default for MoistureCoefficients {
    fn default() -> Self {
        Self {
            a: 0.02,
            b: 0.25,
            temp_coeff: 0.001,
        }
    }
}

pub const MIN_MOISTURE: f64 = 0.01;
pub const MAX_MOISTURE: f64 = 0.35;

/// Dead fuel moisture fraction, clamped to `[0.01, 0.35]`.
pub fn fuel_moisture(conditions: &BurnConditions, coeffs: &MoistureCoefficients) -> f64 {
    let h = conditions.effective_humidity;
    let t = conditions.effective_temperature;
    let m = coeffs.a + coeffs.b * h / 100.0 - coeffs.temp_coeff * (t - 20.0).max(0.0);
    m.clamp(MIN_MOISTURE, MAX_MOISTURE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    Eight,
    Sixteen,
}

impl Neighborhood {
    pub fn from_count(n: u32) -> Result<Self, FireError> {
        match n {
            8 => Ok(Neighborhood::Eight),
            16 => Ok(Neighborhood::Sixteen),
            other => Err(FireError::BadParams(format!(
                "neighborhood must be 8 or 16, got {other}"
            ))),
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Neighborhood::Eight => 8,
            Neighborhood::Sixteen => 16,
        }
    }

    /// Step offsets `(dcol, drow)`: orthogonal, diagonal, then knight moves.
    pub fn offsets(self) -> &'static [(i32, i32)] {
        const ALL: [(i32, i32); 16] = [
            (0, 1),
            (1, 0),
            (0, -1),
            (-1, 0),
            (1, 1),
            (1, -1),
            (-1, -1),
            (-1, 1),
            (1, 2),
            (2, 1),
            (2, -1),
            (1, -2),
            (-1, -2),
            (-2, -1),
            (-2, 1),
            (-1, 2),
        ];
        match self {
            Neighborhood::Eight => &ALL[..8],
            Neighborhood::Sixteen => &ALL[..],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadParams {
    /// Wind amplification per mph of effective wind.
    pub k_w: f64,
    /// Slope amplification per unit of slope gradient.
    pub k_s: f64,
    pub moisture: MoistureCoefficients,
    pub burn_duration_hours: f64,
    pub neighborhood: Neighborhood,
}

impl Default for SpreadParams {
    fn default() -> Self {
        Self {
            k_w: 0.4,
            k_s: 3.0,
            moisture: MoistureCoefficients::default(),
            burn_duration_hours: 12.0,
            neighborhood: Neighborhood::Sixteen,
        }
    }
}

impl SpreadParams {
    pub fn validate(&self) -> Result<(), FireError> {
        if !(self.k_w >= 0.0 && self.k_w.is_finite()) {
            return Err(FireError::BadParams(format!("k_w must be >= 0, got {}", self.k_w)));
        }
        if !(self.k_s >= 0.0 && self.k_s.is_finite()) {
            return Err(FireError::BadParams(format!("k_s must be >= 0, got {}", self.k_s)));
        }
        if !(self.burn_duration_hours > 0.0) {
            return Err(FireError::BadParams(format!(
                "burn_duration_hours must be > 0, got {}",
                self.burn_duration_hours
            )));
        }
        Ok(())
    }
}

/// Terrain values of one cell as seen by the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSite {
    pub fuel: FuelModel,
    /// Degrees; 0 when unknown.
    pub slope_deg: f64,
    /// Direction the slope faces, degrees from north; `None` when flat/unknown.
    pub aspect_deg: Option<f64>,
}

/// `base_ros · f_m`, zero for nonburnable fuel or moisture at or above extinction.
#[inline]
pub fn fuel_factor(fuel: &FuelModel, moisture: f64) -> f64 {
    if !fuel.burnable || moisture >= fuel.moisture_extinction {
        return 0.0;
    }
    let dry = (1.0 - moisture / fuel.moisture_extinction).max(0.0);
    fuel.base_ros_mph * (dry * dry)
}

/// `1 + k_w · U · max(0, cos(θ − θ_head))`.
#[inline]
pub fn wind_factor(k_w: f64, wind_speed: f64, head: Bearing, travel: Bearing) -> f64 {
    1.0 + k_w * wind_speed * travel.cos_to(head).max(0.0)
}

/// Unit vector pointing upslope, or `None` on flat/unknown ground.
pub fn upslope(slope_deg: f64, aspect_deg: Option<f64>) -> Option<Bearing> {
    match aspect_deg {
        Some(a) if slope_deg > 0.0 => Some(Bearing::from_degrees(a).reversed()),
        _ => None,
    }
}

/// `1 + k_s · tan(slope) · max(0, cos(θ − θ_upslope))`.
#[inline]
pub fn slope_factor(k_s: f64, slope_deg: f64, aspect_deg: Option<f64>, travel: Bearing) -> f64 {
    match upslope(slope_deg, aspect_deg) {
        Some(up) => 1.0 + k_s * slope_deg.to_radians().tan() * travel.cos_to(up).max(0.0),
        None => 1.0,
    }
}

/// Rate of spread (mph) from `site` in direction `travel`.
pub fn directional_ros(
    site: &CellSite,
    conditions: &BurnConditions,
    moisture: f64,
    travel: Bearing,
    params: &SpreadParams,
) -> f64 {
    let ff = fuel_factor(&site.fuel, moisture);
    if ff == 0.0 {
        return 0.0;
    }
    let head = Bearing::from_degrees(conditions.effective_wind_direction).reversed();
    let fw = wind_factor(params.k_w, conditions.effective_wind_speed, head, travel);
    let fs = slope_factor(params.k_s, site.slope_deg, site.aspect_deg, travel);
    ff * fw * fs
}
