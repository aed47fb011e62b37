use std::collections::BTreeMap;

use super::FireError;

/// Spread parameters for one fuel code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuelModel {
    /// Rate of spread at reference moisture, no wind, flat ground (mph).
    pub base_ros_mph: f64,
    /// Moisture fraction at which the fuel stops carrying fire.
    pub moisture_extinction: f64,
    pub burnable: bool,
}

impl FuelModel {
    pub const NONBURNABLE: FuelModel = FuelModel {
        base_ros_mph: 0.0,
        moisture_extinction: 0.0,
        burnable: false,
    };

    pub fn burnable(base_ros_mph: f64, moisture_extinction: f64) -> Self {
        Self {
            base_ros_mph,
            moisture_extinction,
            burnable: true,
        }
    }
}

/// Fuel code → spread parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FuelCatalog {
    models: BTreeMap<i32, FuelModel>,
}

// Thirteen burnable classes (grass → shrub → timber litter → slash) with base
// ROS falling geometrically from 2.0 to 0.05 mph, then the nonburnable block.
const DEFAULT_BURNABLE: [(i32, f64, f64); 13] = [
    (1, 2.000, 0.12),
    (2, 1.471, 0.15),
    (3, 1.081, 0.25),
    (4, 0.795, 0.20),
    (5, 0.585, 0.20),
    (6, 0.430, 0.25),
    (7, 0.316, 0.40),
    (8, 0.233, 0.30),
    (9, 0.171, 0.25),
    (10, 0.126, 0.25),
    (11, 0.092, 0.15),
    (12, 0.068, 0.20),
    (13, 0.050, 0.25),
];

impl Default for FuelCatalog {
    fn default() -> Self {
        let mut models = BTreeMap::new();
        for (code, ros, mx) in DEFAULT_BURNABLE {
            models.insert(code, FuelModel::burnable(ros, mx));
        }
        for code in 91..=99 {
            models.insert(code, FuelModel::NONBURNABLE);
        }
        Self { models }
    }
}

impl FuelCatalog {
    pub fn new(models: BTreeMap<i32, FuelModel>) -> Result<Self, FireError> {
        for (&code, m) in &models {
            if m.burnable {
                if !(m.base_ros_mph.is_finite() && m.base_ros_mph > 0.0) {
                    return Err(FireError::BadFuel {
                        code,
                        msg: format!("base_ros_mph must be > 0, got {}", m.base_ros_mph),
                    });
                }
                if !(m.moisture_extinction > 0.0 && m.moisture_extinction <= 0.4) {
                    return Err(FireError::BadFuel {
                        code,
                        msg: format!(
                            "moisture_extinction must be in (0, 0.4], got {}",
                            m.moisture_extinction
                        ),
                    });
                }
            }
        }
        Ok(Self { models })
    }

    pub fn get(&self, code: i32) -> Option<&FuelModel> {
        self.models.get(&code)
    }

    pub fn contains(&self, code: i32) -> bool {
        self.models.contains_key(&code)
    }

    pub fn is_burnable(&self, code: i32) -> bool {
        self.get(code).is_some_and(|m| m.burnable)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &FuelModel)> {
        self.models.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}
