//! Engine configuration file and input loading.
//!
//! ```toml
//! [paths]
//! landscape = "landscape"      # directory of eight .asc layers
//! grid = "grid.txt"
//! weather = "weather.csv"
//!
//! [study]
//! year = 2022
//! tower_spacing_miles = 0.3
//! cell_size_miles = 0.075
//! burn_window_hours = 12
//!
//! [spread]
//! k_w = 0.4
//! k_s = 3.0
//! burn_duration_hours = 12.0
//! neighborhood = 16
//!
//! [probabilities]
//! season = [0.1, 0.2, 0.4, 0.3]
//! shift = [0.3, 0.15, 0.1, 0.075, 0.05, 0.075, 0.1, 0.15]
//!
//! [rates]
//! third_party_usd_per_acre = 20000
//! grid_usd_per_mile = 200000
//!
//! [fuel.4]
//! base_ros_mph = 0.8
//! moisture_extinction = 0.2
//! burnable = true
//! ```
//!
//! Every key except `[paths]` has a default. `[fuel.<code>]` entries replace
//! or extend the default catalog. Paths are relative to the config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::damage::{CostModel, DamageError};
use crate::firesim::{FireError, FuelCatalog, FuelModel, MoistureCoefficients, Neighborhood, SpreadParams};
use crate::geodata::{load_landscape, GeoError, LandscapeStack, Layer};
use crate::gridmodel::{load_grid, GridError, GridNetwork};
use crate::weather::{
    build_weights, load_weather, partition_seasons, ScenarioWeights, WeatherError, WeatherStream,
    DEFAULT_SEASON_PROB, DEFAULT_SHIFT_PROB,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("config: {0}")]
    Syntax(String),
    #[error("config: {0}")]
    Invalid(String),
    #[error("landscape: {0}")]
    Landscape(#[from] GeoError),
    #[error("grid: {0}")]
    Grid(#[from] GridError),
    #[error("weather: {0}")]
    Weather(#[from] WeatherError),
    #[error("spread: {0}")]
    Fire(#[from] FireError),
    #[error("rates: {0}")]
    Damage(#[from] DamageError),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub landscape: PathBuf,
    pub grid: PathBuf,
    pub weather: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub year: i32,
    pub tower_spacing_miles: f64,
    pub cell_size_miles: f64,
    pub burn_window_hours: usize,
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            year: 2022,
            tower_spacing_miles: 0.3,
            cell_size_miles: 0.075,
            burn_window_hours: crate::weather::DEFAULT_BURN_WINDOW_HOURS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpreadSection {
    pub k_w: f64,
    pub k_s: f64,
    pub moisture_a: f64,
    pub moisture_b: f64,
    pub moisture_temp_coeff: f64,
    pub burn_duration_hours: f64,
    pub neighborhood: u32,
}

impl Default for SpreadSection {
    fn default() -> Self {
        let p = SpreadParams::default();
        Self {
            k_w: p.k_w,
            k_s: p.k_s,
            moisture_a: p.moisture.a,
            moisture_b: p.moisture.b,
            moisture_temp_coeff: p.moisture.temp_coeff,
            burn_duration_hours: p.burn_duration_hours,
            neighborhood: p.neighborhood.count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbabilitiesSection {
    pub season: [f64; 4],
    pub shift: [f64; 8],
}

impl Default for ProbabilitiesSection {
    fn default() -> Self {
        Self {
            season: DEFAULT_SEASON_PROB,
            shift: DEFAULT_SHIFT_PROB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSection {
    pub third_party_usd_per_acre: f64,
    pub grid_usd_per_mile: f64,
}

impl Default for RatesSection {
    fn default() -> Self {
        let m = CostModel::default();
        Self {
            third_party_usd_per_acre: m.third_party_rate,
            grid_usd_per_mile: m.grid_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelSection {
    #[serde(default)]
    pub base_ros_mph: f64,
    #[serde(default)]
    pub moisture_extinction: f64,
    pub burnable: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub paths: PathsSection,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub spread: SpreadSection,
    #[serde(default)]
    pub probabilities: ProbabilitiesSection,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub fuel: BTreeMap<String, FuelSection>,
    /// Directory the config was read from; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read_text(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let s = &self.study;
        if !(s.tower_spacing_miles > 0.0 && s.tower_spacing_miles.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "study.tower_spacing_miles must be > 0, got {}",
                s.tower_spacing_miles
            )));
        }
        if !(s.cell_size_miles > 0.0 && s.cell_size_miles.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "study.cell_size_miles must be > 0, got {}",
                s.cell_size_miles
            )));
        }
        if s.burn_window_hours == 0 {
            return Err(ConfigError::Invalid("study.burn_window_hours must be >= 1".into()));
        }
        self.spread_params()?.validate()?;
        self.weights()?;
        self.cost_model()?;
        self.catalog()?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn landscape_dir(&self) -> PathBuf {
        self.resolve(&self.paths.landscape)
    }

    pub fn grid_path(&self) -> PathBuf {
        self.resolve(&self.paths.grid)
    }

    pub fn weather_path(&self) -> PathBuf {
        self.resolve(&self.paths.weather)
    }

    pub fn spread_params(&self) -> Result<SpreadParams, ConfigError> {
        let s = &self.spread;
        Ok(SpreadParams {
            k_w: s.k_w,
            k_s: s.k_s,
            moisture: MoistureCoefficients {
                a: s.moisture_a,
                b: s.moisture_b,
                temp_coeff: s.moisture_temp_coeff,
            },
            burn_duration_hours: s.burn_duration_hours,
            neighborhood: Neighborhood::from_count(s.neighborhood)?,
        })
    }

    pub fn weights(&self) -> Result<ScenarioWeights, ConfigError> {
        Ok(build_weights(self.probabilities.season, self.probabilities.shift)?)
    }

    pub fn cost_model(&self) -> Result<CostModel, ConfigError> {
        Ok(CostModel::new(
            self.rates.third_party_usd_per_acre,
            self.rates.grid_usd_per_mile,
        )?)
    }

    pub fn catalog(&self) -> Result<FuelCatalog, ConfigError> {
        let mut models: BTreeMap<i32, FuelModel> = FuelCatalog::default().iter().map(|(c, m)| (c, *m)).collect();
        for (code, f) in &self.fuel {
            let code: i32 = code
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("fuel code `{code}` is not an integer")))?;
            let model = if f.burnable {
                FuelModel::burnable(f.base_ros_mph, f.moisture_extinction)
            } else {
                FuelModel::NONBURNABLE
            };
            models.insert(code, model);
        }
        Ok(FuelCatalog::new(models)?)
    }

    /// Canonical text of every parameter that affects results.
    pub fn canonical_params(&self) -> String {
        let mut out = String::new();
        let s = &self.study;
        out.push_str(&format!(
            "study {} {:?} {:?} {}\n",
            s.year, s.tower_spacing_miles, s.cell_size_miles, s.burn_window_hours
        ));
        let p = &self.spread;
        out.push_str(&format!(
            "spread {:?} {:?} {:?} {:?} {:?} {:?} {}\n",
            p.k_w, p.k_s, p.moisture_a, p.moisture_b, p.moisture_temp_coeff, p.burn_duration_hours, p.neighborhood
        ));
        out.push_str(&format!(
            "rates {:?} {:?}\n",
            self.rates.third_party_usd_per_acre, self.rates.grid_usd_per_mile
        ));
        if let Ok(catalog) = self.catalog() {
            for (code, m) in catalog.iter() {
                out.push_str(&format!(
                    "fuel {code} {:?} {:?} {}\n",
                    m.base_ros_mph, m.moisture_extinction, m.burnable
                ));
            }
        }
        out
    }
}

fn read_text(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, ConfigError> {
    fs::read(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Hex SHA-256 over the canonical parameters and the bytes of every input file.
///
/// Scenario weights are left out: they only enter reporting, not per-scenario
/// results.
pub fn config_digest(cfg: &Config) -> Result<String, ConfigError> {
    let mut h = Sha256::new();
    h.update(cfg.canonical_params().as_bytes());
    let dir = cfg.landscape_dir();
    let mut files: Vec<(String, PathBuf)> = Layer::ALL
        .iter()
        .map(|l| (l.file_name(), dir.join(l.file_name())))
        .collect();
    files.push(("grid".into(), cfg.grid_path()));
    files.push(("weather".into(), cfg.weather_path()));
    for (name, path) in files {
        let bytes = read_bytes(&path)?;
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// Everything a run needs, loaded and cross-checked.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub config: Config,
    pub catalog: FuelCatalog,
    pub landscape: LandscapeStack,
    pub network: GridNetwork,
    pub weather: WeatherStream,
    pub seasons: [WeatherStream; 4],
    pub params: SpreadParams,
    pub weights: ScenarioWeights,
    pub cost_model: CostModel,
    pub digest: String,
}

impl Inputs {
    pub fn load(config: Config) -> Result<Self, ConfigError> {
        let catalog = config.catalog()?;
        let landscape = load_landscape(&config.landscape_dir(), &catalog)?;
        let cs = landscape.geometry().cell_size;
        if (cs - config.study.cell_size_miles).abs() > 1e-9 * config.study.cell_size_miles {
            return Err(ConfigError::Invalid(format!(
                "landscape cellsize {cs} differs from study.cell_size_miles {}",
                config.study.cell_size_miles
            )));
        }
        let network = load_grid(&config.grid_path())?;
        let g = landscape.geometry();
        for line in network.lines() {
            if let Some(p) = line.polyline.iter().find(|p| !g.contains_point(p.0, p.1)) {
                return Err(ConfigError::Invalid(format!(
                    "branch {} vertex ({}, {}) lies outside the landscape",
                    line.branch_id, p.0, p.1
                )));
            }
        }
        let weather = load_weather(&config.weather_path())?;
        let seasons = partition_seasons(&weather, config.study.year)?;
        for s in &seasons {
            if s.len() < config.study.burn_window_hours {
                return Err(WeatherError::ShortStream {
                    len: s.len(),
                    window: config.study.burn_window_hours,
                }
                .into());
            }
        }
        Ok(Self {
            catalog,
            params: config.spread_params()?,
            weights: config.weights()?,
            cost_model: config.cost_model()?,
            digest: config_digest(&config)?,
            landscape,
            network,
            weather,
            seasons,
            config,
        })
    }
}
