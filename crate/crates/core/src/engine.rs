//! Scenario execution, results persistence and resumable runs.
//!
//! A run directory holds `results.csv`, one row per scenario in key order,
//! and `manifest.toml`, which records the input digest and how many rows are
//! committed. Rows are appended in key-ordered batches; the manifest is
//! rewritten after every batch. On resume the digest must match, a torn
//! trailing row is discarded and the remaining rows must be a prefix of the
//! key list.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Inputs;
use crate::damage::{scenario_damage_with, Cents, CostModel, DamageError, LineOverlay, ScenarioDamage};
use crate::firesim::{to_fire_status, FireError, FuelCatalog, SpreadKernel, SpreadParams};
use crate::geodata::{CellIndex, LandscapeStack};
use crate::gridmodel::{generate_ignition_points, GridNetwork};
use crate::scenario::ScenarioKey;
use crate::weather::{burn_conditions, shift_wind, BurnConditions, Season, WeatherError, WeatherStream, WindShift};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const RESULTS_HEADER: &str =
    "branch_id,span_index,season,shift_deg,burned_cells,burned_acres,third_party_cents,grid_cents,total_cents,line_miles";
pub const DEFAULT_BATCH_SIZE: usize = 256;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("scenario {key}: {msg}")]
    Scenario { key: ScenarioKey, msg: String },
    #[error("no ignition point for {0}")]
    UnknownKey(ScenarioKey),
    #[error("ignition point of branch {branch} span {span}: {msg}")]
    Ignition { branch: u32, span: u32, msg: String },
    #[error("weather for {season} +{shift}°: {source}")]
    Weather {
        season: Season,
        shift: WindShift,
        #[source]
        source: WeatherError,
    },
    #[error(transparent)]
    Fire(#[from] FireError),
    #[error(transparent)]
    Damage(#[from] DamageError),
    #[error("parallelism must be at least 1")]
    ZeroParallelism,
    #[error("inputs changed since the checkpoint (manifest digest {found}, current {expected})")]
    DigestMismatch { expected: String, found: String },
    #[error("{path} already holds results; pass resume to continue them")]
    OutputExists { path: PathBuf },
    #[error("{path} line {line}: {msg}")]
    CorruptResults { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> EngineError + '_ {
    move |e| EngineError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

/// Immutable per-run state shared by every scenario worker.
#[derive(Debug)]
pub struct Engine {
    kernel: SpreadKernel,
    overlay: LineOverlay,
    ignitions: HashMap<(u32, u32), CellIndex>,
    conditions: [[BurnConditions; 8]; 4],
    cost_model: CostModel,
    burn_duration_hours: f64,
}

impl Engine {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        landscape: &LandscapeStack,
        catalog: &FuelCatalog,
        network: &GridNetwork,
        seasons: &[WeatherStream; 4],
        params: &SpreadParams,
        cost_model: CostModel,
        tower_spacing: f64,
        burn_window_hours: usize,
    ) -> Result<Self, EngineError> {
        let kernel = SpreadKernel::new(landscape, catalog, params, &HashSet::new())?;
        let geometry = landscape.geometry();
        let overlay = LineOverlay::new(network, geometry)?;

        let mut ignitions = HashMap::new();
        for line in network.lines() {
            for p in generate_ignition_points(line, tower_spacing) {
                let cell = geometry
                    .coord_to_cell(p.location.0, p.location.1)
                    .map_err(|e| EngineError::Ignition {
                        branch: p.branch_id,
                        span: p.span_index,
                        msg: e.to_string(),
                    })?;
                ignitions.insert((p.branch_id, p.span_index), cell);
            }
        }

        let mut conditions = [[BurnConditions {
            effective_temperature: 0.0,
            effective_humidity: 0.0,
            effective_wind_speed: 0.0,
            effective_wind_direction: 0.0,
        }; 8]; 4];
        for season in Season::ALL {
            for shift in WindShift::ALL {
                let stream = shift_wind(&seasons[season.index()], shift);
                conditions[season.index()][shift.index()] = burn_conditions(&stream, burn_window_hours)
                    .map_err(|source| EngineError::Weather { season, shift, source })?;
            }
        }

        Ok(Self {
            kernel,
            overlay,
            ignitions,
            conditions,
            cost_model,
            burn_duration_hours: params.burn_duration_hours,
        })
    }

    pub fn from_inputs(inputs: &Inputs) -> Result<Self, EngineError> {
        Self::new(
            &inputs.landscape,
            &inputs.catalog,
            &inputs.network,
            &inputs.seasons,
            &inputs.params,
            inputs.cost_model,
            inputs.config.study.tower_spacing_miles,
            inputs.config.study.burn_window_hours,
        )
    }

    pub fn conditions(&self, season: Season, shift: WindShift) -> &BurnConditions {
        &self.conditions[season.index()][shift.index()]
    }

    pub fn ignition_cell(&self, branch_id: u32, span_index: u32) -> Option<CellIndex> {
        self.ignitions.get(&(branch_id, span_index)).copied()
    }

    /// Spread, threshold and price one scenario.
    pub fn compute(&self, key: ScenarioKey) -> Result<ScenarioDamage, EngineError> {
        let cell = self
            .ignition_cell(key.branch_id, key.span_index)
            .ok_or(EngineError::UnknownKey(key))?;
        let fail = |msg: String| EngineError::Scenario { key, msg };
        let bound = self.kernel.with_conditions(self.conditions(key.season, key.shift));
        let arrival = bound
            .arrival_times_within(cell, self.burn_duration_hours * 60.0)
            .map_err(|e| fail(e.to_string()))?;
        let status = to_fire_status(&arrival, self.burn_duration_hours);
        scenario_damage_with(&status, &self.overlay, &self.cost_model, key).map_err(|e| fail(e.to_string()))
    }

    /// Computes `keys` on `parallelism` threads; output follows input order.
    pub fn run(&self, keys: &[ScenarioKey], parallelism: usize) -> Result<Vec<ScenarioDamage>, EngineError> {
        if parallelism == 0 {
            return Err(EngineError::ZeroParallelism);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| EngineError::Io {
                path: PathBuf::new(),
                msg: format!("thread pool: {e}"),
            })?;
        let results: Vec<Result<ScenarioDamage, EngineError>> =
            pool.install(|| keys.par_iter().map(|k| self.compute(*k)).collect());
        results.into_iter().collect()
    }
}

/// One results row, newline included.
pub fn format_row(d: &ScenarioDamage) -> String {
    let miles: Vec<String> = d.line_miles.iter().map(|(id, m)| format!("{id}:{m:?}")).collect();
    format!(
        "{},{},{},{},{},{:?},{},{},{},{}\n",
        d.key.branch_id,
        d.key.span_index,
        d.key.season,
        d.key.shift,
        d.burned_cells,
        d.burned_acres,
        d.third_party_cost.0,
        d.grid_cost.0,
        d.total_cost.0,
        miles.join(";")
    )
}

pub fn parse_row(row: &str) -> Result<ScenarioDamage, String> {
    let f: Vec<&str> = row.split(',').collect();
    if f.len() != 10 {
        return Err(format!("expected 10 fields, found {}", f.len()));
    }
    fn num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, String> {
        s.parse().map_err(|_| format!("bad {name} `{s}`"))
    }
    let season = Season::from_name(f[2]).ok_or_else(|| format!("bad season `{}`", f[2]))?;
    let shift = WindShift::new(num::<i64>("shift_deg", f[3])?).map_err(|e| e.to_string())?;
    let burned_acres: f64 = num("burned_acres", f[5])?;
    if !(burned_acres >= 0.0 && burned_acres.is_finite()) {
        return Err(format!("bad burned_acres `{}`", f[5]));
    }
    let third_party_cost = Cents(num("third_party_cents", f[6])?);
    let grid_cost = Cents(num("grid_cents", f[7])?);
    let total_cost = Cents(num("total_cents", f[8])?);
    if third_party_cost.0.checked_add(grid_cost.0) != Some(total_cost.0) {
        return Err("total_cents is not third_party_cents + grid_cents".into());
    }
    let mut line_miles = BTreeMap::new();
    if !f[9].is_empty() {
        for part in f[9].split(';') {
            let (id, m) = part.split_once(':').ok_or_else(|| format!("bad line_miles entry `{part}`"))?;
            let m: f64 = num("line miles", m)?;
            if !(m >= 0.0 && m.is_finite()) {
                return Err(format!("bad line miles `{part}`"));
            }
            if line_miles.insert(num::<u32>("line id", id)?, m).is_some() {
                return Err(format!("line {id} listed twice"));
            }
        }
    }
    Ok(ScenarioDamage {
        key: ScenarioKey {
            branch_id: num("branch_id", f[0])?,
            span_index: num("span_index", f[1])?,
            season,
            shift,
        },
        burned_cells: num("burned_cells", f[4])?,
        burned_acres,
        third_party_cost,
        line_miles,
        grid_cost,
        total_cost,
    })
}

/// Parses results text. A torn final row (no trailing newline) is an error
/// unless `allow_torn_tail`, in which case it is dropped. Also returns the
/// byte length of the accepted prefix.
pub fn parse_results(text: &str, path: &Path, allow_torn_tail: bool) -> Result<(Vec<ScenarioDamage>, usize), EngineError> {
    let corrupt = |line: usize, msg: String| EngineError::CorruptResults {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut pos = 0;
    let mut rows = Vec::new();
    for (i, chunk) in text.split_inclusive('\n').enumerate() {
        let Some(body) = chunk.strip_suffix('\n') else {
            if allow_torn_tail {
                break;
            }
            return Err(corrupt(i + 1, "truncated row".into()));
        };
        if i == 0 {
            if body != RESULTS_HEADER {
                return Err(corrupt(1, "unexpected header".into()));
            }
        } else {
            rows.push(parse_row(body).map_err(|m| corrupt(i + 1, m))?);
        }
        pos += chunk.len();
    }
    if pos == 0 {
        return Err(corrupt(1, "missing header".into()));
    }
    Ok((rows, pos))
}

/// Reads a finished or partial results file.
pub fn load_results(dir: &Path) -> Result<Vec<ScenarioDamage>, EngineError> {
    let path = dir.join(RESULTS_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    Ok(parse_results(&text, &path, false)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub digest: String,
    pub total_keys: usize,
    pub completed: usize,
    pub results: String,
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, EngineError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    toml::from_str(&text).map_err(|e| EngineError::CorruptResults {
        path,
        line: 0,
        msg: e.to_string(),
    })
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), EngineError> {
    let path = dir.join(MANIFEST_FILE);
    let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
    let text = toml::to_string(manifest).map_err(|e| EngineError::Io {
        path: path.clone(),
        msg: e.to_string(),
    })?;
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub resume: bool,
    pub digest: String,
    pub batch_size: usize,
    /// Stop once at least this many scenarios are committed (whole batches).
    pub stop_after: Option<usize>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>, digest: impl Into<String>) -> Self {
        Self {
            out_dir: out_dir.into(),
            parallelism: 1,
            resume: false,
            digest: digest.into(),
            batch_size: DEFAULT_BATCH_SIZE,
            stop_after: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub total: usize,
    /// Committed rows found on disk at start.
    pub resumed: usize,
    pub completed: usize,
}

impl RunSummary {
    pub fn is_complete(&self) -> bool {
        self.completed == self.total
    }
}

/// Executes `keys` into `opts.out_dir`, appending key-ordered batches.
pub fn run_all(engine: &Engine, keys: &[ScenarioKey], opts: &RunOptions) -> Result<RunSummary, EngineError> {
    if opts.parallelism == 0 {
        return Err(EngineError::ZeroParallelism);
    }
    let dir = &opts.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let results_path = dir.join(RESULTS_FILE);
    let manifest_path = dir.join(MANIFEST_FILE);

    let has_manifest = manifest_path.exists();
    let mut done = 0;
    let mut file: File;
    if opts.resume && has_manifest {
        let manifest = read_manifest(dir)?;
        if manifest.digest != opts.digest {
            return Err(EngineError::DigestMismatch {
                expected: opts.digest.clone(),
                found: manifest.digest,
            });
        }
        let text = fs::read_to_string(&results_path).map_err(io_err(&results_path))?;
        let (rows, valid_len) = parse_results(&text, &results_path, true)?;
        if rows.len() > keys.len() {
            return Err(EngineError::CorruptResults {
                path: results_path,
                line: keys.len() + 2,
                msg: "more rows than scenarios".into(),
            });
        }
        if let Some(i) = rows.iter().zip(keys).position(|(r, k)| r.key != *k) {
            return Err(EngineError::CorruptResults {
                path: results_path,
                line: i + 2,
                msg: format!("expected {}, found {}", keys[i], rows[i].key),
            });
        }
        done = rows.len();
        file = OpenOptions::new()
            .write(true)
            .open(&results_path)
            .map_err(io_err(&results_path))?;
        file.set_len(valid_len as u64).map_err(io_err(&results_path))?;
        file = OpenOptions::new()
            .append(true)
            .open(&results_path)
            .map_err(io_err(&results_path))?;
    } else {
        if !opts.resume && (has_manifest || results_path.exists()) {
            return Err(EngineError::OutputExists { path: results_path });
        }
        file = File::create(&results_path).map_err(io_err(&results_path))?;
        file.write_all(format!("{RESULTS_HEADER}\n").as_bytes())
            .map_err(io_err(&results_path))?;
        file.sync_data().map_err(io_err(&results_path))?;
    }
    let resumed = done;

    let mut manifest = RunManifest {
        digest: opts.digest.clone(),
        total_keys: keys.len(),
        completed: done,
        results: RESULTS_FILE.to_string(),
    };
    write_manifest(dir, &manifest)?;

    let batch = opts.batch_size.max(1);
    while done < keys.len() {
        if opts.stop_after.is_some_and(|n| done >= n) {
            break;
        }
        let end = (done + batch).min(keys.len());
        let damages = engine.run(&keys[done..end], opts.parallelism)?;
        let mut buf = String::new();
        for d in &damages {
            buf.push_str(&format_row(d));
        }
        file.write_all(buf.as_bytes()).map_err(io_err(&results_path))?;
        file.sync_data().map_err(io_err(&results_path))?;
        done = end;
        manifest.completed = done;
        write_manifest(dir, &manifest)?;
    }

    Ok(RunSummary {
        total: keys.len(),
        resumed,
        completed: done,
    })
}
