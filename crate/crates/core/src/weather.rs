//! Hourly weather streams, seasonal partitions, wind-direction shifts and
//! scenario weights.
//!
//! Wind direction is meteorological: the direction the wind blows *from*,
//! degrees clockwise from north. The fire head travels toward
//! `direction + 180°`.

use std::fmt;
use std::fs;
use std::path::Path;

use chrono::{Datelike, NaiveDateTime, Timelike};
use thiserror::Error;

use crate::compass::Bearing;

pub const WEATHER_HEADER: &str = "timestamp,temperature_c,humidity_pct,wind_speed_mph,wind_dir_deg";
const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeatherError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {field} = {value} is out of range")]
    OutOfRange {
        line: usize,
        field: &'static str,
        value: f64,
    },
    #[error("line {line}: timestamp {timestamp} does not follow the previous record")]
    NonMonotone { line: usize, timestamp: String },
    #[error("{0} has no records for the requested year")]
    EmptySeason(Season),
    #[error("wind shift must be a multiple of 45 in [0, 360), got {0}")]
    BadShift(i64),
    #[error("{name} probabilities must be non-negative and sum to 1, got sum {sum}")]
    BadProbabilities { name: &'static str, sum: f64 },
    #[error("stream has {len} records, shorter than the {window}-hour burn window")]
    ShortStream { len: usize, window: usize },
    #[error("burn window must be at least one hour")]
    ZeroWindow,
    #[error("{0}")]
    Io(String),
}

/// Meteorological season (DJF / MAM / JJA / SON).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Fall,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Fall];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Fall => "fall",
        }
    }

    pub fn from_name(s: &str) -> Option<Season> {
        Season::ALL.into_iter().find(|season| season.name() == s)
    }

    /// Season of a calendar month (1-12).
    pub fn of_month(month: u32) -> Season {
        match month {
            3..=5 => Season::Spring,
            6..=8 => Season::Summer,
            9..=11 => Season::Fall,
            _ => Season::Winter,
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wind-direction shift, a multiple of 45° in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WindShift(u16);

impl WindShift {
    pub const ALL: [WindShift; 8] = [
        WindShift(0),
        WindShift(45),
        WindShift(90),
        WindShift(135),
        WindShift(180),
        WindShift(225),
        WindShift(270),
        WindShift(315),
    ];

    pub fn new(degrees: i64) -> Result<Self, WeatherError> {
        if (0..360).contains(&degrees) && degrees % 45 == 0 {
            Ok(WindShift(degrees as u16))
        } else {
            Err(WeatherError::BadShift(degrees))
        }
    }

    pub fn degrees(self) -> u16 {
        self.0
    }

    pub fn index(self) -> usize {
        (self.0 / 45) as usize
    }
}

impl fmt::Display for WindShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: NaiveDateTime,
    pub temperature: f64,
    pub humidity: f64,
    pub wind_speed: f64,
    pub wind_direction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherStream {
    records: Vec<WeatherRecord>,
    label: String,
}

impl WeatherStream {
    /// Requires strictly increasing timestamps.
    pub fn new(records: Vec<WeatherRecord>, label: impl Into<String>) -> Result<Self, WeatherError> {
        for (i, w) in records.windows(2).enumerate() {
            if w[1].timestamp <= w[0].timestamp {
                return Err(WeatherError::NonMonotone {
                    line: i + 3,
                    timestamp: w[1].timestamp.format(TIMESTAMP_FORMAT).to_string(),
                });
            }
        }
        Ok(Self {
            records,
            label: label.into(),
        })
    }

    pub fn records(&self) -> &[WeatherRecord] {
        &self.records
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn parse_field(line: usize, name: &'static str, raw: &str) -> Result<f64, WeatherError> {
    raw.trim().parse::<f64>().map_err(|_| WeatherError::Malformed {
        line,
        msg: format!("bad {name} `{raw}`"),
    })
}

fn check_range(line: usize, field: &'static str, value: f64, ok: bool) -> Result<(), WeatherError> {
    if ok {
        Ok(())
    } else {
        Err(WeatherError::OutOfRange { line, field, value })
    }
}

/// Parses weather CSV text. Line numbers in errors count the header as line 1.
pub fn parse_weather_csv(text: &str, label: &str) -> Result<WeatherStream, WeatherError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == WEATHER_HEADER => {}
        _ => {
            return Err(WeatherError::Malformed {
                line: 1,
                msg: format!("expected header `{WEATHER_HEADER}`"),
            })
        }
    }

    let mut records: Vec<WeatherRecord> = Vec::new();
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(WeatherError::Malformed {
                line: ln,
                msg: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let ts_raw = fields[0].trim();
        let timestamp = NaiveDateTime::parse_from_str(ts_raw, TIMESTAMP_FORMAT)
            .ok()
            .filter(|t| t.minute() == 0 && ts_raw.len() == 16)
            .ok_or_else(|| WeatherError::Malformed {
                line: ln,
                msg: format!("bad timestamp `{ts_raw}`, expected YYYY-MM-DDTHH:00"),
            })?;
        let temperature = parse_field(ln, "temperature_c", fields[1])?;
        let humidity = parse_field(ln, "humidity_pct", fields[2])?;
        let wind_speed = parse_field(ln, "wind_speed_mph", fields[3])?;
        let wind_direction = parse_field(ln, "wind_dir_deg", fields[4])?;
        check_range(ln, "temperature_c", temperature, temperature.is_finite())?;
        check_range(ln, "humidity_pct", humidity, (0.0..=100.0).contains(&humidity))?;
        check_range(ln, "wind_speed_mph", wind_speed, wind_speed >= 0.0 && wind_speed.is_finite())?;
        check_range(ln, "wind_dir_deg", wind_direction, (0.0..360.0).contains(&wind_direction))?;
        if let Some(prev) = records.last() {
            if timestamp <= prev.timestamp {
                return Err(WeatherError::NonMonotone {
                    line: ln,
                    timestamp: ts_raw.to_string(),
                });
            }
        }
        records.push(WeatherRecord {
            timestamp,
            temperature,
            humidity,
            wind_speed,
            wind_direction,
        });
    }
    WeatherStream::new(records, label)
}

pub fn load_weather(path: &Path) -> Result<WeatherStream, WeatherError> {
    let text = fs::read_to_string(path).map_err(|e| WeatherError::Io(format!("{}: {e}", path.display())))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_weather_csv(&text, &label)
}

/// Splits one season-year out of a stream.
///
/// Spring, summer and fall take March–November of `year`. Winter takes
/// January–February of `year` plus December of `year - 1` when the stream has
/// any, otherwise December of `year`. Records outside that window are ignored.
pub fn partition_seasons(stream: &WeatherStream, year: i32) -> Result<[WeatherStream; 4], WeatherError> {
    let prior_december = stream
        .records
        .iter()
        .any(|r| r.timestamp.year() == year - 1 && r.timestamp.month() == 12);
    let december_year = if prior_december { year - 1 } else { year };

    let mut parts: [Vec<WeatherRecord>; 4] = Default::default();
    for r in &stream.records {
        let (y, m) = (r.timestamp.year(), r.timestamp.month());
        let included = if m == 12 { y == december_year } else { y == year };
        if included {
            parts[Season::of_month(m).index()].push(*r);
        }
    }

    let mut out = Vec::with_capacity(4);
    for (season, records) in Season::ALL.into_iter().zip(parts) {
        if records.is_empty() {
            return Err(WeatherError::EmptySeason(season));
        }
        // prior December precedes January, so each part stays time-ordered
        out.push(WeatherStream {
            records,
            label: format!("{}-{season}", stream.label),
        });
    }
    Ok(out.try_into().expect("four seasons"))
}

/// Rotates every record's wind direction by `shift`.
pub fn shift_wind(stream: &WeatherStream, shift: WindShift) -> WeatherStream {
    let delta = shift.degrees() as f64;
    let records = stream
        .records
        .iter()
        .map(|r| WeatherRecord {
            wind_direction: (r.wind_direction + delta) % 360.0,
            ..*r
        })
        .collect();
    WeatherStream {
        records,
        label: format!("{}+{}", stream.label, shift.degrees()),
    }
}

/// Season × shift probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioWeights {
    season_prob: [f64; 4],
    shift_prob: [f64; 8],
    weights: [[f64; 8]; 4],
}

pub const DEFAULT_SEASON_PROB: [f64; 4] = [0.10, 0.20, 0.40, 0.30];
pub const DEFAULT_SHIFT_PROB: [f64; 8] = [0.30, 0.15, 0.10, 0.075, 0.05, 0.075, 0.10, 0.15];

fn check_probabilities(name: &'static str, p: &[f64]) -> Result<(), WeatherError> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|v| !(*v >= 0.0)) || !((sum - 1.0).abs() <= 1e-9) {
        return Err(WeatherError::BadProbabilities { name, sum });
    }
    Ok(())
}

/// Outer product of season and shift probabilities.
pub fn build_weights(season_prob: [f64; 4], shift_prob: [f64; 8]) -> Result<ScenarioWeights, WeatherError> {
    check_probabilities("season", &season_prob)?;
    check_probabilities("shift", &shift_prob)?;
    let mut weights = [[0.0; 8]; 4];
    for (row, s) in weights.iter_mut().zip(season_prob) {
        for (w, d) in row.iter_mut().zip(shift_prob) {
            *w = s * d;
        }
    }
    Ok(ScenarioWeights {
        season_prob,
        shift_prob,
        weights,
    })
}

impl Default for ScenarioWeights {
    fn default() -> Self {
        build_weights(DEFAULT_SEASON_PROB, DEFAULT_SHIFT_PROB).expect("default probabilities are valid")
    }
}

impl ScenarioWeights {
    pub fn get(&self, season: Season, shift: WindShift) -> f64 {
        self.weights[season.index()][shift.index()]
    }

    pub fn matrix(&self) -> &[[f64; 8]; 4] {
        &self.weights
    }

    pub fn season_prob(&self) -> &[f64; 4] {
        &self.season_prob
    }

    pub fn shift_prob(&self) -> &[f64; 8] {
        &self.shift_prob
    }
}

/// Scalar weather driving one spread run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurnConditions {
    pub effective_temperature: f64,
    pub effective_humidity: f64,
    pub effective_wind_speed: f64,
    pub effective_wind_direction: f64,
}

pub const DEFAULT_BURN_WINDOW_HOURS: usize = 12;

/// Condenses a stream to the worst-case `window`-hour slice.
///
/// The slice with the highest mean wind speed wins (earliest on ties). Within
/// it: hottest temperature, driest humidity, and the vector-mean wind.
pub fn burn_conditions(stream: &WeatherStream, window: usize) -> Result<BurnConditions, WeatherError> {
    if window == 0 {
        return Err(WeatherError::ZeroWindow);
    }
    let records = &stream.records;
    if records.len() < window {
        return Err(WeatherError::ShortStream {
            len: records.len(),
            window,
        });
    }

    // fresh sums per window keep the argmax independent of accumulation drift
    let mut best_start = 0;
    let mut best_sum = f64::NEG_INFINITY;
    for start in 0..=records.len() - window {
        let sum: f64 = records[start..start + window].iter().map(|r| r.wind_speed).sum();
        if sum > best_sum {
            best_sum = sum;
            best_start = start;
        }
    }
    let slice = &records[best_start..best_start + window];

    let n = window as f64;
    let (mut east, mut north) = (0.0, 0.0);
    let mut temperature = f64::NEG_INFINITY;
    let mut humidity = f64::INFINITY;
    for r in slice {
        let b = Bearing::from_degrees(r.wind_direction);
        east += r.wind_speed * b.east();
        north += r.wind_speed * b.north();
        temperature = temperature.max(r.temperature);
        humidity = humidity.min(r.humidity);
    }
    let (east, north) = (east / n, north / n);
    let speed = east.hypot(north);
    let direction = if speed > 0.0 {
        let d = east.atan2(north).to_degrees().rem_euclid(360.0);
        if d >= 360.0 {
            0.0
        } else {
            d
        }
    } else {
        0.0
    };
    Ok(BurnConditions {
        effective_temperature: temperature,
        effective_humidity: humidity,
        effective_wind_speed: speed,
        effective_wind_direction: direction,
    })
}
