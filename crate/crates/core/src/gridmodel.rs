//! Transmission network geometry and ignition-point placement.
//!
//! Grid files are line-oriented text with two sections:
//!
//! ```text
//! [buses]
//! # id, x, y
//! 1, 2.5, 30.1
//! [branches]
//! # branch_id, from_bus, to_bus, kind, length_miles, ignition_points, polyline
//! 24, 19, 20, line, 4.44, 13, 10.0,5.0;12.1,6.2;14.0,5.5
//! 36, 28, 27, link, , ,
//! ```
//!
//! `ignition_points` and `polyline` may be left empty. An empty polyline means
//! the straight segment between the two buses. Links carry no line exposure
//! and never ignite.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Relative tolerance between declared length and polyline arc length.
pub const LENGTH_TOLERANCE: f64 = 0.005;

pub type Point = (f64, f64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate bus id {0}")]
    DuplicateBus(u32),
    #[error("duplicate branch id {0}")]
    DuplicateBranch(u32),
    #[error("branch {branch}: unknown bus {bus}")]
    UnknownBus { branch: u32, bus: u32 },
    #[error("branch {branch}: declared length {declared} mi but polyline measures {measured} mi")]
    LengthMismatch { branch: u32, declared: f64, measured: f64 },
    #[error("branch {branch}: polyline needs at least 2 vertices, got {vertices}")]
    DegeneratePolyline { branch: u32, vertices: usize },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionLine {
    pub branch_id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    pub polyline: Vec<Point>,
    /// Declared length in miles.
    pub length: f64,
    pub declared_ignition_count: Option<u32>,
}

impl TransmissionLine {
    /// Builds a line, checking vertex count and declared length against the
    /// polyline's arc length.
    pub fn new(
        branch_id: u32,
        from_bus: u32,
        to_bus: u32,
        polyline: Vec<Point>,
        length: f64,
        declared_ignition_count: Option<u32>,
    ) -> Result<Self, GridError> {
        if polyline.len() < 2 {
            return Err(GridError::DegeneratePolyline {
                branch: branch_id,
                vertices: polyline.len(),
            });
        }
        let measured = arc_length(&polyline);
        if !(length > 0.0 && length.is_finite()) || (measured - length).abs() > LENGTH_TOLERANCE * length {
            return Err(GridError::LengthMismatch {
                branch: branch_id,
                declared: length,
                measured,
            });
        }
        Ok(Self {
            branch_id,
            from_bus,
            to_bus,
            polyline,
            length,
            declared_ignition_count,
        })
    }

    pub fn arc_length(&self) -> f64 {
        arc_length(&self.polyline)
    }
}

pub fn arc_length(polyline: &[Point]) -> f64 {
    polyline
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridNetwork {
    buses: BTreeMap<u32, Point>,
    lines: Vec<TransmissionLine>,
    links: Vec<u32>,
}

impl GridNetwork {
    /// Lines are kept sorted by branch id.
    pub fn new(buses: BTreeMap<u32, Point>, mut lines: Vec<TransmissionLine>, mut links: Vec<u32>) -> Result<Self, GridError> {
        let mut seen = BTreeSet::new();
        for id in lines.iter().map(|l| l.branch_id).chain(links.iter().copied()) {
            if !seen.insert(id) {
                return Err(GridError::DuplicateBranch(id));
            }
        }
        lines.sort_by_key(|l| l.branch_id);
        links.sort_unstable();
        Ok(Self { buses, lines, links })
    }

    pub fn buses(&self) -> &BTreeMap<u32, Point> {
        &self.buses
    }

    pub fn lines(&self) -> &[TransmissionLine] {
        &self.lines
    }

    pub fn links(&self) -> &[u32] {
        &self.links
    }

    pub fn line(&self, branch_id: u32) -> Option<&TransmissionLine> {
        self.lines
            .binary_search_by_key(&branch_id, |l| l.branch_id)
            .ok()
            .map(|i| &self.lines[i])
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, what: &str, raw: &str) -> Result<T, GridError> {
    raw.trim().parse().map_err(|_| GridError::Parse {
        line,
        msg: format!("bad {what} `{}`", raw.trim()),
    })
}

fn parse_polyline(line: usize, raw: &str) -> Result<Vec<Point>, GridError> {
    raw.split(';')
        .map(|pair| {
            let (x, y) = pair.split_once(',').ok_or_else(|| GridError::Parse {
                line,
                msg: format!("polyline vertex `{}` is not `x,y`", pair.trim()),
            })?;
            let (x, y): (f64, f64) = (parse_num(line, "x", x)?, parse_num(line, "y", y)?);
            if !(x.is_finite() && y.is_finite()) {
                return Err(GridError::Parse {
                    line,
                    msg: "polyline vertex is not finite".into(),
                });
            }
            Ok((x, y))
        })
        .collect()
}

enum Section {
    None,
    Buses,
    Branches,
}

struct BranchRow {
    line: usize,
    id: u32,
    from: u32,
    to: u32,
    is_link: bool,
    length: Option<f64>,
    ignition: Option<u32>,
    polyline: Option<Vec<Point>>,
}

fn parse_branch(ln: usize, text: &str) -> Result<BranchRow, GridError> {
    let fields: Vec<&str> = text.splitn(7, ',').collect();
    if fields.len() < 5 {
        return Err(GridError::Parse {
            line: ln,
            msg: format!("branch row needs at least 5 fields, found {}", fields.len()),
        });
    }
    let optional = |i: usize| fields.get(i).map(|s| s.trim()).filter(|s| !s.is_empty());
    let is_link = match fields[3].trim() {
        "line" => false,
        "link" => true,
        other => {
            return Err(GridError::Parse {
                line: ln,
                msg: format!("kind must be `line` or `link`, got `{other}`"),
            })
        }
    };
    let length = optional(4).map(|s| parse_num::<f64>(ln, "length_miles", s)).transpose()?;
    let ignition = optional(5).map(|s| parse_num::<u32>(ln, "ignition_points", s)).transpose()?;
    if ignition == Some(0) {
        return Err(GridError::Parse {
            line: ln,
            msg: "ignition_points must be positive".into(),
        });
    }
    let polyline = optional(6).map(|s| parse_polyline(ln, s)).transpose()?;
    Ok(BranchRow {
        line: ln,
        id: parse_num(ln, "branch_id", fields[0])?,
        from: parse_num(ln, "from_bus", fields[1])?,
        to: parse_num(ln, "to_bus", fields[2])?,
        is_link,
        length,
        ignition,
        polyline,
    })
}

/// Parses grid file text into a validated network.
pub fn parse_grid(text: &str) -> Result<GridNetwork, GridError> {
    let mut section = Section::None;
    let mut buses = BTreeMap::new();
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match t {
            "[buses]" => {
                section = Section::Buses;
                continue;
            }
            "[branches]" => {
                section = Section::Branches;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => {
                return Err(GridError::Parse {
                    line: ln,
                    msg: "row outside of a [buses] or [branches] section".into(),
                })
            }
            Section::Buses => {
                let f: Vec<&str> = t.split(',').collect();
                if f.len() != 3 {
                    return Err(GridError::Parse {
                        line: ln,
                        msg: format!("bus row needs 3 fields, found {}", f.len()),
                    });
                }
                let id: u32 = parse_num(ln, "bus id", f[0])?;
                let (x, y): (f64, f64) = (parse_num(ln, "x", f[1])?, parse_num(ln, "y", f[2])?);
                if !(x.is_finite() && y.is_finite()) {
                    return Err(GridError::Parse {
                        line: ln,
                        msg: "bus coordinates must be finite".into(),
                    });
                }
                if buses.insert(id, (x, y)).is_some() {
                    return Err(GridError::DuplicateBus(id));
                }
            }
            Section::Branches => rows.push(parse_branch(ln, t)?),
        }
    }

    let mut lines = Vec::new();
    let mut links = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rows {
        if !seen.insert(row.id) {
            return Err(GridError::DuplicateBranch(row.id));
        }
        let endpoint = |bus: u32| {
            buses
                .get(&bus)
                .copied()
                .ok_or(GridError::UnknownBus { branch: row.id, bus })
        };
        let (a, b) = (endpoint(row.from)?, endpoint(row.to)?);
        if row.is_link {
            links.push(row.id);
            continue;
        }
        let length = row.length.ok_or_else(|| GridError::Parse {
            line: row.line,
            msg: format!("line {} needs length_miles", row.id),
        })?;
        let polyline = row.polyline.unwrap_or_else(|| vec![a, b]);
        lines.push(TransmissionLine::new(row.id, row.from, row.to, polyline, length, row.ignition)?);
    }
    GridNetwork::new(buses, lines, links)
}

pub fn load_grid(path: &Path) -> Result<GridNetwork, GridError> {
    let text = fs::read_to_string(path).map_err(|e| GridError::Io(format!("{}: {e}", path.display())))?;
    parse_grid(&text)
}

/// Declared count, or `max(1, round(length / tower_spacing))`.
pub fn ignition_count(line: &TransmissionLine, tower_spacing: f64) -> u32 {
    match line.declared_ignition_count {
        Some(k) => k,
        None => ((line.length / tower_spacing).round() as u32).max(1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgnitionPoint {
    pub branch_id: u32,
    pub span_index: u32,
    pub location: Point,
    /// Miles from the first polyline vertex.
    pub arc_position: f64,
}

/// Point at arc distance `s` along `polyline`, clamped to its ends.
pub fn point_at(polyline: &[Point], s: f64) -> Point {
    let mut walked = 0.0;
    for w in polyline.windows(2) {
        let seg = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
        if seg > 0.0 && s <= walked + seg {
            let t = ((s - walked) / seg).clamp(0.0, 1.0);
            return (w[0].0 + (w[1].0 - w[0].0) * t, w[0].1 + (w[1].1 - w[0].1) * t);
        }
        walked += seg;
    }
    polyline[polyline.len() - 1]
}

/// Midpoints of `k` equal-arc spans, `k = ignition_count(line)`.
pub fn generate_ignition_points(line: &TransmissionLine, tower_spacing: f64) -> Vec<IgnitionPoint> {
    let k = ignition_count(line, tower_spacing);
    let total = line.arc_length();
    (0..k)
        .map(|i| {
            let s = (i as f64 + 0.5) / k as f64 * total;
            IgnitionPoint {
                branch_id: line.branch_id,
                span_index: i,
                location: point_at(&line.polyline, s),
                arc_position: s,
            }
        })
        .collect()
}

/// Ignition points over all lines; links contribute nothing.
pub fn total_ignition_points(network: &GridNetwork, tower_spacing: f64) -> u64 {
    network
        .lines()
        .iter()
        .map(|l| ignition_count(l, tower_spacing) as u64)
        .sum()
}
