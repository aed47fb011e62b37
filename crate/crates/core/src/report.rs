//! Report files derived from per-scenario results.
//!
//! * `ranking.csv`: `rank,branch_id,weighted_cost_usd`
//! * `matrix_<branch>.csv`: mean total cost per season (rows) and wind shift (columns)
//! * `shift_curves.csv`: expected cost of each line given each wind shift
//! * `season_curves.csv`: expected cost of each line given each season
//! * `ranking.svg`: ranked bar chart

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::damage::{per_line_matrix, DamageError, DamageMatrix, ScenarioDamage};
use crate::gridmodel::{ignition_count, GridNetwork};
use crate::prioritize::{rank, weighted_cost, LineRisk, PrioritizeError, PriorityList};
use crate::scenario::{enumerate_scenarios, ScenarioKey};
use crate::weather::{ScenarioWeights, Season, WindShift};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{} scenario(s) missing from results, first {}", .missing.len(), .missing[0])]
    Incomplete { missing: Vec<ScenarioKey> },
    #[error("results contain {0}, which is not a scenario of this network")]
    UnknownScenario(ScenarioKey),
    #[error(transparent)]
    Damage(#[from] DamageError),
    #[error(transparent)]
    Rank(#[from] PrioritizeError),
    #[error("{path} line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// In branch id order.
    pub matrices: Vec<DamageMatrix>,
    pub ranking: PriorityList,
}

/// Checks `damages` cover exactly the network's scenarios, then aggregates.
pub fn build_report(
    damages: &[ScenarioDamage],
    network: &GridNetwork,
    tower_spacing: f64,
    weights: &ScenarioWeights,
) -> Result<Report, ReportError> {
    let expected = enumerate_scenarios(network, tower_spacing);
    let expected_set: BTreeSet<ScenarioKey> = expected.iter().copied().collect();
    let present: BTreeSet<ScenarioKey> = damages.iter().map(|d| d.key).collect();
    if let Some(extra) = present.difference(&expected_set).next() {
        return Err(ReportError::UnknownScenario(*extra));
    }
    let missing: Vec<ScenarioKey> = expected.into_iter().filter(|k| !present.contains(k)).collect();
    if !missing.is_empty() {
        return Err(ReportError::Incomplete { missing });
    }

    let matrices = network
        .lines()
        .iter()
        .map(|l| per_line_matrix(damages, l.branch_id, ignition_count(l, tower_spacing)))
        .collect::<Result<Vec<_>, _>>()?;
    let ranking = rank_matrices(&matrices, weights)?;
    Ok(Report { matrices, ranking })
}

pub fn rank_matrices(matrices: &[DamageMatrix], weights: &ScenarioWeights) -> Result<PriorityList, PrioritizeError> {
    let risks: Vec<LineRisk> = matrices
        .iter()
        .map(|m| LineRisk {
            branch_id: m.branch_id,
            weighted_cost: weighted_cost(m, weights),
        })
        .collect();
    rank(&risks)
}

pub fn format_ranking_csv(ranking: &PriorityList) -> String {
    let mut out = String::from("rank,branch_id,weighted_cost_usd\n");
    for e in ranking.entries() {
        let _ = writeln!(out, "{},{},{:.2}", e.rank, e.branch_id, e.weighted_cost);
    }
    out
}

fn shift_header(first: &str) -> String {
    let mut h = first.to_string();
    for s in WindShift::ALL {
        let _ = write!(h, ",{s}");
    }
    h.push('\n');
    h
}

pub fn format_matrix_csv(m: &DamageMatrix) -> String {
    let mut out = shift_header("season");
    for season in Season::ALL {
        out.push_str(season.name());
        for v in &m.values[season.index()] {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Parses a matrix file written by [`format_matrix_csv`].
pub fn parse_matrix_csv(text: &str, branch_id: u32) -> Result<DamageMatrix, (usize, String)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == shift_header("season").trim() => {}
        _ => return Err((1, "unexpected header".into())),
    }
    let mut values = [[0.0; 8]; 4];
    let mut filled = [false; 4];
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let season = Season::from_name(f[0]).ok_or((i + 1, format!("unknown season `{}`", f[0])))?;
        if filled[season.index()] {
            return Err((i + 1, format!("{season} listed twice")));
        }
        if f.len() != 9 {
            return Err((i + 1, format!("expected 8 values, found {}", f.len() - 1)));
        }
        for (slot, raw) in values[season.index()].iter_mut().zip(&f[1..]) {
            let v: f64 = raw.parse().map_err(|_| (i + 1, format!("bad value `{raw}`")))?;
            if !(v >= 0.0 && v.is_finite()) {
                return Err((i + 1, format!("bad value `{raw}`")));
            }
            *slot = v;
        }
        filled[season.index()] = true;
    }
    if let Some(s) = Season::ALL.iter().find(|s| !filled[s.index()]) {
        return Err((0, format!("{s} row missing")));
    }
    Ok(DamageMatrix { branch_id, values })
}

/// Reads every `matrix_<branch>.csv` in `dir`, sorted by branch id.
pub fn load_matrices(dir: &Path) -> Result<Vec<DamageMatrix>, ReportError> {
    let io = |path: &Path, e: std::io::Error| ReportError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io(dir, e))? {
        let path = entry.map_err(|e| io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(id) = name
            .strip_prefix("matrix_")
            .and_then(|r| r.strip_suffix(".csv"))
            .and_then(|r| r.parse::<u32>().ok())
        else {
            continue;
        };
        let text = fs::read_to_string(&path).map_err(|e| io(&path, e))?;
        let m = parse_matrix_csv(&text, id).map_err(|(line, msg)| ReportError::Parse {
            path: path.clone(),
            line,
            msg,
        })?;
        out.push(m);
    }
    out.sort_by_key(|m| m.branch_id);
    Ok(out)
}

/// `E[cost | shift]` per line: season-weighted column averages.
pub fn shift_curve(m: &DamageMatrix, weights: &ScenarioWeights) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (d, slot) in out.iter_mut().enumerate() {
        for s in 0..4 {
            *slot += weights.season_prob()[s] * m.values[s][d];
        }
    }
    out
}

/// `E[cost | season]` per line: shift-weighted row averages.
pub fn season_curve(m: &DamageMatrix, weights: &ScenarioWeights) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (s, slot) in out.iter_mut().enumerate() {
        for d in 0..8 {
            *slot += weights.shift_prob()[d] * m.values[s][d];
        }
    }
    out
}

fn format_curves(matrices: &[DamageMatrix], weights: &ScenarioWeights) -> (String, String) {
    let mut shifts = shift_header("branch_id");
    let mut seasons = String::from("branch_id,winter,spring,summer,fall\n");
    for m in matrices {
        let _ = write!(shifts, "{}", m.branch_id);
        for v in shift_curve(m, weights) {
            let _ = write!(shifts, ",{v}");
        }
        shifts.push('\n');
        let _ = write!(seasons, "{}", m.branch_id);
        for v in season_curve(m, weights) {
            let _ = write!(seasons, ",{v}");
        }
        seasons.push('\n');
    }
    (shifts, seasons)
}

/// Horizontal bars, largest first.
pub fn ranking_svg(ranking: &PriorityList) -> String {
    const BAR: f64 = 18.0;
    const GAP: f64 = 6.0;
    const LEFT: f64 = 80.0;
    const PLOT: f64 = 560.0;
    const TOP: f64 = 40.0;
    let n = ranking.len();
    let height = TOP + n as f64 * (BAR + GAP) + 20.0;
    let max = ranking
        .entries()
        .iter()
        .map(|e| e.weighted_cost)
        .fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height}" viewBox="0 0 {w} {height}" font-family="sans-serif" font-size="12">"#,
        w = LEFT + PLOT + 120.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="20" font-size="14">Weighted expected damage by line</text>"#
    );
    for (i, e) in ranking.entries().iter().enumerate() {
        let y = TOP + i as f64 * (BAR + GAP);
        let w = if max > 0.0 { e.weighted_cost / max * PLOT } else { 0.0 };
        let _ = writeln!(
            s,
            r#"<text x="{tx}" y="{ty}" text-anchor="end">Line {id}</text>"#,
            tx = LEFT - 8.0,
            ty = y + BAR - 5.0,
            id = e.branch_id
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{y}" width="{w:.2}" height="{BAR}" fill="#c0392b"><title>rank {r}: ${c:.2}</title></rect>"##,
            r = e.rank,
            c = e.weighted_cost
        );
        let _ = writeln!(
            s,
            r#"<text x="{vx:.2}" y="{ty}">${m:.3}M</text>"#,
            vx = LEFT + w + 6.0,
            ty = y + BAR - 5.0,
            m = e.weighted_cost / 1e6
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes every report file into `out_dir`; returns the paths written.
pub fn write_report(report: &Report, weights: &ScenarioWeights, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir).map_err(|e| ReportError::Io {
        path: out_dir.to_path_buf(),
        msg: e.to_string(),
    })?;
    let mut files = vec![("ranking.csv".to_string(), format_ranking_csv(&report.ranking))];
    for m in &report.matrices {
        files.push((format!("matrix_{}.csv", m.branch_id), format_matrix_csv(m)));
    }
    let (shifts, seasons) = format_curves(&report.matrices, weights);
    files.push(("shift_curves.csv".into(), shifts));
    files.push(("season_curves.csv".into(), seasons));
    files.push(("ranking.svg".into(), ranking_svg(&report.ranking)));

    let mut written = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| ReportError::Io {
            path: path.clone(),
            msg: e.to_string(),
        })?;
        written.push(path);
    }
    Ok(written)
}
