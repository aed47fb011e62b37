//! Plain-text ASCII grid reader and writer.
//!
//! ```text
//! ncols 3
//! nrows 2
//! xllcorner 0.0
//! yllcorner 0.0
//! cellsize 0.075
//! nodata_value -9999
//! 1 2 3
//! 4 5 6
//! ```
//!
//! Six header lines with exact keys (any order, each exactly once), then
//! `nrows` lines of `ncols` numbers, northernmost row first.

use super::{GeoError, GridGeometry, Raster};

const KEYS: [&str; 6] = [
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "cellsize",
    "nodata_value",
];

/// Header of an ASCII grid file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsciiHeader {
    pub geometry: GridGeometry,
    pub nodata: f64,
}

fn parse_err(line: usize, msg: impl Into<String>) -> GeoError {
    GeoError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<AsciiHeader, GeoError> {
    let mut header: [Option<f64>; 6] = [None; 6];
    for _ in 0..KEYS.len() {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, "truncated header"))?;
        let mut parts = line.split_whitespace();
        let key = parts.next().ok_or_else(|| parse_err(ln, "empty header line"))?;
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| parse_err(ln, format!("unknown header key `{key}`")))?;
        if header[slot].is_some() {
            return Err(parse_err(ln, format!("duplicate header key `{key}`")));
        }
        let raw = parts
            .next()
            .ok_or_else(|| parse_err(ln, format!("missing value for `{key}`")))?;
        if parts.next().is_some() {
            return Err(parse_err(ln, "trailing tokens in header line"));
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| parse_err(ln, format!("bad number `{raw}` for `{key}`")))?;
        header[slot] = Some(v);
    }

    // six lines with no duplicate key fill every slot
    let [ncols, nrows, xll, yll, cellsize, nodata] = header.map(|v| v.unwrap());
    let n_cols = as_count(ncols).ok_or_else(|| parse_err(0, "ncols must be a positive integer"))?;
    let n_rows = as_count(nrows).ok_or_else(|| parse_err(0, "nrows must be a positive integer"))?;
    if n_cols.checked_mul(n_rows).is_none() {
        return Err(parse_err(0, "raster dimensions overflow"));
    }
    Ok(AsciiHeader {
        geometry: GridGeometry::new(n_cols, n_rows, cellsize, xll, yll)?,
        nodata,
    })
}

/// Reads only the six header lines.
pub fn parse_ascii_header(text: &str) -> Result<AsciiHeader, GeoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    parse_header(&mut lines)
}

/// Parses an ASCII grid from text.
pub fn parse_ascii_grid(text: &str) -> Result<Raster, GeoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let AsciiHeader { geometry, nodata } = parse_header(&mut lines)?;
    let (n_cols, n_rows) = (geometry.n_cols, geometry.n_rows);

    let mut file_rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if file_rows.len() == n_rows {
            return Err(parse_err(ln, "more data rows than nrows"));
        }
        let mut row = Vec::with_capacity(n_cols.min(4096));
        for tok in line.split_whitespace() {
            if row.len() == n_cols {
                return Err(parse_err(ln, format!("row has more than {n_cols} values")));
            }
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("bad value `{tok}`")))?;
            row.push(v);
        }
        if row.len() != n_cols {
            return Err(parse_err(
                ln,
                format!("row has {} values, expected {n_cols}", row.len()),
            ));
        }
        file_rows.push(row);
    }
    if file_rows.len() != n_rows {
        return Err(GeoError::ValueCount {
            expected: geometry.len(),
            found: file_rows.len() * n_cols,
        });
    }

    // file is north-first; memory is south-first
    let values = file_rows.into_iter().rev().flatten().collect();
    Raster::new(geometry, values, nodata)
}

fn as_count(v: f64) -> Option<usize> {
    (v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64).then_some(v as usize)
}

/// Renders a raster in the ASCII grid format. `parse_ascii_grid` inverts this exactly.
pub fn write_ascii_grid(raster: &Raster) -> String {
    let g = raster.geometry();
    let mut out = format!(
        "ncols {}\nnrows {}\nxllcorner {:?}\nyllcorner {:?}\ncellsize {:?}\nnodata_value {:?}\n",
        g.n_cols, g.n_rows, g.origin_x, g.origin_y, g.cell_size, raster.nodata()
    );
    for row in raster.values().chunks_exact(g.n_cols).rev() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
