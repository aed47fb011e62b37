//! Supercover polyline rasterization.
//!
//! A cell is emitted when its closed rectangle intersects the polyline, so
//! cells touched only at a corner are included. Cells are ordered by the
//! parameter at which the polyline first enters them, and each cell appears
//! once.

use std::collections::HashSet;

use super::{CellIndex, GeoError, GridGeometry};

/// Entry parameter `t ∈ [0, 1]` at which segment `a → b` first touches the
/// closed rectangle, or `None` when they are disjoint.
fn clip_entry(a: (f64, f64), b: (f64, f64), rect: (f64, f64, f64, f64)) -> Option<f64> {
    let (x0, y0, x1, y1) = rect;
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let p = [-dx, dx, -dy, dy];
    let q = [a.0 - x0, x1 - a.0, a.1 - y0, y1 - a.1];
    let mut t_in = 0.0f64;
    let mut t_out = 1.0f64;
    for (p, q) in p.into_iter().zip(q) {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t_in = t_in.max(t);
            } else {
                t_out = t_out.min(t);
            }
        }
        if t_in > t_out {
            return None;
        }
    }
    Some(t_in)
}

fn segment_cells(geom: &GridGeometry, a: (f64, f64), b: (f64, f64), out: &mut Vec<(f64, CellIndex)>) {
    let cs = geom.cell_size;
    let span = |v: f64, origin: f64, n: usize| -> usize {
        let raw = ((v - origin) / cs).floor();
        if raw < 0.0 {
            0
        } else {
            (raw as usize).min(n - 1)
        }
    };
    let (xmin, xmax) = (a.0.min(b.0), a.0.max(b.0));
    let c_lo = span(xmin, geom.origin_x, geom.n_cols).saturating_sub(1);
    let c_hi = (span(xmax, geom.origin_x, geom.n_cols) + 1).min(geom.n_cols - 1);
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;

    for col in c_lo..=c_hi {
        let sx0 = geom.origin_x + col as f64 * cs;
        let sx1 = geom.origin_x + (col + 1) as f64 * cs;
        // y-range of the segment inside this column strip
        let (ylo, yhi) = if dx == 0.0 {
            if a.0 < sx0 || a.0 > sx1 {
                continue;
            }
            (a.1.min(b.1), a.1.max(b.1))
        } else {
            let ta = ((sx0 - a.0) / dx).clamp(0.0, 1.0);
            let tb = ((sx1 - a.0) / dx).clamp(0.0, 1.0);
            let (t0, t1) = (ta.min(tb), ta.max(tb));
            let ya = a.1 + t0 * dy;
            let yb = a.1 + t1 * dy;
            (ya.min(yb), ya.max(yb))
        };
        let r_lo = span(ylo, geom.origin_y, geom.n_rows).saturating_sub(1);
        let r_hi = (span(yhi, geom.origin_y, geom.n_rows) + 1).min(geom.n_rows - 1);
        for row in r_lo..=r_hi {
            let cell = CellIndex::new(col, row);
            if let Some(t) = clip_entry(a, b, geom.cell_rect(cell)) {
                out.push((t, cell));
            }
        }
    }
}

/// Every cell whose closed rectangle the polyline touches, in traversal order.
pub fn rasterize_polyline(
    geom: &GridGeometry,
    polyline: &[(f64, f64)],
) -> Result<Vec<CellIndex>, GeoError> {
    if polyline.len() < 2 {
        return Err(GeoError::DegeneratePolyline(polyline.len()));
    }
    for &(x, y) in polyline {
        if !geom.contains_point(x, y) {
            return Err(GeoError::OutOfExtent { x, y });
        }
    }

    let mut seen = HashSet::new();
    let mut ordered = Vec::new();
    let mut hits = Vec::new();
    for seg in polyline.windows(2) {
        hits.clear();
        segment_cells(geom, seg[0], seg[1], &mut hits);
        hits.sort_by(|(ta, ca), (tb, cb)| ta.total_cmp(tb).then(ca.cmp(cb)));
        for &(_, cell) in &hits {
            if seen.insert(cell) {
                ordered.push(cell);
            }
        }
    }
    Ok(ordered)
}
