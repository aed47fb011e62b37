use super::GeoError;

/// Acres in one square mile.
pub const ACRES_PER_SQ_MILE: f64 = 640.0;

/// Column/row address of a raster cell. Row 0 is the southernmost row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex {
    pub col: usize,
    pub row: usize,
}

impl CellIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Placement and resolution of a raster in the local planar frame (miles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub n_cols: usize,
    pub n_rows: usize,
    pub cell_size: f64,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl GridGeometry {
    pub fn new(
        n_cols: usize,
        n_rows: usize,
        cell_size: f64,
        origin_x: f64,
        origin_y: f64,
    ) -> Result<Self, GeoError> {
        if n_cols == 0 || n_rows == 0 {
            return Err(GeoError::EmptyRaster);
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GeoError::BadCellSize(cell_size));
        }
        if !(origin_x.is_finite() && origin_y.is_finite()) {
            return Err(GeoError::BadOrigin);
        }
        Ok(Self {
            n_cols,
            n_rows,
            cell_size,
            origin_x,
            origin_y,
        })
    }

    pub fn len(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_x(&self) -> f64 {
        self.origin_x + self.n_cols as f64 * self.cell_size
    }

    pub fn max_y(&self) -> f64 {
        self.origin_y + self.n_rows as f64 * self.cell_size
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.origin_x && x <= self.max_x() && y >= self.origin_y && y <= self.max_y()
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.col < self.n_cols && cell.row < self.n_rows
    }

    #[inline]
    pub fn offset(&self, cell: CellIndex) -> usize {
        cell.row * self.n_cols + cell.col
    }

    #[inline]
    pub fn cell_at(&self, offset: usize) -> CellIndex {
        CellIndex::new(offset % self.n_cols, offset / self.n_cols)
    }

    /// Closed rectangle `(x0, y0, x1, y1)` covered by `cell`.
    pub fn cell_rect(&self, cell: CellIndex) -> (f64, f64, f64, f64) {
        let x0 = self.origin_x + cell.col as f64 * self.cell_size;
        let y0 = self.origin_y + cell.row as f64 * self.cell_size;
        let x1 = self.origin_x + (cell.col + 1) as f64 * self.cell_size;
        let y1 = self.origin_y + (cell.row + 1) as f64 * self.cell_size;
        (x0, y0, x1, y1)
    }

    /// Maps a point to the cell containing it.
    ///
    /// Floor binning: a point on an interior edge belongs to the higher-index
    /// cell, and the top/right boundary of the extent belongs to the last
    /// cell. The result always satisfies `cell_rect(c).0 <= x <= cell_rect(c).2`
    /// (likewise for y) using the same arithmetic as [`GridGeometry::cell_rect`].
    pub fn coord_to_cell(&self, x: f64, y: f64) -> Result<CellIndex, GeoError> {
        if !self.contains_point(x, y) {
            return Err(GeoError::OutOfExtent { x, y });
        }
        let col = bin(x, self.origin_x, self.cell_size, self.n_cols);
        let row = bin(y, self.origin_y, self.cell_size, self.n_rows);
        Ok(CellIndex::new(col, row))
    }
}

fn bin(v: f64, origin: f64, size: f64, n: usize) -> usize {
    let raw = ((v - origin) / size).floor();
    let mut i = if raw < 0.0 { 0 } else { (raw as usize).min(n - 1) };
    // floor of the quotient can disagree with the edge arithmetic by an ulp
    if i > 0 && origin + i as f64 * size > v {
        i -= 1;
    }
    if i + 1 < n && origin + (i + 1) as f64 * size <= v {
        i += 1;
    }
    i
}

/// A single-band raster with row-major values, row 0 at the south edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    geometry: GridGeometry,
    values: Vec<f64>,
    nodata: f64,
}

impl Raster {
    pub fn new(geometry: GridGeometry, values: Vec<f64>, nodata: f64) -> Result<Self, GeoError> {
        if values.len() != geometry.len() {
            return Err(GeoError::ValueCount {
                expected: geometry.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            geometry,
            values,
            nodata,
        })
    }

    pub fn filled(geometry: GridGeometry, value: f64, nodata: f64) -> Self {
        Self {
            geometry,
            values: vec![value; geometry.len()],
            nodata,
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn n_cols(&self) -> usize {
        self.geometry.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.geometry.n_rows
    }

    pub fn cell_size(&self) -> f64 {
        self.geometry.cell_size
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, cell: CellIndex) -> f64 {
        self.values[self.geometry.offset(cell)]
    }

    /// `None` for the nodata sentinel.
    pub fn value(&self, cell: CellIndex) -> Option<f64> {
        let v = self.get(cell);
        (!self.is_nodata(v)).then_some(v)
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata || (v.is_nan() && self.nodata.is_nan())
    }

    pub fn coord_to_cell(&self, x: f64, y: f64) -> Result<CellIndex, GeoError> {
        self.geometry.coord_to_cell(x, y)
    }

    pub fn cell_area_acres(&self) -> f64 {
        cell_area_acres(self.geometry.cell_size)
    }
}

/// Area of one square cell with edge `cell_size` miles, in acres.
pub fn cell_area_acres(cell_size: f64) -> f64 {
    cell_size * cell_size * ACRES_PER_SQ_MILE
}
