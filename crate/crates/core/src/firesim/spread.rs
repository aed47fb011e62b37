//! Minimum-travel-time fire growth over the raster neighbourhood graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::ros::{fuel_factor, fuel_moisture, slope_factor, wind_factor, CellSite, SpreadParams};
use crate::compass::Bearing;
use super::{FireError, FuelCatalog, FuelModel};
use crate::geodata::{CellIndex, GridGeometry, LandscapeStack};
use crate::weather::BurnConditions;

/// Arrival minutes since ignition; `f64::INFINITY` where the fire never arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalTimeMatrix {
    geometry: GridGeometry,
    minutes: Vec<f64>,
}

impl ArrivalTimeMatrix {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn get(&self, cell: CellIndex) -> f64 {
        self.minutes[self.geometry.offset(cell)]
    }

    pub fn minutes(&self) -> &[f64] {
        &self.minutes
    }
}

/// Binary burned mask: 1 = fire reached the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FireStatusMatrix {
    geometry: GridGeometry,
    status: Vec<u8>,
}

impl FireStatusMatrix {
    pub fn new(geometry: GridGeometry, status: Vec<u8>) -> Result<Self, FireError> {
        if status.len() != geometry.len() {
            return Err(FireError::DimensionMismatch);
        }
        if status.iter().any(|v| *v > 1) {
            return Err(FireError::BadParams("fire status values must be 0 or 1".into()));
        }
        Ok(Self { geometry, status })
    }

    pub fn empty(geometry: GridGeometry) -> Self {
        Self {
            geometry,
            status: vec![0; geometry.len()],
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn status(&self) -> &[u8] {
        &self.status
    }

    pub fn is_burned(&self, cell: CellIndex) -> bool {
        self.status[self.geometry.offset(cell)] == 1
    }

    pub fn set(&mut self, cell: CellIndex, burned: bool) {
        let i = self.geometry.offset(cell);
        self.status[i] = burned as u8;
    }

    pub fn burned_count(&self) -> usize {
        self.status.iter().filter(|v| **v == 1).count()
    }

    pub fn burned_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 1)
            .map(|(i, _)| self.geometry.cell_at(i))
    }
}

/// `1` where `arrival <= burn_duration`, else `0`.
pub fn to_fire_status(arrival: &ArrivalTimeMatrix, burn_duration_hours: f64) -> FireStatusMatrix {
    let limit = burn_duration_hours * 60.0;
    FireStatusMatrix {
        geometry: arrival.geometry,
        status: arrival.minutes.iter().map(|t| (*t <= limit) as u8).collect(),
    }
}

/// Cells a step from the origin passes through on its way to `(dc, dr)`.
///
/// Diagonal steps squeeze between their two orthogonal neighbours, so at
/// least one must be open. Knight steps cut through two cells, both of which
/// must be open.
enum Passage {
    Direct,
    EitherOf((i32, i32), (i32, i32)),
    BothOf((i32, i32), (i32, i32)),
}

fn passage(dc: i32, dr: i32) -> Passage {
    match (dc.abs(), dr.abs()) {
        (1, 1) => Passage::EitherOf((dc, 0), (0, dr)),
        (1, 2) => Passage::BothOf((0, dr.signum()), (dc, dr.signum())),
        (2, 1) => Passage::BothOf((dc.signum(), 0), (dc.signum(), dr)),
        _ => Passage::Direct,
    }
}

/// Weather-independent per-cell data for one landscape.
///
/// Built once per landscape and reused for every scenario: fuel slots,
/// passability (burnable and not a barrier) and the slope factor of every
/// cell in every neighbourhood direction.
#[derive(Debug, Clone)]
pub struct SpreadKernel {
    geometry: GridGeometry,
    params: SpreadParams,
    offsets: Vec<(i32, i32)>,
    distances: Vec<f64>,
    bearings: Vec<Bearing>,
    fuels: Vec<FuelModel>,
    fuel_slot: Vec<u16>,
    passable: Vec<bool>,
    slope_factors: Vec<f64>,
}

const NO_FUEL: u16 = u16::MAX;

impl SpreadKernel {
    pub fn new(
        stack: &LandscapeStack,
        catalog: &FuelCatalog,
        params: &SpreadParams,
        barriers: &HashSet<CellIndex>,
    ) -> Result<Self, FireError> {
        params.validate()?;
        let geometry = *stack.geometry();
        let offsets = params.neighborhood.offsets().to_vec();
        let cs = geometry.cell_size;
        let distances = offsets
            .iter()
            .map(|&(dc, dr)| cs * ((dc * dc + dr * dr) as f64).sqrt())
            .collect();
        let bearings: Vec<Bearing> = offsets.iter().map(|&(dc, dr)| Bearing::from_offset(dc, dr)).collect();

        let fuels: Vec<(i32, FuelModel)> = catalog.iter().map(|(c, m)| (c, *m)).collect();
        if fuels.len() >= NO_FUEL as usize {
            return Err(FireError::BadParams("fuel catalog too large".into()));
        }
        let n = geometry.len();
        let mut fuel_slot = vec![NO_FUEL; n];
        let mut passable = vec![false; n];
        let mut slope_factors = vec![1.0; n * offsets.len()];
        for i in 0..n {
            let cell = geometry.cell_at(i);
            let site = site_at(stack, catalog, cell);
            if let Some(code) = stack.fuel_code(cell) {
                if let Ok(slot) = fuels.binary_search_by_key(&code, |(c, _)| *c) {
                    fuel_slot[i] = slot as u16;
                }
            }
            passable[i] = site.fuel.burnable && !barriers.contains(&cell);
            for (k, b) in bearings.iter().enumerate() {
                slope_factors[i * offsets.len() + k] =
                    slope_factor(params.k_s, site.slope_deg, site.aspect_deg, *b);
            }
        }

        Ok(Self {
            geometry,
            params: *params,
            offsets,
            distances,
            bearings,
            fuels: fuels.into_iter().map(|(_, m)| m).collect(),
            fuel_slot,
            passable,
            slope_factors,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &SpreadParams {
        &self.params
    }

    pub fn is_passable(&self, cell: CellIndex) -> bool {
        self.passable[self.geometry.offset(cell)]
    }

    /// Binds weather to the kernel.
    pub fn with_conditions(&self, conditions: &BurnConditions) -> ScenarioSpread<'_> {
        let moisture = fuel_moisture(conditions, &self.params.moisture);
        let fuel_factors = self.fuels.iter().map(|f| fuel_factor(f, moisture)).collect();
        let head = Bearing::from_degrees(conditions.effective_wind_direction).reversed();
        let wind_factors = self
            .bearings
            .iter()
            .map(|b| wind_factor(self.params.k_w, conditions.effective_wind_speed, head, *b))
            .collect();
        ScenarioSpread {
            kernel: self,
            fuel_factors,
            wind_factors,
        }
    }
}

/// Terrain of one cell; nodata slope reads as flat, unknown fuel as nonburnable.
pub fn site_at(stack: &LandscapeStack, catalog: &FuelCatalog, cell: CellIndex) -> CellSite {
    let fuel = stack
        .fuel_code(cell)
        .and_then(|c| catalog.get(c).copied())
        .unwrap_or(FuelModel::NONBURNABLE);
    CellSite {
        fuel,
        slope_deg: stack.slope().value(cell).unwrap_or(0.0),
        aspect_deg: stack.aspect().value(cell),
    }
}

/// A kernel bound to one set of burn conditions.
pub struct ScenarioSpread<'k> {
    kernel: &'k SpreadKernel,
    fuel_factors: Vec<f64>,
    wind_factors: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    minutes: f64,
    offset: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on time, then on offset
        other
            .minutes
            .total_cmp(&self.minutes)
            .then_with(|| other.offset.cmp(&self.offset))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ScenarioSpread<'_> {
    #[inline]
    fn ros(&self, offset: usize, k: usize) -> f64 {
        let slot = self.kernel.fuel_slot[offset];
        if slot == NO_FUEL {
            return 0.0;
        }
        let stride = self.kernel.offsets.len();
        self.fuel_factors[slot as usize] * self.wind_factors[k] * self.kernel.slope_factors[offset * stride + k]
    }

    fn open(&self, col: i64, row: i64) -> bool {
        let g = &self.kernel.geometry;
        col >= 0
            && row >= 0
            && (col as usize) < g.n_cols
            && (row as usize) < g.n_rows
            && self.kernel.passable[row as usize * g.n_cols + col as usize]
    }

    /// Full arrival-time field from a single ignition cell.
    pub fn arrival_times(&self, ignition: CellIndex) -> Result<ArrivalTimeMatrix, FireError> {
        self.arrival_times_within(ignition, f64::INFINITY)
    }

    /// Arrival field truncated at `limit_minutes`: cells whose arrival exceeds
    /// the limit are reported as unreached. Thresholding at or below the limit
    /// gives the same fire status as the full field.
    pub fn arrival_times_within(
        &self,
        ignition: CellIndex,
        limit_minutes: f64,
    ) -> Result<ArrivalTimeMatrix, FireError> {
        let g = self.kernel.geometry;
        if !g.contains(ignition) {
            return Err(FireError::IgnitionOutOfBounds(ignition));
        }
        let n = g.len();
        let mut minutes = vec![f64::INFINITY; n];
        let mut settled = vec![false; n];
        let start = g.offset(ignition);
        minutes[start] = 0.0;
        if !self.kernel.passable[start] {
            return Ok(ArrivalTimeMatrix { geometry: g, minutes });
        }

        let mut heap = BinaryHeap::new();
        heap.push(Frontier {
            minutes: 0.0,
            offset: start,
        });
        while let Some(Frontier { minutes: t, offset: u }) = heap.pop() {
            if settled[u] {
                continue;
            }
            if t > limit_minutes {
                break;
            }
            settled[u] = true;
            let (uc, ur) = ((u % g.n_cols) as i64, (u / g.n_cols) as i64);
            for (k, &(dc, dr)) in self.kernel.offsets.iter().enumerate() {
                let (vc, vr) = (uc + dc as i64, ur + dr as i64);
                if !self.open(vc, vr) {
                    continue;
                }
                let clear = match passage(dc, dr) {
                    Passage::Direct => true,
                    Passage::EitherOf(a, b) => {
                        self.open(uc + a.0 as i64, ur + a.1 as i64) || self.open(uc + b.0 as i64, ur + b.1 as i64)
                    }
                    Passage::BothOf(a, b) => {
                        self.open(uc + a.0 as i64, ur + a.1 as i64) && self.open(uc + b.0 as i64, ur + b.1 as i64)
                    }
                };
                if !clear {
                    continue;
                }
                let v = vr as usize * g.n_cols + vc as usize;
                if settled[v] {
                    continue;
                }
                let mean = (self.ros(u, k) + self.ros(v, k)) / 2.0;
                if mean <= 0.0 {
                    continue;
                }
                let cand = t + self.kernel.distances[k] / mean * 60.0;
                if cand < minutes[v] {
                    minutes[v] = cand;
                    heap.push(Frontier {
                        minutes: cand,
                        offset: v,
                    });
                }
            }
        }
        for (m, s) in minutes.iter_mut().zip(&settled) {
            if !*s {
                *m = f64::INFINITY;
            }
        }
        minutes[start] = 0.0;
        Ok(ArrivalTimeMatrix { geometry: g, minutes })
    }
}

/// One-shot spread from a single ignition.
pub fn spread(
    stack: &LandscapeStack,
    catalog: &FuelCatalog,
    ignition: CellIndex,
    conditions: &BurnConditions,
    params: &SpreadParams,
    barriers: &HashSet<CellIndex>,
) -> Result<ArrivalTimeMatrix, FireError> {
    SpreadKernel::new(stack, catalog, params, barriers)?
        .with_conditions(conditions)
        .arrival_times(ignition)
}
