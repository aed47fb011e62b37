//! Pricing of burned area and burned line mileage.
//!
//! Money is held as whole cents. Per-scenario costs are rounded to cents once
//! per component (per burned cell for area, per line for mileage), so sums over
//! scenarios are exact integers and do not depend on summation order.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use thiserror::Error;

use crate::firesim::FireStatusMatrix;
use crate::geodata::{cell_area_acres, rasterize_polyline, GeoError, GridGeometry};
use crate::gridmodel::{GridNetwork, TransmissionLine};
use crate::scenario::ScenarioKey;
use crate::weather::{Season, WindShift};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DamageError {
    #[error("fire status dimensions do not match the landscape")]
    DimensionMismatch,
    #[error("rate must be non-negative and finite, got {0}")]
    BadRate(f64),
    #[error("branch {branch}: {0}", .source)]
    Overlay {
        branch: u32,
        #[source]
        source: GeoError,
    },
    #[error("branch {branch}: {} scenario(s) missing, first {first}", .count)]
    Missing {
        branch: u32,
        count: usize,
        first: ScenarioKey,
    },
    #[error("duplicate result for {0}")]
    Duplicate(ScenarioKey),
}

/// Whole cents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cents(pub u64);

impl Cents {
    pub const ZERO: Cents = Cents(0);

    /// Rounds to the nearest cent; negative and non-finite inputs give zero.
    pub fn from_dollars(dollars: f64) -> Cents {
        let c = (dollars * 100.0).round();
        if c.is_finite() && c > 0.0 {
            Cents(c as u64)
        } else {
            Cents(0)
        }
    }

    pub fn dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl Add for Cents {
    type Output = Cents;
    fn add(self, rhs: Cents) -> Cents {
        Cents(self.0 + rhs.0)
    }
}

impl Sum for Cents {
    fn sum<I: Iterator<Item = Cents>>(iter: I) -> Cents {
        Cents(iter.map(|c| c.0).sum())
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// $ per burned acre.
    pub third_party_rate: f64,
    /// $ per burned line mile.
    pub grid_rate: f64,
}

impl CostModel {
    pub fn new(third_party_rate: f64, grid_rate: f64) -> Result<Self, DamageError> {
        for r in [third_party_rate, grid_rate] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(DamageError::BadRate(r));
            }
        }
        Ok(Self {
            third_party_rate,
            grid_rate,
        })
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            third_party_rate: 20_000.0,
            grid_rate: 200_000.0,
        }
    }
}

pub fn burned_acres(status: &FireStatusMatrix, cell_size: f64) -> f64 {
    status.burned_count() as f64 * cell_area_acres(cell_size)
}

/// Dollars.
pub fn third_party_cost(acres: f64, model: &CostModel) -> f64 {
    acres * model.third_party_rate
}

/// Proportional attribution: `length · burned line cells / line cells`.
pub fn burned_line_miles(status: &FireStatusMatrix, line: &TransmissionLine) -> Result<f64, DamageError> {
    let geometry = status.geometry();
    let cells = rasterize_polyline(geometry, &line.polyline).map_err(|source| DamageError::Overlay {
        branch: line.branch_id,
        source,
    })?;
    let burned = cells.iter().filter(|c| status.is_burned(**c)).count();
    Ok(attributed_miles(line.length, burned, cells.len()))
}

fn attributed_miles(length: f64, burned: usize, total: usize) -> f64 {
    if burned == 0 {
        0.0
    } else {
        length * burned as f64 / total as f64
    }
}

/// Line cells of every line in a network, rasterized once per landscape.
#[derive(Debug, Clone)]
pub struct LineOverlay {
    geometry: GridGeometry,
    lines: Vec<(u32, f64, Vec<usize>)>,
}

impl LineOverlay {
    pub fn new(network: &GridNetwork, geometry: &GridGeometry) -> Result<Self, DamageError> {
        let lines = network
            .lines()
            .iter()
            .map(|line| {
                let cells = rasterize_polyline(geometry, &line.polyline).map_err(|source| DamageError::Overlay {
                    branch: line.branch_id,
                    source,
                })?;
                Ok((line.branch_id, line.length, cells.iter().map(|c| geometry.offset(*c)).collect()))
            })
            .collect::<Result<_, DamageError>>()?;
        Ok(Self {
            geometry: *geometry,
            lines,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    /// Non-zero burned miles per branch.
    pub fn burned_miles(&self, status: &FireStatusMatrix) -> Result<BTreeMap<u32, f64>, DamageError> {
        if status.geometry() != &self.geometry {
            return Err(DamageError::DimensionMismatch);
        }
        let s = status.status();
        Ok(self
            .lines
            .iter()
            .filter_map(|(id, length, cells)| {
                let burned = cells.iter().filter(|&&i| s[i] == 1).count();
                (burned > 0).then(|| (*id, attributed_miles(*length, burned, cells.len())))
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDamage {
    pub key: ScenarioKey,
    pub burned_cells: u64,
    pub burned_acres: f64,
    pub third_party_cost: Cents,
    /// Only lines with burned mileage appear.
    pub line_miles: BTreeMap<u32, f64>,
    pub grid_cost: Cents,
    pub total_cost: Cents,
}

/// Prices one fire against a prepared overlay.
pub fn scenario_damage_with(
    status: &FireStatusMatrix,
    overlay: &LineOverlay,
    model: &CostModel,
    key: ScenarioKey,
) -> Result<ScenarioDamage, DamageError> {
    let line_miles = overlay.burned_miles(status)?;
    let cell_size = overlay.geometry.cell_size;
    let burned_cells = status.burned_count() as u64;
    let per_cell = Cents::from_dollars(third_party_cost(cell_area_acres(cell_size), model));
    let third_party_cost = Cents(per_cell.0 * burned_cells);
    let grid_cost: Cents = line_miles
        .values()
        .map(|miles| Cents::from_dollars(model.grid_rate * miles))
        .sum();
    Ok(ScenarioDamage {
        key,
        burned_cells,
        burned_acres: burned_acres(status, cell_size),
        third_party_cost,
        line_miles,
        grid_cost,
        total_cost: third_party_cost + grid_cost,
    })
}

pub fn scenario_damage(
    status: &FireStatusMatrix,
    network: &GridNetwork,
    geometry: &GridGeometry,
    model: &CostModel,
    key: ScenarioKey,
) -> Result<ScenarioDamage, DamageError> {
    if status.geometry() != geometry {
        return Err(DamageError::DimensionMismatch);
    }
    scenario_damage_with(status, &LineOverlay::new(network, geometry)?, model, key)
}

/// Mean total cost per season × shift for one line, in dollars.
#[derive(Debug, Clone, PartialEq)]
pub struct DamageMatrix {
    pub branch_id: u32,
    pub values: [[f64; 8]; 4],
}

impl DamageMatrix {
    pub fn get(&self, season: Season, shift: WindShift) -> f64 {
        self.values[season.index()][shift.index()]
    }
}

/// Averages a line's `span_count` ignition points for every season and shift.
///
/// Records of other branches are ignored. Each mean is an exact cent sum
/// divided once.
pub fn per_line_matrix(
    damages: &[ScenarioDamage],
    branch_id: u32,
    span_count: u32,
) -> Result<DamageMatrix, DamageError> {
    let k = span_count as usize;
    let mut seen = vec![false; 32 * k];
    let mut sums = [[0u64; 8]; 4];
    for d in damages.iter().filter(|d| d.key.branch_id == branch_id) {
        let span = d.key.span_index as usize;
        if span >= k {
            continue;
        }
        let (s, w) = (d.key.season.index(), d.key.shift.index());
        let slot = &mut seen[(s * 8 + w) * k + span];
        if *slot {
            return Err(DamageError::Duplicate(d.key));
        }
        *slot = true;
        sums[s][w] += d.total_cost.0;
    }

    let mut missing = Vec::new();
    for season in Season::ALL {
        for shift in WindShift::ALL {
            for span in 0..span_count {
                if !seen[(season.index() * 8 + shift.index()) * k + span as usize] {
                    missing.push(ScenarioKey {
                        branch_id,
                        span_index: span,
                        season,
                        shift,
                    });
                }
            }
        }
    }
    if let Some(first) = missing.iter().min() {
        return Err(DamageError::Missing {
            branch: branch_id,
            count: missing.len(),
            first: *first,
        });
    }

    let mut values = [[0.0; 8]; 4];
    let divisor = span_count as f64 * 100.0;
    for (row, sum_row) in values.iter_mut().zip(&sums) {
        for (v, sum) in row.iter_mut().zip(sum_row) {
            *v = *sum as f64 / divisor;
        }
    }
    Ok(DamageMatrix { branch_id, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn key(branch_id: u32, span: u32, season: Season, shift: WindShift) -> ScenarioKey {
        ScenarioKey {
            branch_id,
            span_index: span,
            season,
            shift,
        }
    }

    fn k0() -> ScenarioKey {
        key(1, 0, Season::Winter, WindShift::ALL[0])
    }

    fn geometry(n: usize, cs: f64) -> GridGeometry {
        GridGeometry::new(n, n, cs, 0.0, 0.0).unwrap()
    }

    fn line(id: u32, poly: Vec<(f64, f64)>, len: f64) -> TransmissionLine {
        TransmissionLine::new(id, 1, 2, poly, len, None).unwrap()
    }

    fn network(lines: Vec<TransmissionLine>) -> GridNetwork {
        GridNetwork::new(BTreeMap::new(), lines, vec![]).unwrap()
    }

    fn status_from(g: GridGeometry, burned: impl IntoIterator<Item = usize>) -> FireStatusMatrix {
        let mut v = vec![0u8; g.len()];
        for i in burned {
            v[i] = 1;
        }
        FireStatusMatrix::new(g, v).unwrap()
    }

    #[test]
    fn acre_arithmetic() {
        let g = geometry(20, 0.075);
        assert_eq!(burned_acres(&FireStatusMatrix::empty(g), 0.075), 0.0);
        assert!((burned_acres(&status_from(g, [3]), 0.075) - 3.6).abs() < 1e-12);
        assert!((burned_acres(&status_from(g, 0..100), 0.075) - 360.0).abs() < 1e-9);
        let m = CostModel::default();
        assert_eq!(third_party_cost(100.0, &m), 2_000_000.0);
        assert_eq!(third_party_cost(0.0, &m), 0.0);
        assert_eq!(Cents::from_dollars(third_party_cost(3.6, &m)), Cents(7_200_000));
    }

    #[test]
    fn line_mile_attribution() {
        // 10 cells along row 0
        let g = GridGeometry::new(10, 2, 0.2, 0.0, 0.0).unwrap();
        let l = line(1, vec![(0.05, 0.1), (1.95, 0.1)], 1.9);
        assert_eq!(burned_line_miles(&FireStatusMatrix::empty(g), &l).unwrap(), 0.0);
        assert_eq!(burned_line_miles(&status_from(g, 0..10), &l).unwrap(), 1.9);
        let two = TransmissionLine { length: 2.0, ..l.clone() };
        assert_eq!(burned_line_miles(&status_from(g, 0..5), &two).unwrap(), 1.0);

        let g = geometry(64, 0.075);
        let l24 = line(24, vec![(0.1, 0.1), (4.54, 0.1)], 4.44);
        assert_eq!(burned_line_miles(&status_from(g, 0..g.len()), &l24).unwrap(), 4.44);
        let outside = line(3, vec![(0.1, 0.1), (9.0, 0.1)], 8.9);
        assert!(matches!(burned_line_miles(&status_from(g, []), &outside), Err(DamageError::Overlay { branch: 3, .. })));
    }

    #[test]
    fn one_cell_and_one_mile() {
        let g = geometry(30, 0.075);
        let net = network(vec![line(1, vec![(0.0, 1.0), (1.0, 1.0)], 1.0)]);
        let m = CostModel::default();
        let empty = scenario_damage(&FireStatusMatrix::empty(g), &net, &g, &m, k0()).unwrap();
        assert_eq!(empty.total_cost, Cents::ZERO);
        assert!(empty.line_miles.is_empty());

        let one = scenario_damage(&status_from(g, [0]), &net, &g, &m, k0()).unwrap();
        assert_eq!(one.third_party_cost, Cents(7_200_000));
        assert_eq!(one.grid_cost, Cents::ZERO);

        let all = scenario_damage(&status_from(g, 0..g.len()), &net, &g, &m, k0()).unwrap();
        assert_eq!(all.grid_cost, Cents(20_000_000));
        assert_eq!(all.total_cost, all.third_party_cost + all.grid_cost);
    }

    #[test]
    fn hundred_acres_plus_one_mile() {
        // cells of exactly one acre
        let cs = (1.0f64 / 640.0).sqrt();
        let g = geometry(40, cs);
        let y = 30.5 * cs;
        let len = 1.0;
        let net = network(vec![line(1, vec![(0.0, y), (len, y)], len)]);
        let overlay = LineOverlay::new(&net, &g).unwrap();
        let row30: Vec<usize> = (0..40).map(|c| 30 * 40 + c).collect();
        let line_cells = row30.iter().filter(|&&i| (i % 40) as f64 * cs <= len).count();
        // 100 burned cells: the whole line plus filler elsewhere
        let mut burned: Vec<usize> = row30[..line_cells].to_vec();
        burned.extend(0..(100 - line_cells));
        let d = scenario_damage_with(&status_from(g, burned), &overlay, &CostModel::default(), k0()).unwrap();
        assert_eq!(d.burned_cells, 100);
        assert_eq!(d.third_party_cost, Cents(200_000_000));
        assert_eq!(d.grid_cost, Cents(20_000_000));
        assert_eq!(d.total_cost.dollars(), 2_200_000.0);
    }

    #[test]
    fn hundred_cells_at_study_resolution() {
        // 0.075 mi cells are 3.6 acres each
        let g = geometry(40, 0.075);
        let y = 10.5 * 0.075;
        let net = network(vec![line(1, vec![(0.5, y), (1.5, y)], 1.0)]);
        let overlay = LineOverlay::new(&net, &g).unwrap();
        let mut burned: Vec<usize> = (6..21).map(|c| 10 * 40 + c).collect();
        burned.extend(0..(100 - burned.len()));
        let d = scenario_damage_with(&status_from(g, burned), &overlay, &CostModel::default(), k0()).unwrap();
        assert_eq!(d.burned_cells, 100);
        assert!((d.burned_acres - 360.0).abs() < 1e-9);
        assert_eq!(d.third_party_cost, Cents(720_000_000));
        assert_eq!(d.grid_cost, Cents(20_000_000));
        assert_eq!(d.total_cost.dollars(), 7_400_000.0);
    }

    #[test]
    fn dimension_mismatch() {
        let net = network(vec![line(1, vec![(0.0, 0.1), (0.5, 0.1)], 0.5)]);
        let overlay = LineOverlay::new(&net, &geometry(10, 0.075)).unwrap();
        let other = FireStatusMatrix::empty(geometry(11, 0.075));
        assert_eq!(
            scenario_damage_with(&other, &overlay, &CostModel::default(), k0()).unwrap_err(),
            DamageError::DimensionMismatch
        );
    }

    fn record(branch: u32, span: u32, season: Season, shift: WindShift, cents: u64) -> ScenarioDamage {
        ScenarioDamage {
            key: key(branch, span, season, shift),
            burned_cells: 0,
            burned_acres: 0.0,
            third_party_cost: Cents(cents),
            line_miles: BTreeMap::new(),
            grid_cost: Cents::ZERO,
            total_cost: Cents(cents),
        }
    }

    fn full_set(branch: u32, k: u32, f: impl Fn(u32, Season, WindShift) -> u64) -> Vec<ScenarioDamage> {
        let mut v = Vec::new();
        for span in 0..k {
            for s in Season::ALL {
                for d in WindShift::ALL {
                    v.push(record(branch, span, s, d, f(span, s, d)));
                }
            }
        }
        v
    }

    #[test]
    fn matrix_means() {
        let m = per_line_matrix(&full_set(24, 13, |_, _, _| 1500), 24, 13).unwrap();
        assert_eq!(m.get(Season::Winter, WindShift::ALL[0]), 15.0);
        let m = per_line_matrix(&full_set(3, 2, |span, _, _| if span == 0 { 1000 } else { 2000 }), 3, 2).unwrap();
        assert!(m.values.iter().flatten().all(|v| *v == 15.0));
    }

    #[test]
    fn matrix_errors() {
        let mut set = full_set(5, 2, |_, _, _| 1);
        let removed = set.remove(40);
        let err = per_line_matrix(&set, 5, 2).unwrap_err();
        assert_eq!(
            err,
            DamageError::Missing {
                branch: 5,
                count: 1,
                first: removed.key
            }
        );
        set.push(removed.clone());
        set.push(removed.clone());
        assert_eq!(per_line_matrix(&set, 5, 2).unwrap_err(), DamageError::Duplicate(removed.key));
    }

    #[test]
    fn cents_display() {
        assert_eq!(Cents(123_456).to_string(), "1234.56");
        assert_eq!(Cents(5).to_string(), "0.05");
        assert_eq!(Cents::from_dollars(-3.0), Cents::ZERO);
    }

    proptest! {
        #[test]
        fn matrix_matches_group_by_oracle(k in 1u32..6, seed in any::<u64>()) {
            let f = |span: u32, s: Season, d: WindShift| {
                seed.wrapping_mul(6364136223846793005)
                    .wrapping_add((span as u64) << 16 | (s.index() as u64) << 8 | d.index() as u64)
                    .rotate_left(17) % 1_000_000_000
            };
            let mut set = full_set(9, k, f);
            set.extend(full_set(10, 1, |_, _, _| 77));
            set.reverse();
            let m = per_line_matrix(&set, 9, k).unwrap();
            let mut groups: HashMap<(usize, usize), Vec<u64>> = HashMap::new();
            for r in set.iter().filter(|r| r.key.branch_id == 9) {
                groups.entry((r.key.season.index(), r.key.shift.index())).or_default().push(r.total_cost.0);
            }
            for ((s, d), v) in groups {
                let mean = v.iter().map(|c| *c as u128).sum::<u128>() as f64 / v.len() as f64 / 100.0;
                prop_assert!((m.values[s][d] - mean).abs() <= 1e-9 * mean.max(1.0));
            }
        }

        #[test]
        fn damage_is_monotone_and_additive(
            a in prop::collection::btree_set(0usize..400, 0..120),
            b in prop::collection::btree_set(0usize..400, 0..120),
        ) {
            let g = geometry(20, 0.075);
            let net = network(vec![
                line(1, vec![(0.1, 0.1), (1.4, 1.4)], 2f64.sqrt() * 1.3),
                line(2, vec![(0.0, 0.8), (1.5, 0.8)], 1.5),
            ]);
            let overlay = LineOverlay::new(&net, &g).unwrap();
            let m = CostModel::default();
            let only_b: Vec<usize> = b.difference(&a).copied().collect();
            let union: Vec<usize> = a.union(&b).copied().collect();
            let da = scenario_damage_with(&status_from(g, a.iter().copied()), &overlay, &m, k0()).unwrap();
            let db = scenario_damage_with(&status_from(g, only_b.iter().copied()), &overlay, &m, k0()).unwrap();
            let du = scenario_damage_with(&status_from(g, union.iter().copied()), &overlay, &m, k0()).unwrap();
            prop_assert!(du.burned_acres >= da.burned_acres);
            prop_assert!(du.total_cost >= da.total_cost);
            for (id, miles) in &da.line_miles {
                prop_assert!(du.line_miles[id] >= *miles);
            }
            prop_assert_eq!(du.third_party_cost, da.third_party_cost + db.third_party_cost);
            // each line's cost is rounded to a cent on its own
            let lines = net.lines().len() as i64;
            prop_assert!((du.grid_cost.0 as i64 - (da.grid_cost.0 + db.grid_cost.0) as i64).abs() <= lines);
            let miles_sum: f64 = da.line_miles.values().chain(db.line_miles.values()).sum();
            let miles_union: f64 = du.line_miles.values().sum();
            prop_assert!((miles_sum - miles_union).abs() < 1e-9);
        }

        #[test]
        fn zero_rates_and_scaling(cells in prop::collection::btree_set(0usize..400, 0..200), rate in 0u32..100_000) {
            let g = geometry(20, 0.075);
            let net = network(vec![line(1, vec![(0.1, 0.1), (1.4, 0.1)], 1.3)]);
            let overlay = LineOverlay::new(&net, &g).unwrap();
            let status = status_from(g, cells.iter().copied());
            let zero = scenario_damage_with(&status, &overlay, &CostModel::new(0.0, 0.0).unwrap(), k0()).unwrap();
            prop_assert_eq!(zero.total_cost, Cents::ZERO);
            let base = CostModel::new(rate as f64, 200_000.0).unwrap();
            let doubled = CostModel::new(2.0 * rate as f64, 200_000.0).unwrap();
            let d1 = scenario_damage_with(&status, &overlay, &base, k0()).unwrap();
            let d2 = scenario_damage_with(&status, &overlay, &doubled, k0()).unwrap();
            prop_assert_eq!(d2.third_party_cost.0, 2 * d1.third_party_cost.0);
            prop_assert_eq!(d2.grid_cost, d1.grid_cost);
        }
    }
}
