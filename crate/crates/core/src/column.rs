//! Free/occupied range extraction per column, the navigable-height filter
//! and the height map.

use rayon::prelude::*;

use crate::grid::{Grid2, GridGeometry};
use crate::scalar::Scalar;
use crate::voxel::{ColumnView, Run, VoxelMap, VoxelState};

/// Closed vertical interval `[low, high]` in world meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightRange<T> {
    pub low: T,
    pub high: T,
}

impl<T: Scalar> HeightRange<T> {
    pub fn new(low: T, high: T) -> Self {
        debug_assert!(high > low, "empty height range");
        Self { low, high }
    }

    pub fn length(&self) -> T {
        self.high - self.low
    }
}

/// Free and occupied ranges of one column, each list ascending and
/// separated by at least one voxel of another state.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnRanges<T> {
    pub free: Vec<HeightRange<T>>,
    pub occupied: Vec<HeightRange<T>>,
}

impl<T> Default for ColumnRanges<T> {
    fn default() -> Self {
        Self {
            free: Vec::new(),
            occupied: Vec::new(),
        }
    }
}

/// Floor and ceiling of the navigable free space above one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightCell<T> {
    pub floor: T,
    pub ceiling: T,
}

impl<T: Scalar> HeightCell<T> {
    pub fn span(&self) -> T {
        self.ceiling - self.floor
    }

    pub fn as_range(&self) -> HeightRange<T> {
        HeightRange {
            low: self.floor,
            high: self.ceiling,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap<T> {
    geometry: GridGeometry<T>,
    cells: Grid2<Option<HeightCell<T>>>,
}

impl<T: Scalar> HeightMap<T> {
    pub fn new(geometry: GridGeometry<T>, cells: Grid2<Option<HeightCell<T>>>) -> Self {
        assert_eq!(
            cells.dims(),
            (geometry.m, geometry.n),
            "grid/geometry mismatch"
        );
        Self { geometry, cells }
    }

    pub fn empty(geometry: GridGeometry<T>) -> Self {
        let cells = Grid2::filled(geometry.m, geometry.n, None);
        Self { geometry, cells }
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        &self.geometry
    }

    pub fn dims(&self) -> (usize, usize) {
        self.cells.dims()
    }

    pub fn get(&self, m: usize, n: usize) -> Option<&HeightCell<T>> {
        self.cells.get(m, n).as_ref()
    }

    pub fn get_signed(&self, m: i64, n: i64) -> Option<&HeightCell<T>> {
        self.cells.get_signed(m, n).and_then(Option::as_ref)
    }

    pub fn set(&mut self, m: usize, n: usize, cell: Option<HeightCell<T>>) {
        self.cells.set(m, n, cell);
    }

    pub fn cells(&self) -> &Grid2<Option<HeightCell<T>>> {
        &self.cells
    }

    pub fn present_count(&self) -> usize {
        self.cells.as_slice().iter().filter(|c| c.is_some()).count()
    }
}

fn push_range<T: Scalar>(list: &mut Vec<HeightRange<T>>, run: &Run, res: T, origin_z: T) {
    let low = origin_z + T::from_index(run.start as usize) * res;
    let high = origin_z + T::from_index(run.end() as usize) * res;
    list.push(HeightRange { low, high });
}

/// Ranges from ascending, non-overlapping runs. Adjacent runs of the same
/// state are merged first so non-canonical input still yields maximal ranges.
pub(crate) fn ranges_from_runs<T: Scalar>(runs: &[Run], res: T, origin_z: T) -> ColumnRanges<T> {
    let mut out = ColumnRanges::default();
    let mut i = 0;
    while i < runs.len() {
        let mut run = runs[i];
        while i + 1 < runs.len() && runs[i + 1].start == run.end() && runs[i + 1].state == run.state
        {
            run.len += runs[i + 1].len;
            i += 1;
        }
        match run.state {
            VoxelState::Free => push_range(&mut out.free, &run, res, origin_z),
            VoxelState::Occupied => push_range(&mut out.occupied, &run, res, origin_z),
            VoxelState::Unknown => {}
        }
        i += 1;
    }
    out
}

/// Converts a column view into free and occupied ranges in world meters.
///
/// A run starting at layer `z0` with length `len` maps to
/// `[origin_z + z0 * res, origin_z + (z0 + len) * res]`. Unknown runs produce
/// nothing, so unknown gaps split ranges.
pub fn extract_ranges<T: Scalar>(col: &ColumnView, res: T, origin_z: T) -> ColumnRanges<T> {
    ranges_from_runs(&col.runs, res, origin_z)
}

/// True when `range` is at least `min_height` tall.
///
/// The comparison allows a few ulps of the operands so that a range spanning
/// exactly `min_height` worth of voxels is kept even when `high - low` rounds
/// down.
pub fn tall_enough<T: Scalar>(range: &HeightRange<T>, min_height: T) -> bool {
    let scale = range.low.abs().max(range.high.abs()).max(min_height.abs());
    let slack = T::lit(4.0) * T::epsilon() * scale;
    range.length() + slack >= min_height
}

/// Drops free ranges shorter than `r_max_z`. Occupied ranges pass through.
pub fn filter_free_ranges<T: Scalar>(mut ranges: ColumnRanges<T>, r_max_z: T) -> ColumnRanges<T> {
    ranges.free.retain(|f| tall_enough(f, r_max_z));
    ranges
}

/// Floor is the bottom of the first free range, ceiling the top of the last.
pub fn height_from_ranges<T: Scalar>(ranges: &ColumnRanges<T>) -> Option<HeightCell<T>> {
    let first = ranges.free.first()?;
    let last = ranges.free.last()?;
    Some(HeightCell {
        floor: first.low,
        ceiling: last.high,
    })
}

/// Filtered ranges and height cell of a single column.
pub fn convert_column<T: Scalar>(
    map: &VoxelMap<T>,
    m: u32,
    n: u32,
    r_max_z: T,
) -> (ColumnRanges<T>, Option<HeightCell<T>>) {
    let raw = ranges_from_runs(map.known_runs(m, n), map.resolution(), map.origin()[2]);
    let filtered = filter_free_ranges(raw, r_max_z);
    let height = height_from_ranges(&filtered);
    (filtered, height)
}

/// Runs the column stage over the whole map.
pub fn build_height_map<T: Scalar>(
    map: &VoxelMap<T>,
    r_max_z: T,
) -> (HeightMap<T>, Grid2<ColumnRanges<T>>) {
    let geometry = map.geometry();
    let n = geometry.n;
    let per_cell: Vec<_> = (0..geometry.cell_count())
        .into_par_iter()
        .map(|idx| convert_column(map, (idx / n) as u32, (idx % n) as u32, r_max_z))
        .collect();
    let (ranges, heights): (Vec<_>, Vec<_>) = per_cell.into_iter().unzip();
    (
        HeightMap::new(geometry, Grid2::from_vec(geometry.m, n, heights)),
        Grid2::from_vec(geometry.m, n, ranges),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use VoxelState::*;

    fn view(runs: &[(u32, u32, VoxelState)]) -> ColumnView {
        ColumnView {
            m: 0,
            n: 0,
            runs: runs.iter().map(|&(s, l, st)| Run::new(s, l, st)).collect(),
        }
    }

    fn r(low: f64, high: f64) -> HeightRange<f64> {
        HeightRange { low, high }
    }

    #[test]
    fn unknown_column_has_no_ranges() {
        let ranges = extract_ranges(&view(&[(0, 5, Unknown)]), 0.1, 0.0);
        assert_eq!(ranges, ColumnRanges::default());
    }

    #[test]
    fn free_run_to_meters() {
        let ranges = extract_ranges(
            &view(&[(0, 1, Unknown), (1, 2, Free), (3, 2, Unknown)]),
            0.1,
            0.0,
        );
        assert_eq!(ranges.free.len(), 1);
        assert!((ranges.free[0].low - 0.1f64).abs() < 1e-12);
        assert!((ranges.free[0].high - 0.3f64).abs() < 1e-12);
    }

    #[test]
    fn unknown_gap_splits_ranges() {
        let ranges = extract_ranges(
            &view(&[(0, 1, Unknown), (1, 1, Free), (2, 1, Unknown), (3, 1, Free)]),
            0.1,
            0.0,
        );
        assert_eq!(ranges.free.len(), 2);
    }

    #[test]
    fn non_canonical_runs_are_merged() {
        let ranges = extract_ranges(&view(&[(0, 2, Free), (2, 3, Free)]), 1.0, 0.0);
        assert_eq!(ranges.free, vec![r(0.0, 5.0)]);
    }

    #[test]
    fn filter_thresholds() {
        let short = ColumnRanges {
            free: vec![r(0.0, 0.5)],
            occupied: vec![r(0.5, 0.6)],
        };
        let filtered = filter_free_ranges(short, 1.0);
        assert!(filtered.free.is_empty());
        assert_eq!(filtered.occupied, vec![r(0.5, 0.6)]);

        let tall = ColumnRanges {
            free: vec![r(0.0, 2.0)],
            occupied: vec![],
        };
        assert_eq!(filter_free_ranges(tall.clone(), 1.0), tall);

        let exact = ColumnRanges {
            free: vec![r(0.0, 1.0)],
            occupied: vec![],
        };
        assert_eq!(filter_free_ranges(exact.clone(), 1.0).free.len(), 1);
    }

    #[test]
    fn exact_threshold_kept_despite_rounding() {
        // Ten 0.1 m voxels starting at layer 3 with the origin one layer
        // below zero; the subtraction rounds below 1.0.
        let col = view(&[(0, 3, Unknown), (3, 10, Free)]);
        let ranges = extract_ranges(&col, 0.1, -0.1);
        assert!(ranges.free[0].length() < 1.0);
        assert_eq!(filter_free_ranges(ranges, 1.0).free.len(), 1);
        // One voxel short is still dropped.
        let col = view(&[(0, 3, Unknown), (3, 9, Free)]);
        assert!(filter_free_ranges(extract_ranges(&col, 0.1, -0.1), 1.0)
            .free
            .is_empty());
    }

    #[test]
    fn height_cell_rules() {
        assert_eq!(height_from_ranges(&ColumnRanges::<f64>::default()), None);
        let single = ColumnRanges {
            free: vec![r(0.1, 2.0)],
            occupied: vec![],
        };
        assert_eq!(
            height_from_ranges(&single),
            Some(HeightCell {
                floor: 0.1,
                ceiling: 2.0
            })
        );
        let two = ColumnRanges {
            free: vec![r(0.0, 1.5), r(3.0, 5.0)],
            occupied: vec![],
        };
        assert_eq!(
            height_from_ranges(&two),
            Some(HeightCell {
                floor: 0.0,
                ceiling: 5.0
            })
        );
    }

    #[test]
    fn empty_map_has_no_heights() {
        let map = VoxelMap::<f64>::new(0.1, [0.0; 3], [3, 4, 5]).unwrap();
        let (h, ranges) = build_height_map(&map, 1.0);
        assert_eq!(h.present_count(), 0);
        assert_eq!(ranges.dims(), (3, 4));
    }

    fn arb_runs() -> impl Strategy<Value = Vec<(u32, VoxelState)>> {
        prop::collection::vec(
            (
                1u32..5,
                prop_oneof![Just(Occupied), Just(Free), Just(Unknown)],
            ),
            0..10,
        )
    }

    proptest! {
        // Rasterizing the ranges back to voxels reproduces the column.
        #[test]
        fn rasterization_round_trip(parts in arb_runs(), origin_z in -5.0f64..5.0) {
            let res = 0.1;
            let mut runs = Vec::new();
            let mut start = 0;
            for (len, st) in &parts {
                runs.push(Run::new(start, *len, *st));
                start += len;
            }
            let total = start;
            let ranges = extract_ranges(&ColumnView { m: 0, n: 0, runs: runs.clone() }, res, origin_z);
            let to_layer = |z: f64| ((z - origin_z) / res).round() as u32;
            let mut raster = vec![Unknown; total as usize];
            for f in &ranges.free {
                for k in to_layer(f.low)..to_layer(f.high) { raster[k as usize] = Free; }
            }
            for o in &ranges.occupied {
                for k in to_layer(o.low)..to_layer(o.high) {
                    prop_assert_eq!(raster[k as usize], Unknown);
                    raster[k as usize] = Occupied;
                }
            }
            for run in &runs {
                for k in run.start..run.end() {
                    prop_assert_eq!(raster[k as usize], run.state);
                }
            }
            for list in [&ranges.free, &ranges.occupied] {
                for w in list.windows(2) {
                    prop_assert!(w[0].high < w[1].low);
                }
            }
        }

        #[test]
        fn filter_and_height_properties(parts in arb_runs(), r_max_z in 0.05f64..0.6) {
            let mut runs = Vec::new();
            let mut start = 0;
            for (len, st) in &parts {
                runs.push(Run::new(start, *len, *st));
                start += len;
            }
            let raw = ranges_from_runs(&runs, 0.1f64, 0.0);
            let filtered = filter_free_ranges(raw, r_max_z);
            for f in &filtered.free {
                prop_assert!(f.length() >= r_max_z - 1e-12);
            }
            let cell = height_from_ranges(&filtered);
            prop_assert_eq!(cell.is_some(), !filtered.free.is_empty());
            if let Some(c) = cell {
                for f in &filtered.free {
                    prop_assert!(c.floor <= f.low && c.ceiling >= f.high);
                }
                prop_assert!(c.span() >= r_max_z - 1e-12);
            }
        }
    }
}
