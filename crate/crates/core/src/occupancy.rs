//! UAV and UGV occupancy grids.
//!
//! The UAV grid marks every column with navigable free space as free. Columns
//! without free space but bordering it get an occupancy ratio: how much of
//! the neighbor's floor-to-ceiling span their occupied ranges cover, maximized
//! over free neighbors. The UGV grid additionally closes free cells whose
//! floor slope exceeds what a ground robot can climb.

use rayon::prelude::*;

use crate::column::{ColumnRanges, HeightMap, HeightRange};
use crate::grid::{ring_neighbors, Grid2, GridGeometry};
use crate::scalar::Scalar;
use crate::slope::SlopeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Uav,
    Ugv,
}

/// Occupancy per cell: `None` is unknown (-1), otherwise a probability in
/// `[0, 1]` with 0 meaning free.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid<T> {
    geometry: GridGeometry<T>,
    kind: MapKind,
    cells: Grid2<Option<T>>,
}

impl<T: Scalar> OccupancyGrid<T> {
    pub fn new(geometry: GridGeometry<T>, kind: MapKind, cells: Grid2<Option<T>>) -> Self {
        assert_eq!(
            cells.dims(),
            (geometry.m, geometry.n),
            "grid/geometry mismatch"
        );
        Self {
            geometry,
            kind,
            cells,
        }
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        &self.geometry
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn dims(&self) -> (usize, usize) {
        self.cells.dims()
    }

    pub fn get(&self, m: usize, n: usize) -> Option<T> {
        *self.cells.get(m, n)
    }

    /// Cell value with unknown encoded as -1.
    pub fn value(&self, m: usize, n: usize) -> T {
        self.get(m, n).unwrap_or_else(|| -T::one())
    }

    pub fn is_free(&self, m: usize, n: usize) -> bool {
        self.get(m, n) == Some(T::zero())
    }

    pub fn is_occupied(&self, m: usize, n: usize) -> bool {
        self.get(m, n).is_some_and(|v| v > T::zero())
    }

    pub fn cells(&self) -> &Grid2<Option<T>> {
        &self.cells
    }

    pub(crate) fn set(&mut self, m: usize, n: usize, value: Option<T>) {
        self.cells.set(m, n, value);
    }
}

/// Length of the intersection of two ranges, zero when disjoint.
pub fn overlap_length<T: Scalar>(h: &HeightRange<T>, o: &HeightRange<T>) -> T {
    (h.high.min(o.high) - h.low.max(o.low)).max(T::zero())
}

/// Occupancy ratio of a non-free cell against its free 8-neighbors.
///
/// For each free neighbor, sums the overlap of the cell's occupied ranges
/// with the neighbor's height span and divides by that span, clamping to 1.
/// Returns the maximum over neighbors, or `None` when no neighbor is free. A
/// cell without occupied ranges scores 0.
pub fn occupancy_value<T: Scalar>(
    m: usize,
    n: usize,
    occupied: &[HeightRange<T>],
    h: &HeightMap<T>,
) -> Option<T> {
    ring_neighbors(h.dims(), m, n)
        .filter_map(|(i, j)| h.get(i, j))
        .map(|neighbor| {
            let span = neighbor.as_range();
            let covered: T = occupied.iter().map(|o| overlap_length(&span, o)).sum();
            (covered / span.length()).min(T::one())
        })
        .reduce(T::max)
}

pub(crate) fn uav_cell<T: Scalar>(
    ranges: &Grid2<ColumnRanges<T>>,
    h: &HeightMap<T>,
    m: usize,
    n: usize,
    o_min: T,
) -> Option<T> {
    if h.get(m, n).is_some() {
        return Some(T::zero());
    }
    occupancy_value(m, n, &ranges.get(m, n).occupied, h).filter(|&v| v >= o_min)
}

pub(crate) fn ugv_cell<T: Scalar>(uav: Option<T>, slope: Option<T>, r_ms: T) -> Option<T> {
    match (uav, slope) {
        (Some(v), Some(s)) if v == T::zero() && s > r_ms => Some(T::one()),
        _ => uav,
    }
}

/// Builds the UAV occupancy grid from filtered column ranges and heights.
pub fn build_uav_map<T: Scalar>(
    ranges: &Grid2<ColumnRanges<T>>,
    h: &HeightMap<T>,
    o_min: T,
) -> OccupancyGrid<T> {
    let (m, n) = h.dims();
    let cells: Vec<_> = (0..m * n)
        .into_par_iter()
        .map(|idx| uav_cell(ranges, h, idx / n, idx % n, o_min))
        .collect();
    OccupancyGrid::new(*h.geometry(), MapKind::Uav, Grid2::from_vec(m, n, cells))
}

/// Copies the UAV grid, closing free cells steeper than `r_ms`.
pub fn build_ugv_map<T: Scalar>(
    uav: &OccupancyGrid<T>,
    slopes: &SlopeMap<T>,
    r_ms: T,
) -> OccupancyGrid<T> {
    debug_assert_eq!(uav.kind(), MapKind::Uav);
    let (m, n) = uav.dims();
    let cells = Grid2::from_fn(m, n, |i, j| {
        ugv_cell(uav.get(i, j), slopes.slope(i, j), r_ms)
    });
    OccupancyGrid::new(*uav.geometry(), MapKind::Ugv, cells)
}
