//! Conversion state kept in sync with a changing voxel map.
//!
//! After a batch of voxel writes only the affected cells are recomputed:
//! ranges and heights on the dirty columns, slopes on the dirty columns
//! dilated by the slope radius, and occupancy on the slope region dilated by
//! one cell. The result is identical to converting the updated map from
//! scratch.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::column::{build_height_map, convert_column, ColumnRanges, HeightMap};
use crate::grid::{chebyshev_neighborhood, Grid2};
use crate::occupancy::{build_uav_map, build_ugv_map, uav_cell, ugv_cell, OccupancyGrid};
use crate::params::{ConversionParams, ParamError};
use crate::scalar::Scalar;
use crate::slope::{build_slope_map, slope_cell, SlopeMap};
use crate::voxel::{VoxelError, VoxelMap, VoxelUpdate};

/// Voxel map together with every product derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionState<T> {
    map: VoxelMap<T>,
    params: ConversionParams<T>,
    ranges: Grid2<ColumnRanges<T>>,
    heights: HeightMap<T>,
    slopes: SlopeMap<T>,
    uav: OccupancyGrid<T>,
    ugv: OccupancyGrid<T>,
}

/// Work done by one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DirtyReport {
    pub columns_dirty: usize,
    pub slope_cells: usize,
    pub occupancy_cells: usize,
    pub wall_time: Duration,
}

impl DirtyReport {
    pub const CSV_HEADER: &'static str =
        "update,columns_dirty,slope_cells,occupancy_cells,wall_time_us";

    pub fn csv_row(&self, index: usize) -> String {
        format!(
            "{index},{},{},{},{}",
            self.columns_dirty,
            self.slope_cells,
            self.occupancy_cells,
            self.wall_time.as_micros()
        )
    }
}

fn dilate(
    cells: &BTreeSet<(usize, usize)>,
    dims: (usize, usize),
    radius: usize,
) -> BTreeSet<(usize, usize)> {
    cells
        .iter()
        .flat_map(|&(m, n)| chebyshev_neighborhood(dims, m, n, radius))
        .collect()
}

impl<T: Scalar> ConversionState<T> {
    /// Full conversion of `map`.
    pub fn init(map: VoxelMap<T>, params: ConversionParams<T>) -> Result<Self, ParamError> {
        params.validate()?;
        let (heights, ranges) = build_height_map(&map, params.r_max_z);
        let slopes = build_slope_map(&heights, params.s_a);
        let uav = build_uav_map(&ranges, &heights, params.o_min);
        let ugv = build_ugv_map(&uav, &slopes, params.r_ms);
        Ok(Self {
            map,
            params,
            ranges,
            heights,
            slopes,
            uav,
            ugv,
        })
    }

    /// Applies voxel writes and refreshes the affected part of every product.
    pub fn update(&mut self, updates: &[VoxelUpdate]) -> Result<DirtyReport, VoxelError> {
        let started = Instant::now();
        let dirty = self.map.apply_cells(updates)?;
        let dims = self.heights.dims();

        let columns: BTreeSet<(usize, usize)> = dirty
            .iter()
            .map(|(m, n)| (m as usize, n as usize))
            .collect();
        for &(m, n) in &columns {
            let (ranges, height) =
                convert_column(&self.map, m as u32, n as u32, self.params.r_max_z);
            self.ranges.set(m, n, ranges);
            self.heights.set(m, n, height);
        }

        let slope_region = dilate(&columns, dims, self.params.s_a);
        for &(m, n) in &slope_region {
            let cell = slope_cell(&self.heights, m, n, self.params.s_a);
            self.slopes.set(m, n, cell);
        }

        let occupancy_region = dilate(&slope_region, dims, 1);
        for &(m, n) in &occupancy_region {
            let uav = uav_cell(&self.ranges, &self.heights, m, n, self.params.o_min);
            let ugv = ugv_cell(uav, self.slopes.slope(m, n), self.params.r_ms);
            self.uav.set(m, n, uav);
            self.ugv.set(m, n, ugv);
        }

        Ok(DirtyReport {
            columns_dirty: columns.len(),
            slope_cells: slope_region.len(),
            occupancy_cells: occupancy_region.len(),
            wall_time: started.elapsed(),
        })
    }

    pub fn map(&self) -> &VoxelMap<T> {
        &self.map
    }

    pub fn params(&self) -> &ConversionParams<T> {
        &self.params
    }

    pub fn ranges(&self) -> &Grid2<ColumnRanges<T>> {
        &self.ranges
    }

    pub fn heights(&self) -> &HeightMap<T> {
        &self.heights
    }

    pub fn slopes(&self) -> &SlopeMap<T> {
        &self.slopes
    }

    pub fn uav(&self) -> &OccupancyGrid<T> {
        &self.uav
    }

    pub fn ugv(&self) -> &OccupancyGrid<T> {
        &self.ugv
    }

    /// True when all four output grids match `other` exactly.
    pub fn outputs_equal(&self, other: &Self) -> bool {
        self.heights == other.heights
            && self.slopes == other.slopes
            && self.uav == other.uav
            && self.ugv == other.ugv
    }
}
