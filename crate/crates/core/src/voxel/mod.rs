//! Three-state voxel storage with column-wise run-length encoding.
//!
//! Columns are keyed by their `(i, j)` footprint and hold only the known
//! (occupied or free) runs; every voxel not covered by a run is unknown.
//! All downstream stages read the map one column at a time through
//! [`VoxelMap::column`].

mod vxg;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::grid::GridGeometry;
use crate::scalar::Scalar;

pub use vxg::{load_voxel_map, read_vxg, save_voxel_map, write_vxg, VxgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum VoxelState {
    Occupied,
    Free,
    #[default]
    Unknown,
}

/// A maximal vertical run of one state, in voxel layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: u32,
    pub len: u32,
    pub state: VoxelState,
}

impl Run {
    pub fn new(start: u32, len: u32, state: VoxelState) -> Self {
        Self { start, len, state }
    }

    /// One past the last layer of the run.
    pub fn end(&self) -> u32 {
        self.start + self.len
    }
}

/// Full run-length view of one column, unknown runs included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnView {
    pub m: u32,
    pub n: u32,
    pub runs: Vec<Run>,
}

impl ColumnView {
    pub fn total_len(&self) -> u32 {
        self.runs.iter().map(|r| r.len).sum()
    }
}

/// A single voxel write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VoxelUpdate {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub state: VoxelState,
}

impl VoxelUpdate {
    pub fn new(i: u32, j: u32, k: u32, state: VoxelState) -> Self {
        Self { i, j, k, state }
    }
}

/// Set of `(m, n)` columns touched by a batch of writes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirtyRegion(BTreeSet<(u32, u32)>);

impl DirtyRegion {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: u32, n: u32) -> bool {
        self.0.contains(&(m, n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().copied()
    }

    pub(crate) fn insert(&mut self, m: u32, n: u32) {
        self.0.insert((m, n));
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VoxelError {
    #[error("resolution must be finite and positive")]
    InvalidResolution,
    #[error("extent {0:?} has a zero component")]
    InvalidExtent([u32; 3]),
    #[error("update #{position} at ({i}, {j}, {k}) lies outside the map extent")]
    UpdateOutOfRange {
        position: usize,
        i: u32,
        j: u32,
        k: u32,
    },
    #[error("column ({m}, {n}) lies outside the map extent")]
    ColumnOutOfRange { m: u32, n: u32 },
    #[error("runs for column ({m}, {n}) overlap or exceed the column height")]
    InvalidRuns { m: u32, n: u32 },
}

/// Sparse three-state voxel map.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelMap<T> {
    resolution: T,
    origin: [T; 3],
    extent: [u32; 3],
    columns: BTreeMap<(u32, u32), Vec<Run>>,
}

impl<T: Scalar> VoxelMap<T> {
    /// An all-unknown map.
    pub fn new(resolution: T, origin: [T; 3], extent: [u32; 3]) -> Result<Self, VoxelError> {
        if !(resolution.is_finite() && resolution > T::zero()) {
            return Err(VoxelError::InvalidResolution);
        }
        if extent.contains(&0) {
            return Err(VoxelError::InvalidExtent(extent));
        }
        Ok(Self {
            resolution,
            origin,
            extent,
            columns: BTreeMap::new(),
        })
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn origin(&self) -> [T; 3] {
        self.origin
    }

    pub fn extent(&self) -> [u32; 3] {
        self.extent
    }

    pub fn geometry(&self) -> GridGeometry<T> {
        GridGeometry {
            resolution: self.resolution,
            origin: self.origin,
            m: self.extent[0] as usize,
            n: self.extent[1] as usize,
        }
    }

    fn in_range(&self, i: u32, j: u32, k: u32) -> bool {
        i < self.extent[0] && j < self.extent[1] && k < self.extent[2]
    }

    pub fn get(&self, i: u32, j: u32, k: u32) -> VoxelState {
        self.columns
            .get(&(i, j))
            .and_then(|runs| runs.iter().find(|r| r.start <= k && k < r.end()))
            .map_or(VoxelState::Unknown, |r| r.state)
    }

    /// Known (non-unknown) runs of a column, ascending. Empty for unwritten columns.
    pub fn known_runs(&self, m: u32, n: u32) -> &[Run] {
        self.columns.get(&(m, n)).map_or(&[], Vec::as_slice)
    }

    /// Number of known voxels across the whole map.
    pub fn known_count(&self) -> u64 {
        self.columns
            .values()
            .flat_map(|runs| runs.iter())
            .map(|r| u64::from(r.len))
            .sum()
    }

    /// Columns holding at least one known voxel, in `(m, n)` order.
    pub fn known_columns(&self) -> impl Iterator<Item = ((u32, u32), &[Run])> {
        self.columns.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Run-length view of column `(m, n)` covering all `K` layers.
    pub fn column(&self, m: u32, n: u32) -> Result<ColumnView, VoxelError> {
        if m >= self.extent[0] || n >= self.extent[1] {
            return Err(VoxelError::ColumnOutOfRange { m, n });
        }
        let height = self.extent[2];
        let mut runs = Vec::new();
        let mut cursor = 0;
        for run in self.known_runs(m, n) {
            if run.start > cursor {
                runs.push(Run::new(cursor, run.start - cursor, VoxelState::Unknown));
            }
            runs.push(*run);
            cursor = run.end();
        }
        if cursor < height {
            runs.push(Run::new(cursor, height - cursor, VoxelState::Unknown));
        }
        Ok(ColumnView { m, n, runs })
    }

    /// Writes one voxel. Out-of-range indices are rejected.
    pub fn set(&mut self, i: u32, j: u32, k: u32, state: VoxelState) -> Result<(), VoxelError> {
        if !self.in_range(i, j, k) {
            return Err(VoxelError::UpdateOutOfRange {
                position: 0,
                i,
                j,
                k,
            });
        }
        self.write(i, j, k, state);
        Ok(())
    }

    fn write(&mut self, i: u32, j: u32, k: u32, state: VoxelState) {
        let runs = self.columns.entry((i, j)).or_default();
        write_run(runs, k, state);
        if runs.is_empty() {
            self.columns.remove(&(i, j));
        }
    }

    /// Replaces column `(m, n)` wholesale. Runs may be given in any order and
    /// may include unknown runs; they must not overlap.
    pub fn set_column_runs(
        &mut self,
        m: u32,
        n: u32,
        runs: impl IntoIterator<Item = Run>,
    ) -> Result<(), VoxelError> {
        if m >= self.extent[0] || n >= self.extent[1] {
            return Err(VoxelError::ColumnOutOfRange { m, n });
        }
        let mut runs: Vec<Run> = runs.into_iter().filter(|r| r.len > 0).collect();
        runs.sort_by_key(|r| r.start);
        let overlapping = runs.windows(2).any(|w| w[0].end() > w[1].start);
        if overlapping || runs.last().is_some_and(|r| r.end() > self.extent[2]) {
            return Err(VoxelError::InvalidRuns { m, n });
        }
        runs.retain(|r| r.state != VoxelState::Unknown);
        merge_adjacent(&mut runs);
        if runs.is_empty() {
            self.columns.remove(&(m, n));
        } else {
            self.columns.insert((m, n), runs);
        }
        Ok(())
    }

    /// Applies a batch of writes, last write wins per voxel.
    ///
    /// The whole batch is validated first; on error nothing is written. Every
    /// column named by an update is reported dirty, including columns whose
    /// content did not change.
    pub fn apply_cells(&mut self, updates: &[VoxelUpdate]) -> Result<DirtyRegion, VoxelError> {
        if let Some((position, u)) = updates
            .iter()
            .enumerate()
            .find(|(_, u)| !self.in_range(u.i, u.j, u.k))
        {
            return Err(VoxelError::UpdateOutOfRange {
                position,
                i: u.i,
                j: u.j,
                k: u.k,
            });
        }
        let mut dirty = DirtyRegion::default();
        for u in updates {
            self.write(u.i, u.j, u.k, u.state);
            dirty.insert(u.i, u.j);
        }
        Ok(dirty)
    }
}

fn write_run(runs: &mut Vec<Run>, k: u32, state: VoxelState) {
    let pos = runs.partition_point(|r| r.end() <= k);
    if pos < runs.len() && runs[pos].start <= k {
        let run = runs[pos];
        if run.state == state {
            return;
        }
        let mut pieces = Vec::with_capacity(3);
        if run.start < k {
            pieces.push(Run::new(run.start, k - run.start, run.state));
        }
        if state != VoxelState::Unknown {
            pieces.push(Run::new(k, 1, state));
        }
        if k + 1 < run.end() {
            pieces.push(Run::new(k + 1, run.end() - k - 1, run.state));
        }
        runs.splice(pos..=pos, pieces);
    } else if state != VoxelState::Unknown {
        runs.insert(pos, Run::new(k, 1, state));
    } else {
        return;
    }
    merge_adjacent(runs);
}

fn merge_adjacent(runs: &mut Vec<Run>) {
    let mut kept = 0;
    for idx in 0..runs.len() {
        let r = runs[idx];
        if kept > 0 && runs[kept - 1].end() == r.start && runs[kept - 1].state == r.state {
            runs[kept - 1].len += r.len;
        } else {
            runs[kept] = r;
            kept += 1;
        }
    }
    runs.truncate(kept);
}
