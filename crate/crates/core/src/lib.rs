//! Conversion of three-state voxel maps into 2D maps for aerial and ground
//! robots: navigable height (floor and ceiling), terrain slope, and
//! occupancy grids, plus lifting of 2D grid paths into 3D and incremental
//! updates while a map is being explored.
//!
//! The library is generic over the scalar type (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`, with `*32` variants for `f32`.

pub mod cli;
pub mod column;
pub mod grid;
pub mod incremental;
pub mod io;
pub mod occupancy;
pub mod params;
pub mod path;
pub mod scalar;
pub mod scene;
pub mod slope;
pub mod voxel;

pub use column::{ColumnRanges, HeightCell, HeightRange};
pub use grid::{Grid2, GridGeometry};
pub use incremental::DirtyReport;
pub use occupancy::MapKind;
pub use path::{Path2D, PathError};
pub use scalar::Scalar;
pub use voxel::{DirtyRegion, Run, VoxelError, VoxelState, VoxelUpdate};

pub type VoxelMap = voxel::VoxelMap<f64>;
pub type HeightMap = column::HeightMap<f64>;
pub type SlopeMap = slope::SlopeMap<f64>;
pub type OccupancyGrid = occupancy::OccupancyGrid<f64>;
pub type ConversionParams = params::ConversionParams<f64>;
pub type ConversionState = incremental::ConversionState<f64>;
pub type LiftParams = path::LiftParams<f64>;
pub type Path3D = path::Path3D<f64>;

pub type VoxelMap32 = voxel::VoxelMap<f32>;
pub type HeightMap32 = column::HeightMap<f32>;
pub type SlopeMap32 = slope::SlopeMap<f32>;
pub type OccupancyGrid32 = occupancy::OccupancyGrid<f32>;
pub type ConversionParams32 = params::ConversionParams<f32>;
pub type ConversionState32 = incremental::ConversionState<f32>;
pub type LiftParams32 = path::LiftParams<f32>;
pub type Path3D32 = path::Path3D<f32>;
