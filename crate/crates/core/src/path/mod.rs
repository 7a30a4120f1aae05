//! Turning 2D grid paths into 3D paths over the height map.

mod files;
mod planner;

use thiserror::Error;

use crate::column::HeightMap;
use crate::occupancy::MapKind;
use crate::scalar::Scalar;

pub use files::{
    parse_path2d, parse_path3d, read_path2d, read_path3d, write_path2d, write_path3d, PathFileError,
};
pub use planner::plan_2d;

/// Grid waypoints `(m, n)`; consecutive points are 8-neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Path2D {
    pub waypoints: Vec<(usize, usize)>,
}

/// World waypoints `[x, y, z]` in meters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path3D<T> {
    pub waypoints: Vec<[T; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftParams<T> {
    /// Look-ahead window, waypoints on each side.
    pub p_f: usize,
    /// Height above the floor, meters.
    pub r_off: T,
    /// Clearance sphere radius, meters (UAV only).
    pub r_r: T,
    pub mode: MapKind,
}

impl<T: Scalar> LiftParams<T> {
    /// Aerial defaults: 2 m look-ahead, 1 m above floor, 0.5 m sphere.
    pub fn uav_defaults(resolution: T) -> Self {
        Self {
            p_f: window_steps(T::lit(2.0), resolution),
            r_off: T::one(),
            r_r: T::lit(0.5),
            mode: MapKind::Uav,
        }
    }

    /// Ground defaults: 0.5 m look-ahead, 0.1 m above floor, no sphere.
    pub fn ugv_defaults(resolution: T) -> Self {
        Self {
            p_f: window_steps(T::lit(0.5), resolution),
            r_off: T::lit(0.1),
            r_r: T::zero(),
            mode: MapKind::Ugv,
        }
    }

    /// Checks the sphere radius against the navigable-height margin.
    pub fn validate(&self, r_max_z: T) -> Result<(), PathError> {
        if self.mode == MapKind::Uav && !(self.r_r > T::zero() && self.r_r <= r_max_z / T::lit(2.0))
        {
            return Err(PathError::InvalidRadius {
                r_r: self.r_r.to_f64().unwrap_or(f64::NAN),
                limit: (r_max_z / T::lit(2.0)).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Look-ahead distance in meters to whole waypoints.
pub fn window_steps<T: Scalar>(meters: T, resolution: T) -> usize {
    (meters / resolution).round().to_usize().unwrap_or(0)
}

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("waypoint {index} at cell ({m}, {n}) has no height data")]
    MissingHeight { index: usize, m: usize, n: usize },
    #[error("waypoint {index}: no height keeps a {r_r} m sphere clear (needs [{low}, {high}])")]
    ClearanceInfeasible {
        index: usize,
        r_r: f64,
        low: f64,
        high: f64,
    },
    #[error("clearance radius {r_r} must lie in (0, {limit}]")]
    InvalidRadius { r_r: f64, limit: f64 },
    #[error("{which} cell ({m}, {n}) is not free")]
    NotFree {
        which: &'static str,
        m: usize,
        n: usize,
    },
    #[error("{which} cell ({m}, {n}) lies outside the grid")]
    OutOfBounds {
        which: &'static str,
        m: usize,
        n: usize,
    },
}

/// Assigns each waypoint the highest floor within `p_f` waypoints on either
/// side (clipped at the path ends) plus `r_off`.
pub fn lift_path<T: Scalar>(
    path: &Path2D,
    h: &HeightMap<T>,
    params: &LiftParams<T>,
) -> Result<Path3D<T>, PathError> {
    let (dm, dn) = h.dims();
    let mut floors = Vec::with_capacity(path.waypoints.len());
    for (index, &(m, n)) in path.waypoints.iter().enumerate() {
        if m >= dm || n >= dn {
            return Err(PathError::OutOfBounds {
                which: "waypoint",
                m,
                n,
            });
        }
        let cell = h
            .get(m, n)
            .ok_or(PathError::MissingHeight { index, m, n })?;
        floors.push(cell.floor);
    }
    let geometry = h.geometry();
    let last = floors.len().saturating_sub(1);
    let waypoints = path
        .waypoints
        .iter()
        .enumerate()
        .map(|(i, &(m, n))| {
            let window = &floors[i.saturating_sub(params.p_f)..=(i + params.p_f).min(last)];
            let top = window.iter().copied().fold(T::neg_infinity(), T::max);
            [
                geometry.center_x(m),
                geometry.center_y(n),
                top + params.r_off,
            ]
        })
        .collect();
    Ok(Path3D { waypoints })
}

/// Tightest floor and ceiling over height cells whose centers lie within
/// horizontal distance `r_r` of `(x, y)`.
pub fn clearance_bounds<T: Scalar>(h: &HeightMap<T>, x: T, y: T, r_r: T) -> Option<(T, T)> {
    let g = h.geometry();
    let reach = (r_r / g.resolution).ceil().to_i64().unwrap_or(0) + 1;
    let cm = ((x - g.origin[0]) / g.resolution).floor().to_i64()?;
    let cn = ((y - g.origin[1]) / g.resolution).floor().to_i64()?;
    let mut bounds: Option<(T, T)> = None;
    for i in cm - reach..=cm + reach {
        for j in cn - reach..=cn + reach {
            let Some(cell) = h.get_signed(i, j) else {
                continue;
            };
            let dx = g.center_x(i as usize) - x;
            let dy = g.center_y(j as usize) - y;
            if dx.hypot(dy) > r_r {
                continue;
            }
            bounds = Some(match bounds {
                None => (cell.floor, cell.ceiling),
                Some((f, c)) => (f.max(cell.floor), c.min(cell.ceiling)),
            });
        }
    }
    bounds
}

/// Moves waypoints whose `r_r` sphere would cut the floor or ceiling of any
/// nearby height cell to the nearest clear height. Clear waypoints are left
/// alone; an empty clear interval is an error.
pub fn enforce_clearance<T: Scalar>(
    path: &Path3D<T>,
    h: &HeightMap<T>,
    r_r: T,
) -> Result<Path3D<T>, PathError> {
    let mut out = path.clone();
    for (index, wp) in out.waypoints.iter_mut().enumerate() {
        let [x, y, z] = *wp;
        let Some((floor, ceiling)) = clearance_bounds(h, x, y, r_r) else {
            continue;
        };
        let low = floor + r_r;
        let high = ceiling - r_r;
        if low > high {
            return Err(PathError::ClearanceInfeasible {
                index,
                r_r: r_r.to_f64().unwrap_or(f64::NAN),
                low: low.to_f64().unwrap_or(f64::NAN),
                high: high.to_f64().unwrap_or(f64::NAN),
            });
        }
        if z < low {
            wp[2] = low;
        } else if z > high {
            wp[2] = high;
        }
    }
    Ok(out)
}

/// Lifts a path and, in UAV mode, enforces sphere clearance.
pub fn convert_path<T: Scalar>(
    path: &Path2D,
    h: &HeightMap<T>,
    params: &LiftParams<T>,
) -> Result<Path3D<T>, PathError> {
    let lifted = lift_path(path, h, params)?;
    match params.mode {
        MapKind::Uav => enforce_clearance(&lifted, h, params.r_r),
        MapKind::Ugv => Ok(lifted),
    }
}
