//! Conversion parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::slope::neighborhood_cells;

/// Parameters of the map conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionParams<T> {
    /// Minimum height of a navigable free range, meters.
    pub r_max_z: T,
    /// Minimum occupancy ratio for a boundary cell to count as occupied.
    pub o_min: T,
    /// Slope neighborhood radius, cells.
    pub s_a: usize,
    /// Maximum traversable slope for ground robots (rise over run).
    pub r_ms: T,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("r_max_z must be positive")]
    RMaxZ,
    #[error("o_min must lie in (0, 1]")]
    OMin,
    #[error("s_a must be at least one cell")]
    SA,
    #[error("r_ms must be positive")]
    RMs,
}

impl<T: Scalar> ConversionParams<T> {
    /// Field-validation defaults: 1 m clearance, 0.5 occupancy, 0.2 m slope
    /// neighborhood and a maximum slope of 2.
    pub fn defaults_for(resolution: T) -> Self {
        Self {
            r_max_z: T::one(),
            o_min: T::lit(0.5),
            s_a: neighborhood_cells(T::lit(0.2), resolution),
            r_ms: T::lit(2.0),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.r_max_z > T::zero() && self.r_max_z.is_finite()) {
            return Err(ParamError::RMaxZ);
        }
        if !(self.o_min > T::zero() && self.o_min <= T::one()) {
            return Err(ParamError::OMin);
        }
        if self.s_a < 1 {
            return Err(ParamError::SA);
        }
        if self.r_ms.is_nan() || self.r_ms <= T::zero() {
            return Err(ParamError::RMs);
        }
        Ok(())
    }
}
