//! Local floor slope from least-squares plane fits over the height map.

use rayon::prelude::*;

use crate::column::HeightMap;
use crate::grid::{chebyshev_neighborhood, Grid2, GridGeometry};
use crate::scalar::Scalar;

/// Plane `z = a*x + b*y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFit<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> PlaneFit<T> {
    pub fn eval(&self, x: T, y: T) -> T {
        self.a * x + self.b * y + self.c
    }

    /// Gradient magnitude `sqrt(a^2 + b^2)`.
    pub fn slope(&self) -> T {
        self.a.hypot(self.b)
    }

    /// Sum of squared vertical residuals over `samples`.
    pub fn residual(&self, samples: &[[T; 3]]) -> T {
        samples
            .iter()
            .map(|&[x, y, z]| {
                let e = self.eval(x, y) - z;
                e * e
            })
            .sum()
    }
}

/// Least-squares plane through `samples` (`[x, y, z]` triples).
///
/// Solves the normal equations in coordinates centered on the sample mean,
/// which leaves the minimizer unchanged and makes the conditioning independent
/// of where the neighborhood sits in the world. Returns `None` for fewer than
/// three samples or when the normal matrix is singular or its 1-norm
/// condition number exceeds [`Scalar::max_condition`].
pub fn fit_plane<T: Scalar>(samples: &[[T; 3]]) -> Option<PlaneFit<T>> {
    if samples.len() < 3 {
        return None;
    }
    let count = T::from_index(samples.len());
    let (sx, sy, sz) = samples.iter().fold(
        (T::zero(), T::zero(), T::zero()),
        |(ax, ay, az), &[x, y, z]| (ax + x, ay + y, az + z),
    );
    let (mx, my, mz) = (sx / count, sy / count, sz / count);
    // Heights are taken relative to the first sample rather than the mean so
    // that equal heights give exactly zero gradient.
    let z0 = samples[0][2];

    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    let mut sxz = T::zero();
    let mut syz = T::zero();
    for &[x, y, z] in samples {
        let (dx, dy, dz) = (x - mx, y - my, z - z0);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
        sxz = sxz + dx * dz;
        syz = syz + dy * dz;
    }

    // Centered normal matrix is block diagonal: [[sxx, sxy, 0], [sxy, syy, 0], [0, 0, count]].
    let det = sxx * syy - sxy * sxy;
    if !(det.is_finite() && det > T::zero()) {
        return None;
    }
    let norm = (sxx.abs() + sxy.abs())
        .max(sxy.abs() + syy.abs())
        .max(count);
    let inv_norm = ((syy.abs() + sxy.abs()) / det)
        .max((sxy.abs() + sxx.abs()) / det)
        .max(count.recip());
    let condition = norm * inv_norm;
    if !condition.is_finite() || condition > T::max_condition() {
        return None;
    }

    let a = (syy * sxz - sxy * syz) / det;
    let b = (sxx * syz - sxy * sxz) / det;
    let c = mz - a * mx - b * my;
    (a.is_finite() && b.is_finite() && c.is_finite()).then_some(PlaneFit { a, b, c })
}

/// Converts a neighborhood size in meters to whole cells, at least one.
pub fn neighborhood_cells<T: Scalar>(meters: T, resolution: T) -> usize {
    (meters / resolution).round().to_usize().unwrap_or(0).max(1)
}

/// Samples `(center x, center y, floor)` of every present height cell within
/// Chebyshev distance `s_a` of `(m, n)`, center included.
pub fn neighborhood_samples<T: Scalar>(
    h: &HeightMap<T>,
    m: usize,
    n: usize,
    s_a: usize,
) -> Vec<[T; 3]> {
    let geometry = h.geometry();
    chebyshev_neighborhood(h.dims(), m, n, s_a)
        .filter_map(|(i, j)| {
            h.get(i, j)
                .map(|cell| [geometry.center_x(i), geometry.center_y(j), cell.floor])
        })
        .collect()
}

/// Slope at `(m, n)`; `None` when the cell has no height or the fit is degenerate.
pub fn slope_at<T: Scalar>(h: &HeightMap<T>, m: usize, n: usize, s_a: usize) -> Option<T> {
    h.get(m, n)?;
    fit_plane(&neighborhood_samples(h, m, n, s_a)).map(|fit| fit.slope())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCell<T> {
    pub value: T,
    /// Set when the neighborhood fit was degenerate; `value` is then zero.
    pub degenerate: bool,
}

pub(crate) fn slope_cell<T: Scalar>(
    h: &HeightMap<T>,
    m: usize,
    n: usize,
    s_a: usize,
) -> Option<SlopeCell<T>> {
    h.get(m, n)?;
    Some(match slope_at(h, m, n, s_a) {
        Some(value) => SlopeCell {
            value,
            degenerate: false,
        },
        None => SlopeCell {
            value: T::zero(),
            degenerate: true,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeMap<T> {
    geometry: GridGeometry<T>,
    s_a: usize,
    cells: Grid2<Option<SlopeCell<T>>>,
}

impl<T: Scalar> SlopeMap<T> {
    pub fn new(geometry: GridGeometry<T>, s_a: usize, cells: Grid2<Option<SlopeCell<T>>>) -> Self {
        assert_eq!(
            cells.dims(),
            (geometry.m, geometry.n),
            "grid/geometry mismatch"
        );
        Self {
            geometry,
            s_a,
            cells,
        }
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        &self.geometry
    }

    /// Neighborhood radius in cells.
    pub fn radius(&self) -> usize {
        self.s_a
    }

    pub fn get(&self, m: usize, n: usize) -> Option<&SlopeCell<T>> {
        self.cells.get(m, n).as_ref()
    }

    /// Slope value at `(m, n)`, degenerate cells reading as zero.
    pub fn slope(&self, m: usize, n: usize) -> Option<T> {
        self.get(m, n).map(|c| c.value)
    }

    pub(crate) fn set(&mut self, m: usize, n: usize, cell: Option<SlopeCell<T>>) {
        self.cells.set(m, n, cell);
    }

    pub fn cells(&self) -> &Grid2<Option<SlopeCell<T>>> {
        &self.cells
    }
}

/// Slope of every present height cell. Degenerate fits are stored as zero
/// with the degeneracy flag set.
pub fn build_slope_map<T: Scalar>(h: &HeightMap<T>, s_a: usize) -> SlopeMap<T> {
    assert!(s_a >= 1, "neighborhood radius must be at least one cell");
    let (m, n) = h.dims();
    let cells: Vec<_> = (0..m * n)
        .into_par_iter()
        .map(|idx| slope_cell(h, idx / n, idx % n, s_a))
        .collect();
    SlopeMap::new(*h.geometry(), s_a, Grid2::from_vec(m, n, cells))
}
