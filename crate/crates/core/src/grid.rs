//! Dense 2D grids over the horizontal footprint of a voxel map.

use crate::scalar::Scalar;

/// Horizontal placement shared by every 2D product of one voxel map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry<T> {
    /// Cell edge length in meters.
    pub resolution: T,
    /// World position of the corner of cell (0, 0) and of voxel layer 0.
    pub origin: [T; 3],
    /// Cell count along x.
    pub m: usize,
    /// Cell count along y.
    pub n: usize,
}

impl<T: Scalar> GridGeometry<T> {
    /// World x of the center of column `m`.
    pub fn center_x(&self, m: usize) -> T {
        self.origin[0] + (T::from_index(m) + T::lit(0.5)) * self.resolution
    }

    /// World y of the center of row `n`.
    pub fn center_y(&self, n: usize) -> T {
        self.origin[1] + (T::from_index(n) + T::lit(0.5)) * self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.m * self.n
    }

    pub fn contains(&self, m: i64, n: i64) -> bool {
        m >= 0 && n >= 0 && (m as usize) < self.m && (n as usize) < self.n
    }
}

/// Row-major `M x N` grid indexed by `(m, n)`; the flat index is `m * N + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2<V> {
    m: usize,
    n: usize,
    data: Vec<V>,
}

impl<V: Clone> Grid2<V> {
    pub fn filled(m: usize, n: usize, value: V) -> Self {
        Self {
            m,
            n,
            data: vec![value; m * n],
        }
    }
}

impl<V> Grid2<V> {
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { m, n, data }
    }

    /// Wraps a row-major vector. Panics if the length does not match.
    pub fn from_vec(m: usize, n: usize, data: Vec<V>) -> Self {
        assert_eq!(data.len(), m * n, "grid data length mismatch");
        Self { m, n, data }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize) -> usize {
        debug_assert!(m < self.m && n < self.n);
        m * self.n + n
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> &V {
        &self.data[self.index(m, n)]
    }

    #[inline]
    pub fn get_mut(&mut self, m: usize, n: usize) -> &mut V {
        let i = self.index(m, n);
        &mut self.data[i]
    }

    /// Bounds-checked lookup with signed indices, for neighborhood scans.
    pub fn get_signed(&self, m: i64, n: i64) -> Option<&V> {
        if m < 0 || n < 0 || m as usize >= self.m || n as usize >= self.n {
            return None;
        }
        Some(self.get(m as usize, n as usize))
    }

    pub fn set(&mut self, m: usize, n: usize, value: V) {
        *self.get_mut(m, n) = value;
    }

    pub fn as_slice(&self) -> &[V] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &V)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, v)| ((i / n, i % n), v))
    }

    pub fn map<W>(&self, f: impl Fn(&V) -> W) -> Grid2<W> {
        Grid2 {
            m: self.m,
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Cells within Chebyshev distance `radius` of `(m, n)` that lie inside an
/// `dims` grid, in row-major order. Includes the center.
pub fn chebyshev_neighborhood(
    dims: (usize, usize),
    m: usize,
    n: usize,
    radius: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let m0 = m.saturating_sub(radius);
    let m1 = (m + radius).min(dims.0.saturating_sub(1));
    let n0 = n.saturating_sub(radius);
    let n1 = (n + radius).min(dims.1.saturating_sub(1));
    (m0..=m1).flat_map(move |i| (n0..=n1).map(move |j| (i, j)))
}

/// The 8-connected neighbors of `(m, n)` inside the grid, center excluded.
pub fn ring_neighbors(
    dims: (usize, usize),
    m: usize,
    n: usize,
) -> impl Iterator<Item = (usize, usize)> {
    chebyshev_neighborhood(dims, m, n, 1).filter(move |&c| c != (m, n))
}
