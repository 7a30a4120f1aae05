//! Minimal 8-connected shortest-path planner over an occupancy grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Path2D, PathError};
use crate::occupancy::OccupancyGrid;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    cell: (usize, usize),
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed so the max-heap pops the cheapest entry, ties by lowest cell.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STEPS: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn check_endpoint<T: Scalar>(
    grid: &OccupancyGrid<T>,
    which: &'static str,
    (m, n): (usize, usize),
) -> Result<(), PathError> {
    let (dm, dn) = grid.dims();
    if m >= dm || n >= dn {
        return Err(PathError::OutOfBounds { which, m, n });
    }
    if !grid.is_free(m, n) {
        return Err(PathError::NotFree { which, m, n });
    }
    Ok(())
}

/// Dijkstra over free cells with unit orthogonal and `sqrt(2)` diagonal
/// steps. Returns `Ok(None)` when the goal is unreachable.
pub fn plan_2d<T: Scalar>(
    grid: &OccupancyGrid<T>,
    start: (usize, usize),
    goal: (usize, usize),
) -> Result<Option<Path2D>, PathError> {
    check_endpoint(grid, "start", start)?;
    check_endpoint(grid, "goal", goal)?;
    let (dm, dn) = grid.dims();
    let idx = |(m, n): (usize, usize)| m * dn + n;

    let mut best = vec![f64::INFINITY; dm * dn];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; dm * dn];
    let mut done = vec![false; dm * dn];
    let mut heap = BinaryHeap::new();
    best[idx(start)] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        cell: start,
    });

    while let Some(Entry { cost, cell }) = heap.pop() {
        if done[idx(cell)] {
            continue;
        }
        done[idx(cell)] = true;
        if cell == goal {
            break;
        }
        for (dx, dy) in STEPS {
            let (m, n) = (cell.0 as i64 + dx, cell.1 as i64 + dy);
            if m < 0 || n < 0 || m as usize >= dm || n as usize >= dn {
                continue;
            }
            let next = (m as usize, n as usize);
            if done[idx(next)] || !grid.is_free(next.0, next.1) {
                continue;
            }
            let step = if dx != 0 && dy != 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
            let candidate = cost + step;
            if candidate < best[idx(next)] {
                best[idx(next)] = candidate;
                parent[idx(next)] = Some(cell);
                heap.push(Entry {
                    cost: candidate,
                    cell: next,
                });
            }
        }
    }

    if !done[idx(goal)] {
        return Ok(None);
    }
    let mut waypoints = vec![goal];
    let mut cursor = goal;
    while let Some(prev) = parent[idx(cursor)] {
        waypoints.push(prev);
        cursor = prev;
    }
    waypoints.reverse();
    Ok(Some(Path2D { waypoints }))
}
