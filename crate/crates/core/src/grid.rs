//! Uniform Cartesian grids in three dimensions and the finite-difference
//! and midpoint-quadrature helpers shared by every module.
//!
//! Nodes are stored in row-major order, `idx = (i * ny + j) * nz + k`, and
//! node `(i, j, k)` sits at `lower + (i, j, k) * spacing`. Quadrature treats
//! each node as the centre of a cell of volume `spacing^3`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{det_sum, det_sum_complex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub shape: [usize; 3],
    pub spacing: f64,
    pub lower: [f64; 3],
}

impl Grid3 {
    pub fn new(shape: [usize; 3], spacing: f64, lower: [f64; 3]) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidArgument(format!("grid spacing {spacing} must be positive")));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::InvalidArgument("grid shape has an empty axis".into()));
        }
        Ok(Self { shape, spacing, lower })
    }

    /// Cube `[-m h, m h]^3` with `2m + 1` nodes per axis and the origin at its centre node.
    pub fn centered(half_cells: usize, spacing: f64) -> Self {
        let n = 2 * half_cells + 1;
        let l = -(half_cells as f64) * spacing;
        Self { shape: [n; 3], spacing, lower: [l; 3] }
    }

    /// Cube `[0, cells h]^3` with the origin at its corner node.
    pub fn octant(cells: usize, spacing: f64) -> Self {
        Self { shape: [cells + 1; 3], spacing, lower: [0.0; 3] }
    }

    /// Centered grid whose half-width is `extent`, rounded to whole cells.
    pub fn centered_extent(extent: f64, spacing: f64) -> Self {
        let m = (extent / spacing).round().max(1.0) as usize;
        Self::centered(m, spacing)
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strides(&self) -> [usize; 3] {
        [self.shape[1] * self.shape[2], self.shape[2], 1]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.shape[1] + j) * self.shape[2] + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.shape[2];
        let ij = idx / self.shape[2];
        [ij / self.shape[1], ij % self.shape[1], k]
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.lower[0] + i as f64 * self.spacing,
            self.lower[1] + j as f64 * self.spacing,
            self.lower[2] + k as f64 * self.spacing,
        ]
    }

    #[inline]
    pub fn point_at(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        self.point(i, j, k)
    }

    #[inline]
    pub fn radius_at(&self, idx: usize) -> f64 {
        norm3(self.point_at(idx))
    }

    pub fn upper(&self) -> [f64; 3] {
        let mut u = self.lower;
        for a in 0..3 {
            u[a] += (self.shape[a] - 1) as f64 * self.spacing;
        }
        u
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    /// Index of the node at the origin, if the origin is a node.
    pub fn origin_index(&self) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let s = -self.lower[a] / self.spacing;
            let r = s.round();
            if (s - r).abs() > 1e-9 || r < 0.0 || r as usize >= self.shape[a] {
                return None;
            }
            ijk[a] = r as usize;
        }
        Some(self.index(ijk[0], ijk[1], ijk[2]))
    }

    /// Radius of the largest origin-centred ball inside the box.
    pub fn inscribed_radius(&self) -> f64 {
        let up = self.upper();
        (0..3)
            .map(|a| (-self.lower[a]).min(up[a]).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Half-width of the box along the narrowest axis (for symmetric boxes).
    pub fn half_width(&self) -> f64 {
        let up = self.upper();
        (0..3)
            .map(|a| 0.5 * (up[a] - self.lower[a]))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when the node is at least `layers` nodes away from every face.
    #[inline]
    pub fn is_interior(&self, idx: usize, layers: usize) -> bool {
        let ijk = self.unravel(idx);
        (0..3).all(|a| ijk[a] >= layers && ijk[a] + layers < self.shape[a])
    }

    /// Evaluates `f` at every node.
    pub fn sample<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn([f64; 3]) -> T + Sync,
    {
        (0..self.len()).into_par_iter().map(|idx| f(self.point_at(idx))).collect()
    }

    /// Midpoint-rule integral of `f(idx)` over all nodes.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync,
    {
        det_sum(self.len(), f) * self.cell_volume()
    }

    pub fn integrate_complex<F>(&self, f: F) -> C64
    where
        F: Fn(usize) -> C64 + Sync,
    {
        det_sum_complex(self.len(), f) * self.cell_volume()
    }

    /// Nodes sorted by distance from the origin, with their radii.
    pub fn radial_order(&self) -> Vec<(f64, usize)> {
        let mut order: Vec<(f64, usize)> = (0..self.len()).map(|i| (self.radius_at(i), i)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        order
    }
}

#[inline]
pub fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[inline]
pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Centered first difference along `axis` at `idx`; one-sided on the faces.
#[inline]
pub fn diff1<T>(grid: &Grid3, v: &[T], idx: usize, axis: usize) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let s = grid.strides()[axis];
    let i = grid.unravel(idx)[axis];
    let n = grid.shape[axis];
    let h = grid.spacing;
    if n < 2 {
        return v[idx] * 0.0;
    }
    if i == 0 {
        (v[idx + s] - v[idx]) * (1.0 / h)
    } else if i + 1 == n {
        (v[idx] - v[idx - s]) * (1.0 / h)
    } else {
        (v[idx + s] - v[idx - s]) * (0.5 / h)
    }
}

/// Centered second difference. Caller guarantees `idx` is interior along the axes used.
#[inline]
pub fn diff2(grid: &Grid3, v: &[f64], idx: usize, a: usize, b: usize) -> f64 {
    let st = grid.strides();
    let h2 = grid.spacing * grid.spacing;
    if a == b {
        let s = st[a];
        (v[idx + s] - 2.0 * v[idx] + v[idx - s]) / h2
    } else {
        let (sa, sb) = (st[a], st[b]);
        (v[idx + sa + sb] - v[idx + sa - sb] - v[idx - sa + sb] + v[idx - sa - sb]) / (4.0 * h2)
    }
}

/// Centered gradient of a complex field (one-sided on faces).
pub fn gradient_complex(grid: &Grid3, u: &[C64]) -> [Vec<C64>; 3] {
    let g = |axis: usize| -> Vec<C64> {
        (0..grid.len()).into_par_iter().map(|idx| diff1(grid, u, idx, axis)).collect()
    };
    [g(0), g(1), g(2)]
}

/// Centered gradient of a real field (one-sided on faces).
pub fn gradient_real(grid: &Grid3, v: &[f64]) -> [Vec<f64>; 3] {
    let g = |axis: usize| -> Vec<f64> {
        (0..grid.len()).into_par_iter().map(|idx| diff1(grid, v, idx, axis)).collect()
    };
    [g(0), g(1), g(2)]
}
