//! Discrete absorbed Helmholtz operator `Δ + p + Q + λ + iε` on a box.
//!
//! Walls are homogeneous Dirichlet. An optional stretched-coordinate layer
//! along the walls damps outgoing waves. With stretching factors `s_a(x_a)`
//! and `S = s_x s_y s_z` the layer equation is
//! `Σ_a ∂_a((S / s_a^2) ∂_a u) + S (V + λ + iε) u = S f`,
//! which keeps the matrix complex symmetric. Outside the layer `S = 1` and
//! the operator is the plain 7-point stencil.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm3, Grid3};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    /// `u = 0` on the box faces; truncation error is controlled by `ε` alone.
    Dirichlet,
    /// Absorbing layer of physical `width` inside the box, stretching
    /// `s = 1 + i strength (d / width)^2` at depth `d`.
    Pml { width: f64, strength: f64 },
}

impl Boundary {
    /// Layer `wavelengths` wavelengths thick at energy `lambda`, default strength.
    pub fn pml_wavelengths(lambda: f64, wavelengths: f64) -> Self {
        Boundary::Pml { width: wavelengths * wavelength(lambda), strength: 6.0 }
    }

    pub fn layer_width(&self) -> f64 {
        match self {
            Boundary::Dirichlet => 0.0,
            Boundary::Pml { width, .. } => *width,
        }
    }
}

pub fn wavelength(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI / lambda.sqrt()
}

pub fn points_per_wavelength(lambda: f64, h: f64) -> f64 {
    wavelength(lambda) / h
}

/// Compactly supported smooth bump `A (1 - |x - c|^2 / a^2)^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn centered(radius: f64, amplitude: f64) -> Self {
        Self { center: [0.0; 3], radius, amplitude }
    }

    #[inline]
    pub fn value(&self, x: [f64; 3]) -> f64 {
        let d = [x[0] - self.center[0], x[1] - self.center[1], x[2] - self.center[2]];
        self.radial(norm3(d))
    }

    #[inline]
    pub fn radial(&self, r: f64) -> f64 {
        let t = 1.0 - (r / self.radius).powi(2);
        if t <= 0.0 {
            0.0
        } else {
            self.amplitude * t.powi(4)
        }
    }

    pub fn sample(&self, grid: &Grid3) -> Vec<C64> {
        grid.sample(|x| C64::new(self.value(x), 0.0))
    }

    pub fn translated(&self, shift: [f64; 3]) -> Self {
        let c = self.center;
        Self { center: [c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]], ..*self }
    }
}

#[derive(Debug, Clone)]
pub struct HelmholtzProblem {
    pub lambda: f64,
    pub epsilon: f64,
    pub potential: Potential,
    pub source: Vec<C64>,
    pub grid: Grid3,
    pub boundary: Boundary,
}

impl HelmholtzProblem {
    pub fn new(
        lambda: f64,
        epsilon: f64,
        potential: Potential,
        source: Vec<C64>,
        grid: Grid3,
        boundary: Boundary,
    ) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be non-negative, got {epsilon}")));
        }
        if boundary == Boundary::Dirichlet && epsilon == 0.0 {
            return Err(Error::InvalidArgument("Dirichlet truncation needs epsilon > 0".into()));
        }
        if source.len() != grid.len() {
            return Err(Error::InvalidArgument("source does not match the grid".into()));
        }
        if let Boundary::Pml { width, strength } = boundary {
            if !(width > 0.0) || !(strength > 0.0) || width >= grid.half_width() {
                return Err(Error::InvalidArgument(format!(
                    "absorbing layer width {width} must be positive and below the half-width {}",
                    grid.half_width()
                )));
            }
        }
        Ok(Self { lambda, epsilon, potential, source, grid, boundary })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(
            self.lambda,
            epsilon,
            self.potential.clone(),
            self.source.clone(),
            self.grid,
            self.boundary,
        )
    }

    pub fn with_source(&self, source: Vec<C64>) -> Result<Self> {
        Self::new(self.lambda, self.epsilon, self.potential.clone(), source, self.grid, self.boundary)
    }

    /// Radius of the largest origin-centred ball clear of the layer and two wall cells.
    pub fn trusted_radius(&self) -> f64 {
        self.grid.inscribed_radius() - self.boundary.layer_width() - 2.0 * self.grid.spacing
    }
}

#[derive(Debug, Clone)]
pub struct Operator {
    pub grid: Grid3,
    pub lambda: f64,
    pub epsilon: f64,
    pub boundary: Boundary,
    /// Full diagonal entry at every node (identity on wall nodes).
    diag: Vec<C64>,
    /// Stretching factors at nodes, per axis.
    s_node: [Vec<C64>; 3],
    /// Reciprocal stretching at half nodes `i + 1/2`, per axis.
    inv_s_half: [Vec<C64>; 3],
    stretched: bool,
}

fn stretching(grid: &Grid3, axis: usize, boundary: &Boundary, offset: f64) -> Vec<C64> {
    let n = grid.shape[axis];
    match *boundary {
        Boundary::Dirichlet => vec![C64::new(1.0, 0.0); n],
        Boundary::Pml { width, strength } => {
            let lo = grid.lower[axis] + width;
            let hi = grid.upper()[axis] - width;
            (0..n)
                .map(|i| {
                    let x = grid.lower[axis] + (i as f64 + offset) * grid.spacing;
                    let depth = if x < lo {
                        lo - x
                    } else if x > hi {
                        x - hi
                    } else {
                        0.0
                    };
                    C64::new(1.0, strength * (depth / width).powi(2))
                })
                .collect()
        }
    }
}

/// Builds the operator, checking that the grid resolves the wavelength.
pub fn assemble(problem: &HelmholtzProblem) -> Result<Operator> {
    let grid = problem.grid;
    let ppw = points_per_wavelength(problem.lambda, grid.spacing);
    if ppw < 10.0 - 1e-9 {
        return Err(Error::UnderResolved { lambda: problem.lambda, points_per_wavelength: ppw });
    }
    if grid.shape.iter().any(|&n| n < 3) {
        return Err(Error::GridTooCoarse("the operator needs at least one interior node per axis".into()));
    }
    let s_node: [Vec<C64>; 3] = std::array::from_fn(|a| stretching(&grid, a, &problem.boundary, 0.0));
    let inv_s_half: [Vec<C64>; 3] = std::array::from_fn(|a| {
        stretching(&grid, a, &problem.boundary, 0.5).into_iter().map(|s| 1.0 / s).collect()
    });
    let stretched = matches!(problem.boundary, Boundary::Pml { .. });
    let shift = C64::new(problem.lambda, problem.epsilon);
    let h2 = grid.spacing * grid.spacing;
    let pot = &problem.potential;
    let mut op = Operator {
        grid,
        lambda: problem.lambda,
        epsilon: problem.epsilon,
        boundary: problem.boundary,
        diag: Vec::new(),
        s_node,
        inv_s_half,
        stretched,
    };
    let diag: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            if !grid.is_interior(idx, 1) {
                return C64::new(1.0, 0.0);
            }
            let x = grid.point_at(idx);
            let ijk = grid.unravel(idx);
            let v = pot.p3(x) + pot.q3(x);
            let mut coupling = C64::new(0.0, 0.0);
            for a in 0..3 {
                coupling += op.face(ijk, a, ijk[a]) + op.face(ijk, a, ijk[a] - 1);
            }
            op.volume(ijk) * (shift + v) - coupling / h2
        })
        .collect();
    op.diag = diag;
    Ok(op)
}

impl Operator {
    /// `S` at node `ijk`.
    #[inline]
    fn volume(&self, ijk: [usize; 3]) -> C64 {
        if !self.stretched {
            return C64::new(1.0, 0.0);
        }
        self.s_node[0][ijk[0]] * self.s_node[1][ijk[1]] * self.s_node[2][ijk[2]]
    }

    /// Face coefficient `S / s_a^2` between `half` and `half + 1` along `axis`.
    #[inline]
    fn face(&self, ijk: [usize; 3], axis: usize, half: usize) -> C64 {
        if !self.stretched {
            return C64::new(1.0, 0.0);
        }
        let (b, c) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        self.s_node[b][ijk[b]] * self.s_node[c][ijk[c]] * self.inv_s_half[axis][half]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn diagonal(&self) -> &[C64] {
        &self.diag
    }

    /// `y = A u`. Wall rows are the identity and interior rows ignore wall values.
    pub fn apply(&self, u: &[C64], y: &mut [C64]) {
        let grid = &self.grid;
        let st = grid.strides();
        let inv_h2 = 1.0 / (grid.spacing * grid.spacing);
        y.par_iter_mut().enumerate().for_each(|(idx, out)| {
            if !grid.is_interior(idx, 1) {
                *out = u[idx];
                return;
            }
            let ijk = grid.unravel(idx);
            let mut acc = self.diag[idx] * u[idx];
            let mut lap = C64::new(0.0, 0.0);
            for a in 0..3 {
                let s = st[a];
                let lo = if ijk[a] >= 2 { u[idx - s] } else { C64::new(0.0, 0.0) };
                let hi = if ijk[a] + 2 < grid.shape[a] { u[idx + s] } else { C64::new(0.0, 0.0) };
                if self.stretched {
                    lap += self.face(ijk, a, ijk[a]) * hi + self.face(ijk, a, ijk[a] - 1) * lo;
                } else {
                    lap += hi + lo;
                }
            }
            acc += lap * inv_h2;
            *out = acc;
        });
    }

    /// Right-hand side `S f`, zero on the walls.
    pub fn rhs(&self, f: &[C64]) -> Vec<C64> {
        let grid = &self.grid;
        (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if grid.is_interior(idx, 1) {
                    self.volume(grid.unravel(idx)) * f[idx]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.grid.len()).filter(|&i| self.grid.is_interior(i, 1)).collect()
    }

    /// Dense matrix over the interior unknowns, in [`Operator::interior_indices`] order.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let interior = self.interior_indices();
        let n = self.grid.len();
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        let mut m = vec![vec![C64::new(0.0, 0.0); interior.len()]; interior.len()];
        for (j, &cj) in interior.iter().enumerate() {
            e[cj] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            e[cj] = C64::new(0.0, 0.0);
            for (i, &ci) in interior.iter().enumerate() {
                m[i][j] = col[ci];
            }
        }
        m
    }
}
