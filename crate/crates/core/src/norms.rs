//! Agmon-Hörmander norms, weighted source norms, the radial/tangential
//! gradient split and the radiation functionals.
//!
//! Grid integrals are midpoint sums over nodes; a node belongs to a region
//! when its centre does.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eikonal::{EikonalField, RadialProfile};
use crate::error::{Error, Result};
use crate::grid::{dot3, norm3, Grid3};
use crate::quadrature::{det_sum, GaussRule};

/// Ratio of the geometric radius grid used for the supremum over `R`.
pub const RADIUS_RATIO: f64 = 1.05;

/// `(radius, value)` pairs sorted by radius with running integrals.
struct RadialPrefix {
    radii: Vec<f64>,
    cells: Vec<f64>,
    prefix: Vec<f64>,
}

impl RadialPrefix {
    fn new(grid: &Grid3, density: &[f64]) -> Self {
        let order = grid.radial_order();
        let vol = grid.cell_volume();
        let mut radii = Vec::with_capacity(order.len());
        let mut cells = Vec::with_capacity(order.len());
        let mut prefix = Vec::with_capacity(order.len());
        let mut acc = 0.0;
        for (r, i) in order {
            let c = density[i] * vol;
            acc += c;
            radii.push(r);
            cells.push(c);
            prefix.push(acc);
        }
        Self { radii, cells, prefix }
    }

    /// `∫_{|x| <= r} density`.
    fn ball(&self, r: f64) -> f64 {
        let n = self.radii.partition_point(|&s| s <= r);
        if n == 0 {
            0.0
        } else {
            self.prefix[n - 1]
        }
    }

    /// `∫_{a <= |x| <= b} density`.
    fn shell(&self, a: f64, b: f64) -> f64 {
        let lo = self.radii.partition_point(|&s| s < a);
        let hi = self.radii.partition_point(|&s| s <= b);
        if hi <= lo {
            return 0.0;
        }
        self.cells[lo..hi].iter().sum()
    }
}

/// Geometric radius grid `R0, 1.05 R0, ...` ending exactly at `r_max`.
pub fn radius_grid(r0: f64, r_max: f64) -> Vec<f64> {
    let mut out = vec![r0];
    let mut r = r0;
    while r * RADIUS_RATIO < r_max {
        r *= RADIUS_RATIO;
        out.push(r);
    }
    if r_max > r0 {
        out.push(r_max);
    }
    out
}

/// `sup_{R0 <= R <= R_max} ((1/R) ∫_{|x|<=R} density)^{1/2}` for a precomputed density `|u|^2`.
pub fn triple_norm_density(grid: &Grid3, density: &[f64], r0: f64, cap: Option<f64>) -> f64 {
    let prefix = RadialPrefix::new(grid, density);
    let r_max = cap.unwrap_or_else(|| grid.inscribed_radius()).max(r0);
    radius_grid(r0, r_max)
        .into_iter()
        .map(|r| (prefix.ball(r) / r).sqrt())
        .fold(0.0, f64::max)
}

/// `|||u|||_{R0}` with the supremum over `R` up to the inscribed radius of the grid.
pub fn triple_norm(grid: &Grid3, u: &[C64], r0: f64) -> f64 {
    triple_norm_capped(grid, u, r0, None)
}

/// `|||u|||_{R0}` with the supremum over `R <= cap`.
pub fn triple_norm_capped(grid: &Grid3, u: &[C64], r0: f64, cap: Option<f64>) -> f64 {
    let density: Vec<f64> = u.par_iter().map(|v| v.norm_sqr()).collect();
    triple_norm_density(grid, &density, r0, cap)
}

/// `|||∇u|||_{R0}`, the norm of `|∇u|`.
pub fn triple_norm_gradient(grid: &Grid3, grad: &[Vec<C64>; 3], r0: f64, cap: Option<f64>) -> f64 {
    let density: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| grad[0][i].norm_sqr() + grad[1][i].norm_sqr() + grad[2][i].norm_sqr())
        .collect();
    triple_norm_density(grid, &density, r0, cap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub r0: f64,
    /// `2^{J-1} < R0 < 2^J`.
    pub j: i32,
    /// `R0` is a power of two and `J = log2(R0)` was taken.
    pub tie_break: bool,
}

impl DyadicDecomposition {
    pub fn new(r0: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::InvalidArgument(format!("R0 must be positive, got {r0}")));
        }
        let l = r0.log2();
        let tie_break = (l - l.round()).abs() < 1e-12;
        let j = if tie_break { l.round() as i32 } else { l.ceil() as i32 };
        Ok(Self { r0, j, tie_break })
    }

    /// Annuli `C(j) = [2^j, 2^{j+1}]` for `j > J` whose inner radius lies below `r_max`.
    pub fn annuli(&self, r_max: f64) -> Vec<(i32, f64, f64)> {
        let mut out = Vec::new();
        let mut j = self.j + 1;
        while 2f64.powi(j) < r_max {
            out.push((j, 2f64.powi(j), 2f64.powi(j + 1)));
            j += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NNorm {
    pub value: f64,
    pub decomposition: DyadicDecomposition,
    /// `(2^{j+1} ∫_{C(j)} |f|^2)^{1/2}` per annulus.
    pub blocks: Vec<(i32, f64)>,
    /// `(R0 ∫_{|x|<=R0} |f|^2)^{1/2}`.
    pub compact: f64,
}

/// `N_{R0}(f)`, annuli clipped at the grid.
pub fn n_norm(grid: &Grid3, f: &[C64], r0: f64) -> Result<NNorm> {
    let density: Vec<f64> = f.par_iter().map(|v| v.norm_sqr()).collect();
    n_norm_density(grid, &density, r0)
}

pub fn n_norm_density(grid: &Grid3, density: &[f64], r0: f64) -> Result<NNorm> {
    let dec = DyadicDecomposition::new(r0)?;
    let prefix = RadialPrefix::new(grid, density);
    let r_max = prefix.radii.last().copied().unwrap_or(0.0);
    let blocks: Vec<(i32, f64)> = dec
        .annuli(r_max)
        .into_iter()
        .map(|(j, a, b)| (j, (b * prefix.shell(a, b)).sqrt()))
        .collect();
    let compact = (r0 * prefix.ball(r0)).sqrt();
    let value = blocks.iter().map(|b| b.1).sum::<f64>() + compact;
    Ok(NNorm { value, decomposition: dec, blocks, compact })
}

/// `∫ |x|^power |f|^2`.
pub fn weighted_source_norm(grid: &Grid3, f: &[C64], power: f64) -> f64 {
    grid.integrate(|i| grid.radius_at(i).powf(power) * f[i].norm_sqr())
}

/// `∫ (1 + ε|x|) |x|^3 |f|^2`.
pub fn weighted_source_norm_absorbed(grid: &Grid3, f: &[C64], epsilon: f64) -> f64 {
    grid.integrate(|i| {
        let r = grid.radius_at(i);
        (1.0 + epsilon * r) * r.powi(3) * f[i].norm_sqr()
    })
}

/// Radial and tangential parts of `∇u` with respect to `∇K`, on a list of nodes.
#[derive(Debug, Clone)]
pub struct GradientSplit {
    pub nodes: Vec<usize>,
    /// `(∇K/|∇K|) · ∇u`
    pub radial: Vec<C64>,
    /// `∇u - (∇K/|∇K|) ∇_r u`
    pub tangential: Vec<[C64; 3]>,
}

/// Smallest `|∇K|` accepted by [`gradient_split`].
pub const MIN_GRAD_K: f64 = 1e-8;

pub fn gradient_split(grad: &[Vec<C64>; 3], field: &EikonalField, nodes: &[usize]) -> Result<GradientSplit> {
    let parts: Vec<Option<(C64, [C64; 3])>> = nodes
        .par_iter()
        .map(|&i| {
            let gk = field.grad_k_at(i);
            let n = norm3(gk);
            if n < MIN_GRAD_K {
                return None;
            }
            let e = [gk[0] / n, gk[1] / n, gk[2] / n];
            let du = [grad[0][i], grad[1][i], grad[2][i]];
            let radial = du[0] * e[0] + du[1] * e[1] + du[2] * e[2];
            Some((radial, std::array::from_fn(|a| du[a] - radial * e[a])))
        })
        .collect();
    let mut radial = Vec::with_capacity(nodes.len());
    let mut tangential = Vec::with_capacity(nodes.len());
    for (p, &i) in parts.into_iter().zip(nodes) {
        let (r, t) = p.ok_or_else(|| {
            Error::InvalidArgument(format!("|∇K| vanishes at node {i} ({:?})", field.grid.point_at(i)))
        })?;
        radial.push(r);
        tangential.push(t);
    }
    Ok(GradientSplit { nodes: nodes.to_vec(), radial, tangential })
}

/// `|∇u - i sqrt(λ) u ∇K|^2 = |∇(e^{-i sqrt(λ) K} u)|^2`.
#[inline]
pub fn gauge_density(u: C64, du: [C64; 3], grad_k: [f64; 3], sqrt_lambda: f64) -> f64 {
    let iu = C64::i() * sqrt_lambda * u;
    (0..3).map(|a| (du[a] - iu * grad_k[a]).norm_sqr()).sum()
}

/// `R ∫_{K >= R, |x| <= trusted} |∇(e^{-i sqrt(λ) K} u)|^2`, optionally weighted by `|∇K|^2`.
pub fn radiation_functional(
    u: &[C64],
    grad: &[Vec<C64>; 3],
    field: &EikonalField,
    lambda: f64,
    r: f64,
    trusted_radius: f64,
    weighted: bool,
) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("radiation functional needs R >= 1, got {r}")));
    }
    let grid = &field.grid;
    let sl = lambda.sqrt();
    let inside = |i: usize| field.k[i] >= r && grid.radius_at(i) <= trusted_radius;
    if !(0..grid.len()).any(inside) {
        return Err(Error::EmptyRegion(format!("{{K >= {r}}} inside |x| <= {trusted_radius}")));
    }
    let integral = grid.integrate(|i| {
        if !inside(i) {
            return 0.0;
        }
        let gk = field.grad_k_at(i);
        let d = gauge_density(u[i], [grad[0][i], grad[1][i], grad[2][i]], gk, sl);
        if weighted {
            d * dot3(gk, gk)
        } else {
            d
        }
    });
    Ok(r * integral)
}

/// `∫_{0 < K <= R, |x| <= trusted} |∇K|^2 K |∇_r u - i sqrt(λ)|∇K| u + ((d-1)/(2K)) |∇K| u|^2`.
pub fn interior_functional(
    u: &[C64],
    grad: &[Vec<C64>; 3],
    field: &EikonalField,
    lambda: f64,
    r: f64,
    trusted_radius: f64,
) -> Result<f64> {
    let grid = &field.grid;
    let sl = lambda.sqrt();
    let d = 3.0;
    let inside = |i: usize| field.k[i] > 0.0 && field.k[i] <= r && grid.radius_at(i) <= trusted_radius;
    if !(0..grid.len()).any(inside) {
        return Err(Error::EmptyRegion(format!("{{K <= {r}}} inside |x| <= {trusted_radius}")));
    }
    Ok(grid.integrate(|i| {
        if !inside(i) {
            return 0.0;
        }
        let gk = field.grad_k_at(i);
        let n = norm3(gk);
        if n < MIN_GRAD_K {
            return 0.0;
        }
        let k = field.k[i];
        let dr = (grad[0][i] * gk[0] + grad[1][i] * gk[1] + grad[2][i] * gk[2]) / n;
        let bracket = dr - C64::i() * sl * n * u[i] + (d - 1.0) / (2.0 * k) * n * u[i];
        n * n * k * bracket.norm_sqr()
    }))
}

/// A complex field with a known gradient, evaluated off the grid.
pub trait ScalarField3: Sync {
    fn value(&self, x: [f64; 3]) -> C64;
    fn gradient(&self, x: [f64; 3]) -> [C64; 3];
}

/// A phase function `K` whose level sets are star-shaped about the origin.
pub trait Geometry: Sync {
    fn k(&self, x: [f64; 3]) -> f64;
    fn grad_k(&self, x: [f64; 3]) -> [f64; 3];
    /// Radius along the unit direction `dir` where `K = level`.
    fn level_radius(&self, dir: [f64; 3], level: f64) -> f64;
}

/// `K = |x|`.
pub struct SphericalGeometry;

impl Geometry for SphericalGeometry {
    fn k(&self, x: [f64; 3]) -> f64 {
        norm3(x)
    }

    fn grad_k(&self, x: [f64; 3]) -> [f64; 3] {
        let r = norm3(x);
        [x[0] / r, x[1] / r, x[2] / r]
    }

    fn level_radius(&self, _dir: [f64; 3], level: f64) -> f64 {
        level
    }
}

/// Radially symmetric `K` from an eikonal profile.
pub struct RadialGeometry<'a>(pub &'a RadialProfile);

impl Geometry for RadialGeometry<'_> {
    fn k(&self, x: [f64; 3]) -> f64 {
        self.0.k(norm3(x))
    }

    fn grad_k(&self, x: [f64; 3]) -> [f64; 3] {
        let r = norm3(x);
        let s = self.0.kprime(r) / r;
        [s * x[0], s * x[1], s * x[2]]
    }

    fn level_radius(&self, _dir: [f64; 3], level: f64) -> f64 {
        // K is increasing: Newton from r = level, safeguarded by bisection
        let (mut lo, mut hi) = (0.0, level.max(1e-12));
        while self.0.k(hi) < level {
            lo = hi;
            hi *= 2.0;
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..100 {
            let f = self.0.k(r) - level;
            if f.abs() <= 1e-14 * level.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let newton = r - f / self.0.kprime(r);
            r = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        r
    }
}

/// Quadrature orders of [`radiation_functional_analytic`].
#[derive(Debug, Clone, Copy)]
pub struct SphereQuadrature {
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_radial: usize,
    pub radial_panels: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        Self { n_theta: 24, n_phi: 48, n_radial: 16, radial_panels: 16 }
    }
}

/// `R ∫_{K >= R} |∇(e^{-i sqrt(λ) K} u)|^2` for an analytic field, by Gauss-Legendre
/// in `cos θ`, the trapezoid rule in `φ` and `r = r_R / t` in the radius
/// (or a plain radial rule when `r_max` truncates the region).
pub fn radiation_functional_analytic(
    u: &dyn ScalarField3,
    geom: &dyn Geometry,
    lambda: f64,
    r: f64,
    r_max: Option<f64>,
    weighted: bool,
    quad: SphereQuadrature,
) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("radiation functional needs R >= 1, got {r}")));
    }
    let sl = lambda.sqrt();
    let theta_rule = GaussRule::new(quad.n_theta);
    let radial_rule = GaussRule::new(quad.n_radial);
    let dirs: Vec<([f64; 3], f64)> = theta_rule
        .points(-1.0, 1.0)
        .flat_map(|(c, wc)| {
            let s = (1.0 - c * c).sqrt();
            (0..quad.n_phi).map(move |k| {
                let phi = 2.0 * PI * k as f64 / quad.n_phi as f64;
                ([s * phi.cos(), s * phi.sin(), c], wc * 2.0 * PI / quad.n_phi as f64)
            })
        })
        .collect();
    let density = |x: [f64; 3]| {
        let gk = geom.grad_k(x);
        let d = gauge_density(u.value(x), u.gradient(x), gk, sl);
        if weighted {
            d * dot3(gk, gk)
        } else {
            d
        }
    };
    let total = det_sum(dirs.len(), |di| {
        let (dir, w) = dirs[di];
        let r_lo = geom.level_radius(dir, r);
        let at = |rr: f64| [dir[0] * rr, dir[1] * rr, dir[2] * rr];
        let mut acc = 0.0;
        match r_max {
            Some(rm) if rm > r_lo => {
                for p in 0..quad.radial_panels {
                    let a = r_lo + (rm - r_lo) * p as f64 / quad.radial_panels as f64;
                    let b = r_lo + (rm - r_lo) * (p + 1) as f64 / quad.radial_panels as f64;
                    acc += radial_rule.integrate(a, b, |rr| density(at(rr)) * rr * rr);
                }
            }
            Some(_) => {}
            None => {
                for p in 0..quad.radial_panels {
                    let a = p as f64 / quad.radial_panels as f64;
                    let b = (p + 1) as f64 / quad.radial_panels as f64;
                    acc += radial_rule.integrate(a, b, |t| {
                        let rr = r_lo / t;
                        density(at(rr)) * rr * rr * r_lo / (t * t)
                    });
                }
            }
        }
        acc * w
    });
    Ok(r * total)
}
