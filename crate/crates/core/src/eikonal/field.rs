//! The eikonal geometry on a grid: `g = K/|x|`, its derivatives, the tensor
//! `F_ij` of the Hessian identity and the gradient of its trace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{diff1, diff2, dot3, norm3, Grid3};
use crate::potential::Potential;

use super::radial::{solve_eikonal_radial, Normalization, RadialProfile};

/// Index of `(a, b)` in the packed symmetric layout `xx, xy, xz, yy, yz, zz`.
#[inline]
pub fn sym(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

pub type Vector = [Vec<f64>; 3];
pub type SymTensor = [Vec<f64>; 6];

#[derive(Debug, Clone)]
pub struct EikonalField {
    pub grid: Grid3,
    pub lambda: f64,
    pub normalization: Normalization,
    /// Radius inside which fields come from the radial profile.
    pub core_radius: f64,
    pub k: Vec<f64>,
    pub grad_k: Vector,
    pub g: Vec<f64>,
    pub dg: Vector,
    pub d2g: SymTensor,
    /// `x̂ · ∇(∂_i g)`.
    pub d_r_dg: Vector,
    pub grad_laplace_g: Vector,
    pub f: SymTensor,
    pub trace_f: Vec<f64>,
    /// `∇ Σ F_ii` by differentiating the assembled trace.
    pub grad_trace_f: Vector,
    /// `∇ Σ F_ii` from the closed form in terms of `g` and `p`.
    pub grad_trace_f_closed: Vector,
    /// Max over trusted nodes of `|grad_trace_f - grad_trace_f_closed|`.
    pub trace_discrepancy: f64,
    pub c0: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FieldOptions {
    /// Radius of the ball where fields are taken from the radial profile. Default `4h`.
    pub core_radius: Option<f64>,
    pub normalization: Normalization,
}

/// Point values of every field, used for the radial extension near the origin.
#[derive(Debug, Clone, Copy, Default)]
struct PointValues {
    g: f64,
    grad_k: [f64; 3],
    dg: [f64; 3],
    d2g: [f64; 6],
    d_r_dg: [f64; 3],
    grad_laplace_g: [f64; 3],
    f: [f64; 6],
    trace_f: f64,
    grad_trace_f: [f64; 3],
}

fn radial_point(profile: &RadialProfile, x: [f64; 3]) -> PointValues {
    let r = norm3(x);
    if r == 0.0 {
        let c = profile.kprime3(0.0) / 3.0;
        let mut d2g = [0.0; 6];
        for a in 0..3 {
            d2g[sym(a, a)] = c;
        }
        return PointValues { g: profile.kprime(0.0), d2g, ..Default::default() };
    }
    let e = [x[0] / r, x[1] / r, x[2] / r];
    let [g, g1, g2, g3] = profile.g_derivatives(r);
    let k = profile.k(r);
    let k1 = profile.kprime(r);
    let k2 = profile.kprime2(r);
    let k3 = profile.kprime3(r);
    let radial_f = k * k2;
    let tangential_f = k * k1 / r - k1 * k1;
    let mut pv = PointValues { g, ..Default::default() };
    let lap_prime = g3 + 2.0 * g2 / r - 2.0 * g1 / (r * r);
    let tf_prime =
        k * k3 - 3.0 * k1 * k2 + 2.0 * k * k2 / r + 2.0 * k1 * k1 / r - 2.0 * k * k1 / (r * r);
    for a in 0..3 {
        pv.grad_k[a] = k1 * e[a];
        pv.dg[a] = g1 * e[a];
        pv.d_r_dg[a] = g2 * e[a];
        pv.grad_laplace_g[a] = lap_prime * e[a];
        pv.grad_trace_f[a] = tf_prime * e[a];
        for b in a..3 {
            let ee = e[a] * e[b];
            let id = if a == b { 1.0 } else { 0.0 };
            pv.d2g[sym(a, b)] = g2 * ee + (g1 / r) * (id - ee);
            pv.f[sym(a, b)] = radial_f * ee + tangential_f * (id - ee);
        }
    }
    pv.trace_f = radial_f + 2.0 * tangential_f;
    pv
}

/// Samples `K` from a radial profile at every node.
pub fn sample_profile(profile: &RadialProfile, grid: &Grid3) -> Vec<f64> {
    grid.sample(|x| profile.k(norm3(x)))
}

/// Radial profile long enough to cover `grid`, in the requested normalization.
pub fn profile_for_grid(
    pot: &Potential,
    lambda: f64,
    grid: &Grid3,
    normalization: Normalization,
) -> Result<RadialProfile> {
    let reach = (0..3)
        .map(|a| grid.lower[a].abs().max(grid.upper()[a].abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    let r_max = reach + 2.0 * grid.spacing;
    let n = ((r_max / 0.05).ceil() as usize).max(256);
    solve_eikonal_radial(pot, lambda, r_max, n)?.with_normalization(normalization)
}

/// Builds every derived field from grid samples of `K`.
///
/// Derivatives are centered differences (one-sided on the faces). Inside the
/// core ball `|x| < r0` the fields are replaced by the radial closed forms when
/// the potential is radial.
pub fn build_eikonal_field(
    k: &[f64],
    pot: &Potential,
    lambda: f64,
    grid: &Grid3,
    opts: &FieldOptions,
) -> Result<EikonalField> {
    let profile = if pot.is_radial() {
        Some(profile_for_grid(pot, lambda, grid, opts.normalization)?)
    } else {
        if opts.normalization == Normalization::Asymptotic {
            return Err(Error::InvalidArgument(
                "asymptotic normalization needs a radial profile".into(),
            ));
        }
        None
    };
    build_with_profile(k, pot, lambda, grid, opts, profile.as_ref())
}

/// Field built from the radial profile itself (no grid eikonal solve).
pub fn field_from_profile(
    pot: &Potential,
    lambda: f64,
    grid: &Grid3,
    opts: &FieldOptions,
) -> Result<EikonalField> {
    let profile = profile_for_grid(pot, lambda, grid, opts.normalization)?;
    let k = sample_profile(&profile, grid);
    let mut field = build_with_profile(&k, pot, lambda, grid, opts, Some(&profile))?;
    // exact ∇K = K'(r) x̂ replaces the differenced one
    for i in 0..grid.len() {
        let x = grid.point_at(i);
        let r = norm3(x);
        let kp = if r > 0.0 { profile.kprime(r) / r } else { 0.0 };
        for a in 0..3 {
            field.grad_k[a][i] = kp * x[a];
        }
    }
    Ok(field)
}

fn build_with_profile(
    k: &[f64],
    pot: &Potential,
    lambda: f64,
    grid: &Grid3,
    opts: &FieldOptions,
    profile: Option<&RadialProfile>,
) -> Result<EikonalField> {
    if grid.shape.iter().any(|&n| n < 5) {
        return Err(Error::GridTooCoarse(format!(
            "second differences need at least 5 points per axis, got {:?}",
            grid.shape
        )));
    }
    if k.len() != grid.len() {
        return Err(Error::InvalidArgument("K samples do not match the grid".into()));
    }
    let n = grid.len();
    let h = grid.spacing;
    let r0 = opts.core_radius.unwrap_or(4.0 * h);
    let origin = grid.origin_index();

    let mut g: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let r = grid.radius_at(idx);
            if r > 0.0 {
                k[idx] / r
            } else {
                f64::NAN
            }
        })
        .collect();
    if let Some(o) = origin {
        g[o] = match profile {
            Some(p) => p.kprime(0.0),
            None => {
                let st = grid.strides();
                let mut acc = 0.0;
                let mut cnt = 0.0;
                let ijk = grid.unravel(o);
                for a in 0..3 {
                    if ijk[a] > 0 {
                        acc += g[o - st[a]];
                        cnt += 1.0;
                    }
                    if ijk[a] + 1 < grid.shape[a] {
                        acc += g[o + st[a]];
                        cnt += 1.0;
                    }
                }
                acc / cnt
            }
        };
    }

    let vec_field = |src: &[f64]| -> Vector {
        let d = |a: usize| (0..n).into_par_iter().map(|i| diff1(grid, src, i, a)).collect::<Vec<f64>>();
        [d(0), d(1), d(2)]
    };
    let grad_k = vec_field(k);
    let dg = vec_field(&g);
    let d2g: SymTensor = std::array::from_fn(|s| {
        let (a, b) = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)][s];
        (0..n)
            .into_par_iter()
            .map(|i| {
                if grid.is_interior(i, 1) {
                    diff2(grid, &g, i, a, b)
                } else {
                    0.5 * (diff1(grid, &dg[a], i, b) + diff1(grid, &dg[b], i, a))
                }
            })
            .collect()
    });
    let lap_g: Vec<f64> = (0..n).into_par_iter().map(|i| d2g[0][i] + d2g[3][i] + d2g[5][i]).collect();
    let grad_laplace_g = vec_field(&lap_g);

    let d_r_dg: Vector = std::array::from_fn(|a| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = grid.point_at(i);
                let r = norm3(x);
                if r == 0.0 {
                    return 0.0;
                }
                (0..3).map(|b| d2g[sym(a, b)][i] * x[b] / r).sum()
            })
            .collect()
    });

    let f: SymTensor = std::array::from_fn(|s| {
        let (a, b) = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)][s];
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = grid.point_at(i);
                let dgi = [dg[0][i], dg[1][i], dg[2][i]];
                f_component(x, g[i], dgi, d2g[s][i], a, b)
            })
            .collect()
    });
    let trace_f: Vec<f64> = (0..n).into_par_iter().map(|i| f[0][i] + f[3][i] + f[5][i]).collect();
    let grad_trace_f = vec_field(&trace_f);

    let d = pot.dimension() as f64;
    let closed: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.point_at(i);
            let r = norm3(x);
            if r == 0.0 {
                return [0.0; 3];
            }
            let dgi = [dg[0][i], dg[1][i], dg[2][i]];
            let drg = dot3(dgi, x) / r;
            let lap = lap_g[i];
            let gp = pot.grad_p3(x);
            let mut out = [0.0; 3];
            for a in 0..3 {
                let dr_drg = d_r_dg[a][i] + (dgi[a] - x[a] / r * drg) / r;
                out[a] = -(d - 1.0) * (gp[a] / lambda - 2.0 * g[i] * dgi[a])
                    + 2.0 * x[a] * g[i] * lap
                    + r * r * dgi[a] * lap
                    + r * r * g[i] * grad_laplace_g[a][i]
                    + 2.0 * dgi[a] * r * drg
                    + 2.0 * g[i] * x[a] / r * drg
                    + 2.0 * g[i] * r * dr_drg;
            }
            out
        })
        .collect();
    let grad_trace_f_closed: Vector = std::array::from_fn(|a| closed.iter().map(|v| v[a]).collect());

    let mut field = EikonalField {
        grid: *grid,
        lambda,
        normalization: opts.normalization,
        core_radius: r0,
        k: k.to_vec(),
        grad_k,
        g,
        dg,
        d2g,
        d_r_dg,
        grad_laplace_g,
        f,
        trace_f,
        grad_trace_f,
        grad_trace_f_closed,
        trace_discrepancy: 0.0,
        c0: 0.0,
        c1: 0.0,
    };

    if let Some(profile) = profile {
        let core: Vec<usize> = (0..n).filter(|&i| grid.radius_at(i) < r0).collect();
        let values: Vec<PointValues> =
            core.par_iter().map(|&i| radial_point(profile, grid.point_at(i))).collect();
        for (&i, pv) in core.iter().zip(&values) {
            field.g[i] = pv.g;
            field.trace_f[i] = pv.trace_f;
            for a in 0..3 {
                field.grad_k[a][i] = pv.grad_k[a];
                field.dg[a][i] = pv.dg[a];
                field.d_r_dg[a][i] = pv.d_r_dg[a];
                field.grad_laplace_g[a][i] = pv.grad_laplace_g[a];
                field.grad_trace_f[a][i] = pv.grad_trace_f[a];
                field.grad_trace_f_closed[a][i] = pv.grad_trace_f[a];
            }
            for s in 0..6 {
                field.d2g[s][i] = pv.d2g[s];
                field.f[s][i] = pv.f[s];
            }
        }
    }

    let trusted = field.trusted_nodes(2);
    field.trace_discrepancy = trusted
        .par_iter()
        .map(|&i| {
            (0..3)
                .map(|a| (field.grad_trace_f[a][i] - field.grad_trace_f_closed[a][i]).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let (c0, c1) = (0..n)
        .filter(|&i| grid.radius_at(i) > 0.0)
        .map(|i| field.g[i])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    field.c0 = c0;
    field.c1 = c1;
    Ok(field)
}

/// One entry of `F_ij` from `g`, `∇g` and `∂_ij g` at `x`.
#[inline]
pub fn f_component(x: [f64; 3], g: f64, dg: [f64; 3], d2g_ab: f64, a: usize, b: usize) -> f64 {
    let r2 = dot3(x, x);
    let diag = if a == b { r2 * dot3(dg, dg) + 2.0 * g * dot3(x, dg) } else { 0.0 };
    -diag + r2 * dg[a] * dg[b] + 2.0 * x[a] * g * dg[b] + 2.0 * x[b] * g * dg[a] + g * r2 * d2g_ab
}

/// Which field [`EikonalField::samples`] extracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldName {
    /// `|g - 1|`
    G,
    /// `|x̂ · ∇g|`
    DrG,
    /// `|∇g|`
    DG,
    /// `max_ij |∂_ij g|`
    D2G,
    /// `|∇Δg|`
    GradLaplaceG,
    /// `max_ij |F_ij|`
    F,
    /// `|∇ Σ F_ii|`
    GradTraceF,
}

impl FieldName {
    pub const ALL: [FieldName; 7] = [
        FieldName::G,
        FieldName::DrG,
        FieldName::DG,
        FieldName::D2G,
        FieldName::GradLaplaceG,
        FieldName::F,
        FieldName::GradTraceF,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FieldName::G => "g_minus_1",
            FieldName::DrG => "dr_g",
            FieldName::DG => "grad_g",
            FieldName::D2G => "hess_g",
            FieldName::GradLaplaceG => "grad_laplace_g",
            FieldName::F => "f",
            FieldName::GradTraceF => "grad_trace_f",
        }
    }

    /// Expected decay rate `r^{-rate}` at infinity for the asymptotic normalization.
    pub fn expected_rate(self, delta: f64) -> f64 {
        match self {
            FieldName::G => 2.0 + delta,
            FieldName::DrG | FieldName::DG => 3.0 + delta,
            FieldName::D2G => 4.0 + delta,
            FieldName::GradLaplaceG => 5.0 + delta,
            FieldName::F => 2.0 + delta,
            FieldName::GradTraceF => 3.0 + delta,
        }
    }
}

impl EikonalField {
    /// Spherical geometry `K = |x|`: `g = 1`, `∇K = x̂`, every correction zero.
    pub fn spherical(grid: &Grid3) -> Self {
        let n = grid.len();
        let zeros = || vec![0.0; n];
        let k = grid.sample(norm3);
        let grad_k: Vector = std::array::from_fn(|a| {
            grid.sample(|x| {
                let r = norm3(x);
                if r > 0.0 {
                    x[a] / r
                } else {
                    0.0
                }
            })
        });
        EikonalField {
            grid: *grid,
            lambda: f64::INFINITY,
            normalization: Normalization::Origin,
            core_radius: 0.0,
            k,
            grad_k,
            g: vec![1.0; n],
            dg: std::array::from_fn(|_| zeros()),
            d2g: std::array::from_fn(|_| zeros()),
            d_r_dg: std::array::from_fn(|_| zeros()),
            grad_laplace_g: std::array::from_fn(|_| zeros()),
            f: std::array::from_fn(|_| zeros()),
            trace_f: zeros(),
            grad_trace_f: std::array::from_fn(|_| zeros()),
            grad_trace_f_closed: std::array::from_fn(|_| zeros()),
            trace_discrepancy: 0.0,
            c0: 1.0,
            c1: 1.0,
        }
    }

    /// Nodes at least `layers` from every face and outside the core ball.
    pub fn trusted_nodes(&self, layers: usize) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_interior(i, layers) && self.grid.radius_at(i) >= self.core_radius)
            .collect()
    }

    #[inline]
    pub fn grad_k_at(&self, i: usize) -> [f64; 3] {
        [self.grad_k[0][i], self.grad_k[1][i], self.grad_k[2][i]]
    }

    #[inline]
    pub fn f_at(&self, i: usize) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.f[sym(a, b)][i]))
    }

    /// `(|x|, magnitude)` of the named field at trusted nodes.
    pub fn samples(&self, which: FieldName) -> Vec<(f64, f64)> {
        let vnorm = |v: &Vector, i: usize| (v[0][i].powi(2) + v[1][i].powi(2) + v[2][i].powi(2)).sqrt();
        let tmax = |t: &SymTensor, i: usize| t.iter().map(|c| c[i].abs()).fold(0.0, f64::max);
        self.trusted_nodes(2)
            .into_iter()
            .map(|i| {
                let x = self.grid.point_at(i);
                let r = norm3(x);
                let v = match which {
                    FieldName::G => (self.g[i] - 1.0).abs(),
                    FieldName::DrG => {
                        ((self.dg[0][i] * x[0] + self.dg[1][i] * x[1] + self.dg[2][i] * x[2]) / r).abs()
                    }
                    FieldName::DG => vnorm(&self.dg, i),
                    FieldName::D2G => tmax(&self.d2g, i),
                    FieldName::GradLaplaceG => vnorm(&self.grad_laplace_g, i),
                    FieldName::F => tmax(&self.f, i),
                    FieldName::GradTraceF => vnorm(&self.grad_trace_f, i),
                };
                (r, v)
            })
            .collect()
    }

    /// Max of `|(|∇K|^2 - 1 - p/λ)|` over trusted nodes.
    pub fn eikonal_residual(&self, pot: &Potential) -> f64 {
        self.trusted_nodes(1)
            .par_iter()
            .map(|&i| {
                let gk = self.grad_k_at(i);
                (dot3(gk, gk) - 1.0 - pot.p3(self.grid.point_at(i)) / self.lambda).abs()
            })
            .reduce(|| 0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    /// `max` divided by the largest `|∂_ij K|` over the same nodes.
    pub normalized: f64,
    pub nodes: usize,
}

/// Residual of `∂_ij K = (|∇K|^2/K) δ_ij - ∂_iK ∂_jK / K + F_ij / K` with
/// `∂_ij K` by centered differences, over trusted interior nodes with `|x| >= r_min`.
pub fn lemma1_residual(field: &EikonalField, r_min: f64) -> ResidualStats {
    let grid = &field.grid;
    let nodes: Vec<usize> = field
        .trusted_nodes(1)
        .into_iter()
        .filter(|&i| grid.radius_at(i) >= r_min)
        .collect();
    let per_node: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&i| {
            let k = field.k[i];
            let gk = field.grad_k_at(i);
            let gk2 = dot3(gk, gk);
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for a in 0..3 {
                for b in a..3 {
                    let hess = diff2(grid, &field.k, i, a, b);
                    let id = if a == b { 1.0 } else { 0.0 };
                    let rhs = gk2 / k * id - gk[a] * gk[b] / k + field.f[sym(a, b)][i] / k;
                    worst = worst.max((hess - rhs).abs());
                    scale = scale.max(hess.abs());
                }
            }
            (worst, scale)
        })
        .collect();
    if per_node.is_empty() {
        return ResidualStats { max: 0.0, mean: 0.0, normalized: 0.0, nodes: 0 };
    }
    let max = per_node.iter().map(|v| v.0).fold(0.0, f64::max);
    let scale = per_node.iter().map(|v| v.1).fold(0.0, f64::max);
    let mean = per_node.iter().map(|v| v.0).sum::<f64>() / per_node.len() as f64;
    ResidualStats {
        max,
        mean,
        normalized: if scale > 0.0 { max / scale } else { 0.0 },
        nodes: per_node.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_potential, PotentialSpec};

    #[test]
    fn free_field_is_trivial() {
        let pot = make_potential(&PotentialSpec::zero()).unwrap();
        let grid = Grid3::centered(8, 0.5);
        let field = field_from_profile(&pot, 4.0, &grid, &FieldOptions::default()).unwrap();
        for i in 0..grid.len() {
            assert!((field.g[i] - 1.0).abs() < 1e-12);
            for s in 0..6 {
                assert!(field.f[s][i].abs() < 1e-9);
            }
            for a in 0..3 {
                assert!(field.dg[a][i].abs() < 1e-10);
            }
        }
        assert_eq!(field.c0, field.c1);
    }

    #[test]
    fn constant_potential_gives_constant_g() {
        let pot = make_potential(&PotentialSpec::new("constant", 0.5, 0.4, 0.0)).unwrap();
        let grid = Grid3::centered(6, 0.5);
        let field = field_from_profile(&pot, 2.0, &grid, &FieldOptions::default()).unwrap();
        let s = 1.2f64.sqrt();
        for i in 0..grid.len() {
            assert!((field.g[i] - s).abs() < 1e-12);
            for t in 0..6 {
                assert!(field.f[t][i].abs() < 1e-8);
            }
        }
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        let pot = make_potential(&PotentialSpec::zero()).unwrap();
        let grid = Grid3::centered(1, 0.5);
        let k = grid.sample(norm3);
        assert!(matches!(
            build_eikonal_field(&k, &pot, 4.0, &grid, &FieldOptions::default()),
            Err(Error::GridTooCoarse(_))
        ));
    }

    #[test]
    fn radial_closed_forms_agree_with_differences() {
        let pot = make_potential(&PotentialSpec::long_range(0.5, 0.5)).unwrap();
        let grid = Grid3::centered(20, 0.1);
        let field = field_from_profile(&pot, 1.0, &grid, &FieldOptions { core_radius: Some(0.0), ..Default::default() }).unwrap();
        let profile = profile_for_grid(&pot, 1.0, &grid, Normalization::Origin).unwrap();
        let i = grid.index(27, 24, 22);
        let pv = radial_point(&profile, grid.point_at(i));
        for s in 0..6 {
            assert!((pv.f[s] - field.f[s][i]).abs() < 1e-3 * (1.0 + pv.f[s].abs()), "F[{s}]");
            assert!((pv.d2g[s] - field.d2g[s][i]).abs() < 1e-3);
        }
        for a in 0..3 {
            assert!((pv.grad_trace_f[a] - field.grad_trace_f[a][i]).abs() < 2e-3);
            assert!((pv.grad_trace_f[a] - field.grad_trace_f_closed[a][i]).abs() < 2e-3);
        }
    }
}
