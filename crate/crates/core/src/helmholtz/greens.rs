//! Free-space reference solutions of `Δu + (λ + iε) u = f`.
//!
//! The outgoing fundamental solution is `G(x) = -e^{ik|x|} / (4π|x|)` with
//! `k = sqrt(λ + iε)`, `Im k >= 0`, so that `(Δ + k^2) G = δ`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{norm3, Grid3};
use crate::quadrature::GaussRule;

use super::operator::Bump;

/// `∫_{[-1/2,1/2]^3} dz / |z|`, the self-cell weight of `1/|x|` in units of `h^2`.
pub const CUBE_INVERSE_DISTANCE: f64 = 2.380_077_380_011_2;

/// Principal square root of `λ + iε`.
pub fn wavenumber(lambda: f64, epsilon: f64) -> C64 {
    C64::new(lambda, epsilon).sqrt()
}

pub fn fundamental(k: C64, r: f64) -> C64 {
    -(C64::i() * k * r).exp() / (4.0 * PI * r)
}

/// `u(x) = ∫ G(x - y) f(y) dy` by midpoint quadrature over the nodes of `grid`,
/// evaluated at the nodes listed in `targets`.
///
/// The singular self-cell uses `∫_cell G ≈ -(2.38008 h^2 + i k h^3) / (4π)`.
/// `f` must vanish on the two node layers next to the walls.
pub fn greens_reference(
    f: &[C64],
    lambda: f64,
    epsilon: f64,
    grid: &Grid3,
    targets: &[usize],
) -> Result<Vec<C64>> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument("source does not match the grid".into()));
    }
    if (0..grid.len()).any(|i| !grid.is_interior(i, 2) && f[i] != C64::new(0.0, 0.0)) {
        return Err(Error::SupportTouchesWall("source".into()));
    }
    let k = wavenumber(lambda, epsilon);
    let h = grid.spacing;
    let vol = grid.cell_volume();
    let support: Vec<(usize, [f64; 3], C64)> = (0..grid.len())
        .filter(|&i| f[i] != C64::new(0.0, 0.0))
        .map(|i| (i, grid.point_at(i), f[i]))
        .collect();
    let self_weight = -(CUBE_INVERSE_DISTANCE * h * h + C64::i() * k * h * h * h) / (4.0 * PI);
    Ok(targets
        .par_iter()
        .map(|&t| {
            let x = grid.point_at(t);
            let mut acc = C64::new(0.0, 0.0);
            for &(j, y, fj) in &support {
                if j == t {
                    acc += self_weight * fj;
                } else {
                    let r = norm3([x[0] - y[0], x[1] - y[1], x[2] - y[2]]);
                    acc += fundamental(k, r) * fj * vol;
                }
            }
            acc
        })
        .collect())
}

/// Semi-analytic solution for a bump centred at its own `center`:
/// `U(r) = -(1/(kr)) [e^{ikr} ∫_0^r s f sin(ks) ds + sin(kr) ∫_r^a s f e^{iks} ds]`.
#[derive(Debug, Clone)]
pub struct RadialBumpSolution {
    pub bump: Bump,
    pub k: C64,
    rule: GaussRule,
    panels: usize,
}

impl RadialBumpSolution {
    pub fn new(bump: Bump, lambda: f64, epsilon: f64) -> Self {
        Self { bump, k: wavenumber(lambda, epsilon), rule: GaussRule::new(16), panels: 8 }
    }

    fn integrals(&self, r: f64) -> (C64, C64) {
        let a = self.bump.radius;
        let k = self.k;
        let rc = r.min(a);
        let inner = |s: f64| {
            let f = self.bump.radial(s);
            (k * s).sin() * s * f
        };
        let outer = |s: f64| {
            let f = self.bump.radial(s);
            (C64::i() * k * s).exp() * s * f
        };
        let mut i1 = C64::new(0.0, 0.0);
        let mut i2 = C64::new(0.0, 0.0);
        for p in 0..self.panels {
            let t0 = p as f64 / self.panels as f64;
            let t1 = (p + 1) as f64 / self.panels as f64;
            i1 += self.rule.integrate_complex(rc * t0, rc * t1, inner);
            if rc < a {
                i2 += self.rule.integrate_complex(rc + (a - rc) * t0, rc + (a - rc) * t1, outer);
            }
        }
        (i1, i2)
    }

    /// `U(r)` with `r` measured from the bump centre.
    pub fn value_radial(&self, r: f64) -> C64 {
        let k = self.k;
        if r < 1e-12 {
            // U(0) = -∫_0^a s f e^{iks} ds
            let (_, i2) = self.integrals(0.0);
            return -i2;
        }
        let (i1, i2) = self.integrals(r);
        let w = (C64::i() * k * r).exp() * i1 + (k * r).sin() * i2;
        -w / (k * r)
    }

    /// `U'(r)`.
    pub fn derivative_radial(&self, r: f64) -> C64 {
        if r < 1e-12 {
            return C64::new(0.0, 0.0);
        }
        let k = self.k;
        let (i1, i2) = self.integrals(r);
        let w = (C64::i() * k * r).exp() * i1 + (k * r).sin() * i2;
        let dw = C64::i() * k * (C64::i() * k * r).exp() * i1 + k * (k * r).cos() * i2;
        -(dw / (k * r) - w / (k * r * r))
    }

    pub fn value(&self, x: [f64; 3]) -> C64 {
        let c = self.bump.center;
        self.value_radial(norm3([x[0] - c[0], x[1] - c[1], x[2] - c[2]]))
    }

    pub fn gradient(&self, x: [f64; 3]) -> [C64; 3] {
        let c = self.bump.center;
        let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
        let r = norm3(d);
        if r < 1e-12 {
            return [C64::new(0.0, 0.0); 3];
        }
        let du = self.derivative_radial(r);
        [du * d[0] / r, du * d[1] / r, du * d[2] / r]
    }

    pub fn sample(&self, grid: &Grid3) -> Vec<C64> {
        grid.sample(|x| self.value(x))
    }
}
