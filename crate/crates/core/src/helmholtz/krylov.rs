//! Solvers for the complex symmetric Helmholtz system.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::gradient_complex;
use crate::quadrature::det_sum_complex;

use super::operator::{Boundary, Operator};

/// Interior unknowns at or below which `Method::Auto` factorizes densely.
pub const DIRECT_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense LU for tiny systems, otherwise COCG with a BiCGSTAB retry.
    #[default]
    Auto,
    Cocg,
    Bicgstab,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 20_000, method: Method::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub method: Method,
    pub iterations: usize,
    /// Final relative residual `|A u - S f| / |S f|`, recomputed from `u`.
    pub residual: f64,
    /// Relative residual every 10 iterations.
    pub history: Vec<f64>,
    /// `max |u|` on the two node layers next to the walls over `max |u|`.
    pub wall_ratio: f64,
    /// Dirichlet runs whose wall ratio exceeds 1%.
    pub wall_contaminated: bool,
}

#[derive(Debug, Clone)]
pub struct SolutionField {
    pub u: Vec<C64>,
    pub grad: [Vec<C64>; 3],
    pub diagnostics: SolveDiagnostics,
}

#[inline]
fn bilinear(a: &[C64], b: &[C64]) -> C64 {
    det_sum_complex(a.len(), |i| a[i] * b[i])
}

#[inline]
fn norm2(a: &[C64]) -> f64 {
    det_sum_complex(a.len(), |i| C64::new(a[i].norm_sqr(), 0.0)).re.sqrt()
}

/// Solves `A u = S f` from a zero initial guess.
pub fn solve(op: &Operator, f: &[C64], opts: &SolveOptions) -> Result<SolutionField> {
    if op.epsilon <= 0.0 && op.boundary == Boundary::Dirichlet {
        return Err(Error::InvalidArgument("solve needs epsilon > 0".into()));
    }
    let b = op.rhs(f);
    let n = b.len();
    let bnorm = norm2(&b);
    if bnorm == 0.0 {
        return Ok(finish(op, vec![C64::new(0.0, 0.0); n], opts.method, 0, 0.0, vec![0.0]));
    }
    let interior = op.interior_indices().len();
    let method = match opts.method {
        Method::Auto if interior <= DIRECT_LIMIT => Method::Direct,
        m => m,
    };
    match method {
        Method::Direct => {
            let u = direct(op, &b)?;
            let res = residual(op, &u, &b) / bnorm;
            Ok(finish(op, u, Method::Direct, 1, res, vec![res]))
        }
        Method::Cocg => {
            let (u, it, hist) = cocg(op, &b, bnorm, opts)?;
            let res = residual(op, &u, &b) / bnorm;
            Ok(finish(op, u, Method::Cocg, it, res, hist))
        }
        Method::Bicgstab => {
            let (u, it, hist) = bicgstab(op, &b, bnorm, opts)?;
            let res = residual(op, &u, &b) / bnorm;
            Ok(finish(op, u, Method::Bicgstab, it, res, hist))
        }
        Method::Auto => match cocg(op, &b, bnorm, opts) {
            Ok((u, it, hist)) => {
                let res = residual(op, &u, &b) / bnorm;
                Ok(finish(op, u, Method::Cocg, it, res, hist))
            }
            Err(Error::Breakdown(_)) | Err(Error::NotConverged { .. }) => {
                let (u, it, hist) = bicgstab(op, &b, bnorm, opts)?;
                let res = residual(op, &u, &b) / bnorm;
                Ok(finish(op, u, Method::Bicgstab, it, res, hist))
            }
            Err(e) => Err(e),
        },
    }
}

fn finish(
    op: &Operator,
    u: Vec<C64>,
    method: Method,
    iterations: usize,
    residual: f64,
    history: Vec<f64>,
) -> SolutionField {
    let grid = &op.grid;
    let umax = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let wall = (0..grid.len())
        .filter(|&i| grid.is_interior(i, 1) && !grid.is_interior(i, 3))
        .map(|i| u[i].norm())
        .fold(0.0, f64::max);
    let wall_ratio = if umax > 0.0 { wall / umax } else { 0.0 };
    let grad = gradient_complex(grid, &u);
    SolutionField {
        u,
        grad,
        diagnostics: SolveDiagnostics {
            method,
            iterations,
            residual,
            history,
            wall_ratio,
            wall_contaminated: op.boundary == Boundary::Dirichlet && wall_ratio > 0.01,
        },
    }
}

fn residual(op: &Operator, u: &[C64], b: &[C64]) -> f64 {
    let mut y = vec![C64::new(0.0, 0.0); u.len()];
    op.apply(u, &mut y);
    y.par_iter_mut().zip(b.par_iter()).for_each(|(yi, bi)| *yi -= bi);
    norm2(&y)
}

type KrylovOut = (Vec<C64>, usize, Vec<f64>);

/// Conjugate orthogonal conjugate gradients with Jacobi preconditioning.
fn cocg(op: &Operator, b: &[C64], bnorm: f64, opts: &SolveOptions) -> Result<KrylovOut> {
    let n = b.len();
    let inv_d: Vec<C64> = op.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut r = b.to_vec();
    let mut z: Vec<C64> = r.iter().zip(&inv_d).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![C64::new(0.0, 0.0); n];
    let mut rho = bilinear(&r, &z);
    let mut history = vec![1.0];
    for it in 1..=opts.max_iterations {
        op.apply(&p, &mut q);
        let pq = bilinear(&p, &q);
        if pq.norm() < 1e-300 || rho.norm() < 1e-300 {
            return Err(Error::Breakdown(it));
        }
        let alpha = rho / pq;
        x.par_iter_mut().zip(p.par_iter()).for_each(|(xi, pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(q.par_iter()).for_each(|(ri, qi)| *ri -= alpha * qi);
        let rel = norm2(&r) / bnorm;
        if it % 10 == 0 {
            history.push(rel);
        }
        if !rel.is_finite() {
            return Err(Error::Breakdown(it));
        }
        if rel <= opts.tolerance {
            history.push(rel);
            return Ok((x, it, history));
        }
        z.par_iter_mut()
            .zip(r.par_iter().zip(inv_d.par_iter()))
            .for_each(|(zi, (ri, di))| *zi = ri * di);
        let rho_new = bilinear(&r, &z);
        let beta = rho_new / rho;
        rho = rho_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    let residual = *history.last().unwrap();
    Err(Error::NotConverged { iterations: opts.max_iterations, residual, history })
}

/// Right-preconditioned BiCGSTAB with the same Jacobi preconditioner.
fn bicgstab(op: &Operator, b: &[C64], bnorm: f64, opts: &SolveOptions) -> Result<KrylovOut> {
    let n = b.len();
    let inv_d: Vec<C64> = op.diagonal().iter().map(|d| 1.0 / d).collect();
    let zero = C64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let mut r = b.to_vec();
    let r_hat: Vec<C64> = r.iter().map(|v| v.conj()).collect();
    let mut p = vec![zero; n];
    let mut v = vec![zero; n];
    let mut ph = vec![zero; n];
    let mut s = vec![zero; n];
    let mut sh = vec![zero; n];
    let mut t = vec![zero; n];
    let (mut rho, mut alpha, mut omega) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut history = vec![1.0];
    for it in 1..=opts.max_iterations {
        let rho_new = bilinear(&r_hat, &r);
        if rho_new.norm() < 1e-300 {
            return Err(Error::Breakdown(it));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(pi, (ri, vi))| *pi = ri + beta * (*pi - omega * vi));
        ph.par_iter_mut().zip(p.par_iter().zip(inv_d.par_iter())).for_each(|(a, (b, d))| *a = b * d);
        op.apply(&ph, &mut v);
        let rv = bilinear(&r_hat, &v);
        if rv.norm() < 1e-300 {
            return Err(Error::Breakdown(it));
        }
        alpha = rho / rv;
        s.par_iter_mut()
            .zip(r.par_iter().zip(v.par_iter()))
            .for_each(|(si, (ri, vi))| *si = ri - alpha * vi);
        if norm2(&s) / bnorm <= opts.tolerance {
            x.par_iter_mut().zip(ph.par_iter()).for_each(|(xi, pi)| *xi += alpha * pi);
            history.push(norm2(&s) / bnorm);
            return Ok((x, it, history));
        }
        sh.par_iter_mut().zip(s.par_iter().zip(inv_d.par_iter())).for_each(|(a, (b, d))| *a = b * d);
        op.apply(&sh, &mut t);
        let tt = bilinear(&t.iter().map(|c| c.conj()).collect::<Vec<_>>(), &t);
        if tt.norm() < 1e-300 {
            return Err(Error::Breakdown(it));
        }
        omega = bilinear(&t.iter().map(|c| c.conj()).collect::<Vec<_>>(), &s) / tt;
        x.par_iter_mut()
            .zip(ph.par_iter().zip(sh.par_iter()))
            .for_each(|(xi, (pi, si))| *xi += alpha * pi + omega * si);
        r.par_iter_mut()
            .zip(s.par_iter().zip(t.par_iter()))
            .for_each(|(ri, (si, ti))| *ri = si - omega * ti);
        let rel = norm2(&r) / bnorm;
        if it % 10 == 0 {
            history.push(rel);
        }
        if !rel.is_finite() {
            return Err(Error::Breakdown(it));
        }
        if rel <= opts.tolerance {
            history.push(rel);
            return Ok((x, it, history));
        }
    }
    let residual = *history.last().unwrap();
    Err(Error::NotConverged { iterations: opts.max_iterations, residual, history })
}

/// Dense LU with partial pivoting over the interior unknowns.
fn direct(op: &Operator, b: &[C64]) -> Result<Vec<C64>> {
    let interior = op.interior_indices();
    let mut a = op.to_dense();
    let mut rhs: Vec<C64> = interior.iter().map(|&i| b[i]).collect();
    let m = interior.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col].norm() == 0.0 {
            return Err(Error::Breakdown(col));
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        let pivot = a[col][col];
        let rc = rhs[col];
        let (top, bottom) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for (k, row) in bottom.iter_mut().enumerate() {
            let factor = row[col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..m {
                row[j] -= factor * prow[j];
            }
            rhs[col + 1 + k] -= factor * rc;
        }
    }
    let mut sol = vec![C64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut acc = rhs[i];
        for j in i + 1..m {
            acc -= a[i][j] * sol[j];
        }
        sol[i] = acc / a[i][i];
    }
    let mut u = vec![C64::new(0.0, 0.0); b.len()];
    for (k, &i) in interior.iter().enumerate() {
        u[i] = sol[k];
    }
    Ok(u)
}
