//! Limiting absorption sweeps `ε → 0+`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::triple_norm_capped;

use super::krylov::{solve, SolutionField, SolveOptions};
use super::operator::{assemble, HelmholtzProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub epsilons: Vec<f64>,
    /// `|||u_ε|||_1` per ε.
    pub norms: Vec<f64>,
    /// `|||u_{ε_{k+1}} - u_{ε_k}|||_1`.
    pub differences: Vec<f64>,
    /// Differences strictly decrease.
    pub monotone: bool,
    pub iterations: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub summary: SweepSummary,
    pub solutions: Vec<SolutionField>,
    /// Polynomial extrapolation to `ε = 0` through the last (up to three) solutions.
    pub extrapolated: Option<Vec<C64>>,
}

/// Solves at every `ε` (positive, strictly decreasing). Norms are taken over
/// the trusted ball of the problem.
pub fn epsilon_sweep(problem: &HelmholtzProblem, epsilons: &[f64], opts: &SolveOptions) -> Result<SweepReport> {
    if epsilons.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon list".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0)) || epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("epsilons must be positive and strictly decreasing".into()));
    }
    let grid = problem.grid;
    let cap = Some(problem.trusted_radius());
    let mut solutions = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let p = problem.with_epsilon(eps)?;
        let op = assemble(&p)?;
        solutions.push(solve(&op, &p.source, opts)?);
    }
    let norms: Vec<f64> = solutions.iter().map(|s| triple_norm_capped(&grid, &s.u, 1.0, cap)).collect();
    let differences: Vec<f64> = solutions
        .windows(2)
        .map(|w| {
            let d: Vec<C64> = w[1].u.iter().zip(&w[0].u).map(|(a, b)| a - b).collect();
            triple_norm_capped(&grid, &d, 1.0, cap)
        })
        .collect();
    let monotone = differences.windows(2).all(|w| w[1] < w[0]);
    let extrapolated = extrapolate(epsilons, &solutions);
    let iterations = solutions.iter().map(|s| s.diagnostics.iterations).collect();
    Ok(SweepReport {
        summary: SweepSummary { epsilons: epsilons.to_vec(), norms, differences, monotone, iterations },
        solutions,
        extrapolated,
    })
}

/// Lagrange extrapolation to zero through the last `min(3, n)` points; `None` for one point.
fn extrapolate(epsilons: &[f64], solutions: &[SolutionField]) -> Option<Vec<C64>> {
    let n = epsilons.len();
    if n < 2 {
        return None;
    }
    let m = n.min(3);
    let pts = &epsilons[n - m..];
    let sols = &solutions[n - m..];
    let weights: Vec<f64> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| j != i)
                .map(|j| (0.0 - pts[j]) / (pts[i] - pts[j]))
                .product()
        })
        .collect();
    let len = sols[0].u.len();
    Some(
        (0..len)
            .map(|k| sols.iter().zip(&weights).map(|(s, w)| s.u[k] * *w).sum())
            .collect(),
    )
}
