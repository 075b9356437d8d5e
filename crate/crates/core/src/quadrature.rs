//! Gauss–Legendre rules and deterministic reductions.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pm = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * pn - pm) / (x * x - 1.0);
    (pn, d)
}

/// A Gauss–Legendre rule mapped onto an interval.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    pub fn integrate_complex<F: FnMut(f64) -> C64>(&self, a: f64, b: f64, mut f: F) -> C64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Mapped nodes and weights on [a, b].
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

/// Chunk length for order-stable parallel reductions.
pub const REDUCTION_CHUNK: usize = 4096;

/// Sum of `f(i)` over `0..n`, bit-identical regardless of thread count.
pub fn det_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = n.div_ceil(REDUCTION_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCTION_CHUNK;
            let hi = (lo + REDUCTION_CHUNK).min(n);
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

/// Componentwise [`det_sum`] of a fixed number of integrands evaluated together.
pub fn det_sum_array<const M: usize, F>(n: usize, f: F) -> [f64; M]
where
    F: Fn(usize) -> [f64; M] + Sync,
{
    let chunks = n.div_ceil(REDUCTION_CHUNK);
    let partial: Vec<[f64; M]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCTION_CHUNK;
            let hi = (lo + REDUCTION_CHUNK).min(n);
            let mut acc = [0.0; M];
            for i in lo..hi {
                let v = f(i);
                for m in 0..M {
                    acc[m] += v[m];
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; M];
    for p in &partial {
        for m in 0..M {
            total[m] += p[m];
        }
    }
    total
}

/// Complex counterpart of [`det_sum`].
pub fn det_sum_complex<F>(n: usize, f: F) -> C64
where
    F: Fn(usize) -> C64 + Sync,
{
    let chunks = n.div_ceil(REDUCTION_CHUNK);
    let partial: Vec<C64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCTION_CHUNK;
            let hi = (lo + REDUCTION_CHUNK).min(n);
            let mut acc = C64::new(0.0, 0.0);
            for i in lo..hi {
                acc += f(i);
            }
            acc
        })
        .collect();
    partial.iter().fold(C64::new(0.0, 0.0), |a, b| a + b)
}
