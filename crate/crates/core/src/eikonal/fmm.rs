//! First-order fast marching for `|∇K| = sqrt(1 + p/λ)` with `K(0) = 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::{norm3, Grid3};
use crate::potential::Potential;

use super::radial::solve_eikonal_radial;

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Far,
    Trial,
    Known,
}

#[derive(Clone, Copy)]
struct Entry {
    value: f64,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.value.total_cmp(&self.value).then(other.idx.cmp(&self.idx))
    }
}

/// Default seed radius: a fixed fraction of the grid's reach, never below three cells.
pub fn default_seed_radius(grid: &Grid3) -> f64 {
    let reach = (0..3)
        .map(|a| (-grid.lower[a]).abs().max(grid.upper()[a].abs()))
        .fold(0.0, f64::max);
    (0.25 * reach).max(3.0 * grid.spacing)
}

pub fn solve_eikonal_grid(pot: &Potential, lambda: f64, grid: &Grid3) -> Result<Vec<f64>> {
    solve_eikonal_grid_seeded(pot, lambda, grid, default_seed_radius(grid))
}

/// Fast marching with nodes inside `seed_radius` initialized from the radial
/// profile (radial potentials) or from `sqrt(1 + p(0)/λ) |x|` otherwise.
pub fn solve_eikonal_grid_seeded(
    pot: &Potential,
    lambda: f64,
    grid: &Grid3,
    seed_radius: f64,
) -> Result<Vec<f64>> {
    if pot.dimension() != 3 {
        return Err(Error::InvalidArgument("grid eikonal solves are three-dimensional".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let origin = grid.origin_index().ok_or(Error::OriginNotOnGrid)?;
    let n = grid.len();
    let slowness: Vec<f64> = {
        let s2 = grid.sample(|x| 1.0 + pot.p3(x) / lambda);
        let mut s = Vec::with_capacity(n);
        for (idx, v) in s2.into_iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NonPositiveSlowness { radius: grid.radius_at(idx), value: v, lambda });
            }
            s.push(v.sqrt());
        }
        s
    };

    let h = grid.spacing;
    let mut value = vec![f64::INFINITY; n];
    let mut state = vec![State::Far; n];
    let mut heap = BinaryHeap::new();

    let seed_radius = seed_radius.max(0.0);
    let reach = grid.upper().iter().chain(grid.lower.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    let profile = if pot.is_radial() && seed_radius > 0.0 {
        let r_max = seed_radius.min(reach * 1.8) + h;
        Some(solve_eikonal_radial(pot, lambda, r_max, 64)?)
    } else {
        None
    };
    let s0 = slowness[origin];
    for idx in 0..n {
        let r = norm3(grid.point_at(idx));
        if idx == origin || r <= seed_radius {
            value[idx] = match &profile {
                Some(p) => p.k(r),
                None => s0 * r,
            };
            state[idx] = State::Known;
        }
    }
    let strides = grid.strides();
    let neighbours = |idx: usize| -> [Option<usize>; 6] {
        let ijk = grid.unravel(idx);
        let mut out = [None; 6];
        for a in 0..3 {
            if ijk[a] > 0 {
                out[2 * a] = Some(idx - strides[a]);
            }
            if ijk[a] + 1 < grid.shape[a] {
                out[2 * a + 1] = Some(idx + strides[a]);
            }
        }
        out
    };

    let update = |idx: usize, value: &[f64], state: &[State]| -> f64 {
        let ijk = grid.unravel(idx);
        let mut mins = [f64::INFINITY; 3];
        for a in 0..3 {
            if ijk[a] > 0 && state[idx - strides[a]] == State::Known {
                mins[a] = mins[a].min(value[idx - strides[a]]);
            }
            if ijk[a] + 1 < grid.shape[a] && state[idx + strides[a]] == State::Known {
                mins[a] = mins[a].min(value[idx + strides[a]]);
            }
        }
        godunov(mins, slowness[idx] * h)
    };

    for idx in 0..n {
        if state[idx] != State::Known {
            continue;
        }
        for nb in neighbours(idx).into_iter().flatten() {
            if state[nb] == State::Far {
                state[nb] = State::Trial;
                let v = update(nb, &value, &state);
                value[nb] = v;
                heap.push(Entry { value: v, idx: nb });
            }
        }
    }

    while let Some(Entry { value: v, idx }) = heap.pop() {
        if state[idx] == State::Known || v > value[idx] {
            continue;
        }
        state[idx] = State::Known;
        for nb in neighbours(idx).into_iter().flatten() {
            if state[nb] == State::Known {
                continue;
            }
            let cand = update(nb, &value, &state);
            if cand < value[nb] {
                value[nb] = cand;
                state[nb] = State::Trial;
                heap.push(Entry { value: cand, idx: nb });
            }
        }
    }
    Ok(value)
}

/// Solves the upwind quadratic `Σ_a max(u - m_a, 0)^2 = f^2` for the smallest admissible `u`.
fn godunov(mut m: [f64; 3], f: f64) -> f64 {
    m.sort_by(f64::total_cmp);
    let [a, b, c] = m;
    let u1 = a + f;
    if u1 <= b {
        return u1;
    }
    let d = 2.0 * f * f - (a - b) * (a - b);
    let u2 = 0.5 * (a + b + d.max(0.0).sqrt());
    if u2 <= c {
        return u2;
    }
    let s = a + b + c;
    let q = a * a + b * b + c * c - f * f;
    let disc = s * s - 3.0 * q;
    (s + disc.max(0.0).sqrt()) / 3.0
}
