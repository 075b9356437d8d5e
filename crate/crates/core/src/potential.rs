//! Admissible electric potentials `V = p + Q`.
//!
//! `p` is the smooth long-range part, with `|∂^β p| <= C |x|^{-(2+|β|+δ)}` for
//! `|x| >= 1`, and `Q` is the short-range part, with `|Q| <= C |x|^{-(3+δ)}`.
//! Every built-in family is smooth at the origin, so all grid evaluations are
//! finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Family identifiers accepted by [`make_potential`].
pub const FAMILIES: &[&str] = &[
    "zero",
    "constant",
    "long_range",
    "short_range",
    "anisotropic",
    "tabulated",
];

/// A radial profile `p(r)` given by samples, interpolated by a clamped cubic spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// One of [`FAMILIES`].
    pub family: String,
    /// Decay exponent δ.
    pub delta: f64,
    /// Amplitude μ of the long-range part.
    #[serde(default)]
    pub amplitude_p: f64,
    /// Amplitude ν of the short-range part.
    #[serde(default)]
    pub amplitude_q: f64,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Bound constant C of the decay conditions.
    #[serde(default = "default_bound")]
    pub bound_constant: f64,
    /// Axis scales of the `anisotropic` family.
    #[serde(default)]
    pub scales: Option<[f64; 3]>,
    /// Samples of the `tabulated` family.
    #[serde(default)]
    pub table: Option<RadialTable>,
}

fn default_dimension() -> usize {
    3
}

fn default_bound() -> f64 {
    1.0
}

impl PotentialSpec {
    pub fn new(family: &str, delta: f64, amplitude_p: f64, amplitude_q: f64) -> Self {
        Self {
            family: family.to_string(),
            delta,
            amplitude_p,
            amplitude_q,
            dimension: 3,
            bound_constant: 1.0,
            scales: None,
            table: None,
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", 0.5, 0.0, 0.0)
    }

    pub fn long_range(mu: f64, delta: f64) -> Self {
        Self::new("long_range", delta, mu, 0.0)
    }

    pub fn with_dimension(mut self, d: usize) -> Self {
        self.dimension = d;
        self
    }
}

#[derive(Debug, Clone)]
enum LongRange {
    Zero,
    Constant(f64),
    Algebraic { mu: f64, exponent: f64 },
    Anisotropic { mu: f64, exponent: f64, inv_scales2: [f64; 3] },
    Tabulated(Spline),
}

/// Evaluators for `p`, `Q` and `∇p`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Potential {
    spec: PotentialSpec,
    long: LongRange,
    q_amp: f64,
    q_exponent: f64,
}

/// Builds the evaluators for `spec`, validating δ > 0, d >= 3 and the family id.
pub fn make_potential(spec: &PotentialSpec) -> Result<Potential> {
    if !(spec.delta > 0.0) || !spec.delta.is_finite() {
        return Err(Error::InvalidPotential(format!("delta must be positive, got {}", spec.delta)));
    }
    if spec.dimension < 3 {
        return Err(Error::InvalidPotential(format!(
            "dimension must be at least 3, got {}",
            spec.dimension
        )));
    }
    if !(spec.bound_constant > 0.0) {
        return Err(Error::InvalidPotential("bound constant must be positive".into()));
    }
    if !spec.amplitude_p.is_finite() || !spec.amplitude_q.is_finite() {
        return Err(Error::InvalidPotential("amplitudes must be finite".into()));
    }
    let mu = spec.amplitude_p;
    let exponent = 0.5 * (2.0 + spec.delta);
    let long = match spec.family.as_str() {
        "zero" => LongRange::Zero,
        "constant" => LongRange::Constant(mu),
        "long_range" => LongRange::Algebraic { mu, exponent },
        "short_range" => LongRange::Zero,
        "anisotropic" => {
            if spec.dimension != 3 {
                return Err(Error::InvalidPotential("anisotropic family is three-dimensional".into()));
            }
            let s = spec.scales.unwrap_or([1.0, 1.0, 1.0]);
            if s.iter().any(|&a| !(a > 0.0)) {
                return Err(Error::InvalidPotential("anisotropic scales must be positive".into()));
            }
            LongRange::Anisotropic {
                mu,
                exponent,
                inv_scales2: [1.0 / (s[0] * s[0]), 1.0 / (s[1] * s[1]), 1.0 / (s[2] * s[2])],
            }
        }
        "tabulated" => {
            let table = spec
                .table
                .as_ref()
                .ok_or_else(|| Error::InvalidPotential("tabulated family needs a table".into()))?;
            LongRange::Tabulated(Spline::new(table, spec.delta)?)
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    let q_amp = if spec.family == "zero" { 0.0 } else { spec.amplitude_q };
    Ok(Potential {
        spec: spec.clone(),
        long,
        q_amp,
        q_exponent: 0.5 * (3.0 + spec.delta),
    })
}

impl Potential {
    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.long, LongRange::Anisotropic { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.long, LongRange::Zero) && self.q_amp == 0.0
    }

    /// Long-range part at `x`.
    pub fn p(&self, x: &[f64]) -> f64 {
        match &self.long {
            LongRange::Anisotropic { mu, exponent, inv_scales2 } => {
                let s: f64 = x.iter().zip(inv_scales2).map(|(a, w)| a * a * w).sum();
                mu * (1.0 + s).powf(-exponent)
            }
            _ => self.p_of_r(norm(x)),
        }
    }

    /// Short-range part at `x`.
    pub fn q(&self, x: &[f64]) -> f64 {
        self.q_of_r(norm(x))
    }

    pub fn grad_p(&self, x: &[f64]) -> Vec<f64> {
        match &self.long {
            LongRange::Anisotropic { mu, exponent, inv_scales2 } => {
                let s: f64 = x.iter().zip(inv_scales2).map(|(a, w)| a * a * w).sum();
                let c = -2.0 * mu * exponent * (1.0 + s).powf(-exponent - 1.0);
                x.iter().zip(inv_scales2).map(|(a, w)| c * a * w).collect()
            }
            _ => {
                let r = norm(x);
                if r == 0.0 {
                    return vec![0.0; x.len()];
                }
                let dp = self.dp_of_r(r);
                x.iter().map(|a| dp * a / r).collect()
            }
        }
    }

    pub fn p3(&self, x: [f64; 3]) -> f64 {
        self.p(&x)
    }

    pub fn q3(&self, x: [f64; 3]) -> f64 {
        self.q(&x)
    }

    pub fn grad_p3(&self, x: [f64; 3]) -> [f64; 3] {
        let g = self.grad_p(&x);
        [g[0], g[1], g[2]]
    }

    /// `p(r)` for radial families.
    pub fn p_radial(&self, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.p_of_r(r))
    }

    /// `p'(r)` for radial families.
    pub fn dp_radial(&self, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.dp_of_r(r))
    }

    /// `p''(r)` for radial families, by a centered difference of `p'`.
    pub fn d2p_radial(&self, r: f64) -> Option<f64> {
        if !self.is_radial() {
            return None;
        }
        let h = 1e-4 * r.max(1.0);
        if r < h {
            // p' is odd in r
            return Some(self.dp_of_r(h) / h);
        }
        Some((self.dp_of_r(r + h) - self.dp_of_r(r - h)) / (2.0 * h))
    }

    /// Supremum of `|p|` over space.
    pub fn sup_abs_p(&self) -> f64 {
        match &self.long {
            LongRange::Zero => 0.0,
            LongRange::Constant(mu) => mu.abs(),
            LongRange::Algebraic { mu, .. } | LongRange::Anisotropic { mu, .. } => mu.abs(),
            LongRange::Tabulated(s) => s.sup_abs(),
        }
    }

    /// Infimum of `p` over space.
    pub fn inf_p(&self) -> f64 {
        match &self.long {
            LongRange::Zero => 0.0,
            LongRange::Constant(mu) => *mu,
            LongRange::Algebraic { mu, .. } | LongRange::Anisotropic { mu, .. } => mu.min(0.0),
            LongRange::Tabulated(s) => s.inf().min(0.0),
        }
    }

    /// True when `p` is the same constant everywhere (including zero).
    pub fn is_constant_p(&self) -> bool {
        matches!(self.long, LongRange::Zero | LongRange::Constant(_))
    }

    /// True when `p` decays at infinity (the eikonal tail integral converges).
    pub fn p_decays(&self) -> bool {
        !matches!(self.long, LongRange::Constant(mu) if mu != 0.0)
    }

    fn p_of_r(&self, r: f64) -> f64 {
        match &self.long {
            LongRange::Zero => 0.0,
            LongRange::Constant(mu) => *mu,
            LongRange::Algebraic { mu, exponent } => mu * (1.0 + r * r).powf(-exponent),
            LongRange::Anisotropic { .. } => unreachable!("anisotropic family has no radial profile"),
            LongRange::Tabulated(s) => s.value(r),
        }
    }

    fn dp_of_r(&self, r: f64) -> f64 {
        match &self.long {
            LongRange::Zero | LongRange::Constant(_) => 0.0,
            LongRange::Algebraic { mu, exponent } => {
                -2.0 * mu * exponent * r * (1.0 + r * r).powf(-exponent - 1.0)
            }
            LongRange::Anisotropic { .. } => unreachable!("anisotropic family has no radial profile"),
            LongRange::Tabulated(s) => s.derivative(r),
        }
    }

    fn q_of_r(&self, r: f64) -> f64 {
        if self.q_amp == 0.0 {
            0.0
        } else {
            self.q_amp * (1.0 + r * r).powf(-self.q_exponent)
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Clamped cubic spline in `r` with `p'(r_0) = 0` and a decaying algebraic tail
/// `p_N ((1 + r_N^2)/(1 + r^2))^{(2+δ)/2}` matched in value and slope past the last sample.
#[derive(Debug, Clone)]
struct Spline {
    r: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    tail_exponent: f64,
}

impl Spline {
    fn new(table: &RadialTable, delta: f64) -> Result<Self> {
        let n = table.radii.len();
        if n < 3 || table.values.len() != n {
            return Err(Error::InvalidPotential(
                "table needs at least three (radius, value) pairs of equal length".into(),
            ));
        }
        if table.radii[0] != 0.0 {
            return Err(Error::InvalidPotential("table must start at r = 0".into()));
        }
        if table.radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPotential("table radii must be strictly increasing".into()));
        }
        if table.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("table values must be finite".into()));
        }
        let r = table.radii.clone();
        let y = table.values.clone();
        let tail_exponent = 0.5 * (2.0 + delta);
        let rn = r[n - 1];
        let slope_end = -2.0 * tail_exponent * y[n - 1] * rn / (1.0 + rn * rn);
        let m = clamped_second_derivatives(&r, &y, 0.0, slope_end);
        Ok(Self { r, y, m, tail_exponent })
    }

    fn segment(&self, r: f64) -> usize {
        match self.r.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        }
    }

    fn value(&self, r: f64) -> f64 {
        let n = self.r.len();
        let rn = self.r[n - 1];
        if r > rn {
            return self.y[n - 1] * ((1.0 + rn * rn) / (1.0 + r * r)).powf(self.tail_exponent);
        }
        let i = self.segment(r);
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - r) / h;
        let b = (r - self.r[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn derivative(&self, r: f64) -> f64 {
        let n = self.r.len();
        let rn = self.r[n - 1];
        if r > rn {
            return -2.0 * self.tail_exponent * r / (1.0 + r * r) * self.value(r);
        }
        let i = self.segment(r);
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - r) / h;
        let b = (r - self.r[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    fn sup_abs(&self) -> f64 {
        self.dense_extrema().1
    }

    fn inf(&self) -> f64 {
        self.dense_extrema().0
    }

    fn dense_extrema(&self) -> (f64, f64) {
        let rn = *self.r.last().unwrap();
        let mut lo = f64::INFINITY;
        let mut hi_abs: f64 = 0.0;
        for s in 0..=4000 {
            let v = self.value(rn * s as f64 / 4000.0);
            lo = lo.min(v);
            hi_abs = hi_abs.max(v.abs());
        }
        (lo, hi_abs)
    }
}

/// Second derivatives of the clamped cubic spline through `(x, y)`.
fn clamped_second_derivatives(x: &[f64], y: &[f64], d0: f64, dn: f64) -> Vec<f64> {
    let n = x.len();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let h0 = x[1] - x[0];
    b[0] = h0 / 3.0;
    c[0] = h0 / 6.0;
    rhs[0] = (y[1] - y[0]) / h0 - d0;
    for i in 1..n - 1 {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
    }
    let hn = x[n - 1] - x[n - 2];
    a[n - 1] = hn / 6.0;
    b[n - 1] = hn / 3.0;
    rhs[n - 1] = dn - (y[n - 1] - y[n - 2]) / hn;
    // Thomas algorithm
    for i in 1..n {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / b[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - c[i] * m[i + 1]) / b[i];
    }
    m
}

/// One row of a [`DecayReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    /// `"p"` or `"Q"`.
    pub part: String,
    pub order: usize,
    pub radius: f64,
    /// `sup_directions max_{|β| = order} |∂^β part| * r^{expected decay}`.
    pub scaled_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub entries: Vec<DecayEntry>,
    /// `(part, order)` pairs whose scaled values grow across the radii.
    pub violations: Vec<(String, usize)>,
}

impl DecayReport {
    pub fn series(&self, part: &str, order: usize) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.part == part && e.order == order)
            .map(|e| (e.radius, e.scaled_value))
            .collect()
    }
}

/// Samples the decay conditions on spheres of the given radii.
///
/// Derivatives of order `k` are nested centered differences with step
/// `0.02 max(r, 1)`. A series is flagged when the log-log slope of its scaled
/// values over the outer half of the radii exceeds 0.1.
pub fn validate_decay(pot: &Potential, orders: &[usize], radii: &[f64]) -> Result<DecayReport> {
    if radii.iter().any(|&r| r < 1.0) {
        return Err(Error::InvalidArgument("decay radii must be >= 1".into()));
    }
    if orders.iter().any(|&k| k > 3) {
        return Err(Error::InvalidArgument("derivative orders above 3 are not supported".into()));
    }
    let d = pot.dimension();
    let dirs = sample_directions(d);
    let delta = pot.spec.delta;
    let mut radii_sorted = radii.to_vec();
    radii_sorted.sort_by(f64::total_cmp);
    let mut entries = Vec::new();
    let mut violations = Vec::new();

    for &k in orders {
        let betas = multi_indices(d, k);
        let mut series = Vec::new();
        for &r in &radii_sorted {
            let step = 0.02 * r.max(1.0);
            let mut sup: f64 = 0.0;
            for dir in &dirs {
                let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
                for beta in &betas {
                    let v = fd_derivative(&|y: &[f64]| pot.p(y), &x, beta, step);
                    sup = sup.max(v.abs());
                }
            }
            let scaled = sup * r.powf(2.0 + k as f64 + delta);
            series.push((r, scaled));
            entries.push(DecayEntry { part: "p".into(), order: k, radius: r, scaled_value: scaled });
        }
        if grows(&series) {
            violations.push(("p".into(), k));
        }
    }

    let mut series = Vec::new();
    for &r in &radii_sorted {
        let mut sup: f64 = 0.0;
        for dir in &dirs {
            let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
            sup = sup.max(pot.q(&x).abs());
        }
        let scaled = sup * r.powf(3.0 + delta);
        series.push((r, scaled));
        entries.push(DecayEntry { part: "Q".into(), order: 0, radius: r, scaled_value: scaled });
    }
    if grows(&series) {
        violations.push(("Q".into(), 0));
    }
    Ok(DecayReport { entries, violations })
}

fn grows(series: &[(f64, f64)]) -> bool {
    if series.iter().any(|(_, v)| !v.is_finite()) {
        return true;
    }
    let tail: Vec<(f64, f64)> = series[series.len() / 2..]
        .iter()
        .copied()
        .filter(|(_, v)| *v > 0.0)
        .collect();
    if tail.len() < 2 {
        return false;
    }
    let n = tail.len() as f64;
    let xs: Vec<f64> = tail.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxx > 0.0 && sxy / sxx > 0.1
}

/// Nested centered differences: `∂^β f(x)` with `beta` a list of axes.
fn fd_derivative(f: &dyn Fn(&[f64]) -> f64, x: &[f64], beta: &[usize], step: f64) -> f64 {
    match beta.split_first() {
        None => f(x),
        Some((&axis, rest)) => {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[axis] += step;
            xm[axis] -= step;
            (fd_derivative(f, &xp, rest, step) - fd_derivative(f, &xm, rest, step)) / (2.0 * step)
        }
    }
}

/// All non-decreasing axis sequences of length `k` (multi-indices of order `k`).
fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for seq in &out {
            let start = seq.last().copied().unwrap_or(0);
            for a in start..d {
                let mut s = seq.clone();
                s.push(a);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// Coordinate axes plus a Fibonacci set on the sphere spanned by the first three axes.
fn sample_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for a in 0..d {
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        dirs.push(e);
    }
    let n = 32;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        let mut e = vec![0.0; d];
        e[0] = rho * phi.cos();
        e[1] = rho * phi.sin();
        e[2] = z;
        dirs.push(e);
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr(mu: f64, delta: f64) -> Potential {
        make_potential(&PotentialSpec::long_range(mu, delta)).unwrap()
    }

    #[test]
    fn zero_family_vanishes() {
        let p = make_potential(&PotentialSpec::zero()).unwrap();
        for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 0.5], [10.0, 3.0, 4.0]] {
            assert_eq!(p.p3(x), 0.0);
            assert_eq!(p.q3(x), 0.0);
            assert_eq!(p.grad_p3(x), [0.0; 3]);
        }
        assert!(p.is_zero());
    }

    #[test]
    fn long_range_values() {
        let p = lr(0.1, 0.5);
        assert_eq!(p.p3([0.0; 3]), 0.1);
        let expected = 0.1 * 5f64.powf(-1.25);
        assert!((p.p3([0.0, 2.0, 0.0]) - expected).abs() < 1e-15);
        assert!((p.p3([2.0 / 3f64.sqrt(); 3]) - expected).abs() < 1e-15);
    }

    #[test]
    fn constant_family_has_zero_gradient() {
        let p = make_potential(&PotentialSpec::new("constant", 0.5, 0.3, 0.0)).unwrap();
        assert_eq!(p.p3([1.0, 2.0, 3.0]), 0.3);
        assert_eq!(p.grad_p3([1.0, 2.0, 3.0]), [0.0; 3]);
        assert!(!p.p_decays());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            make_potential(&PotentialSpec::long_range(0.1, 0.0)),
            Err(Error::InvalidPotential(_))
        ));
        assert!(matches!(
            make_potential(&PotentialSpec::long_range(0.1, -1.0)),
            Err(Error::InvalidPotential(_))
        ));
        assert!(matches!(
            make_potential(&PotentialSpec::long_range(0.1, 0.5).with_dimension(2)),
            Err(Error::InvalidPotential(_))
        ));
        assert!(matches!(
            make_potential(&PotentialSpec::new("coulomb", 0.5, 1.0, 0.0)),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn grad_p_converges_at_second_order() {
        for pot in [
            lr(0.1, 0.5),
            make_potential(&PotentialSpec {
                scales: Some([1.0, 2.0, 0.5]),
                ..PotentialSpec::new("anisotropic", 0.5, 0.2, 0.0)
            })
            .unwrap(),
        ] {
            let x = [0.7, -0.4, 1.1];
            let g = pot.grad_p3(x);
            let err = |h: f64| {
                (0..3)
                    .map(|a| {
                        let mut xp = x;
                        let mut xm = x;
                        xp[a] += h;
                        xm[a] -= h;
                        ((pot.p3(xp) - pot.p3(xm)) / (2.0 * h) - g[a]).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let ratio = err(0.02) / err(0.01);
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn higher_dimensional_radial_family() {
        let p = make_potential(&PotentialSpec::long_range(0.1, 0.5).with_dimension(5)).unwrap();
        let x = [1.0, 0.0, 0.0, 1.0, 1.0];
        assert!((p.p(&x) - 0.1 * 4f64.powf(-1.25)).abs() < 1e-15);
        assert_eq!(p.grad_p(&x).len(), 5);
    }

    #[test]
    fn tabulated_spline_reproduces_family_and_is_c1() {
        let delta = 0.5;
        let reference = lr(0.1, delta);
        let radii: Vec<f64> = (0..=80).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = radii.iter().map(|&r| reference.p_radial(r).unwrap()).collect();
        let spec = PotentialSpec {
            table: Some(RadialTable { radii, values }),
            ..PotentialSpec::new("tabulated", delta, 0.0, 0.0)
        };
        let tab = make_potential(&spec).unwrap();
        for r in [0.05, 0.33, 1.27, 4.44, 7.95, 12.0, 40.0] {
            let a = tab.p_radial(r).unwrap();
            let b = reference.p_radial(r).unwrap();
            assert!((a - b).abs() < 1e-5 * 0.1, "r={r}: {a} vs {b}");
        }
        let eps = 1e-7;
        let left = tab.dp_radial(8.0 - eps).unwrap();
        let right = tab.dp_radial(8.0 + eps).unwrap();
        assert!((left - right).abs() < 1e-6);
    }

    #[test]
    fn decay_report_for_zero_potential() {
        let p = make_potential(&PotentialSpec::zero()).unwrap();
        let rep = validate_decay(&p, &[0, 1, 2], &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(rep.entries.iter().all(|e| e.scaled_value == 0.0));
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn long_range_order_zero_scaled_value_is_bounded_by_mu() {
        // p r^{2.5} = mu (r^2/(1+r^2))^{1.25}: increases monotonically towards mu.
        let p = lr(0.1, 0.5);
        let radii: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 0.25).collect();
        let rep = validate_decay(&p, &[0], &radii).unwrap();
        let s = rep.series("p", 0);
        for w in s.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-15);
        }
        assert!(s.iter().all(|(_, v)| *v <= 0.1 + 1e-12));
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn short_range_part_bounded_by_nu() {
        let p = make_potential(&PotentialSpec::new("short_range", 0.5, 0.0, 0.2)).unwrap();
        let rep = validate_decay(&p, &[0], &[1.0, 2.0, 4.0, 8.0]).unwrap();
        let s = rep.series("Q", 0);
        assert_eq!(s.len(), 4);
        for (r, v) in s {
            let exact = 0.2 * (r * r / (1.0 + r * r)).powf(1.75);
            assert!((v - exact).abs() < 1e-12);
            assert!(v <= 0.2);
        }
    }

    #[test]
    fn derivative_orders_are_bounded_for_long_range() {
        let p = lr(0.1, 0.5);
        let rep = validate_decay(&p, &[0, 1, 2, 3], &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    }

    #[test]
    fn slowly_decaying_potential_is_flagged() {
        // p ~ r^{-2.5} checked against delta = 1.5 grows like r^{1}
        let mut spec = PotentialSpec::long_range(0.1, 0.5);
        let p = make_potential(&spec).unwrap();
        spec.delta = 1.5;
        let mut q = p.clone();
        q.spec = spec;
        let rep = validate_decay(&q, &[0], &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        assert_eq!(rep.violations, vec![("p".to_string(), 0)]);
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(3, 0).len(), 1);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(3, 3).len(), 10);
    }
}
