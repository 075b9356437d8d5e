//! Discrete checks of the multiplier identities and of the radiation bound.
//!
//! Identities are evaluated in integrated form: every term is a midpoint sum
//! of a node density built from the grid solution, its centred gradient and
//! the eikonal fields. A residual is `|LHS - RHS|` divided by the largest
//! term, so it measures discretisation error rather than size.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eikonal::EikonalField;
use crate::error::{Error, Result};
use crate::grid::{dot3, norm3};
use crate::helmholtz::HelmholtzProblem;
use crate::norms::{
    gauge_density, n_norm, radiation_functional, triple_norm_capped, triple_norm_gradient,
    weighted_source_norm,
};
use crate::quadrature::det_sum_array;

const DIM: f64 = 3.0;

/// Smooth step: `1` up to `inner`, `0` from `outer` on, `C^3` in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && outer > inner) {
            return Err(Error::InvalidArgument(format!("cutoff needs 0 <= inner < outer, got {inner}, {outer}")));
        }
        Ok(Self { inner, outer })
    }

    /// No cutoff at all.
    pub fn none() -> Self {
        Self { inner: f64::INFINITY, outer: f64::INFINITY }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.inner {
            return 1.0;
        }
        if t >= self.outer {
            return 0.0;
        }
        let s = (t - self.inner) / (self.outer - self.inner);
        1.0 - s.powi(4) * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s.powi(3))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t <= self.inner || t >= self.outer {
            return 0.0;
        }
        let w = self.outer - self.inner;
        let s = (t - self.inner) / w;
        -140.0 * s.powi(3) * (1.0 - s).powi(3) / w
    }
}

/// Multipliers for the identities.
///
/// `Phi` is a weight `φ(x) = χ(|x|)`. `KRadial` is the radial-in-`K`
/// multiplier with `ψ'(K) = b(K) χ(K)`, `b(K) = K^2` for `K <= R1` and
/// `R1 K` beyond, so that `ψ'' = 2K` then `R1` inside the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Multiplier {
    Phi { cutoff: Cutoff },
    KRadial { switch_radius: f64, cutoff: Cutoff },
}

impl Multiplier {
    pub fn phi(cutoff: Cutoff) -> Self {
        Multiplier::Phi { cutoff }
    }

    pub fn proposition(switch_radius: f64, cutoff: Cutoff) -> Self {
        Multiplier::KRadial { switch_radius, cutoff }
    }

    /// `ψ' = K^2 χ(K)`: the proposition multiplier with the switch beyond the cutoff.
    pub fn smooth_quadratic(cutoff: Cutoff) -> Self {
        Multiplier::KRadial { switch_radius: f64::INFINITY, cutoff }
    }

    pub fn cutoff(&self) -> Cutoff {
        match *self {
            Multiplier::Phi { cutoff } | Multiplier::KRadial { cutoff, .. } => cutoff,
        }
    }

    fn switch(&self) -> f64 {
        match *self {
            Multiplier::KRadial { switch_radius, .. } => switch_radius,
            Multiplier::Phi { .. } => f64::INFINITY,
        }
    }

    /// `b, b', b/K, (b/K)'`, taking the `K < R1` branch when `left`.
    fn base(&self, k: f64, left: bool) -> [f64; 4] {
        let r1 = self.switch();
        if k <= r1 || left {
            [k * k, 2.0 * k, k, 1.0]
        } else {
            [r1 * k, r1, r1, 0.0]
        }
    }

    pub fn psi_prime(&self, k: f64) -> f64 {
        self.base(k, false)[0] * self.cutoff().value(k)
    }

    /// `ψ''`, one-sided from `K < R1` when `left`.
    pub fn psi_second(&self, k: f64, left: bool) -> f64 {
        let c = self.cutoff();
        let [b, b1, _, _] = self.base(k, left);
        b1 * c.value(k) + b * c.derivative(k)
    }

    /// `ψ'/K`.
    pub fn psi_ratio(&self, k: f64) -> f64 {
        self.base(k, false)[2] * self.cutoff().value(k)
    }

    /// `d(ψ'/K)/dK`.
    pub fn psi_ratio_prime(&self, k: f64, left: bool) -> f64 {
        let c = self.cutoff();
        let [_, _, q, q1] = self.base(k, left);
        q1 * c.value(k) + q * c.derivative(k)
    }

    /// The variable the cutoff acts on at node `i`.
    fn coordinate(&self, field: &EikonalField, i: usize) -> f64 {
        match self {
            Multiplier::Phi { .. } => field.grid.radius_at(i),
            Multiplier::KRadial { .. } => field.k[i],
        }
    }

    fn supported(&self, field: &EikonalField, i: usize) -> bool {
        self.coordinate(field, i) < self.cutoff().outer
    }

    /// Node whose cell may straddle `{K = R1}`.
    pub fn on_interface(&self, field: &EikonalField, i: usize) -> bool {
        match *self {
            Multiplier::Phi { .. } => false,
            Multiplier::KRadial { switch_radius, .. } => {
                let reach = 0.5 * 3f64.sqrt() * field.grid.spacing * norm3(field.grad_k_at(i));
                (field.k[i] - switch_radius).abs() <= reach
            }
        }
    }

    /// `(φ, ∇φ)` at node `i`; a radial-in-`K` multiplier acts through `φ = ψ'(K)`.
    pub fn weight(&self, field: &EikonalField, i: usize) -> (f64, [f64; 3]) {
        match *self {
            Multiplier::Phi { cutoff } => {
                let x = field.grid.point_at(i);
                let r = norm3(x);
                let d = if r > 0.0 { cutoff.derivative(r) / r } else { 0.0 };
                (cutoff.value(r), [d * x[0], d * x[1], d * x[2]])
            }
            Multiplier::KRadial { .. } => {
                let k = field.k[i];
                let p2 = self.psi_second(k, self.on_interface(field, i));
                let gk = field.grad_k_at(i);
                (self.psi_prime(k), [p2 * gk[0], p2 * gk[1], p2 * gk[2]])
            }
        }
    }
}

/// Largest `R` with `{K < R}` inside the ball `|x| <= radius`.
pub fn level_inside(field: &EikonalField, radius: f64) -> f64 {
    let grid = &field.grid;
    (0..grid.len())
        .filter(|&i| grid.radius_at(i) > radius)
        .map(|i| field.k[i])
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTerm {
    pub name: String,
    /// `"lhs"` or `"rhs"`.
    pub side: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub terms: Vec<IdentityTerm>,
    pub lhs: f64,
    pub rhs: f64,
    /// Largest `|term|`.
    pub scale: f64,
    /// `|lhs - rhs| / scale`, `0` when every term vanishes.
    pub normalized: f64,
    /// Nodes treated with the one-sided `ψ''`.
    pub interface_nodes: usize,
}

impl IdentityResidual {
    fn from_terms(lhs_names: &[&str], lhs: &[f64], rhs_names: &[&str], rhs: &[f64], interface_nodes: usize) -> Self {
        let mut terms = Vec::with_capacity(lhs.len() + rhs.len());
        for (n, v) in lhs_names.iter().zip(lhs) {
            terms.push(IdentityTerm { name: n.to_string(), side: "lhs".into(), value: *v });
        }
        for (n, v) in rhs_names.iter().zip(rhs) {
            terms.push(IdentityTerm { name: n.to_string(), side: "rhs".into(), value: *v });
        }
        let l: f64 = lhs.iter().sum();
        let r: f64 = rhs.iter().sum();
        let scale = terms.iter().map(|t| t.value.abs()).fold(0.0, f64::max);
        let normalized = if scale > 0.0 { (l - r).abs() / scale } else { 0.0 };
        Self { terms, lhs: l, rhs: r, scale, normalized, interface_nodes }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Residuals {
    pub real: IdentityResidual,
    pub imaginary: IdentityResidual,
}

fn check_inputs(u: &[C64], grad: &[Vec<C64>; 3], problem: &HelmholtzProblem, field: &EikonalField) -> Result<()> {
    let n = problem.grid.len();
    if u.len() != n || grad.iter().any(|g| g.len() != n) {
        return Err(Error::InvalidArgument("solution does not match the grid".into()));
    }
    if field.grid != problem.grid {
        return Err(Error::InvalidArgument("eikonal field lives on a different grid".into()));
    }
    if field.lambda.is_finite() && (field.lambda - problem.lambda).abs() > 1e-12 * problem.lambda {
        return Err(Error::InvalidArgument(format!(
            "eikonal field built for lambda = {}, problem has {}",
            field.lambda, problem.lambda
        )));
    }
    Ok(())
}

fn check_support(mult: &Multiplier, problem: &HelmholtzProblem, field: &EikonalField) -> Result<()> {
    let grid = &problem.grid;
    let trusted = problem.trusted_radius();
    let bad = (0..grid.len())
        .find(|&i| mult.supported(field, i) && (!grid.is_interior(i, 2) || grid.radius_at(i) > trusted));
    match bad {
        Some(i) => Err(Error::SupportTouchesWall(format!(
            "multiplier (node at |x| = {:.4}, trusted radius {:.4})",
            grid.radius_at(i),
            trusted
        ))),
        None => Ok(()),
    }
}

#[inline]
fn du_at(grad: &[Vec<C64>; 3], i: usize) -> [C64; 3] {
    [grad[0][i], grad[1][i], grad[2][i]]
}

/// `Σ a_j ∂_j u · conj(u)` for a real vector `a`.
#[inline]
fn along(a: [f64; 3], du: [C64; 3], u: C64) -> C64 {
    (du[0] * a[0] + du[1] * a[1] + du[2] * a[2]) * u.conj()
}

/// Energy identities obtained by testing the equation with `φ ū`:
/// `∫φ(λ+p)|u|^2 - ∫φ|∇u|^2 + ∫φQ|u|^2 - Re∫∇φ·∇u ū = Re∫φ f ū` and
/// `ε∫φ|u|^2 - Im∫∇φ·∇u ū = Im∫φ f ū`.
pub fn lemma2_residuals(
    u: &[C64],
    grad: &[Vec<C64>; 3],
    problem: &HelmholtzProblem,
    field: &EikonalField,
    phi: &Multiplier,
) -> Result<Lemma2Residuals> {
    check_inputs(u, grad, problem, field)?;
    check_support(phi, problem, field)?;
    let grid = &problem.grid;
    let pot = &problem.potential;
    let f = &problem.source;
    let (lambda, eps) = (problem.lambda, problem.epsilon);
    let sums = det_sum_array::<8, _>(grid.len(), |i| {
        if !phi.supported(field, i) {
            return [0.0; 8];
        }
        let (w, dw) = phi.weight(field, i);
        let x = grid.point_at(i);
        let du = du_at(grad, i);
        let u2 = u[i].norm_sqr();
        let du2: f64 = du.iter().map(|c| c.norm_sqr()).sum();
        let flux = along(dw, du, u[i]);
        let fu = f[i] * u[i].conj();
        [
            w * (lambda + pot.p3(x)) * u2,
            -w * du2,
            w * pot.q3(x) * u2,
            -flux.re,
            w * fu.re,
            eps * w * u2,
            -flux.im,
            w * fu.im,
        ]
    });
    let vol = grid.cell_volume();
    let s: Vec<f64> = sums.iter().map(|v| v * vol).collect();
    let interface = (0..grid.len()).filter(|&i| phi.supported(field, i) && phi.on_interface(field, i)).count();
    Ok(Lemma2Residuals {
        real: IdentityResidual::from_terms(
            &["potential_mass", "kinetic", "short_range", "flux_real"],
            &s[0..4],
            &["source_real"],
            &s[4..5],
            interface,
        ),
        imaginary: IdentityResidual::from_terms(
            &["absorption", "flux_imag"],
            &s[5..7],
            &["source_imag"],
            &s[7..8],
            interface,
        ),
    })
}

pub const KEY_LHS: [&str; 13] = [
    "radial_gauge",
    "tangential",
    "level_flux",
    "level_short_range",
    "short_range_flux",
    "eikonal_gradient",
    "long_range_gradient",
    "hessian_correction",
    "trace_flux",
    "trace_short_range",
    "absorbed_gauge",
    "absorbed_short_range",
    "absorbed_flux",
];

pub const KEY_RHS: [&str; 4] = ["source_flux", "source_laplacian", "source_phase", "source_absorbed"];

/// The identity for radial-in-`K` multipliers, term by term.
///
/// With `ρ = ψ'/K`, `n = |∇K|`, `c = ε/(2√λ)` and `∇_r`, `∇_⊥` the split of
/// `∇u` along `∇K`:
///
/// ```text
///   ½∫n²ψ''|∇_r u - i√λ n u|² + ∫(ρ - ψ''/2) n²|∇_⊥u|² + (d-1)/2 Re∫∇(ρn²)·∇u ū
/// - (d-1)/2 ∫ρn²Q|u|² - Re∫Q∇ψ·∇ū u - √λ Im∫ψ'∇(n²)·∇u ū + ½∫∇ψ·∇p|u|²
/// + ∫ρ ∇u·F·∇ū + ½Re∫∇(ρΣF)·∇u ū - ½∫ρΣF Q|u|²
/// + c∫ψ'|∇u - i√λ∇K u|² - c∫ψ'Q|u|² + c Re∫∇ψ'·∇u ū
/// = -Re∫f∇ψ·∇ū - ½Re∫fρ((d-1)n² + ΣF)ū + √λ Im∫n²ψ' f ū - c Re∫ψ' f ū
/// ```
///
/// `∇(n²)` is taken as `∇p/λ`.
pub fn key_identity_residual(
    u: &[C64],
    grad: &[Vec<C64>; 3],
    problem: &HelmholtzProblem,
    field: &EikonalField,
    psi: &Multiplier,
) -> Result<IdentityResidual> {
    if !matches!(psi, Multiplier::KRadial { .. }) {
        return Err(Error::InvalidArgument("the key identity needs a radial-in-K multiplier".into()));
    }
    check_inputs(u, grad, problem, field)?;
    check_support(psi, problem, field)?;
    let grid = &problem.grid;
    let pot = &problem.potential;
    let f = &problem.source;
    let lambda = problem.lambda;
    let sl = lambda.sqrt();
    let c = problem.epsilon / (2.0 * sl);
    let inv_lambda = if field.lambda.is_finite() { 1.0 / field.lambda } else { 0.0 };
    let sums = det_sum_array::<17, _>(grid.len(), |i| {
        if !psi.supported(field, i) {
            return [0.0; 17];
        }
        let x = grid.point_at(i);
        let k = field.k[i];
        let left = psi.on_interface(field, i);
        let p1 = psi.psi_prime(k);
        let p2 = psi.psi_second(k, left);
        let rho = psi.psi_ratio(k);
        let rho1 = psi.psi_ratio_prime(k, left);
        let gk = field.grad_k_at(i);
        let n2 = dot3(gk, gk);
        let n = n2.sqrt();
        let e = if n > 0.0 { [gk[0] / n, gk[1] / n, gk[2] / n] } else { [0.0; 3] };
        let ui = u[i];
        let u2 = ui.norm_sqr();
        let du = du_at(grad, i);
        let dr = du[0] * e[0] + du[1] * e[1] + du[2] * e[2];
        let perp2: f64 = (0..3).map(|a| (du[a] - dr * e[a]).norm_sqr()).sum();
        let q = pot.q3(x);
        let gp = pot.grad_p3(x);
        let gn2 = [gp[0] * inv_lambda, gp[1] * inv_lambda, gp[2] * inv_lambda];
        let tf = field.trace_f[i];
        let gtf = [field.grad_trace_f[0][i], field.grad_trace_f[1][i], field.grad_trace_f[2][i]];
        let fm = field.f_at(i);
        let grad_rho_n2: [f64; 3] = std::array::from_fn(|a| rho1 * n2 * gk[a] + rho * gn2[a]);
        let grad_rho_tf: [f64; 3] = std::array::from_fn(|a| rho1 * tf * gk[a] + rho * gtf[a]);
        let mut hess = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                hess += fm[a][b] * (du[a] * du[b].conj()).re;
            }
        }
        let radial_gauge = (dr - C64::i() * sl * n * ui).norm_sqr();
        let fu = f[i] * ui.conj();
        let f_flux = f[i] * (du[0].conj() * gk[0] + du[1].conj() * gk[1] + du[2].conj() * gk[2]);
        [
            0.5 * n2 * p2 * radial_gauge,
            (rho - 0.5 * p2) * n2 * perp2,
            0.5 * (DIM - 1.0) * along(grad_rho_n2, du, ui).re,
            -0.5 * (DIM - 1.0) * rho * n2 * q * u2,
            -q * p1 * along(gk, du, ui).re,
            -sl * p1 * along(gn2, du, ui).im,
            0.5 * p1 * dot3(gk, gp) * u2,
            rho * hess,
            0.5 * along(grad_rho_tf, du, ui).re,
            -0.5 * rho * tf * q * u2,
            c * p1 * gauge_density(ui, du, gk, sl),
            -c * p1 * q * u2,
            c * p2 * along(gk, du, ui).re,
            -p1 * f_flux.re,
            -0.5 * rho * ((DIM - 1.0) * n2 + tf) * fu.re,
            sl * n2 * p1 * fu.im,
            -c * p1 * fu.re,
        ]
    });
    let vol = grid.cell_volume();
    let s: Vec<f64> = sums.iter().map(|v| v * vol).collect();
    let interface = (0..grid.len()).filter(|&i| psi.supported(field, i) && psi.on_interface(field, i)).count();
    Ok(IdentityResidual::from_terms(&KEY_LHS, &s[..13], &KEY_RHS, &s[13..], interface))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellValue {
    pub radius: f64,
    /// Mean of `|u|^2` over the shell `|K - r| <= h`.
    pub mean: f64,
    /// `∫_shell |u|^2 / (2h)`, the thin-shell surface integral.
    pub surface: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSelection {
    pub r1: f64,
    pub shells: Vec<ShellValue>,
    /// `|||u|||_R^2` over the trusted ball.
    pub triple_norm_sq: f64,
    /// Surface integral at `R1` divided by `|||u|||_R^2`.
    pub surface_ratio: f64,
}

/// Constant of the averaging argument, `2 / log 2`.
pub const SURFACE_CONSTANT: f64 = 2.0 / std::f64::consts::LN_2;

/// Chooses `R1 ∈ [R, 2R]` on an `h`-spaced candidate list minimising the
/// shell mean of `|u|^2`; shells must lie inside `|x| <= trusted_radius`.
pub fn select_surface_radius(u: &[C64], field: &EikonalField, r: f64, trusted_radius: f64) -> Result<SurfaceSelection> {
    let grid = &field.grid;
    let h = grid.spacing;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("surface radius needs R > 0, got {r}")));
    }
    let steps = (r / h).floor().max(1.0) as usize;
    let candidates: Vec<f64> = (0..=steps).map(|s| r + r * s as f64 / steps as f64).collect();
    let mut shells = Vec::new();
    for &rc in &candidates {
        let nodes: Vec<usize> = (0..grid.len()).filter(|&i| (field.k[i] - rc).abs() <= h).collect();
        if nodes.is_empty() || nodes.iter().any(|&i| grid.radius_at(i) > trusted_radius || !grid.is_interior(i, 1)) {
            continue;
        }
        let sum: f64 = nodes.iter().map(|&i| u[i].norm_sqr()).sum();
        shells.push(ShellValue {
            radius: rc,
            mean: sum / nodes.len() as f64,
            surface: sum * grid.cell_volume() / (2.0 * h),
        });
    }
    let best = shells
        .iter()
        .min_by(|a, b| a.mean.total_cmp(&b.mean).then(b.radius.total_cmp(&a.radius)))
        .cloned()
        .ok_or_else(|| Error::EmptyRegion(format!("no admissible shell in [{r}, {}]", 2.0 * r)))?;
    let tn = triple_norm_capped(grid, u, r, Some(trusted_radius));
    let tn2 = tn * tn;
    Ok(SurfaceSelection {
        r1: best.radius,
        surface_ratio: if tn2 > 0.0 { best.surface / tn2 } else { 0.0 },
        shells,
        triple_norm_sq: tn2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub radii: Vec<f64>,
    pub lhs: Vec<f64>,
    /// `N_1(f)^2 + ∫|x|^3|f|^2`.
    pub rhs: f64,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub potential: String,
    pub spacing: f64,
    pub shape: [usize; 3],
    pub n_norm: f64,
    /// `N_1` needed the power-of-two tie-break.
    pub n_norm_tie_break: bool,
    pub source_moment3: f64,
    /// `∫|x|^4|f|^2`, the moment the proposition asks for.
    pub source_moment4: f64,
    /// Smallest `1 + p/λ` over the trusted ball.
    pub min_slowness: f64,
}

/// `R ∫_{K>=R} |∇(e^{-i√λK}u)|^2` against `N_1(f)^2 + ∫|x|^3|f|^2` for each `R`.
pub fn theorem_ratio(
    u: &[C64],
    grad: &[Vec<C64>; 3],
    problem: &HelmholtzProblem,
    field: &EikonalField,
    radii: &[f64],
) -> Result<RatioReport> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("empty radius list".into()));
    }
    check_inputs(u, grad, problem, field)?;
    let grid = &problem.grid;
    let f = &problem.source;
    let trusted = problem.trusted_radius();
    let lhs = radii
        .iter()
        .map(|&r| radiation_functional(u, grad, field, problem.lambda, r, trusted, false))
        .collect::<Result<Vec<f64>>>()?;
    let nn = n_norm(grid, f, 1.0)?;
    let m3 = weighted_source_norm(grid, f, 3.0);
    let rhs = nn.value * nn.value + m3;
    let ratios = lhs
        .iter()
        .map(|&l| {
            if l == 0.0 {
                Ok(0.0)
            } else if rhs > 0.0 {
                Ok(l / rhs)
            } else {
                Err(Error::InvalidArgument("source norms vanish while the functional does not".into()))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let min_slowness = (0..grid.len())
        .filter(|&i| grid.radius_at(i) <= trusted)
        .map(|i| 1.0 + problem.potential.p3(grid.point_at(i)) / problem.lambda)
        .fold(f64::INFINITY, f64::min);
    Ok(RatioReport {
        radii: radii.to_vec(),
        lhs,
        rhs,
        ratios,
        sup_ratio,
        lambda: problem.lambda,
        epsilon: problem.epsilon,
        potential: problem.potential.spec().family.clone(),
        spacing: grid.spacing,
        shape: grid.shape,
        n_norm: nn.value,
        n_norm_tie_break: nn.decomposition.tie_break,
        source_moment3: m3,
        source_moment4: weighted_source_norm(grid, f, 4.0),
        min_slowness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    /// `None` when `f ≡ 0`.
    pub ratio: Option<f64>,
    pub undefined: bool,
    /// `λ|||u|||_1^2 + |||∇u|||_1^2`.
    pub numerator: f64,
    /// `(1 + ε) N_1(f)^2`.
    pub denominator: f64,
}

/// `(λ|||u|||_1^2 + |||∇u|||_1^2) / ((1+ε) N_1(f)^2)` over the trusted ball.
pub fn apriori_ratio(u: &[C64], grad: &[Vec<C64>; 3], problem: &HelmholtzProblem) -> Result<AprioriReport> {
    let grid = &problem.grid;
    if u.len() != grid.len() {
        return Err(Error::InvalidArgument("solution does not match the grid".into()));
    }
    let cap = Some(problem.trusted_radius());
    let tu = triple_norm_capped(grid, u, 1.0, cap);
    let tg = triple_norm_gradient(grid, grad, 1.0, cap);
    let numerator = problem.lambda * tu * tu + tg * tg;
    let nn = n_norm(grid, &problem.source, 1.0)?.value;
    let denominator = (1.0 + problem.epsilon) * nn * nn;
    let undefined = denominator == 0.0;
    Ok(AprioriReport {
        ratio: if undefined { None } else { Some(numerator / denominator) },
        undefined,
        numerator,
        denominator,
    })
}
