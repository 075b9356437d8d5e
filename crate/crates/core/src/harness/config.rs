//! Experiment configuration, read from TOML.
//!
//! ```toml
//! schema_version = 1
//! output_dir = "runs/long_range"
//! checks = ["theorem", "apriori"]   # decay | identities | theorem | apriori | sweep | all
//! workers = 0                       # 0 = machine parallelism
//! lambdas = [4.0, 8.0]
//! epsilons = [0.1, 0.05]
//! radii = [1.0, 1.5, 2.0, 3.0, 4.0]
//!
//! [potential]
//! family = "long_range"
//! delta = 0.5
//! amplitude_p = 0.1
//!
//! [grid]
//! extent = 7.0
//! spacing = 0.25
//!
//! [boundary]
//! kind = "pml"
//! wavelengths = 0.75
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::helmholtz::{points_per_wavelength, Boundary, Bump};
use crate::potential::{make_potential, PotentialSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Fewest grid points per wavelength accepted for a solve.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Decay,
    Identities,
    Theorem,
    Apriori,
    Sweep,
    All,
}

impl CheckKind {
    pub const RUNNABLE: [CheckKind; 5] =
        [CheckKind::Decay, CheckKind::Identities, CheckKind::Theorem, CheckKind::Apriori, CheckKind::Sweep];

    pub fn id(self) -> &'static str {
        match self {
            CheckKind::Decay => "decay",
            CheckKind::Identities => "identities",
            CheckKind::Theorem => "theorem",
            CheckKind::Apriori => "apriori",
            CheckKind::Sweep => "sweep",
            CheckKind::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half-width of the centred cube.
    pub extent: f64,
    pub spacing: f64,
}

impl GridConfig {
    pub fn grid(&self) -> Grid3 {
        Grid3::centered_extent(self.extent, self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Dirichlet,
    /// Layer thickness in wavelengths of the energy being solved.
    Pml {
        #[serde(default = "default_layer")]
        wavelengths: f64,
        #[serde(default = "default_strength")]
        strength: f64,
    },
}

fn default_layer() -> f64 {
    0.75
}

fn default_strength() -> f64 {
    6.0
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig::Pml { wavelengths: default_layer(), strength: default_strength() }
    }
}

impl BoundaryConfig {
    pub fn boundary(&self, lambda: f64) -> Boundary {
        match *self {
            BoundaryConfig::Dirichlet => Boundary::Dirichlet,
            BoundaryConfig::Pml { wavelengths, strength } => {
                Boundary::Pml { width: wavelengths * crate::helmholtz::wavelength(lambda), strength }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Bump {
        #[serde(default)]
        center: [f64; 3],
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig::Bump { center: [0.0; 3], radius: 1.0, amplitude: 1.0 }
    }
}

impl SourceConfig {
    pub fn bump(&self) -> Bump {
        match *self {
            SourceConfig::Bump { center, radius, amplitude } => Bump { center, radius, amplitude },
        }
    }
}

/// Geometry-only grid for the decay fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub half_cells: usize,
    pub spacing: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self { half_cells: 48, spacing: 2.0 / 3.0, r_min: 4.0, r_max: 32.0 }
    }
}

/// Multipliers of the identity check, in units of `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
    /// `R1` of the reported (not gated) kinked multiplier.
    pub switch_radius: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self { cutoff_inner: 1.0, cutoff_outer: 2.5, switch_radius: 1.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Slack on every fitted decay exponent.
    pub decay_exponent: f64,
    /// Slack on the `∇Δg` exponent.
    pub grad_laplace_exponent: f64,
    /// Relative slack on the `1/λ` scaling of the `∂_r g` constant.
    pub lambda_scaling: f64,
    /// Identity residuals must stay below `identity_factor (h^2 + solver)`.
    pub identity_factor: f64,
    pub solver: f64,
    pub max_iterations: usize,
    /// Relative change of the sup ratio allowed when `ε` is halved.
    pub ratio_stability: f64,
    /// Relative distance of the extrapolated limit from the free-space oracle.
    pub limit_oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            decay_exponent: 0.3,
            grad_laplace_exponent: 0.5,
            lambda_scaling: 0.3,
            identity_factor: 10.0,
            solver: 1e-8,
            max_iterations: 20_000,
            ratio_stability: 0.2,
            limit_oracle: 0.03,
        }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_epsilons() -> Vec<f64> {
    vec![0.1]
}

fn default_radii() -> Vec<f64> {
    vec![1.0, 1.5, 2.0, 3.0, 4.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub workers: usize,
    /// Write every solution as a binary dump with a JSON descriptor.
    #[serde(default)]
    pub dump_fields: bool,
    pub potential: PotentialSpec,
    pub lambdas: Vec<f64>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub identities: IdentityConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Requested checks with `all` expanded, in canonical order, each once.
    pub fn expanded_checks(&self) -> Vec<CheckKind> {
        if self.checks.contains(&CheckKind::All) {
            return CheckKind::RUNNABLE.to_vec();
        }
        CheckKind::RUNNABLE.iter().copied().filter(|c| self.checks.contains(c)).collect()
    }

    pub fn needs_solves(&self) -> bool {
        self.expanded_checks()
            .iter()
            .any(|c| matches!(c, CheckKind::Identities | CheckKind::Theorem | CheckKind::Apriori))
    }

    /// Trusted radius of the solve grid at energy `lambda`.
    pub fn trusted_radius(&self, lambda: f64) -> f64 {
        let grid = self.grid.grid();
        grid.inscribed_radius() - self.boundary.boundary(lambda).layer_width() - 2.0 * grid.spacing
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        make_potential(&self.potential).map_err(|e| Error::Config(e.to_string()))?;
        if self.lambdas.is_empty() {
            return bad("lambdas is empty".into());
        }
        if let Some(l) = self.lambdas.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return bad(format!("lambda = {l} is not a positive number"));
        }
        if self.epsilons.is_empty() {
            return bad("epsilons is empty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon = {e} is not a positive number"));
        }
        if let Some(r) = self.radii.iter().find(|&&r| !(r >= 1.0 && r.is_finite())) {
            return bad(format!("radius R = {r} is below 1"));
        }
        let checks = self.expanded_checks();
        if checks.contains(&CheckKind::Theorem) && self.radii.is_empty() {
            return bad("theorem check needs a non-empty radii list".into());
        }
        if checks.contains(&CheckKind::Sweep)
            && (self.epsilons.len() < 2 || self.epsilons.windows(2).any(|w| !(w[1] < w[0])))
        {
            return bad("sweep check needs at least two strictly decreasing epsilons".into());
        }
        let t = &self.tolerances;
        if !(t.solver > 0.0) || t.max_iterations == 0 {
            return bad("solver tolerance and max_iterations must be positive".into());
        }
        if checks.contains(&CheckKind::Decay) {
            let d = &self.decay;
            if !(d.spacing > 0.0) || !(d.r_min > 0.0) || d.r_max < 8.0 * d.r_min {
                return bad("decay grid needs positive spacing and r_max >= 8 r_min (three dyadic annuli)".into());
            }
            if d.r_max > d.half_cells as f64 * d.spacing {
                return bad(format!(
                    "decay annuli reach r = {} beyond the decay grid half-width {}",
                    d.r_max,
                    d.half_cells as f64 * d.spacing
                ));
            }
        }
        if !self.needs_solves() && !checks.contains(&CheckKind::Sweep) {
            return Ok(());
        }
        let g = &self.grid;
        if !(g.spacing > 0.0) || !(g.extent >= 5.0 * g.spacing) {
            return bad(format!("grid extent {} must cover at least 5 cells of spacing {}", g.extent, g.spacing));
        }
        let grid = g.grid();
        let mut by_size = self.lambdas.clone();
        by_size.sort_by(|a, b| b.total_cmp(a));
        for &lambda in &by_size {
            let ppw = points_per_wavelength(lambda, grid.spacing);
            if ppw < MIN_POINTS_PER_WAVELENGTH {
                return bad(format!(
                    "lambda = {lambda} is under-resolved: {ppw:.2} points per wavelength at spacing {} (at least {MIN_POINTS_PER_WAVELENGTH} required)",
                    grid.spacing
                ));
            }
        }
        let bump = self.source.bump();
        for &lambda in &self.lambdas {
            let trusted = self.trusted_radius(lambda);
            if !(trusted > 0.0) {
                return bad(format!("absorbing layer at lambda = {lambda} leaves no trusted interior"));
            }
            if crate::grid::norm3(bump.center) + bump.radius > trusted {
                return bad(format!(
                    "source support reaches |x| = {} beyond the trusted radius {trusted:.4} at lambda = {lambda}",
                    crate::grid::norm3(bump.center) + bump.radius
                ));
            }
            if checks.contains(&CheckKind::Identities) {
                let id = &self.identities;
                if !(id.cutoff_inner >= 0.0 && id.cutoff_outer > id.cutoff_inner) {
                    return bad("identity cutoff needs 0 <= cutoff_inner < cutoff_outer".into());
                }
            }
        }
        Ok(())
    }
}
