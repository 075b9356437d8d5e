//! Radial eikonal profiles `K(r) = ∫_0^r sqrt(1 + p(s)/λ) ds`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::quadrature::GaussRule;

/// Additive normalization of `K`.
///
/// `Origin` fixes `K(0) = 0`. `Asymptotic` subtracts the constant
/// `C0 = ∫_0^∞ (sqrt(1 + p/λ) - 1)` so that `K(r) - r → 0` at infinity;
/// it needs a decaying `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Origin,
    Asymptotic,
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub lambda: f64,
    pub radii: Vec<f64>,
    pub k_values: Vec<f64>,
    pub kprime_values: Vec<f64>,
    pub normalization: Normalization,
    /// Constant subtracted from the origin-normalized `K`.
    pub offset: f64,
    pot: Potential,
    rule: GaussRule,
}

const PANEL_NODES: usize = 8;

/// Integrates the radial eikonal equation on `n_points` equispaced radii in `[0, r_max]`.
pub fn solve_eikonal_radial(
    pot: &Potential,
    lambda: f64,
    r_max: f64,
    n_points: usize,
) -> Result<RadialProfile> {
    if !pot.is_radial() {
        return Err(Error::NonRadial(pot.spec().family.clone()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if !(r_max > 0.0) || n_points < 2 {
        return Err(Error::InvalidArgument("radial profile needs r_max > 0 and at least 2 points".into()));
    }
    let rule = GaussRule::new(PANEL_NODES);
    let dr = r_max / (n_points - 1) as f64;
    let radii: Vec<f64> = (0..n_points).map(|i| i as f64 * dr).collect();

    let slowness2 = |r: f64| 1.0 + pot.p_radial(r).unwrap() / lambda;
    for &r in &radii {
        check_slowness(slowness2(r), r, lambda)?;
    }
    for w in radii.windows(2) {
        for (x, _) in rule.points(w[0], w[1]) {
            check_slowness(slowness2(x), x, lambda)?;
        }
    }

    let mut k_values = Vec::with_capacity(n_points);
    let mut acc = 0.0;
    k_values.push(0.0);
    for w in radii.windows(2) {
        acc += rule.integrate(w[0], w[1], |s| slowness2(s).sqrt());
        k_values.push(acc);
    }
    let kprime_values = radii.iter().map(|&r| slowness2(r).sqrt()).collect();
    Ok(RadialProfile {
        lambda,
        radii,
        k_values,
        kprime_values,
        normalization: Normalization::Origin,
        offset: 0.0,
        pot: pot.clone(),
        rule,
    })
}

fn check_slowness(s2: f64, r: f64, lambda: f64) -> Result<()> {
    if s2 > 0.0 && s2.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSlowness { radius: r, value: s2, lambda })
    }
}

impl RadialProfile {
    pub fn potential(&self) -> &Potential {
        &self.pot
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Re-normalizes the profile. `Asymptotic` requires a decaying `p`.
    pub fn with_normalization(mut self, normalization: Normalization) -> Result<Self> {
        let offset = match normalization {
            Normalization::Origin => 0.0,
            Normalization::Asymptotic => {
                if !self.pot.p_decays() {
                    return Err(Error::InvalidArgument(
                        "asymptotic normalization needs a decaying potential".into(),
                    ));
                }
                self.asymptotic_offset()
            }
        };
        for k in &mut self.k_values {
            *k += self.offset - offset;
        }
        self.offset = offset;
        self.normalization = normalization;
        Ok(self)
    }

    /// `∫_0^∞ (K' - 1)`, with the tail past `r_max` mapped to `(0, 1]` by `s = r_max / t`.
    fn asymptotic_offset(&self) -> f64 {
        let rm = self.r_max();
        let head = self.k_values.last().unwrap() + self.offset - rm;
        let panels = 16;
        let tail: f64 = (0..panels)
            .map(|i| {
                let a = i as f64 / panels as f64;
                let b = (i + 1) as f64 / panels as f64;
                self.rule.integrate(a, b, |t| {
                    let s = rm / t;
                    (self.kprime(s) - 1.0) * rm / (t * t)
                })
            })
            .sum();
        head + tail
    }

    pub fn slowness2(&self, r: f64) -> f64 {
        1.0 + self.pot.p_radial(r).unwrap() / self.lambda
    }

    /// `K(r)`, by partial-panel quadrature from the nearest tabulated radius.
    /// Constant potentials give the exact `sqrt(1 + p/λ) r`.
    pub fn k(&self, r: f64) -> f64 {
        let r = r.abs();
        if self.pot.is_constant_p() {
            return self.kprime(0.0) * r - self.offset;
        }
        let dr = self.radii[1];
        let n = self.radii.len();
        let (r_i, k_i) = if r >= self.r_max() {
            (self.r_max(), self.k_values[n - 1])
        } else {
            let i = ((r / dr).floor() as usize).min(n - 2);
            (self.radii[i], self.k_values[i])
        };
        let mut acc = k_i;
        let mut a = r_i;
        while a < r {
            let b = (a + dr).min(r);
            acc += self.rule.integrate(a, b, |s| self.slowness2(s).sqrt());
            a = b;
        }
        acc
    }

    pub fn kprime(&self, r: f64) -> f64 {
        self.slowness2(r.abs()).sqrt()
    }

    pub fn kprime2(&self, r: f64) -> f64 {
        let dp = self.pot.dp_radial(r).unwrap();
        dp / (2.0 * self.lambda * self.kprime(r))
    }

    pub fn kprime3(&self, r: f64) -> f64 {
        let s = self.kprime(r);
        let dp = self.pot.dp_radial(r).unwrap();
        let d2p = self.pot.d2p_radial(r).unwrap();
        d2p / (2.0 * self.lambda * s) - dp * dp / (4.0 * self.lambda * self.lambda * s * s * s)
    }

    /// `g(r) = K(r)/r` and its first three radial derivatives.
    ///
    /// Near the origin of an origin-normalized profile a Taylor expansion
    /// replaces the quotients.
    pub fn g_derivatives(&self, r: f64) -> [f64; 4] {
        let k1 = self.kprime(r);
        let k2 = self.kprime2(r);
        let k3 = self.kprime3(r);
        if self.normalization == Normalization::Origin && r < 1e-3 {
            let c = self.kprime3(0.0);
            let s0 = self.kprime(0.0);
            return [s0 + c * r * r / 6.0, c * r / 3.0, c / 3.0, 0.0];
        }
        let g = self.k(r) / r;
        let g1 = (k1 - g) / r;
        let g2 = (k2 - 2.0 * g1) / r;
        let g3 = (k3 - 3.0 * g2) / r;
        [g, g1, g2, g3]
    }

    /// Max of `|K'(r)^2 - (1 + p/λ)|` over the tabulated radii.
    pub fn eikonal_residual(&self) -> f64 {
        self.radii
            .iter()
            .zip(&self.kprime_values)
            .map(|(&r, &kp)| (kp * kp - self.slowness2(r)).abs())
            .fold(0.0, f64::max)
    }
}
