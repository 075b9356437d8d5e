//! Power-law decay fits over dyadic annuli.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub field: String,
    pub lambda: f64,
    /// Fitted decay rate: `sup |field| ~ constant * r^{-exponent}`. `None` for a zero field.
    pub exponent: Option<f64>,
    pub constant: Option<f64>,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: f64,
    pub target_exponent: f64,
    pub tolerance: f64,
    pub annuli: Vec<(f64, f64)>,
    /// Geometric midpoints of the annuli, the abscissae of the fit.
    pub midpoints: Vec<f64>,
    pub sups: Vec<f64>,
    /// `sup_annulus |field| * r^{target}` with `r` the annulus midpoint.
    pub scaled_sups: Vec<f64>,
    pub identically_zero: bool,
    /// `exponent >= target - tolerance`, or a zero field.
    pub bounded: bool,
}

/// Dyadic annuli `[2^j, 2^{j+1}]` covering `[r_lo, r_hi]`.
pub fn dyadic_annuli(r_lo: f64, r_hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = r_lo;
    while 2.0 * a <= r_hi * (1.0 + 1e-12) {
        out.push((a, 2.0 * a));
        a *= 2.0;
    }
    out
}

/// Least-squares slope of `log sup_annulus |field|` against `log` of the annulus midpoint.
///
/// `samples` are `(radius, |value|)` pairs. Every annulus must be non-empty and
/// lie inside the sampled radii.
pub fn fit_decay(
    field: &str,
    samples: &[(f64, f64)],
    lambda: f64,
    target_exponent: f64,
    annuli: &[(f64, f64)],
    tolerance: f64,
) -> Result<DecayFit> {
    if annuli.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "decay fits need at least 3 annuli, got {}",
            annuli.len()
        )));
    }
    let r_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let mut sups = Vec::with_capacity(annuli.len());
    for &(lo, hi) in annuli {
        if !(hi > lo) || lo <= 0.0 || hi > r_max * (1.0 + 1e-9) {
            return Err(Error::AnnuliOutOfRange(format!(
                "annulus [{lo}, {hi}] with samples reaching r = {r_max}"
            )));
        }
        let inside: Vec<f64> = samples
            .iter()
            .filter(|(r, _)| *r >= lo && *r <= hi)
            .map(|(_, v)| v.abs())
            .collect();
        if inside.is_empty() {
            return Err(Error::AnnuliOutOfRange(format!("annulus [{lo}, {hi}] has no samples")));
        }
        sups.push(inside.into_iter().fold(0.0, f64::max));
    }
    Ok(fit_sups(field, lambda, target_exponent, annuli, sups, tolerance))
}

fn fit_sups(
    field: &str,
    lambda: f64,
    target_exponent: f64,
    annuli: &[(f64, f64)],
    sups: Vec<f64>,
    tolerance: f64,
) -> DecayFit {
    let midpoints: Vec<f64> = annuli.iter().map(|(a, b)| (a * b).sqrt()).collect();
    let scaled_sups: Vec<f64> =
        midpoints.iter().zip(&sups).map(|(r, s)| s * r.powf(target_exponent)).collect();
    let base = DecayFit {
        field: field.to_string(),
        lambda,
        exponent: None,
        constant: None,
        r_squared: 1.0,
        target_exponent,
        tolerance,
        annuli: annuli.to_vec(),
        midpoints: midpoints.clone(),
        sups: sups.clone(),
        scaled_sups,
        identically_zero: true,
        bounded: true,
    };
    if sups.iter().all(|&s| s == 0.0) {
        return base;
    }
    if sups.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return DecayFit { identically_zero: false, bounded: false, r_squared: 0.0, ..base };
    }
    let xs: Vec<f64> = midpoints.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    let exponent = -slope;
    DecayFit {
        exponent: Some(exponent),
        constant: Some(intercept.exp()),
        r_squared: r2,
        identically_zero: false,
        bounded: exponent >= target_exponent - tolerance,
        ..base
    }
}

/// Ordinary least squares `y = slope x + intercept`, with `R^2`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Ratio of the largest scaled sups of two fits of the same field at different `λ`.
pub fn lambda_scaling_ratio(low: &DecayFit, high: &DecayFit) -> f64 {
    let m = |f: &DecayFit| f.scaled_sups.iter().copied().fold(0.0, f64::max);
    m(high) / m(low)
}
