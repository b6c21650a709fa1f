use std::io::Write;

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::posterior::WeightedSample;

use super::{kl_tilt_solve, DEFAULT_TOL};

/// Leading-order small-radius risk `m + √(2 var) · √C`.
///
/// For squared loss at the Bayes action pass `loss_variance = 2ρ0²`, which
/// gives `ρ0 (1 + 2√C)`.
pub fn small_radius_prediction(baseline_risk: f64, loss_variance: f64, c: f64) -> f64 {
    baseline_risk + (2.0 * loss_variance).sqrt() * c.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `(ρ_rob − ρ0) / (ρ0 √C)`.
    RhoSqrtC,
    /// `(ρ_rob − ρ0) / (√(2 Var L) √C)`.
    VarSqrtC,
    /// Raw excess `ρ_rob − ρ0`.
    None,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::RhoSqrtC => "rho_sqrt_c",
            Normalization::VarSqrtC => "var_sqrt_c",
            Normalization::None => "none",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" | "rho_sqrt_c" => Ok(Normalization::RhoSqrtC),
            "var" | "var_sqrt_c" => Ok(Normalization::VarSqrtC),
            "none" => Ok(Normalization::None),
            other => param(format!("unknown normalization `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub radii: Vec<f64>,
    pub baseline_risk: f64,
    pub robust_risks: Vec<f64>,
    pub normalized: Vec<f64>,
    pub normalization: Normalization,
}

impl SensitivityCurve {
    pub const HEADER: &'static str = "C,baseline_risk,robust_risk,normalized";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for ((c, r), z) in self.radii.iter().zip(&self.robust_risks).zip(&self.normalized) {
            writeln!(out, "{c},{},{r},{z}", self.baseline_risk)?;
        }
        Ok(())
    }
}

/// `num / den`, with zero denominators reported as 0 rather than NaN.
pub(crate) fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Robust risk over a grid of KL radii. Radii are solved in parallel; the
/// output order follows `radii`.
pub fn sensitivity_curve(
    sample: &WeightedSample,
    radii: &[f64],
    normalization: Normalization,
) -> Result<SensitivityCurve> {
    if radii.is_empty() {
        return param("need at least one radius");
    }
    if radii.iter().any(|&c| !(c > 0.0 && c.is_finite())) || radii.windows(2).any(|p| p[0] >= p[1]) {
        return param("radii must be positive and strictly increasing");
    }
    let rho0 = sample.baseline_risk()?;
    let var = sample.loss_variance()?;
    let robust_risks = radii
        .par_iter()
        .map(|&c| kl_tilt_solve(sample, c, DEFAULT_TOL).map(|s| s.robust_risk))
        .collect::<Result<Vec<_>>>()?;
    let normalized = radii
        .iter()
        .zip(&robust_risks)
        .map(|(&c, &r)| match normalization {
            Normalization::RhoSqrtC => ratio_or_zero(r - rho0, rho0 * c.sqrt()),
            Normalization::VarSqrtC => ratio_or_zero(r - rho0, (2.0 * var).sqrt() * c.sqrt()),
            Normalization::None => r - rho0,
        })
        .collect();
    Ok(SensitivityCurve { radii: radii.to_vec(), baseline_risk: rho0, robust_risks, normalized, normalization })
}
