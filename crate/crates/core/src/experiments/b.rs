use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::models::{sample_configuration_model_with, DegreeModel};
use crate::posterior::{
    poisson_mean_pseudo_posterior_with, posterior_mean_susceptibility, susceptibility_losses, WeightedSample,
};
use crate::rng::stream;
use crate::robust::{kl_tilt_solve, DEFAULT_TOL};

use super::{check_radii, echo, fit_loglog_slope, fmt, ExperimentResult, LinearFit, Table};

fn default_designated() -> f64 {
    0.2
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBConfig {
    pub n: usize,
    pub deltas: Vec<f64>,
    pub n_reps: usize,
    pub n_post_draws: usize,
    pub radii: Vec<f64>,
    #[serde(rename = "C_slope", alias = "c_slope")]
    pub c_slope: f64,
    /// Distance to criticality whose sensitivity curve is reported.
    #[serde(default = "default_designated")]
    pub designated_delta: f64,
    #[serde(default = "one")]
    pub prior_shape: f64,
    #[serde(default = "one")]
    pub prior_rate: f64,
}

impl ExperimentBConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_reps == 0 || self.n_post_draws == 0 {
            return param("n, n_reps and n_post_draws must be positive");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return param("deltas must lie in (0, 1)");
        }
        if !self.deltas.contains(&self.designated_delta) {
            return param(format!("designated delta {} is not in the grid", self.designated_delta));
        }
        check_radii(&self.radii)?;
        if !(self.c_slope > 0.0) {
            return param("slope radius must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentBDeltaRow {
    pub delta: f64,
    /// Replicates used in the averages.
    pub n_valid: usize,
    /// Replicates whose truncated posterior was degenerate.
    pub n_flagged: usize,
    pub rho0: f64,
    /// Robust risk at the slope radius.
    pub rho_rob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentBCurveRow {
    pub radius: f64,
    pub rho_rob: f64,
    /// `(ρ_rob − ρ0) / (ρ0 √C)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentB {
    pub config: ExperimentBConfig,
    pub seed: u64,
    pub per_delta: Vec<ExperimentBDeltaRow>,
    pub curve_rho0: f64,
    pub curve: Vec<ExperimentBCurveRow>,
    /// `−log Δ ↦ log(n ρ0)`.
    pub baseline_fit: Option<LinearFit>,
    /// `−log Δ ↦ log(n (ρ_rob − ρ0) / √C)` at the slope radius.
    pub robust_fit: Option<LinearFit>,
}

/// Baseline risk, robust risk at the slope radius and the robust curve of
/// one posterior with cached losses.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile {
    pub rho0: f64,
    pub rho_rob: f64,
    pub curve: Vec<f64>,
}

pub fn risk_profile(sample: &WeightedSample, c_slope: f64, radii: &[f64]) -> Result<RiskProfile> {
    let rho0 = sample.baseline_risk()?;
    let rho_rob = kl_tilt_solve(sample, c_slope, DEFAULT_TOL)?.robust_risk;
    let curve =
        radii.iter().map(|&c| kl_tilt_solve(sample, c, DEFAULT_TOL).map(|s| s.robust_risk)).collect::<Result<_>>()?;
    Ok(RiskProfile { rho0, rho_rob, curve })
}

fn replicate(
    config: &ExperimentBConfig,
    delta: f64,
    want_curve: bool,
    rng_index: u64,
    seed: u64,
) -> Result<Option<RiskProfile>> {
    let mut rng = stream(seed, rng_index);
    let cm = sample_configuration_model_with(config.n, &DegreeModel::Poisson(1.0 - delta), &mut rng)?;
    let sample: WeightedSample = match poisson_mean_pseudo_posterior_with(
        &cm.graph,
        config.prior_shape,
        config.prior_rate,
        config.n_post_draws,
        &mut rng,
    ) {
        Ok(s) => s,
        Err(Error::TruncationDegenerate { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let action = posterior_mean_susceptibility(&sample)?;
    let sample = susceptibility_losses(&sample, action)?;
    let radii: &[f64] = if want_curve { &config.radii } else { &[] };
    risk_profile(&sample, config.c_slope, radii).map(Some)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut k) = (0.0, 0usize);
    for v in values {
        sum += v;
        k += 1;
    }
    if k == 0 {
        f64::NAN
    } else {
        sum / k as f64
    }
}

/// Robust susceptibility near criticality: per distance `Δ` and replicate,
/// an erased configuration model with Poisson(1 − Δ) degrees, a truncated
/// Gamma pseudo-posterior, the Bayes action under squared loss and
/// KL-tilted risks. Replicate `r` of grid cell `i` uses stream `i·n_reps + r`.
pub fn run_experiment_b(config: &ExperimentBConfig, seed: u64) -> Result<ExperimentB> {
    config.validate()?;
    let mut per_delta = Vec::with_capacity(config.deltas.len());
    let mut curve_rho0 = f64::NAN;
    let mut curve = Vec::new();
    for (i, &delta) in config.deltas.iter().enumerate() {
        let want_curve = delta == config.designated_delta && curve.is_empty();
        let reps: Vec<Option<RiskProfile>> = (0..config.n_reps)
            .into_par_iter()
            .map(|r| replicate(config, delta, want_curve, (i * config.n_reps + r) as u64, seed))
            .collect::<Result<_>>()?;
        let valid: Vec<&RiskProfile> = reps.iter().flatten().collect();
        let row = ExperimentBDeltaRow {
            delta,
            n_valid: valid.len(),
            n_flagged: reps.len() - valid.len(),
            rho0: mean(valid.iter().map(|r| r.rho0)),
            rho_rob: mean(valid.iter().map(|r| r.rho_rob)),
        };
        if want_curve && !valid.is_empty() {
            curve_rho0 = row.rho0;
            curve = config
                .radii
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let rho_rob = mean(valid.iter().map(|r| r.curve[k]));
                    ExperimentBCurveRow { radius: c, rho_rob, normalized: (rho_rob - row.rho0) / (row.rho0 * c.sqrt()) }
                })
                .collect();
        }
        per_delta.push(row);
    }

    let n = config.n as f64;
    let usable: Vec<&ExperimentBDeltaRow> =
        per_delta.iter().filter(|r| r.n_valid > 0 && r.rho0 > 0.0 && r.rho_rob > r.rho0).collect();
    let x: Vec<f64> = usable.iter().map(|r| -r.delta.ln()).collect();
    let y0: Vec<f64> = usable.iter().map(|r| (n * r.rho0).ln()).collect();
    let y1: Vec<f64> = usable.iter().map(|r| (n * (r.rho_rob - r.rho0) / config.c_slope.sqrt()).ln()).collect();
    let baseline_fit = fit_loglog_slope(&x, &y0).ok();
    let robust_fit = fit_loglog_slope(&x, &y1).ok();
    Ok(ExperimentB { config: config.clone(), seed, per_delta, curve_rho0, curve, baseline_fit, robust_fit })
}

impl ExperimentB {
    pub fn normalized(&self) -> Vec<f64> {
        self.curve.iter().map(|r| r.normalized).collect()
    }

    pub fn to_result(&self) -> ExperimentResult {
        let mut deltas = Table::new("per_delta", &["delta", "n_valid", "n_flagged", "rho0", "rho_rob_C_slope"]);
        for r in &self.per_delta {
            deltas.push(vec![
                fmt(r.delta),
                r.n_valid.to_string(),
                r.n_flagged.to_string(),
                fmt(r.rho0),
                fmt(r.rho_rob),
            ]);
        }
        let mut curve = Table::new("sensitivity", &["delta", "C", "sqrt_C", "rho0", "rho_rob", "normalized"]);
        for r in &self.curve {
            curve.push(vec![
                fmt(self.config.designated_delta),
                fmt(r.radius),
                fmt(r.radius.sqrt()),
                fmt(self.curve_rho0),
                fmt(r.rho_rob),
                fmt(r.normalized),
            ]);
        }
        let mut fits = Table::new("loglog_fits", &["series", "slope", "intercept", "r2"]);
        for (name, fit) in [("baseline", self.baseline_fit), ("robust", self.robust_fit)] {
            match fit {
                Some(f) => fits.push(vec![name.to_string(), fmt(f.slope), fmt(f.intercept), fmt(f.r2)]),
                None => fits.push(vec![name.to_string(), "nan".into(), "nan".into(), "nan".into()]),
            }
        }
        ExperimentResult { tables: vec![deltas, curve, fits], config_echo: echo(&self.config), seed: self.seed }
    }
}
