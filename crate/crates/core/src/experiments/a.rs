use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::models::{sample_sparse_er_with, sample_two_block_sbm_with, LabelledSbmParams, SparseErParams};
use crate::posterior::{bayes_action_and_error, er_vs_sbm_posterior};
use crate::rng::stream;
use crate::robust::two_point_robust_error;

use super::{check_radii, echo, fmt, ExperimentResult, Table};

/// Relative bisection tolerance for two-point robust errors.
const TWO_POINT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentAConfig {
    pub n: usize,
    pub c: f64,
    pub lambda: f64,
    pub n_reps: usize,
    pub radii: Vec<f64>,
}

impl ExperimentAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 == 1 {
            return param(format!("n must be even and at least 2, got {}", self.n));
        }
        if self.n_reps < 2 {
            return param("need at least two replicates");
        }
        check_radii(&self.radii)?;
        // The model constructors check the signal.
        LabelledSbmParams::with_halves(self.n, self.c, self.lambda)?;
        SparseErParams::new(self.n, self.c)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentARow {
    pub radius: f64,
    pub robust_risk: f64,
    /// `(R_rob − R0) / (√(2 R0 (1 − R0)) √C)` on aggregated risks.
    pub normalized: f64,
    /// Mean over replicates of `(e_rob − e0) / (√(2 e0 (1 − e0)) √C)`,
    /// skipping replicates with `e0 = 0`.
    pub normalized_per_replicate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentA {
    pub config: ExperimentAConfig,
    pub seed: u64,
    pub baseline_risk: f64,
    /// Posterior errors `e0`, H0 replicates first.
    pub errors: Vec<f64>,
    pub rows: Vec<ExperimentARow>,
}

/// Posterior error `e0` for each replicate: the first `n_reps / 2` are drawn
/// under ER, the rest under the two-block SBM. Replicate `r` uses stream
/// `offset + r`.
pub fn simulate_two_point_errors(
    n: usize,
    c: f64,
    lambda: f64,
    n_reps: usize,
    seed: u64,
    offset: u64,
) -> Result<Vec<f64>> {
    let er = SparseErParams::new(n, c)?;
    let sbm = LabelledSbmParams::with_halves(n, c, lambda)?;
    let h0 = n_reps / 2;
    (0..n_reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, offset + r as u64);
            let g =
                if r < h0 { sample_sparse_er_with(&er, &mut rng) } else { sample_two_block_sbm_with(&sbm, &mut rng) };
            let post = er_vs_sbm_posterior(&g, sbm.labels(), c, lambda, 1.0)?;
            Ok(bayes_action_and_error(&post).1)
        })
        .collect()
}

pub(crate) struct RobustAggregate {
    pub robust_risk: f64,
    pub normalized: f64,
    pub normalized_per_replicate: f64,
}

/// Mean robust error at radius `c`, with both normalizations.
pub(crate) fn aggregate_at_radius(errors: &[f64], r0: f64, c: f64) -> Result<RobustAggregate> {
    let robust: Vec<f64> =
        errors.par_iter().map(|&e| two_point_robust_error(e, c, TWO_POINT_TOL)).collect::<Result<_>>()?;
    let k = errors.len() as f64;
    let robust_risk = robust.iter().sum::<f64>() / k;
    let normalized = (robust_risk - r0) / ((2.0 * r0 * (1.0 - r0)).sqrt() * c.sqrt());
    let (mut acc, mut used) = (0.0, 0usize);
    for (&e, &q) in errors.iter().zip(&robust) {
        if e > 0.0 {
            acc += (q - e) / ((2.0 * e * (1.0 - e)).sqrt() * c.sqrt());
            used += 1;
        }
    }
    let normalized_per_replicate = if used == 0 { 0.0 } else { acc / used as f64 };
    Ok(RobustAggregate { robust_risk, normalized, normalized_per_replicate })
}

pub(crate) fn check_nondegenerate(r0: f64, n: usize) -> Result<()> {
    if r0 <= 0.0 || r0 >= 1.0 {
        return Err(Error::DegenerateRisk(format!(
            "baseline risk {r0} at n = {n}; use more replicates or a smaller n"
        )));
    }
    Ok(())
}

/// Normalized excess robust misclassification over a radius grid.
pub fn run_experiment_a(config: &ExperimentAConfig, seed: u64) -> Result<ExperimentA> {
    config.validate()?;
    let errors = simulate_two_point_errors(config.n, config.c, config.lambda, config.n_reps, seed, 0)?;
    let r0 = errors.iter().sum::<f64>() / errors.len() as f64;
    check_nondegenerate(r0, config.n)?;
    let rows = config
        .radii
        .iter()
        .map(|&c| {
            let agg = aggregate_at_radius(&errors, r0, c)?;
            Ok(ExperimentARow {
                radius: c,
                robust_risk: agg.robust_risk,
                normalized: agg.normalized,
                normalized_per_replicate: agg.normalized_per_replicate,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentA { config: config.clone(), seed, baseline_risk: r0, errors, rows })
}

impl ExperimentA {
    pub fn normalized(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.normalized).collect()
    }

    pub fn to_result(&self) -> ExperimentResult {
        let mut table = Table::new(
            "sensitivity",
            &["C", "sqrt_C", "R0", "R_rob", "normalized_aggregate", "normalized_per_replicate"],
        );
        for row in &self.rows {
            table.push(vec![
                fmt(row.radius),
                fmt(row.radius.sqrt()),
                fmt(self.baseline_risk),
                fmt(row.robust_risk),
                fmt(row.normalized),
                fmt(row.normalized_per_replicate),
            ]);
        }
        ExperimentResult { tables: vec![table], config_echo: echo(&self.config), seed: self.seed }
    }
}
