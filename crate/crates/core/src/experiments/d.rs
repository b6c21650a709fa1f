use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::info::{chernoff_index, T_GRID};

use super::a::{aggregate_at_radius, check_nondegenerate, simulate_two_point_errors};
use super::{echo, fmt, fmt_opt, ExperimentResult, RadiusPath, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDConfig {
    pub n_grid: Vec<usize>,
    pub c: f64,
    pub lambda: f64,
    pub paths: Vec<RadiusPath>,
    pub n_reps: usize,
}

impl ExperimentDConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return param("n_grid must be nonempty and strictly increasing");
        }
        if self.n_grid.iter().any(|&n| n < 2 || n % 2 == 1) {
            return param("every n in the grid must be even");
        }
        if self.paths.is_empty() {
            return param("need at least one radius path");
        }
        for p in &self.paths {
            p.validate()?;
        }
        if self.n_reps < 2 {
            return param("need at least two replicates");
        }
        if !(self.lambda.abs() < self.c) {
            return param(format!("need |lambda| < c, got c = {}, lambda = {}", self.c, self.lambda));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentDRow {
    pub n: usize,
    pub path: RadiusPath,
    pub radius: f64,
    pub r0: f64,
    pub r_rob: f64,
    /// `−log(R0)/n`; `None` when `R0` underflows.
    pub exponent_baseline: Option<f64>,
    pub exponent_robust: Option<f64>,
    pub normalized_per_replicate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentD {
    pub config: ExperimentDConfig,
    pub seed: u64,
    /// Shrink rate used by unset `ExpShrink` paths.
    pub default_alpha: f64,
    /// Rows ordered by `n`, then by path as configured.
    pub rows: Vec<ExperimentDRow>,
}

fn exponent(r: f64, n: usize) -> Option<f64> {
    // Adding zero turns the `-0` of `R = 1` into `0`.
    (r > 0.0).then(|| -r.ln() / n as f64 + 0.0)
}

/// Error exponents along radius paths. The replicates at each `n` are shared
/// by every path; replicate `r` at grid index `i` uses stream `i·n_reps + r`.
pub fn run_experiment_d(config: &ExperimentDConfig, seed: u64) -> Result<ExperimentD> {
    config.validate()?;
    let default_alpha = chernoff_index(config.c, config.lambda, T_GRID)?.value;
    let mut rows = Vec::new();
    for (i, &n) in config.n_grid.iter().enumerate() {
        let offset = (i * config.n_reps) as u64;
        let errors = simulate_two_point_errors(n, config.c, config.lambda, config.n_reps, seed, offset)?;
        let r0 = errors.iter().sum::<f64>() / errors.len() as f64;
        check_nondegenerate(r0, n)?;
        for path in &config.paths {
            let radius = path.radius(n, default_alpha);
            let agg = aggregate_at_radius(&errors, r0, radius)?;
            rows.push(ExperimentDRow {
                n,
                path: *path,
                radius,
                r0,
                r_rob: agg.robust_risk,
                exponent_baseline: exponent(r0, n),
                exponent_robust: exponent(agg.robust_risk, n),
                normalized_per_replicate: agg.normalized_per_replicate,
            });
        }
    }
    Ok(ExperimentD { config: config.clone(), seed, default_alpha, rows })
}

impl ExperimentD {
    pub fn rows_for(&self, label: &str) -> Vec<&ExperimentDRow> {
        self.rows.iter().filter(|r| r.path.label() == label).collect()
    }

    pub fn to_result(&self) -> ExperimentResult {
        let mut table = Table::new(
            "exponents",
            &["n", "path", "C_n", "R0", "R_rob", "exponent_baseline", "exponent_robust", "normalized_per_replicate"],
        );
        for r in &self.rows {
            table.push(vec![
                r.n.to_string(),
                r.path.label().to_string(),
                fmt(r.radius),
                fmt(r.r0),
                fmt(r.r_rob),
                fmt_opt(r.exponent_baseline),
                fmt_opt(r.exponent_robust),
                fmt(r.normalized_per_replicate),
            ]);
        }
        ExperimentResult { tables: vec![table], config_echo: echo(&self.config), seed: self.seed }
    }
}
