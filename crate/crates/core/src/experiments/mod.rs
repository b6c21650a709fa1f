//! Seeded batch harness for the synthetic experiments.
//!
//! Every replicate draws from its own ChaCha stream keyed by the master seed
//! and the replicate's position in the grid, and all reductions run in a
//! fixed order, so outputs are byte-identical across thread counts.

mod a;
mod b;
mod d;

pub use a::{run_experiment_a, simulate_two_point_errors, ExperimentA, ExperimentAConfig, ExperimentARow};
pub use b::{
    risk_profile, run_experiment_b, ExperimentB, ExperimentBConfig, ExperimentBCurveRow, ExperimentBDeltaRow,
    RiskProfile,
};
pub use d::{run_experiment_d, ExperimentD, ExperimentDConfig, ExperimentDRow};

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{param, Error, Result};
use crate::posterior::WeightedSample;
use crate::robust::{kl_tilt_solve, DEFAULT_TOL};

/// Rule for how the robustness budget `C_n` scales with network size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiusPath {
    /// `exp(−2αn)`; `alpha = None` defers to the Chernoff rate of the run.
    ExpShrink {
        alpha: Option<f64>,
    },
    /// `κ / n`.
    Polynomial {
        kappa: f64,
    },
    Constant {
        c0: f64,
    },
    /// `c1 · n`.
    LinearGrow {
        c1: f64,
    },
}

impl RadiusPath {
    pub fn validate(&self) -> Result<()> {
        let value = match *self {
            RadiusPath::ExpShrink { alpha: None } => return Ok(()),
            RadiusPath::ExpShrink { alpha: Some(v) } => v,
            RadiusPath::Polynomial { kappa } => kappa,
            RadiusPath::Constant { c0 } => c0,
            RadiusPath::LinearGrow { c1 } => c1,
        };
        if !(value > 0.0 && value.is_finite()) {
            return param(format!("radius path parameter must be positive, got {value}"));
        }
        Ok(())
    }

    /// `C_n`, with `default_alpha` filling an unset shrink rate.
    pub fn radius(&self, n: usize, default_alpha: f64) -> f64 {
        let n = n as f64;
        match *self {
            RadiusPath::ExpShrink { alpha } => (-2.0 * alpha.unwrap_or(default_alpha) * n).exp(),
            RadiusPath::Polynomial { kappa } => kappa / n,
            RadiusPath::Constant { c0 } => c0,
            RadiusPath::LinearGrow { c1 } => c1 * n,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RadiusPath::ExpShrink { .. } => "exp_shrink",
            RadiusPath::Polynomial { .. } => "polynomial",
            RadiusPath::Constant { .. } => "constant",
            RadiusPath::LinearGrow { .. } => "linear_grow",
        }
    }
}

/// One CSV-shaped table of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Tables plus the resolved configuration and master seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub tables: Vec<Table>,
    pub config_echo: serde_json::Value,
    pub seed: u64,
}

impl ExperimentResult {
    pub fn config_hash(&self) -> String {
        config_hash(&self.config_echo)
    }

    /// Commented header (`# config_sha256=..`, `# seed=..`, `# config=..`),
    /// then each table as `# table=<name>`, a header row and data rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# config_sha256={}", self.config_hash())?;
        writeln!(out, "# seed={}", self.seed)?;
        writeln!(out, "# config={}", self.config_echo)?;
        for table in &self.tables {
            writeln!(out, "# table={}", table.name)?;
            writeln!(out, "{}", table.header.join(","))?;
            for row in &table.rows {
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}

/// Hex SHA-256 of the compact JSON form of a configuration.
pub fn config_hash(config: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

pub(crate) fn echo<T: Serialize>(config: &T) -> serde_json::Value {
    serde_json::to_value(config).expect("configs serialize")
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "censored".to_string(), fmt)
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|&c| !(c > 0.0 && c.is_finite())) || radii.windows(2).any(|w| w[0] >= w[1])
    {
        return param("radii must be nonempty, positive and strictly increasing");
    }
    Ok(())
}

/// Ordinary least squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when `y` is constant.
    pub r2: f64,
}

pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return param(format!("{} x values but {} y values", x.len(), y.len()));
    }
    if x.len() < 2 {
        return param("need at least two points for a fit");
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return param("fit inputs must be finite");
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * k {
        return param("x values are all equal");
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - slope * xi - intercept).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|yi| (yi - my) * (yi - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r2 })
}

/// First guess `(δ/2)²` for the radius that inflates the risk by a factor `1 + δ`.
pub fn heuristic_radius(inflation: f64) -> f64 {
    (0.5 * inflation).powi(2)
}

/// Radius `C` with `ρ_rob(C) = (1 + inflation)·ρ0` to 1% relative accuracy,
/// found by bisection in `log C` starting from the heuristic.
pub fn calibrate_radius(sample: &WeightedSample, inflation: f64) -> Result<f64> {
    if !(inflation > 0.0 && inflation < 1.0) {
        return param(format!("inflation must lie in (0, 1), got {inflation}"));
    }
    let rho0 = sample.baseline_risk()?;
    if sample.loss_variance()? <= 0.0 {
        return Err(Error::Degenerate("losses have zero variance; no radius inflates the risk".into()));
    }
    if !(rho0 > 0.0) {
        return Err(Error::Degenerate(format!("baseline risk {rho0} is not positive")));
    }
    let target = (1.0 + inflation) * rho0;
    let max_loss = sample.require_losses()?.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_loss < target {
        return Err(Error::Degenerate(format!("largest loss {max_loss} is below the target risk {target}")));
    }
    let risk = |c: f64| kl_tilt_solve(sample, c, DEFAULT_TOL).map(|s| s.robust_risk);
    let mut hi = heuristic_radius(inflation);
    let mut lo = hi;
    while risk(hi)? < target {
        hi *= 2.0;
    }
    while lo > f64::MIN_POSITIVE && risk(lo)? > target {
        lo *= 0.5;
    }
    let close = |r: f64| ((r - target) / target).abs() <= 1e-3 * inflation;
    let (mut lo, mut hi) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = risk(mid.exp())?;
        if close(r) {
            return Ok(mid.exp());
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.exp())
}
