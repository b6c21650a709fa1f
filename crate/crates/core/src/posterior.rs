//! Baseline posteriors consumed by the robustness solvers.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{param, Error, Result};
use crate::graph::Graph;
use crate::models::Labels;
use crate::rng::stream;

/// Weighted posterior atoms with optional cached losses.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    losses: Option<Vec<f64>>,
}

impl WeightedSample {
    /// Normalizes `weights`; they must be finite, nonnegative and not all zero.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return param("weighted sample needs at least one atom");
        }
        if atoms.len() != weights.len() {
            return param(format!("{} atoms but {} weights", atoms.len(), weights.len()));
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return param("weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return param("weights sum to zero");
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { atoms, weights, losses: None })
    }

    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        let w = vec![1.0; atoms.len()];
        Self::new(atoms, w)
    }

    /// Sample whose atoms are just indices, for callers that only have losses.
    pub fn from_losses(weights: Vec<f64>, losses: Vec<f64>) -> Result<Self> {
        let atoms = (0..weights.len()).map(|i| i as f64).collect();
        Self::new(atoms, weights)?.with_losses(losses)
    }

    pub fn with_losses(mut self, losses: Vec<f64>) -> Result<Self> {
        if losses.len() != self.atoms.len() {
            return param(format!("{} losses for {} atoms", losses.len(), self.atoms.len()));
        }
        if losses.iter().any(|l| !l.is_finite()) {
            return param("losses must be finite");
        }
        self.losses = Some(losses);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn losses(&self) -> Option<&[f64]> {
        self.losses.as_deref()
    }

    pub fn require_losses(&self) -> Result<&[f64]> {
        self.losses().ok_or_else(|| Error::Parameter("sample has no cached losses".into()))
    }

    /// Weighted mean of the atoms.
    pub fn mean_of<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(&a, &w)| w * f(a)).sum()
    }

    /// Posterior expected loss `Σ w_s L_s`.
    pub fn baseline_risk(&self) -> Result<f64> {
        let l = self.require_losses()?;
        Ok(l.iter().zip(&self.weights).map(|(l, w)| l * w).sum())
    }

    /// Posterior variance of the cached losses.
    pub fn loss_variance(&self) -> Result<f64> {
        let m = self.baseline_risk()?;
        let l = self.require_losses()?;
        Ok(l.iter().zip(&self.weights).map(|(l, w)| w * (l - m) * (l - m)).sum())
    }

    /// Columns `atom,weight[,loss]` with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Parse(e.to_string());
        match &self.losses {
            Some(losses) => {
                w.write_record(["atom", "weight", "loss"]).map_err(csv_err)?;
                for ((a, wt), l) in self.atoms.iter().zip(&self.weights).zip(losses) {
                    w.write_record([a.to_string(), wt.to_string(), l.to_string()]).map_err(csv_err)?;
                }
            }
            None => {
                w.write_record(["atom", "weight"]).map_err(csv_err)?;
                for (a, wt) in self.atoms.iter().zip(&self.weights) {
                    w.write_record([a.to_string(), wt.to_string()]).map_err(csv_err)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let atom_col = col("atom").ok_or_else(|| Error::Parse("missing column `atom`".into()))?;
        let weight_col = col("weight").ok_or_else(|| Error::Parse("missing column `weight`".into()))?;
        let loss_col = col("loss");
        let (mut atoms, mut weights, mut losses) = (Vec::new(), Vec::new(), Vec::new());
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let field = |idx: usize| -> Result<f64> {
                record
                    .get(idx)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing field", row + 2)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))
            };
            atoms.push(field(atom_col)?);
            weights.push(field(weight_col)?);
            if let Some(lc) = loss_col {
                losses.push(field(lc)?);
            }
        }
        let sample = Self::new(atoms, weights)?;
        match loss_col {
            Some(_) => sample.with_losses(losses),
            None => Ok(sample),
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Posterior over {model 0, model 1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointPosterior {
    pub p0: f64,
    pub p1: f64,
    /// Log Bayes factor of model 1 against model 0, prior odds included.
    pub log_bf: f64,
}

impl TwoPointPosterior {
    pub fn from_log_bf(log_bf: f64) -> Self {
        Self { p0: sigmoid(-log_bf), p1: sigmoid(log_bf), log_bf }
    }
}

/// Exact posterior for ER(`c/n`) (model 0) against the labelled two-block
/// SBM (model 1). Runs over edges once and counts non-edges per pair class
/// in closed form.
pub fn er_vs_sbm_posterior(
    g: &Graph,
    labels: &Labels,
    c: f64,
    lambda: f64,
    prior_odds: f64,
) -> Result<TwoPointPosterior> {
    let n = g.n();
    if labels.len() != n {
        return param(format!("{} labels for {n} vertices", labels.len()));
    }
    if !(prior_odds > 0.0 && prior_odds.is_finite()) {
        return param(format!("prior odds must be positive, got {prior_odds}"));
    }
    let nf = n as f64;
    if !(c > 0.0) || lambda.abs() >= c || c + lambda.abs() >= nf {
        return param(format!("invalid signal: c = {c}, lambda = {lambda}, n = {n}"));
    }
    let p = c / nf;
    let p_in = (c + lambda) / nf;
    let p_out = (c - lambda) / nf;
    let (pairs_in, pairs_out) = labels.pair_counts();
    let (mut edges_in, mut edges_out) = (0u64, 0u64);
    for (i, j) in g.edges() {
        if labels.same(i, j) {
            edges_in += 1;
        } else {
            edges_out += 1;
        }
    }
    let log_miss = |q: f64| (-q).ln_1p() - (-p).ln_1p();
    let log_bf = prior_odds.ln()
        + edges_in as f64 * (p_in / p).ln()
        + (pairs_in - edges_in) as f64 * log_miss(p_in)
        + edges_out as f64 * (p_out / p).ln()
        + (pairs_out - edges_out) as f64 * log_miss(p_out);
    Ok(TwoPointPosterior::from_log_bf(log_bf))
}

/// Bayes action under 0–1 loss and its posterior error `min(p0, p1)`.
/// Ties go to model 1.
pub fn bayes_action_and_error(post: &TwoPointPosterior) -> (u8, f64) {
    let action = if post.p1 >= post.p0 { 1 } else { 0 };
    (action, post.p0.min(post.p1))
}

/// Gamma posterior on a Poisson mean, truncated to the subcritical region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGammaPosterior {
    pub shape: f64,
    pub rate: f64,
    /// Draws at or above this bound are rejected.
    pub upper: f64,
}

/// Minimum acceptance rate before the truncated posterior counts as degenerate.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

impl TruncatedGammaPosterior {
    /// Conjugate update from degree data: `shape + Σ d_i`, `rate + n`.
    pub fn from_graph(g: &Graph, prior_shape: f64, prior_rate: f64) -> Result<Self> {
        if !(prior_shape > 0.0 && prior_rate > 0.0) {
            return param("Gamma prior shape and rate must be positive");
        }
        let degree_sum: usize = g.degrees().iter().sum();
        Ok(Self { shape: prior_shape + degree_sum as f64, rate: prior_rate + g.n() as f64, upper: 1.0 })
    }

    /// Rejection sampling until `n_draws` accepted draws, giving up once the
    /// attempt budget `n_draws / MIN_ACCEPTANCE` is spent.
    pub fn sample<R: Rng + ?Sized>(&self, n_draws: usize, rng: &mut R) -> Result<Vec<f64>> {
        if n_draws == 0 {
            return param("need at least one posterior draw");
        }
        let gamma = Gamma::new(self.shape, 1.0 / self.rate).map_err(|e| Error::Parameter(e.to_string()))?;
        let budget = (n_draws as f64 / MIN_ACCEPTANCE).ceil() as usize;
        let mut accepted = Vec::with_capacity(n_draws);
        let mut attempts = 0;
        while accepted.len() < n_draws {
            if attempts == budget {
                return Err(Error::TruncationDegenerate { rate: accepted.len() as f64 / attempts as f64 });
            }
            attempts += 1;
            let x = gamma.sample(rng);
            if x < self.upper {
                accepted.push(x);
            }
        }
        Ok(accepted)
    }
}

pub fn poisson_mean_pseudo_posterior_with<R: Rng + ?Sized>(
    g: &Graph,
    prior_shape: f64,
    prior_rate: f64,
    n_draws: usize,
    rng: &mut R,
) -> Result<WeightedSample> {
    let post = TruncatedGammaPosterior::from_graph(g, prior_shape, prior_rate)?;
    WeightedSample::uniform(post.sample(n_draws, rng)?)
}

/// Uniformly weighted draws from the subcritically truncated conjugate
/// Gamma posterior on the Poisson degree mean.
pub fn poisson_mean_pseudo_posterior(
    g: &Graph,
    prior_shape: f64,
    prior_rate: f64,
    n_draws: usize,
    seed: u64,
) -> Result<WeightedSample> {
    poisson_mean_pseudo_posterior_with(g, prior_shape, prior_rate, n_draws, &mut stream(seed, 0))
}

/// Susceptibility `R(μ) = 1 / (1 − μ)` of a Poisson configuration model.
pub fn poisson_susceptibility(mean: f64) -> Result<f64> {
    if mean >= 1.0 {
        return Err(Error::Domain(format!("mean {mean} is not subcritical")));
    }
    Ok(1.0 / (1.0 - mean))
}

/// Caches squared-error losses `(action − R(atom))²`.
pub fn susceptibility_losses(sample: &WeightedSample, action: f64) -> Result<WeightedSample> {
    let losses = sample
        .atoms()
        .iter()
        .map(|&a| poisson_susceptibility(a).map(|r| (action - r) * (action - r)))
        .collect::<Result<Vec<_>>>()?;
    sample.clone().with_losses(losses)
}

/// Posterior mean of the susceptibility, the Bayes action under squared loss.
pub fn posterior_mean_susceptibility(sample: &WeightedSample) -> Result<f64> {
    let values = sample.atoms().iter().map(|&a| poisson_susceptibility(a)).collect::<Result<Vec<_>>>()?;
    Ok(values.iter().zip(sample.weights()).map(|(r, w)| r * w).sum())
}

/// Softmax of `−τ·BIC/2`.
pub fn tempered_bic_weights(bics: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return param(format!("temperature must be positive, got {tau}"));
    }
    if bics.is_empty() || bics.iter().any(|b| !b.is_finite()) {
        return param("BIC scores must be finite and nonempty");
    }
    let scores: Vec<f64> = bics.iter().map(|b| -0.5 * tau * b).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}
