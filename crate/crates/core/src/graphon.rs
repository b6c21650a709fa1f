//! KL neighbourhoods of step graphons and chain moves that stay inside them.
//!
//! Block probabilities are vectorized row-major into `K²` cells. Dirichlet
//! algebra happens on the simplex; the center's cell sum is stored at ball
//! creation and used to map simplex points back to edge probabilities.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{param, Error, Result};
use crate::info::kl_or_inf;
use crate::models::StepGraphon;
use crate::rng::stream;

/// Moves clamp cells into `[CELL_FLOOR, 1 − CELL_FLOOR]`.
pub const CELL_FLOOR: f64 = 1e-9;

/// Digamma `ψ₀(x)` for `x > 0`: upward recurrence to `x ≥ 10`, then the
/// asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    // Bernoulli-number coefficients B_2k / 2k.
    let series = x2
        * (1.0 / 12.0
            - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 132.0 - x2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - series
}

/// Expected `KL(P ∥ p⋆)` for `P ~ Dirichlet(α p⋆)`.
pub fn dirichlet_expected_kl(pstar: &[f64], alpha: f64) -> Result<f64> {
    if pstar.is_empty() || pstar.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
        return param("reference vector must be strictly positive");
    }
    let total: f64 = pstar.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return param(format!("reference vector sums to {total}, expected 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return param(format!("concentration must be positive, got {alpha}"));
    }
    let base = digamma(alpha + 1.0);
    Ok(pstar.iter().map(|&p| p * (digamma(alpha * p + 1.0) - base - p.ln())).sum())
}

fn check_common_partition(w: &StepGraphon, wstar: &StepGraphon) -> Result<()> {
    if w.k() != wstar.k() || w.fractions().iter().zip(wstar.fractions()).any(|(a, b)| (a - b).abs() > 1e-12) {
        return param("graphons must share the same block partition");
    }
    Ok(())
}

fn cell_kls(w: &StepGraphon, wstar: &StepGraphon) -> Result<Vec<Vec<f64>>> {
    check_common_partition(w, wstar)?;
    let k = w.k();
    let mut out = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            let v = kl_or_inf(w.entry(a, b), wstar.entry(a, b));
            if v.is_infinite() {
                return Err(Error::InfiniteDivergence(format!(
                    "cell ({a}, {b}): kl({}, {}) is infinite",
                    w.entry(a, b),
                    wstar.entry(a, b)
                )));
            }
            out[a][b] = v.max(0.0);
        }
    }
    Ok(out)
}

/// Continuum per-edge divergence `Σ_{a,b} π_a π_b kl(B_ab, B⋆_ab)`.
pub fn step_graphon_kl(w: &StepGraphon, wstar: &StepGraphon) -> Result<f64> {
    let kls = cell_kls(w, wstar)?;
    let pi = w.fractions();
    Ok(kls.iter().enumerate().map(|(a, row)| row.iter().enumerate().map(|(b, v)| pi[a] * pi[b] * v).sum::<f64>()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphonKl {
    /// Mean over latent draws of `Σ_{i<j} kl(W(U_i,U_j), W⋆(U_i,U_j))`.
    pub estimate: f64,
    pub std_error: f64,
    /// Per-edge continuum value.
    pub continuum: f64,
}

/// Monte-Carlo estimate of the `n`-vertex divergence, averaging over latent
/// block assignments. Each draw only needs block counts.
pub fn graphon_kl_mc(w: &StepGraphon, wstar: &StepGraphon, n: usize, mc_reps: usize, seed: u64) -> Result<GraphonKl> {
    if mc_reps == 0 {
        return param("need at least one Monte-Carlo replicate");
    }
    let kls = cell_kls(w, wstar)?;
    let continuum = step_graphon_kl(w, wstar)?;
    let k = w.k();
    let mut rng = stream(seed, 0);
    let draws: Vec<f64> = (0..mc_reps)
        .map(|_| {
            let mut counts = vec![0.0f64; k];
            for a in w.sample_latents(n, &mut rng) {
                counts[a] += 1.0;
            }
            let mut total = 0.0;
            for a in 0..k {
                total += 0.5 * counts[a] * (counts[a] - 1.0) * kls[a][a];
                for b in a + 1..k {
                    total += counts[a] * counts[b] * kls[a][b];
                }
            }
            total
        })
        .collect();
    let reps = mc_reps as f64;
    let estimate = draws.iter().sum::<f64>() / reps;
    let std_error = if mc_reps > 1 {
        let var = draws.iter().map(|d| (d - estimate) * (d - estimate)).sum::<f64>() / (reps - 1.0);
        (var / reps).sqrt()
    } else {
        0.0
    };
    Ok(GraphonKl { estimate, std_error, continuum })
}

/// How a ball decides membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcceptanceRule {
    /// `C(n,2)` times the continuum value; exact for a shared partition.
    Exact,
    /// Monte-Carlo `estimate + 2·SE`.
    MonteCarlo { reps: usize, seed: u64 },
}

/// `{W : KL(G_n(W) ∥ G_n(W⋆)) ≤ radius}` for step graphons on the center's
/// partition.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonBall {
    center: StepGraphon,
    radius: f64,
    n: usize,
    scale: f64,
    rule: AcceptanceRule,
}

impl GraphonBall {
    pub fn new(center: StepGraphon, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return param(format!("ball radius must be positive, got {radius}"));
        }
        if n < 2 {
            return param("ball needs at least two vertices");
        }
        if center.cells().iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return param("center entries must lie strictly inside (0, 1)");
        }
        let scale = center.cells().iter().sum();
        Ok(Self { center, radius, n, scale, rule: AcceptanceRule::Exact })
    }

    pub fn with_rule(mut self, rule: AcceptanceRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn center(&self) -> &StepGraphon {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell sum of the center, the simplex-to-probability scale.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Center cells normalized onto the simplex.
    pub fn center_simplex(&self) -> Vec<f64> {
        self.center.cells().iter().map(|v| v / self.scale).collect()
    }

    /// `C(n,2) · Σ π_a π_b kl(B_ab, B⋆_ab)`.
    pub fn exact_kl(&self, w: &StepGraphon) -> Result<f64> {
        let pairs = self.n as f64 * (self.n as f64 - 1.0) / 2.0;
        Ok(pairs * step_graphon_kl(w, &self.center)?)
    }

    /// Divergence the acceptance rule compares against the radius.
    pub fn kl_to_center(&self, w: &StepGraphon) -> Result<f64> {
        match self.rule {
            AcceptanceRule::Exact => self.exact_kl(w),
            AcceptanceRule::MonteCarlo { reps, seed } => {
                let mc = graphon_kl_mc(w, &self.center, self.n, reps, seed)?;
                Ok(mc.estimate + 2.0 * mc.std_error)
            }
        }
    }

    pub fn contains(&self, w: &StepGraphon) -> Result<bool> {
        Ok(self.kl_to_center(w)? <= self.radius)
    }
}

fn clamp_cell(v: f64) -> f64 {
    v.clamp(CELL_FLOOR, 1.0 - CELL_FLOOR)
}

/// Averages `(a,b)` and `(b,a)` so the block matrix stays symmetric.
fn symmetrize(cells: &mut [f64], k: usize) {
    for a in 0..k {
        for b in a + 1..k {
            let m = 0.5 * (cells[a * k + b] + cells[b * k + a]);
            cells[a * k + b] = m;
            cells[b * k + a] = m;
        }
    }
}

fn accept_or_stay(current: &StepGraphon, ball: &GraphonBall, cells: Vec<f64>) -> Result<(StepGraphon, bool)> {
    let proposal = current.with_cells(&cells)?;
    if ball.contains(&proposal)? {
        Ok((proposal, true))
    } else {
        Ok((current.clone(), false))
    }
}

/// Dirichlet proposal: independent `Gamma(α_ab, 1)` draws normalized over
/// the `K²` cells, scaled by the ball's stored cell sum, symmetrized and
/// clamped; accepted iff it lands in the ball.
pub fn perturb_step_with<R: Rng + ?Sized>(
    current: &StepGraphon,
    ball: &GraphonBall,
    alpha: &[f64],
    rng: &mut R,
) -> Result<(StepGraphon, bool)> {
    let k = current.k();
    if alpha.len() != k * k {
        return param(format!("expected {} concentrations, got {}", k * k, alpha.len()));
    }
    if alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return param("concentrations must be positive");
    }
    let mut y = Vec::with_capacity(alpha.len());
    for &a in alpha {
        let g = Gamma::new(a, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
        y.push(g.sample(rng));
    }
    let total: f64 = y.iter().sum();
    if !(total > 0.0) {
        // Every draw underflowed; treat as a rejected proposal.
        return Ok((current.clone(), false));
    }
    let mut cells: Vec<f64> = y.iter().map(|v| ball.scale() * v / total).collect();
    symmetrize(&mut cells, k);
    cells.iter_mut().for_each(|v| *v = clamp_cell(*v));
    accept_or_stay(current, ball, cells)
}

pub fn perturb_step(
    current: &StepGraphon,
    ball: &GraphonBall,
    alpha: &[f64],
    seed: u64,
) -> Result<(StepGraphon, bool)> {
    perturb_step_with(current, ball, alpha, &mut stream(seed, 0))
}

/// Lazy rescaling move. With probability ½ nothing happens (counted as
/// accepted); otherwise a uniform nonempty subset of the distinct cells
/// `a ≤ b` is multiplied by one factor uniform on `(1 − ρ, 1 + ρ)`.
pub fn rescale_step_with<R: Rng + ?Sized>(
    current: &StepGraphon,
    ball: &GraphonBall,
    rho: f64,
    rng: &mut R,
) -> Result<(StepGraphon, bool)> {
    if !(rho > 0.0 && rho < 1.0) {
        return param(format!("rescale width must lie in (0, 1), got {rho}"));
    }
    if rng.random::<bool>() {
        return Ok((current.clone(), true));
    }
    let k = current.k();
    let upper: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let subset = loop {
        let pick: Vec<bool> = upper.iter().map(|_| rng.random::<bool>()).collect();
        if pick.iter().any(|&p| p) {
            break pick;
        }
    };
    let factor = rng.random_range(1.0 - rho..1.0 + rho);
    let mut cells = current.cells();
    for (&(a, b), &chosen) in upper.iter().zip(&subset) {
        if chosen {
            let v = clamp_cell(cells[a * k + b] * factor);
            cells[a * k + b] = v;
            cells[b * k + a] = v;
        }
    }
    accept_or_stay(current, ball, cells)
}

pub fn rescale_step(current: &StepGraphon, ball: &GraphonBall, rho: f64, seed: u64) -> Result<(StepGraphon, bool)> {
    rescale_step_with(current, ball, rho, &mut stream(seed, 0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub moves: usize,
    /// Dirichlet concentration; proposals use `alpha · p⋆` over the cells.
    pub alpha: f64,
    pub rho: f64,
    /// Probability of a perturbing move; rescaling otherwise.
    pub perturb_prob: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { moves: 1000, alpha: 100.0, rho: 0.1, perturb_prob: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub step: usize,
    pub accepted: bool,
    pub kl_to_center: f64,
    pub cells: Vec<f64>,
}

/// Runs a chain from the ball's center, mixing perturbing and rescaling moves.
pub fn run_chain(ball: &GraphonBall, config: &ChainConfig, seed: u64) -> Result<Vec<ChainStep>> {
    if !(0.0..=1.0).contains(&config.perturb_prob) {
        return param("perturb probability must lie in [0, 1]");
    }
    if !(config.alpha > 0.0) {
        return param("concentration must be positive");
    }
    let alpha: Vec<f64> = ball.center_simplex().iter().map(|p| config.alpha * p).collect();
    let mut rng = stream(seed, 0);
    let mut state = ball.center().clone();
    let mut trace = Vec::with_capacity(config.moves);
    for step in 1..=config.moves {
        let (next, accepted) = if rng.random::<f64>() < config.perturb_prob {
            perturb_step_with(&state, ball, &alpha, &mut rng)?
        } else {
            rescale_step_with(&state, ball, config.rho, &mut rng)?
        };
        state = next;
        trace.push(ChainStep { step, accepted, kl_to_center: ball.kl_to_center(&state)?, cells: state.cells() });
    }
    Ok(trace)
}

/// CSV `step,accepted,kl_to_center,b_0_0,..` for a chain trace.
pub fn write_chain_csv<W: Write>(trace: &[ChainStep], k: usize, mut out: W) -> Result<()> {
    let mut header = String::from("step,accepted,kl_to_center");
    for a in 0..k {
        for b in 0..k {
            header.push_str(&format!(",b_{a}_{b}"));
        }
    }
    writeln!(out, "{header}")?;
    for s in trace {
        write!(out, "{},{},{}", s.step, u8::from(s.accepted), s.kl_to_center)?;
        for v in &s.cells {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
