use crate::error::{param, Result};
use crate::posterior::WeightedSample;

use super::{dot, kl_divergence, tilt_weights, Divergence, PhiBall, TiltSolution};

const PROJECTION_BISECTIONS: usize = 200;

/// Step size `0.5 / max |L − L̄|`, or 1 for constant losses.
pub fn default_step(sample: &WeightedSample) -> Result<f64> {
    let losses = sample.require_losses()?;
    let mean = dot(sample.weights(), losses);
    let spread = losses.iter().map(|l| (l - mean).abs()).fold(0.0, f64::max);
    Ok(if spread > 0.0 { 0.5 / spread } else { 1.0 })
}

/// Mirror-descent adversary over a φ-divergence ball: multiplicative
/// log-tilt updates followed by projection back onto the ball.
///
/// KL projections move along the geometric path `w^{1−β} q̃^β`, which is the
/// exact KL projection for tilts. χ² projections shrink along the chord
/// from `w` to `q̃`.
pub fn mirror_descent_adversary(
    sample: &WeightedSample,
    ball: PhiBall,
    step: f64,
    iters: usize,
) -> Result<TiltSolution> {
    if iters == 0 {
        return param("mirror descent needs at least one iteration");
    }
    if !(step > 0.0 && step.is_finite()) {
        return param(format!("step must be positive, got {step}"));
    }
    if !(ball.radius > 0.0) {
        return param(format!("ball radius must be positive, got {}", ball.radius));
    }
    let losses = sample.require_losses()?;
    if losses.iter().any(|l| !l.is_finite()) {
        return param("losses must be finite");
    }
    let w = sample.weights();
    let mut u = vec![0.0; w.len()];
    let mut q = w.to_vec();
    for _ in 0..iters {
        let mean = dot(&q, losses);
        for (us, &l) in u.iter_mut().zip(losses) {
            *us += step * (l - mean);
        }
        let proposal = tilt_weights(w, &u);
        q = if ball.kind.between(&proposal, w) > ball.radius {
            let projected = project(w, &u, &proposal, ball);
            for ((us, &qs), &ws) in u.iter_mut().zip(&projected).zip(w) {
                *us = if ws > 0.0 { (qs / ws).ln() } else { 0.0 };
            }
            projected
        } else {
            proposal
        };
    }
    Ok(TiltSolution {
        lambda_star: None,
        robust_risk: dot(&q, losses),
        achieved_kl: kl_divergence(&q, w),
        achieved_divergence: ball.kind.between(&q, w),
        tilted_weights: q,
    })
}

fn project(w: &[f64], u: &[f64], proposal: &[f64], ball: PhiBall) -> Vec<f64> {
    match ball.kind {
        Divergence::Kl => {
            // KL(w e^{βu}/Z ∥ w) increases in β; keep the feasible end.
            let at = |beta: f64| tilt_weights(w, &u.iter().map(|x| beta * x).collect::<Vec<_>>());
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..PROJECTION_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if kl_divergence(&at(mid), w) <= ball.radius {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            at(lo)
        }
        Divergence::ChiSquared => {
            let gamma = (ball.radius / Divergence::ChiSquared.between(proposal, w)).sqrt().min(1.0);
            w.iter().zip(proposal).map(|(&ws, &ps)| (1.0 - gamma) * ws + gamma * ps).collect()
        }
    }
}
