use crate::error::{param, Error, Result};
use crate::info::kl_or_inf;
use crate::posterior::WeightedSample;

use super::{dot, kl_divergence, tilt_weights, TiltSolution};

/// Default tolerance on the KL constraint.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_DOUBLINGS: usize = 2000;
const MAX_BISECTIONS: usize = 500;

fn baseline(w: &[f64], losses: &[f64]) -> TiltSolution {
    TiltSolution {
        lambda_star: Some(0.0),
        tilted_weights: w.to_vec(),
        robust_risk: dot(w, losses),
        achieved_kl: 0.0,
        achieved_divergence: 0.0,
    }
}

fn check_radius(c: f64) -> Result<()> {
    if !(c >= 0.0) || c.is_nan() {
        return param(format!("radius must be nonnegative, got {c}"));
    }
    Ok(())
}

/// Shifted losses `L_s − max L` on the support of `w`; atoms outside the
/// support are pinned to `-inf` so they never receive mass.
fn shifted(w: &[f64], losses: &[f64]) -> (Vec<f64>, f64) {
    let top = w.iter().zip(losses).filter(|(&ws, _)| ws > 0.0).map(|(_, &l)| l).fold(f64::NEG_INFINITY, f64::max);
    let d = w.iter().zip(losses).map(|(&ws, &l)| if ws > 0.0 { l - top } else { f64::NEG_INFINITY }).collect();
    (d, top)
}

/// KL of the λ-tilt from `w`, plus the tilted weights.
fn tilt_kl(w: &[f64], d: &[f64], lambda: f64) -> (f64, Vec<f64>) {
    let u: Vec<f64> = d.iter().map(|&x| if x.is_finite() { lambda * x } else { 0.0 }).collect();
    let q = tilt_weights(w, &u);
    (kl_divergence(&q, w), q)
}

/// Worst-case expected loss over `{q : KL(q ∥ w) ≤ C}`.
pub fn kl_tilt_solve(sample: &WeightedSample, c: f64, tol: f64) -> Result<TiltSolution> {
    check_radius(c)?;
    if !(tol > 0.0) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    let losses = sample.require_losses()?;
    let w = sample.weights();
    let (d, top) = shifted(w, losses);
    let all_equal = d.iter().zip(w).all(|(&x, &ws)| ws == 0.0 || x == 0.0);
    if c == 0.0 || all_equal {
        return Ok(baseline(w, losses));
    }

    // Vertex saturation: the max-loss face is inside the ball.
    let face_mass: f64 = d.iter().zip(w).filter(|(&x, &ws)| ws > 0.0 && x == 0.0).map(|(_, &ws)| ws).sum();
    let face_kl = -face_mass.ln();
    if face_kl <= c {
        let q: Vec<f64> =
            d.iter().zip(w).map(|(&x, &ws)| if ws > 0.0 && x == 0.0 { ws / face_mass } else { 0.0 }).collect();
        return Ok(TiltSolution {
            lambda_star: Some(f64::INFINITY),
            tilted_weights: q,
            robust_risk: top,
            achieved_kl: face_kl,
            achieved_divergence: face_kl,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while tilt_kl(w, &d, hi).0 <= c {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings == MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Convergence { iters: doublings, last: hi });
        }
    }
    let (k_lo, q_lo) = tilt_kl(w, &d, lo);
    let mut best = (lo, k_lo, q_lo);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (k, q) = tilt_kl(w, &d, mid);
        let done = (k - c).abs() <= tol;
        // Feasibility is kept to 1e-9 even when the caller's tolerance is loose.
        if k <= c || (done && k <= c + 1e-9) {
            lo = mid;
            best = (mid, k, q);
        } else {
            hi = mid;
        }
        if done && lo == mid {
            break;
        }
    }
    let (lambda, kl, q) = best;
    Ok(TiltSolution {
        lambda_star: Some(lambda),
        robust_risk: dot(&q, losses),
        tilted_weights: q,
        achieved_kl: kl,
        achieved_divergence: kl,
    })
}

/// Dual objective `ψ(λ) = (C + log Σ w_s e^{λ L_s}) / λ`.
pub fn psi_dual(sample: &WeightedSample, c: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param(format!("dual variable must be positive, got {lambda}"));
    }
    let losses = sample.require_losses()?;
    let (d, top) = shifted(sample.weights(), losses);
    let z: f64 =
        d.iter().zip(sample.weights()).filter(|(_, &ws)| ws > 0.0).map(|(&x, &ws)| ws * (lambda * x).exp()).sum();
    Ok(top + (c + z.ln()) / lambda)
}

/// Largest `q ∈ [e0, 1]` with `kl(q, e0) ≤ C`: the worst-case error of a
/// two-point decision whose baseline error is `e0`. `tol` is relative to `q`.
pub fn two_point_robust_error(e0: f64, c: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e0) {
        return param(format!("baseline error must lie in [0, 1], got {e0}"));
    }
    check_radius(c)?;
    if c == 0.0 || e0 == 0.0 || e0 == 1.0 {
        return Ok(e0);
    }
    if -e0.ln() <= c {
        return Ok(1.0);
    }
    // kl(·, e0) increases on [e0, 1]; bisect in log q for relative accuracy.
    let (mut lo, mut hi) = (e0.ln(), 0.0f64);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kl_or_inf(mid.exp(), e0) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(lo.exp())
}
