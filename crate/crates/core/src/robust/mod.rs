//! Worst-case posterior risk over divergence balls around a weighted sample.
//!
//! The KL case has an exact dual: the least-favourable weights are an
//! exponential tilt `q_s ∝ w_s exp(λ L_s)` and `λ` is found by bisection on
//! the KL constraint. General φ-balls go through a mirror-descent adversary.

mod curve;
mod mirror;
mod tilt;

pub use curve::{sensitivity_curve, small_radius_prediction, Normalization, SensitivityCurve};
pub use mirror::{default_step, mirror_descent_adversary};
pub use tilt::{kl_tilt_solve, psi_dual, two_point_robust_error, DEFAULT_TOL};

use crate::error::{param, Result};

/// Least-favourable reweighting and the risk it attains.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltSolution {
    /// Dual optimum. `Some(0.0)` for the baseline convention, `Some(inf)`
    /// when the ball swallows the max-loss vertex, `None` for solutions
    /// produced by mirror descent (no dual variable).
    pub lambda_star: Option<f64>,
    pub tilted_weights: Vec<f64>,
    pub robust_risk: f64,
    /// `KL(q ∥ w)`.
    pub achieved_kl: f64,
    /// Divergence of the ball that produced the solution; equals
    /// `achieved_kl` for KL balls.
    pub achieved_divergence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    Kl,
    /// `φ(t) = (t − 1)²`.
    ChiSquared,
}

impl Divergence {
    /// `φ''(1)`.
    pub fn curvature(self) -> f64 {
        match self {
            Divergence::Kl => 1.0,
            Divergence::ChiSquared => 2.0,
        }
    }

    /// `D_φ(q ∥ w)`. Atoms with `w_s = 0` must carry `q_s = 0`.
    pub fn between(self, q: &[f64], w: &[f64]) -> f64 {
        match self {
            Divergence::Kl => kl_divergence(q, w),
            Divergence::ChiSquared => {
                q.iter().zip(w).filter(|(_, &ws)| ws > 0.0).map(|(&qs, &ws)| (qs - ws) * (qs - ws) / ws).sum()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiBall {
    pub kind: Divergence,
    pub radius: f64,
}

impl PhiBall {
    pub fn new(kind: Divergence, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return param(format!("ball radius must be positive and finite, got {radius}"));
        }
        Ok(Self { kind, radius })
    }

    pub fn curvature(&self) -> f64 {
        self.kind.curvature()
    }
}

/// `KL(q ∥ w)` as `Σ w φ(q/w)` with `φ(r) = r ln r − r + 1`. Every term is
/// nonnegative, which keeps tiny divergences accurate near `q = w`.
pub(crate) fn kl_divergence(q: &[f64], w: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&qs, &ws) in q.iter().zip(w) {
        if ws == 0.0 {
            if qs > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let r = qs / ws;
        let phi = if r == 0.0 {
            1.0
        } else if (r - 1.0).abs() < 0.5 {
            let eps = r - 1.0;
            r * eps.ln_1p() - eps
        } else {
            r * r.ln() - r + 1.0
        };
        total += ws * phi;
    }
    total.max(0.0)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Normalized `w_s exp(u_s)`, max-shifted over the support of `w`.
pub(crate) fn tilt_weights(w: &[f64], u: &[f64]) -> Vec<f64> {
    let shift = w.iter().zip(u).filter(|(&ws, _)| ws > 0.0).map(|(_, &us)| us).fold(f64::NEG_INFINITY, f64::max);
    let mut q: Vec<f64> =
        w.iter().zip(u).map(|(&ws, &us)| if ws > 0.0 { ws * (us - shift).exp() } else { 0.0 }).collect();
    let z: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= z);
    q
}
