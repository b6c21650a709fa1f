//! Information quantities for sparse ER versus the labelled two-block SBM.
//!
//! All logarithms are natural. With `p = c/n`, `p_in = (c+λ)/n` and
//! `p_out = (c−λ)/n`:
//!
//! * `I(λ) = ¼[(c+λ)log((c+λ)/c) + (c−λ)log((c−λ)/c)]` is the per-vertex
//!   KL rate, with small-signal form `λ²/(4c)`;
//! * `J(λ) = sup_t ¼[2c − c^{1−t}((c+λ)^t + (c−λ)^t)]` is the per-vertex
//!   Chernoff rate, with small-signal form `λ²/(16c)`.

use crate::error::{param, Error, Result};

/// Default number of grid points for Chernoff suprema over `t ∈ [0, 1]`.
pub const T_GRID: usize = 201;
const GOLDEN_TOL: f64 = 1e-10;
const PROB_FLOOR: f64 = 1e-300;
const PROB_CEIL: f64 = 1.0 - 1e-16;

fn xlogy_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// `kl(p, q)` returning `+∞` instead of an error; for inner loops.
pub(crate) fn kl_or_inf(p: f64, q: f64) -> f64 {
    xlogy_ratio(p, q) + xlogy_ratio(1.0 - p, 1.0 - q)
}

/// Bernoulli KL divergence `KL(Bern(p) ‖ Bern(q))` with `0·log 0 = 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return param(format!("probabilities must lie in [0, 1], got p = {p}, q = {q}"));
    }
    let value = kl_or_inf(p, q);
    if value.is_infinite() {
        return Err(Error::InfiniteDivergence(format!("kl({p}, {q}) is infinite")));
    }
    Ok(value.max(0.0))
}

fn check_signal(c: f64, lambda: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) || !lambda.is_finite() || lambda.abs() >= c {
        return param(format!("need c > 0 and |lambda| < c, got c = {c}, lambda = {lambda}"));
    }
    Ok(())
}

/// Per-vertex KL index `I(λ)`.
pub fn per_vertex_kl(c: f64, lambda: f64) -> Result<f64> {
    check_signal(c, lambda)?;
    let term = |x: f64| x * (x / c).ln();
    Ok(0.25 * (term(c + lambda) + term(c - lambda)))
}

/// `λ²/(4c)`.
pub fn per_vertex_kl_small_signal(c: f64, lambda: f64) -> f64 {
    lambda * lambda / (4.0 * c)
}

/// `λ²/(16c)`.
pub fn chernoff_small_signal(c: f64, lambda: f64) -> f64 {
    lambda * lambda / (16.0 * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffIndex {
    pub value: f64,
    pub t_star: f64,
}

/// Maximizes a function on `[0, 1]`: grid scan, then golden section on the
/// bracket around the best grid point.
fn maximize_unit_interval<F: Fn(f64) -> f64>(f: F, grid: usize) -> (f64, f64) {
    let h = 1.0 / (grid - 1) as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..grid {
        let v = f(i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = (best_i as f64 - 1.0).max(0.0) * h;
    let mut b = ((best_i + 1) as f64 * h).min(1.0);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t);
    if v >= best {
        (t, v)
    } else {
        (best_i as f64 * h, best)
    }
}

fn check_grid(t_grid_size: usize) -> Result<()> {
    if t_grid_size < 3 {
        return param(format!("t grid needs at least 3 points, got {t_grid_size}"));
    }
    Ok(())
}

/// Chernoff index `J(λ)` and its maximizing `t`.
pub fn chernoff_index(c: f64, lambda: f64, t_grid_size: usize) -> Result<ChernoffIndex> {
    check_signal(c, lambda)?;
    check_grid(t_grid_size)?;
    let objective = |t: f64| 0.25 * (2.0 * c - c.powf(1.0 - t) * ((c + lambda).powf(t) + (c - lambda).powf(t)));
    let (t_star, value) = maximize_unit_interval(objective, t_grid_size);
    Ok(ChernoffIndex { value: value.max(0.0), t_star })
}

/// Balanced-label pair counts `(N_in, N_out) = (n(n−2)/4, n²/4)`.
pub fn pair_counts(n: usize) -> (f64, f64) {
    let n = n as f64;
    (n * (n - 2.0) / 4.0, n * n / 4.0)
}

struct FiniteLaw {
    p: f64,
    p_in: f64,
    p_out: f64,
    n_in: f64,
    n_out: f64,
}

fn finite_law(n: usize, c: f64, lambda: f64) -> Result<FiniteLaw> {
    check_signal(c, lambda)?;
    if n < 2 || !n.is_multiple_of(2) {
        return param(format!("balanced two-block law needs an even n >= 2, got {n}"));
    }
    let nf = n as f64;
    if c + lambda >= nf || c >= nf {
        return param(format!("edge probabilities must stay below 1 (c = {c}, lambda = {lambda}, n = {n})"));
    }
    let (n_in, n_out) = pair_counts(n);
    Ok(FiniteLaw { p: c / nf, p_in: (c + lambda) / nf, p_out: (c - lambda) / nf, n_in, n_out })
}

/// Exact `KL(P_1 ‖ P_0)` between the labelled SBM and ER laws on `n` vertices.
pub fn finite_n_kl(n: usize, c: f64, lambda: f64) -> Result<f64> {
    let law = finite_law(n, c, lambda)?;
    Ok(law.n_in * kl_or_inf(law.p_in, law.p) + law.n_out * kl_or_inf(law.p_out, law.p))
}

/// `φ(r, q; t) = −log(r^{1−t} q^t + (1−r)^{1−t} (1−q)^t)`, computed in log space.
pub fn chernoff_pair_term(r: f64, q: f64, t: f64) -> f64 {
    let clamp = |x: f64| x.clamp(PROB_FLOOR, PROB_CEIL);
    let (r, q) = (clamp(r), clamp(q));
    let a = (1.0 - t) * r.ln() + t * q.ln();
    let b = (1.0 - t) * (-r).ln_1p() + t * (-q).ln_1p();
    let m = a.max(b);
    -(m + ((a - m).exp() + (b - m).exp()).ln())
}

/// Exact finite-`n` Chernoff information between the labelled laws.
pub fn finite_n_chernoff(n: usize, c: f64, lambda: f64, t_grid_size: usize) -> Result<f64> {
    let law = finite_law(n, c, lambda)?;
    check_grid(t_grid_size)?;
    let objective = |t: f64| {
        law.n_in * chernoff_pair_term(law.p, law.p_in, t) + law.n_out * chernoff_pair_term(law.p, law.p_out, t)
    };
    Ok(maximize_unit_interval(objective, t_grid_size).1.max(0.0))
}

/// KL radius `KL(Bern(½) ‖ Bern(e0))` at which a two-point risk `e0` can be
/// pushed to ½.
pub fn switching_radius(e0: f64) -> Result<f64> {
    if e0 == 0.0 {
        return Err(Error::InfiniteDivergence("switching radius for e0 = 0 is infinite".into()));
    }
    if !(e0 > 0.0 && e0 <= 0.5) {
        return param(format!("e0 must lie in (0, 1/2], got {e0}"));
    }
    bernoulli_kl(0.5, e0)
}

/// Exact and small-signal indices in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoIndexReport {
    pub c: f64,
    pub lambda: f64,
    pub i_exact: f64,
    pub i_small_signal: f64,
    pub j_exact: f64,
    pub j_small_signal: f64,
    pub t_star: f64,
    /// `D_n / n` and `C_n / n` when a vertex count was supplied.
    pub dn_over_n: Option<f64>,
    pub cn_over_n: Option<f64>,
}

impl InfoIndexReport {
    pub const HEADER: &'static str = "c,lambda,I_exact,I_approx,J_exact,J_approx,t_star,Dn_over_n,Cn_over_n";

    pub fn compute(c: f64, lambda: f64, n: Option<usize>, t_grid_size: usize) -> Result<Self> {
        let j = chernoff_index(c, lambda, t_grid_size)?;
        let (dn_over_n, cn_over_n) = match n {
            Some(n) => (
                Some(finite_n_kl(n, c, lambda)? / n as f64),
                Some(finite_n_chernoff(n, c, lambda, t_grid_size)? / n as f64),
            ),
            None => (None, None),
        };
        Ok(Self {
            c,
            lambda,
            i_exact: per_vertex_kl(c, lambda)?,
            i_small_signal: per_vertex_kl_small_signal(c, lambda),
            j_exact: j.value,
            j_small_signal: chernoff_small_signal(c, lambda),
            t_star: j.t_star,
            dn_over_n,
            cn_over_n,
        })
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.c,
            self.lambda,
            self.i_exact,
            self.i_small_signal,
            self.j_exact,
            self.j_small_signal,
            self.t_star,
            opt(self.dn_over_n),
            opt(self.cn_over_n)
        )
    }
}
