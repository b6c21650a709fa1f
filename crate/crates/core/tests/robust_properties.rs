mod common;

use common::{bernoulli_kl_inverse, dual_minimum, grid_oracle, random_sample};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use robnet::rng::stream;
use robnet::robust::{
    default_step, kl_tilt_solve, mirror_descent_adversary, psi_dual, sensitivity_curve, small_radius_prediction,
    two_point_robust_error, Divergence, Normalization, PhiBall, DEFAULT_TOL,
};
use robnet::WeightedSample;

fn arb_sample(max_atoms: usize) -> impl Strategy<Value = WeightedSample> {
    (2..=max_atoms).prop_flat_map(|s| {
        (prop::collection::vec(0.01f64..1.0, s), prop::collection::vec(-5.0f64..5.0, s))
            .prop_map(|(w, l)| WeightedSample::from_losses(w, l).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feasibility_and_bounds(sample in arb_sample(30), c in 1e-5f64..3.0) {
        let sol = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap();
        let losses = sample.losses().unwrap();
        let max = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rho0 = sample.baseline_risk().unwrap();
        prop_assert!(sol.achieved_kl <= c + 1e-8);
        prop_assert!(sol.robust_risk >= rho0 - 1e-12);
        prop_assert!(sol.robust_risk <= max + 1e-12);
        let sum: f64 = sol.tilted_weights.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        // Binding unless the max-loss face is inside the ball.
        let face: f64 = sample.weights().iter().zip(losses).filter(|(_, &l)| l == max).map(|(w, _)| w).sum();
        if -face.ln() > c {
            prop_assert!((sol.achieved_kl - c).abs() <= 1e-9, "KL {} vs C {}", sol.achieved_kl, c);
        } else {
            prop_assert_eq!(sol.robust_risk, max);
        }
    }

    #[test]
    fn monotone_in_radius(sample in arb_sample(20), c in 1e-4f64..1.0, factor in 1.0f64..5.0) {
        let small = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap().robust_risk;
        let large = kl_tilt_solve(&sample, c * factor, DEFAULT_TOL).unwrap().robust_risk;
        prop_assert!(large >= small - 1e-12);
    }

    #[test]
    fn weak_duality(sample in arb_sample(20), c in 1e-4f64..2.0, log_lambda in -8.0f64..8.0) {
        let sol = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap();
        let psi = psi_dual(&sample, c, log_lambda.exp()).unwrap();
        prop_assert!(psi >= sol.robust_risk - 1e-9);
    }

    #[test]
    fn pinsker_band(e0 in 0.0f64..=1.0, c in 0.0f64..5.0) {
        let q = two_point_robust_error(e0, c, 1e-13).unwrap();
        prop_assert!(q >= e0);
        prop_assert!(q <= 1.0);
        prop_assert!(q <= e0 + (c / 2.0).sqrt() + 1e-12);
    }

    #[test]
    fn two_point_matches_plain_bisection(e0 in 1e-6f64..0.5, c in 1e-6f64..2.0) {
        let q = two_point_robust_error(e0, c, 1e-14).unwrap();
        prop_assert!((q - bernoulli_kl_inverse(e0, c)).abs() <= 1e-9);
    }
}

#[test]
fn strong_duality_on_random_instances() {
    let mut rng = stream(99, 0);
    for seed in 0..40 {
        let s = rng.random_range(2..=50);
        let sample = random_sample(seed, s);
        let c = 10f64.powf(rng.random_range(-4.0..0.0));
        let primal = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap().robust_risk;
        let dual = dual_minimum(&sample, c);
        assert!((primal - dual).abs() <= 1e-6, "seed {seed}: primal {primal}, dual {dual}");
    }
}

#[test]
fn grid_oracle_small_samples() {
    for seed in 0..12 {
        let s = 2 + (seed as usize % 3);
        let sample = random_sample(1000 + seed, s);
        let c = [0.01, 0.1, 0.5][seed as usize % 3];
        let exact = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap().robust_risk;
        let grid = grid_oracle(sample.weights(), sample.losses().unwrap(), c, 1000);
        assert!((exact - grid).abs() <= 2e-3, "seed {seed}: exact {exact}, grid {grid}");
        assert!(grid <= exact + 1e-12);
    }
}

#[test]
fn mirror_descent_matches_tilt() {
    let mut rng = stream(7, 0);
    for seed in 0..20 {
        let s = rng.random_range(2..=100);
        let sample = random_sample(2000 + seed, s);
        let c = 10f64.powf(rng.random_range(-3.0..0.0));
        let ball = PhiBall::new(Divergence::Kl, c).unwrap();
        let md = mirror_descent_adversary(&sample, ball, default_step(&sample).unwrap(), 2000).unwrap();
        let exact = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap();
        assert!((md.robust_risk - exact.robust_risk).abs() <= 1e-4, "seed {seed}");
        assert!(md.achieved_kl <= c + 1e-8);
    }
}

fn gaussian_sample(seed: u64, s: usize) -> WeightedSample {
    let mut rng = stream(seed, 0);
    let losses: Vec<f64> = (0..s).map(|_| StandardNormal.sample(&mut rng)).collect();
    WeightedSample::uniform(vec![0.0; s]).unwrap().with_losses(losses).unwrap()
}

fn locality_radius(sample: &WeightedSample) -> f64 {
    let m = sample.baseline_risk().unwrap();
    let var = sample.loss_variance().unwrap();
    let spread = sample.losses().unwrap().iter().map(|l| (l - m).abs()).fold(0.0, f64::max);
    1e-4 * var / (spread * spread)
}

#[test]
fn small_radius_law_for_kl() {
    for seed in 0..10 {
        let sample = gaussian_sample(seed, 500);
        let c_max = locality_radius(&sample);
        let rho0 = sample.baseline_risk().unwrap();
        let var = sample.loss_variance().unwrap();
        for c in [c_max, 0.1 * c_max, 0.01 * c_max] {
            let r = kl_tilt_solve(&sample, c, DEFAULT_TOL).unwrap().robust_risk;
            let ratio = (r - rho0) / ((2.0 * var).sqrt() * c.sqrt());
            assert!((0.85..=1.15).contains(&ratio), "seed {seed}, C {c}: ratio {ratio}");
        }
    }
}

#[test]
fn chi_squared_small_radius_uses_rescaled_radius() {
    // A χ² ball of radius C acts locally like a KL ball of radius C / φ''(1).
    for seed in 0..5 {
        let sample = random_sample(3000 + seed, 40);
        let rho0 = sample.baseline_risk().unwrap();
        let var = sample.loss_variance().unwrap();
        for c in [1e-3, 1e-4] {
            let ball = PhiBall::new(Divergence::ChiSquared, c).unwrap();
            let md = mirror_descent_adversary(&sample, ball, default_step(&sample).unwrap(), 4000).unwrap();
            let predicted = small_radius_prediction(rho0, var, c / ball.curvature());
            let ratio = (md.robust_risk - rho0) / (predicted - rho0);
            assert!((0.85..=1.15).contains(&ratio), "seed {seed}, C {c}: ratio {ratio}");
            assert!(md.achieved_divergence <= c * (1.0 + 1e-9));
        }
    }
}

#[test]
fn sensitivity_curve_is_monotone_and_ordered() {
    let sample = random_sample(4242, 30);
    let radii: Vec<f64> = (0..25).map(|k| 1e-5 * 1.6f64.powi(k)).collect();
    let curve = sensitivity_curve(&sample, &radii, Normalization::VarSqrtC).unwrap();
    assert_eq!(curve.radii, radii);
    for (c, r) in radii.iter().zip(&curve.robust_risks) {
        assert_eq!(*r, kl_tilt_solve(&sample, *c, DEFAULT_TOL).unwrap().robust_risk);
    }
    assert!(curve.robust_risks.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(curve.robust_risks.iter().all(|&r| r >= curve.baseline_risk - 1e-12));
}
