#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use robnet::rng::stream;
use robnet::robust::psi_dual;
use robnet::WeightedSample;

/// Random weighted sample with `s` atoms, weights bounded away from zero and
/// distinct losses in `[0, 1)`.
pub fn random_sample(seed: u64, s: usize) -> WeightedSample {
    let mut rng = stream(seed, 0);
    let weights: Vec<f64> = (0..s).map(|_| rng.random_range(0.05..1.0)).collect();
    let losses: Vec<f64> = (0..s).map(|_| rng.random::<f64>()).collect();
    WeightedSample::from_losses(weights, losses).unwrap()
}

/// `inf_{λ>0} ψ(λ)`: log-spaced scan over `[1e-6, 1e9]`, then golden-section
/// refinement in `log λ` around the best grid point.
pub fn dual_minimum(sample: &WeightedSample, c: f64) -> f64 {
    let psi = |log_l: f64| psi_dual(sample, c, log_l.exp()).unwrap();
    let (lo, hi) = ((1e-6f64).ln(), (1e9f64).ln());
    let k = 4000;
    let step = (hi - lo) / k as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..=k {
        let v = psi(lo + i as f64 * step);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + (best_i as f64 - 1.0) * step;
    let mut b = lo + (best_i as f64 + 1.0) * step;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if psi(x1) < psi(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.min(psi(0.5 * (a + b)))
}

fn xlogx_over(q: f64, w: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q * (q / w).ln()
    }
}

/// Brute-force `max Σ q L` over simplex grid points `q = i/res` with
/// `KL(q ∥ w) ≤ C`, for two to four atoms.
pub fn grid_oracle(w: &[f64], losses: &[f64], c: f64, res: usize) -> f64 {
    let s = w.len();
    assert!((2..=4).contains(&s), "grid oracle handles 2 to 4 atoms");
    let h = 1.0 / res as f64;
    // Per-atom tables of q ln(q/w) and q L over grid values.
    let kl: Vec<Vec<f64>> = (0..s).map(|a| (0..=res).map(|i| xlogx_over(i as f64 * h, w[a])).collect()).collect();
    let risk: Vec<Vec<f64>> = (0..s).map(|a| (0..=res).map(|i| i as f64 * h * losses[a]).collect()).collect();
    let mut best = f64::NEG_INFINITY;
    match s {
        2 => {
            for i in 0..=res {
                let j = res - i;
                if kl[0][i] + kl[1][j] <= c {
                    best = best.max(risk[0][i] + risk[1][j]);
                }
            }
        }
        3 => {
            for i in 0..=res {
                for j in 0..=res - i {
                    let k = res - i - j;
                    if kl[0][i] + kl[1][j] + kl[2][k] <= c {
                        best = best.max(risk[0][i] + risk[1][j] + risk[2][k]);
                    }
                }
            }
        }
        _ => {
            for i in 0..=res {
                for j in 0..=res - i {
                    let partial = kl[0][i] + kl[1][j];
                    // Remaining mass r contributes at least r ln(r / (w2 + w3)).
                    if partial + xlogx_over((res - i - j) as f64 * h, w[2] + w[3]) > c + 1e-12 {
                        continue;
                    }
                    let r_ij = risk[0][i] + risk[1][j];
                    for k in 0..=res - i - j {
                        let l = res - i - j - k;
                        if partial + kl[2][k] + kl[3][l] <= c {
                            best = best.max(r_ij + risk[2][k] + risk[3][l]);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Largest `q ∈ [e0, 1]` with `kl(q, e0) ≤ C`, by plain bisection on `q`.
pub fn bernoulli_kl_inverse(e0: f64, c: f64) -> f64 {
    let kl = |q: f64| xlogx_over(q, e0) + xlogx_over(1.0 - q, 1.0 - e0);
    if kl(1.0) <= c {
        return 1.0;
    }
    let (mut lo, mut hi) = (e0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kl(mid) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Seeded CLI invocations whose output must be byte-identical across reruns.
/// Each case writes to `{out}`; inputs are created under `dir`.
pub fn seeded_cli_cases(dir: &std::path::Path) -> Vec<(&'static str, Vec<String>)> {
    use robnet::StepGraphon;
    let graphon = dir.join("center.json");
    std::fs::write(&graphon, StepGraphon::two_block(0.3, 0.1).unwrap().to_json()).unwrap();
    let graph = dir.join("graph.txt");
    let er = robnet::models::sample_sparse_er(&robnet::SparseErParams::new(300, 4.0).unwrap(), 5);
    std::fs::write(&graph, er.to_edge_list_string()).unwrap();
    let config_a = dir.join("a.json");
    std::fs::write(&config_a, r#"{"n": 100, "c": 3.0, "lambda": 0.4, "n_reps": 40, "radii": [0.0001, 0.001, 0.01]}"#)
        .unwrap();
    let config_b = dir.join("b.json");
    std::fs::write(
        &config_b,
        r#"{"n": 300, "deltas": [0.4, 0.3, 0.2], "n_reps": 6, "n_post_draws": 200,
            "radii": [0.001, 0.01], "C_slope": 0.001}"#,
    )
    .unwrap();
    let config_d = dir.join("d.json");
    std::fs::write(
        &config_d,
        r#"{"n_grid": [100, 200], "c": 3.0, "lambda": 0.4, "n_reps": 20,
            "paths": [{"kind": "exp_shrink", "alpha": null}, {"kind": "constant", "c0": 0.01}]}"#,
    )
    .unwrap();
    let s = |p: &std::path::Path| p.to_string_lossy().into_owned();
    let args = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut cases = vec![
        ("sample er", args(&["sample", "er", "--n", "500", "--c", "3", "--seed", "7"])),
        ("sample sbm", args(&["sample", "sbm", "--n", "500", "--c", "3", "--lambda", "0.4", "--seed", "7"])),
        ("sample cm", args(&["sample", "cm", "--n", "500", "--mean", "0.8", "--seed", "7"])),
        ("sample gnm", args(&["sample", "gnm", "--n", "500", "--m", "700", "--seed", "7"])),
        ("metrics", args(&["metrics", &s(&graph), "--reference-seeds", "5"])),
    ];
    cases.push((
        "sample graphon",
        args(&["sample", "graphon", "--n", "300", "--graphon-file", &s(&graphon), "--seed", "7"]),
    ));
    cases.push((
        "graphon chain",
        args(&["graphon", "--center-file", &s(&graphon), "--radius", "0.5", "--moves", "300", "--seed", "7"]),
    ));
    for (name, which, cfg) in
        [("experiment a", "a", &config_a), ("experiment b", "b", &config_b), ("experiment d", "d", &config_d)]
    {
        cases.push((name, args(&["experiment", which, "--config", &s(cfg), "--seed", "9"])));
    }
    cases
}

/// Runs every seeded CLI case twice, the second time with a different
/// thread count for experiments. Returns the number of cases and the names
/// of those whose output files differ or that failed to run.
pub fn cli_rerun_mismatches(bin: &str) -> (usize, Vec<String>) {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    let cases = seeded_cli_cases(dir.path());
    let total = cases.len();
    for (name, args) in cases {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "2")] {
            let out = dir.path().join(format!("{}-{run}.out", name.replace(' ', "_")));
            let mut cmd = std::process::Command::new(bin);
            cmd.args(&args).arg("--out").arg(&out);
            if name.starts_with("experiment") {
                cmd.args(["--threads", threads]);
            }
            let status = cmd.output().unwrap();
            outputs.push(status.status.success().then(|| std::fs::read(&out).unwrap()));
        }
        match (&outputs[0], &outputs[1]) {
            (Some(a), Some(b)) if a == b && !a.is_empty() => {}
            _ => bad.push(name.to_string()),
        }
    }
    (total, bad)
}

/// Mean and standard error of `KL(P ∥ p⋆)` for `P ~ Dirichlet(α p⋆)`.
pub fn dirichlet_kl_mc(pstar: &[f64], alpha: f64, draws: usize, seed: u64) -> (f64, f64) {
    let gammas: Vec<Gamma<f64>> = pstar.iter().map(|&p| Gamma::new(alpha * p, 1.0).unwrap()).collect();
    let mut rng = stream(seed, 0);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut y = vec![0.0; pstar.len()];
    for _ in 0..draws {
        for (v, g) in y.iter_mut().zip(&gammas) {
            *v = g.sample(&mut rng);
        }
        let total: f64 = y.iter().sum();
        let kl: f64 = y
            .iter()
            .zip(pstar)
            .map(|(&v, &p)| {
                let q = v / total;
                if q > 0.0 {
                    q * (q / p).ln()
                } else {
                    0.0
                }
            })
            .sum();
        sum += kl;
        sum_sq += kl * kl;
    }
    let n = draws as f64;
    let mean = sum / n;
    (mean, ((sum_sq / n - mean * mean) / (n - 1.0)).sqrt())
}
