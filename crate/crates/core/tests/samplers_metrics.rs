#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use robnet::metrics::{
    average_path_length, connected_components, empirical_susceptibility, global_clustering, leading_eigenvalue,
    triangle_count, EIGEN_MAX_ITERS, EIGEN_TOL,
};
use robnet::models::{
    sample_configuration_model, sample_configuration_model_with, sample_gnm, sample_graphon, sample_sparse_er,
    sample_two_block_sbm,
};
use robnet::rng::stream;
use robnet::{DegreeModel, Graph, LabelledSbmParams, SparseErParams, StepGraphon};

fn z_score(observed: f64, mean: f64, var: f64) -> f64 {
    (observed - mean) / var.sqrt()
}

#[test]
fn sparse_er_edge_count_is_binomial() {
    let (n, c) = (2000, 3.0);
    let params = SparseErParams::new(n, c).unwrap();
    let p = params.edge_probability();
    let pairs = (n * (n - 1) / 2) as f64;
    let reps = 50;
    let total: usize = (0..reps)
        .map(|seed| {
            let g = sample_sparse_er(&params, seed);
            assert!(g.is_valid());
            g.m()
        })
        .sum();
    let z = z_score(total as f64, reps as f64 * pairs * p, reps as f64 * pairs * p * (1.0 - p));
    assert!(z.abs() < 4.0, "z = {z}");
}

#[test]
fn sbm_splits_edges_by_block() {
    let (n, c, lambda) = (1000, 3.0, 0.6);
    let params = LabelledSbmParams::with_halves(n, c, lambda).unwrap();
    let (same_pairs, cross_pairs) = params.labels().pair_counts();
    let (mut within, mut across) = (0usize, 0usize);
    let reps = 40;
    for seed in 0..reps {
        let g = sample_two_block_sbm(&params, seed);
        assert!(g.is_valid());
        for (i, j) in g.edges() {
            if params.labels().same(i, j) {
                within += 1;
            } else {
                across += 1;
            }
        }
    }
    let r = reps as f64;
    for (count, pairs, p) in [(within, same_pairs, params.p_in()), (across, cross_pairs, params.p_out())] {
        let pairs = pairs as f64;
        let z = z_score(count as f64, r * pairs * p, r * pairs * p * (1.0 - p));
        assert!(z.abs() < 4.0, "z = {z}");
    }
}

#[test]
fn gnm_has_exact_edge_count() {
    for seed in 0..20 {
        let g = sample_gnm(100, 300, seed).unwrap();
        assert!(g.is_valid());
        assert_eq!(g.m(), 300);
    }
    assert_eq!(sample_gnm(5, 10, 0).unwrap().m(), 10);
    assert!(sample_gnm(5, 11, 0).is_err());
}

#[test]
fn graphon_block_densities() {
    let w = StepGraphon::two_block(0.2, 0.05).unwrap();
    let (mut hits, mut pairs) = ([[0f64; 2]; 2], [[0f64; 2]; 2]);
    for seed in 0..20 {
        let (g, blocks) = sample_graphon(300, &w, seed);
        assert!(g.is_valid());
        for i in 0..300 {
            for j in i + 1..300 {
                let (a, b) = (blocks[i].min(blocks[j]), blocks[i].max(blocks[j]));
                pairs[a][b] += 1.0;
                if g.has_edge(i, j) {
                    hits[a][b] += 1.0;
                }
            }
        }
    }
    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
        let p = w.entry(a, b);
        let z = z_score(hits[a][b], pairs[a][b] * p, pairs[a][b] * p * (1.0 - p));
        assert!(z.abs() < 4.0, "cell ({a},{b}) z = {z}");
    }
}

#[test]
fn configuration_model_keeps_most_stubs() {
    let mut rng = stream(3, 0);
    for _ in 0..20 {
        let cm = sample_configuration_model_with(3000, &DegreeModel::Poisson(0.8), &mut rng).unwrap();
        assert!(cm.graph.is_valid());
        assert_eq!(cm.stub_degrees.iter().sum::<usize>() % 2, 0);
        assert_eq!(cm.graph.m() + cm.erased, cm.matched_pairs());
        for v in 0..3000 {
            assert!(cm.graph.degree(v) <= cm.stub_degrees[v]);
        }
        // Loops and duplicates are O(1) in expectation for a sparse law.
        assert!(cm.erased < 20);
    }
}

#[test]
fn subcritical_susceptibility_near_limit() {
    let mean = (0..40)
        .map(|seed| {
            empirical_susceptibility(&sample_configuration_model(3000, &DegreeModel::Poisson(0.5), seed).unwrap())
        })
        .sum::<f64>()
        / 40.0;
    assert!((mean - 2.0).abs() < 0.15, "mean susceptibility {mean}");
}

fn naive_triangles(g: &Graph) -> u64 {
    let n = g.n();
    let mut t = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k) {
                    t += 1;
                }
            }
        }
    }
    t
}

/// Floyd–Warshall mean distance over connected ordered pairs.
fn naive_path_length(g: &Graph) -> Option<f64> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, j) in g.edges() {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    let (mut total, mut pairs) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] < inf {
                total += d[i][j];
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| total as f64 / pairs as f64)
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..40, 0.0f64..0.5, any::<u64>()).prop_map(|(n, density, seed)| {
        let m = ((n * (n - 1) / 2) as f64 * density) as usize;
        sample_gnm(n, m, seed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn metric_invariants(g in arb_graph()) {
        prop_assert!(g.is_valid());
        let cl = global_clustering(&g);
        prop_assert!((0.0..=1.0).contains(&cl));
        prop_assert_eq!(triangle_count(&g), naive_triangles(&g));

        let cc = connected_components(&g);
        prop_assert_eq!(cc.sizes.iter().sum::<usize>(), g.n());
        for (i, j) in g.edges() {
            prop_assert_eq!(cc.component_id[i], cc.component_id[j]);
        }
        let chi = empirical_susceptibility(&g);
        prop_assert!(chi >= 1.0 - 1e-12 && chi <= cc.largest() as f64 + 1e-12);

        match (average_path_length(&g), naive_path_length(&g)) {
            (Ok(l), Some(oracle)) => prop_assert!((l - oracle).abs() < 1e-12),
            (Err(_), None) => {}
            (a, b) => prop_assert!(false, "path length {:?} vs oracle {:?}", a, b),
        }

        let lambda = leading_eigenvalue(&g, EIGEN_TOL, EIGEN_MAX_ITERS).unwrap();
        let degrees = g.degrees();
        let mean = degrees.iter().sum::<usize>() as f64 / g.n() as f64;
        let max = *degrees.iter().max().unwrap() as f64;
        prop_assert!(lambda >= mean - 1e-6, "λ1 {} below mean degree {}", lambda, mean);
        prop_assert!(lambda <= max + 1e-6, "λ1 {} above max degree {}", lambda, max);
        prop_assert!(lambda >= max.sqrt() - 1e-6);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        let text = g.to_edge_list_string();
        let back = Graph::read_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn samplers_always_produce_valid_graphs(n in 2usize..300, c in 0.1f64..6.0, lambda in 0.0f64..0.9, seed in any::<u64>()) {
        let er = sample_sparse_er(&SparseErParams::new(n, c.min(n as f64 - 1.0)).unwrap(), seed);
        prop_assert!(er.is_valid());
        let even = n + n % 2;
        let sbm = sample_two_block_sbm(&LabelledSbmParams::with_halves(even, c.min(even as f64 / 2.0), lambda * c.min(even as f64 / 2.0)).unwrap(), seed);
        prop_assert!(sbm.is_valid());
        let cm = sample_configuration_model(n, &DegreeModel::Poisson(c), seed).unwrap();
        prop_assert!(cm.is_valid());
        let (gw, blocks) = sample_graphon(n, &StepGraphon::two_block(0.3, 0.1).unwrap(), seed);
        prop_assert!(gw.is_valid());
        prop_assert_eq!(blocks.len(), n);
    }
}
