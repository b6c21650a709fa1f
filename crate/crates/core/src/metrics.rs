//! Network functionals on realized graphs.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::sample_gnm;
use crate::rng::stream;

/// Default tolerance for [`leading_eigenvalue`].
pub const EIGEN_TOL: f64 = 1e-8;
/// Default iteration cap for [`leading_eigenvalue`].
pub const EIGEN_MAX_ITERS: usize = 10_000;
/// Default number of ER reference graphs for [`small_world_index`].
pub const DEFAULT_REFERENCE_SEEDS: u64 = 20;

const EIGEN_JITTER_SEED: u64 = 0x5eed_e16e;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// Component of each vertex; ids are contiguous from 0 in order of the
    /// smallest vertex they contain.
    pub component_id: Vec<usize>,
    /// Size of each component, indexed by id.
    pub sizes: Vec<usize>,
}

impl ComponentDecomposition {
    pub fn largest(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

pub fn connected_components(g: &Graph) -> ComponentDecomposition {
    let n = g.n();
    let mut component_id = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if component_id[root] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        component_id[root] = id;
        queue.push_back(root);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if component_id[w] == usize::MAX {
                    component_id[w] = id;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    ComponentDecomposition { component_id, sizes }
}

/// Expected size of the component containing a uniform vertex,
/// `Σ_k s_k² / n`.
pub fn empirical_susceptibility(g: &Graph) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let cc = connected_components(g);
    cc.sizes.iter().map(|&s| (s * s) as f64).sum::<f64>() / g.n() as f64
}

/// Number of triangles, each counted once.
pub fn triangle_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for u in 0..g.n() {
        for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
            // common neighbours w > v by merging the sorted lists
            let (a, b) = (g.neighbors(u), g.neighbors(v));
            let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        count += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    count
}

/// `3·triangles / connected triples`; 0 when there are no triples.
pub fn global_clustering(g: &Graph) -> f64 {
    let triples: u64 = (0..g.n())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        return 0.0;
    }
    3.0 * triangle_count(g) as f64 / triples as f64
}

/// Mean shortest-path length over pairs in the same component.
pub fn average_path_length(g: &Graph) -> Result<f64> {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let (mut total, mut pairs) = (0u64, 0u64);
    for source in 0..n {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    total += dist[w] as u64;
                    pairs += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Undefined("no connected vertex pairs; path length undefined".into()));
    }
    Ok(total as f64 / pairs as f64)
}

/// Small-world index `(C / C_rand) / (L / L_rand)` against uniform random
/// graphs with the same vertex and edge counts, one per reference seed.
pub fn small_world_index(g: &Graph, reference_seeds: &[u64]) -> Result<f64> {
    if reference_seeds.is_empty() {
        return Err(Error::Parameter("at least one reference seed is required".into()));
    }
    let clustering = global_clustering(g);
    let path = average_path_length(g)?;
    let (mut c_rand, mut l_rand) = (0.0, 0.0);
    for &seed in reference_seeds {
        let reference = sample_gnm(g.n(), g.m(), seed)?;
        c_rand += global_clustering(&reference);
        l_rand += average_path_length(&reference)?;
    }
    let k = reference_seeds.len() as f64;
    let (c_rand, l_rand) = (c_rand / k, l_rand / k);
    if c_rand == 0.0 {
        return Err(Error::Undefined("reference clustering is zero".into()));
    }
    Ok(small_world_ratio(clustering, c_rand, path, l_rand))
}

/// `(c / c_rand) / (l / l_rand)`.
pub fn small_world_ratio(c: f64, c_rand: f64, l: f64, l_rand: f64) -> f64 {
    (c / c_rand) / (l / l_rand)
}

/// Largest adjacency eigenvalue by power iteration.
///
/// Iterates on `A + I` so bipartite graphs (whose spectrum is symmetric)
/// still converge, and returns the Rayleigh quotient of `A`. The start
/// vector is all-ones plus a small fixed-seed jitter.
pub fn leading_eigenvalue(g: &Graph, tol: f64, max_iters: usize) -> Result<f64> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Parameter("graph has no vertices".into()));
    }
    let mut rng = stream(EIGEN_JITTER_SEED, 0);
    let mut x: Vec<f64> = (0..n).map(|_| 1.0 + 1e-3 * rng.random::<f64>()).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut last = f64::NAN;
    for _ in 0..max_iters {
        for v in 0..n {
            y[v] = g.neighbors(v).iter().map(|&w| x[w]).sum();
        }
        // Rayleigh quotient of A at the current unit vector x
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if (rq - last).abs() < tol {
            return Ok(rq);
        }
        last = rq;
        for v in 0..n {
            y[v] += x[v];
        }
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
    }
    Err(Error::Convergence { iters: max_iters, last })
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// One row of the `metrics` subcommand output.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub n: usize,
    pub m: usize,
    pub clustering: f64,
    pub path_length: Option<f64>,
    pub small_world: Option<f64>,
    pub lambda1: f64,
    pub susceptibility: f64,
    pub lcc_size: usize,
}

impl MetricsRow {
    pub const HEADER: &'static str = "n,m,C,L,S,lambda1,susceptibility,lcc_size";

    pub fn compute(g: &Graph, reference_seeds: &[u64]) -> Result<Self> {
        let cc = connected_components(g);
        Ok(Self {
            n: g.n(),
            m: g.m(),
            clustering: global_clustering(g),
            path_length: average_path_length(g).ok(),
            small_world: small_world_index(g, reference_seeds).ok(),
            lambda1: leading_eigenvalue(g, EIGEN_TOL, EIGEN_MAX_ITERS)?,
            susceptibility: empirical_susceptibility(g),
            lcc_size: cc.largest(),
        })
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| x.to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.clustering,
            opt(self.path_length),
            opt(self.small_world),
            self.lambda1,
            self.susceptibility,
            self.lcc_size
        )
    }
}
