//! Seeded samplers for the random-graph laws: sparse Erdős–Rényi, labelled
//! two-block SBM, step graphons and the erased configuration model.
//!
//! Pair-wise Bernoulli sampling uses geometric skipping, so the cost is
//! proportional to the number of edges rather than the number of pairs.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::graph::Graph;
use crate::rng::stream;

/// Sparse ER law with edge probability `c / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseErParams {
    n: usize,
    c: f64,
}

impl SparseErParams {
    /// Requires `0 < c <= n`; `c = n` gives the complete graph.
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return param("vertex count must be positive");
        }
        if !(c > 0.0 && c <= n as f64) {
            return param(format!("mean-degree parameter c = {c} must lie in (0, n = {n}]"));
        }
        Ok(Self { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn edge_probability(&self) -> f64 {
        self.c / self.n as f64
    }
}

/// Balanced ±1 vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels(Vec<i8>);

impl Labels {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if labels.iter().any(|&s| s != 1 && s != -1) {
            return param("labels must be +1 or -1");
        }
        let plus = labels.iter().filter(|&&s| s == 1).count();
        if labels.is_empty() || 2 * plus != labels.len() {
            return param(format!("labels must be balanced: {plus} of {} are +1", labels.len()));
        }
        Ok(Self(labels))
    }

    /// First `n / 2` vertices `+1`, the rest `-1`.
    pub fn halves(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return param(format!("balanced labels need an even positive n, got {n}"));
        }
        Ok(Self((0..n).map(|i| if i < n / 2 { 1 } else { -1 }).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        self.0[i] == self.0[j]
    }

    /// Number of within-label and cross-label unordered pairs.
    pub fn pair_counts(&self) -> (u64, u64) {
        let plus = self.0.iter().filter(|&&s| s == 1).count() as u64;
        let minus = self.0.len() as u64 - plus;
        (plus * plus.saturating_sub(1) / 2 + minus * minus.saturating_sub(1) / 2, plus * minus)
    }

    fn groups(&self) -> [Vec<usize>; 2] {
        let mut plus = Vec::with_capacity(self.0.len() / 2);
        let mut minus = Vec::with_capacity(self.0.len() / 2);
        for (i, &s) in self.0.iter().enumerate() {
            if s == 1 {
                plus.push(i);
            } else {
                minus.push(i);
            }
        }
        [plus, minus]
    }
}

/// Labelled two-block SBM with `p_in = (c + λ)/n`, `p_out = (c − λ)/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledSbmParams {
    c: f64,
    lambda: f64,
    labels: Labels,
}

impl LabelledSbmParams {
    pub fn new(c: f64, lambda: f64, labels: Labels) -> Result<Self> {
        let n = labels.len() as f64;
        if !(c > 0.0) || !lambda.is_finite() {
            return param(format!("need c > 0 and finite lambda, got c = {c}, lambda = {lambda}"));
        }
        if lambda.abs() >= c {
            return param(format!("|lambda| = {} must be below c = {c}", lambda.abs()));
        }
        if c + lambda >= n {
            return param(format!("within-block probability (c + lambda)/n = {} must be below 1", (c + lambda) / n));
        }
        Ok(Self { c, lambda, labels })
    }

    /// Convenience constructor with the first half of the vertices labelled `+1`.
    pub fn with_halves(n: usize, c: f64, lambda: f64) -> Result<Self> {
        Self::new(c, lambda, Labels::halves(n)?)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn p_in(&self) -> f64 {
        (self.c + self.lambda) / self.n() as f64
    }

    pub fn p_out(&self) -> f64 {
        (self.c - self.lambda) / self.n() as f64
    }
}

/// K-block symmetric step graphon.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    fractions: Vec<f64>,
    blocks: Vec<Vec<f64>>,
}

/// On-disk form `{"K": .., "pi": [..], "B": [[..]]}`.
#[derive(Debug, Deserialize, Serialize)]
struct StepGraphonFile {
    #[serde(rename = "K")]
    k: usize,
    pi: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
}

impl StepGraphon {
    pub fn new(fractions: Vec<f64>, blocks: Vec<Vec<f64>>) -> Result<Self> {
        let k = fractions.len();
        if k == 0 {
            return param("step graphon needs at least one block");
        }
        if fractions.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return param("block fractions must be positive");
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return param(format!("block fractions sum to {total}, expected 1"));
        }
        if blocks.len() != k || blocks.iter().any(|row| row.len() != k) {
            return param(format!("block matrix must be {k}x{k}"));
        }
        for a in 0..k {
            for b in 0..k {
                let v = blocks[a][b];
                if !(0.0..=1.0).contains(&v) {
                    return param(format!("block entry B[{a}][{b}] = {v} outside [0, 1]"));
                }
                if v != blocks[b][a] {
                    return param(format!("block matrix not symmetric at ({a}, {b})"));
                }
            }
        }
        Ok(Self { fractions, blocks })
    }

    /// Constant graphon `W ≡ p`.
    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![vec![p]])
    }

    /// Two equal blocks with within/between probabilities.
    pub fn two_block(p_in: f64, p_out: f64) -> Result<Self> {
        Self::new(vec![0.5, 0.5], vec![vec![p_in, p_out], vec![p_out, p_in]])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StepGraphonFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.k != file.pi.len() {
            return param(format!("K = {} but pi has {} entries", file.k, file.pi.len()));
        }
        Self::new(file.pi, file.b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StepGraphonFile { k: self.k(), pi: self.fractions.clone(), b: self.blocks.clone() })
            .expect("graphon serializes")
    }

    pub fn k(&self) -> usize {
        self.fractions.len()
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.blocks[a][b]
    }

    /// Row-major `K²` cell values.
    pub fn cells(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Same partition, new row-major cells (must stay symmetric and in [0, 1]).
    pub fn with_cells(&self, cells: &[f64]) -> Result<Self> {
        let k = self.k();
        if cells.len() != k * k {
            return param(format!("expected {} cells, got {}", k * k, cells.len()));
        }
        let blocks = cells.chunks(k).map(<[f64]>::to_vec).collect();
        Self::new(self.fractions.clone(), blocks)
    }

    /// Block index of a latent position `u ∈ [0, 1)` via cumulative fractions.
    pub fn block_of(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (a, &p) in self.fractions.iter().enumerate() {
            acc += p;
            if u < acc {
                return a;
            }
        }
        self.k() - 1
    }

    /// Draws `n` i.i.d. latent block indices.
    pub fn sample_latents<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| self.block_of(rng.random::<f64>())).collect()
    }
}

/// Degree law for the configuration model.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeModel {
    Poisson(f64),
    /// Probability of each degree `0..=d_max`.
    Explicit(Vec<f64>),
}

impl DegreeModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            DegreeModel::Poisson(mean) => {
                if !(*mean > 0.0 && mean.is_finite()) {
                    return param(format!("Poisson mean must be positive, got {mean}"));
                }
            }
            DegreeModel::Explicit(probs) => {
                if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                    return param("explicit degree law needs nonnegative probabilities");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return param(format!("explicit degree law sums to {total}"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            DegreeModel::Poisson(m) => *m,
            DegreeModel::Explicit(p) => p.iter().enumerate().map(|(d, &w)| d as f64 * w).sum(),
        }
    }

    /// Branching factor `θ = E[D(D−1)] / E[D]` (0 when `E[D] = 0`).
    pub fn branching_factor(&self) -> f64 {
        match self {
            DegreeModel::Poisson(m) => *m,
            DegreeModel::Explicit(p) => {
                let mean = self.mean();
                if mean == 0.0 {
                    return 0.0;
                }
                let fact: f64 = p.iter().enumerate().map(|(d, &w)| (d * d.saturating_sub(1)) as f64 * w).sum();
                fact / mean
            }
        }
    }

    /// Subcritical susceptibility limit `1 / (1 − θ)`.
    pub fn susceptibility_limit(&self) -> Result<f64> {
        let theta = self.branching_factor();
        if theta >= 1.0 {
            return Err(Error::Domain(format!("branching factor {theta} is not subcritical; susceptibility diverges")));
        }
        Ok(1.0 / (1.0 - theta))
    }
}

/// Calls `visit(t)` for each index `t < total` selected independently with
/// probability `p`, by geometric skipping.
fn for_each_bernoulli_index<R, F>(total: u64, p: f64, rng: &mut R, mut visit: F)
where
    R: Rng + ?Sized,
    F: FnMut(u64),
{
    if total == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(visit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut t = 0u64;
    loop {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if skip >= (total - t) as f64 {
            break;
        }
        t += skip as u64;
        visit(t);
        t += 1;
        if t >= total {
            break;
        }
    }
}

/// Maps a linear index over unordered pairs `j < i` to `(i, j)`.
fn triangular_pair(t: u64) -> (usize, usize) {
    let mut i = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0).floor() as u64;
    while i * (i - 1) / 2 > t {
        i -= 1;
    }
    while (i + 1) * i / 2 <= t {
        i += 1;
    }
    (i as usize, (t - i * (i - 1) / 2) as usize)
}

/// Bernoulli(p) edges among all pairs inside `members`.
fn sample_within<R: Rng + ?Sized>(members: &[usize], p: f64, rng: &mut R, out: &mut Vec<(usize, usize)>) {
    let k = members.len() as u64;
    for_each_bernoulli_index(k * k.saturating_sub(1) / 2, p, rng, |t| {
        let (i, j) = triangular_pair(t);
        out.push((members[i], members[j]));
    });
}

/// Bernoulli(p) edges among all pairs in `left × right`.
fn sample_between<R: Rng + ?Sized>(
    left: &[usize],
    right: &[usize],
    p: f64,
    rng: &mut R,
    out: &mut Vec<(usize, usize)>,
) {
    let width = right.len() as u64;
    for_each_bernoulli_index(left.len() as u64 * width, p, rng, |t| {
        out.push((left[(t / width) as usize], right[(t % width) as usize]));
    });
}

fn build(n: usize, mut pairs: Vec<(usize, usize)>) -> Graph {
    for e in &mut pairs {
        *e = (e.0.min(e.1), e.0.max(e.1));
    }
    pairs.sort_unstable();
    Graph::from_unique_pairs(n, &pairs)
}

pub fn sample_sparse_er_with<R: Rng + ?Sized>(params: &SparseErParams, rng: &mut R) -> Graph {
    let all: Vec<usize> = (0..params.n).collect();
    let mut pairs = Vec::new();
    sample_within(&all, params.edge_probability(), rng, &mut pairs);
    build(params.n, pairs)
}

/// Each unordered pair is an edge independently with probability `c / n`.
pub fn sample_sparse_er(params: &SparseErParams, seed: u64) -> Graph {
    sample_sparse_er_with(params, &mut stream(seed, 0))
}

pub fn sample_two_block_sbm_with<R: Rng + ?Sized>(params: &LabelledSbmParams, rng: &mut R) -> Graph {
    let [plus, minus] = params.labels.groups();
    let mut pairs = Vec::new();
    sample_within(&plus, params.p_in(), rng, &mut pairs);
    sample_within(&minus, params.p_in(), rng, &mut pairs);
    sample_between(&plus, &minus, params.p_out(), rng, &mut pairs);
    build(params.n(), pairs)
}

/// Within-label pairs use `p_in`, cross-label pairs `p_out`.
pub fn sample_two_block_sbm(params: &LabelledSbmParams, seed: u64) -> Graph {
    sample_two_block_sbm_with(params, &mut stream(seed, 0))
}

pub fn sample_graphon_with<R: Rng + ?Sized>(n: usize, graphon: &StepGraphon, rng: &mut R) -> (Graph, Vec<usize>) {
    let latents = graphon.sample_latents(n, rng);
    let mut groups = vec![Vec::new(); graphon.k()];
    for (v, &z) in latents.iter().enumerate() {
        groups[z].push(v);
    }
    let mut pairs = Vec::new();
    for a in 0..graphon.k() {
        sample_within(&groups[a], graphon.entry(a, a), rng, &mut pairs);
        for b in a + 1..graphon.k() {
            sample_between(&groups[a], &groups[b], graphon.entry(a, b), rng, &mut pairs);
        }
    }
    (build(n, pairs), latents)
}

/// Samples latent blocks from the cumulative fractions, then independent
/// edges with probability `B[z_i][z_j]`. Returns the graph and the blocks.
pub fn sample_graphon(n: usize, graphon: &StepGraphon, seed: u64) -> (Graph, Vec<usize>) {
    sample_graphon_with(n, graphon, &mut stream(seed, 0))
}

/// Configuration-model draw with bookkeeping.
#[derive(Debug, Clone)]
pub struct ConfigurationSample {
    pub graph: Graph,
    /// Degrees after the parity fix, before erasure.
    pub stub_degrees: Vec<usize>,
    /// Matched stub pairs that became loops or duplicate edges.
    pub erased: usize,
}

impl ConfigurationSample {
    /// Number of matched stub pairs, `Σ d_i / 2`.
    pub fn matched_pairs(&self) -> usize {
        self.stub_degrees.iter().sum::<usize>() / 2
    }
}

pub fn sample_configuration_model_with<R: Rng + ?Sized>(
    n: usize,
    degrees: &DegreeModel,
    rng: &mut R,
) -> Result<ConfigurationSample> {
    degrees.validate()?;
    let mut stub_degrees: Vec<usize> = match degrees {
        DegreeModel::Poisson(mean) => {
            let dist = Poisson::new(*mean).map_err(|e| Error::Parameter(e.to_string()))?;
            (0..n).map(|_| dist.sample(rng) as usize).collect()
        }
        DegreeModel::Explicit(probs) => {
            let dist = WeightedIndex::new(probs).map_err(|e| Error::Parameter(e.to_string()))?;
            (0..n).map(|_| dist.sample(rng)).collect()
        }
    };
    if n > 0 && stub_degrees.iter().sum::<usize>() % 2 == 1 {
        let v = rng.random_range(0..n);
        stub_degrees[v] += 1;
    }
    let mut stubs: Vec<usize> = stub_degrees.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d)).collect();
    stubs.shuffle(rng);
    let (graph, erased) = Graph::erased(n, stubs.chunks_exact(2).map(|c| (c[0], c[1])));
    Ok(ConfigurationSample { graph, stub_degrees, erased })
}

/// Erased configuration model: i.i.d. degrees, parity fixed by incrementing
/// one uniform vertex, uniform stub matching, loops and multi-edges removed.
pub fn sample_configuration_model(n: usize, degrees: &DegreeModel, seed: u64) -> Result<Graph> {
    Ok(sample_configuration_model_with(n, degrees, &mut stream(seed, 0))?.graph)
}

pub fn sample_gnm_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let total = n as u64 * n.saturating_sub(1) as u64 / 2;
    if m as u64 > total {
        return param(format!("{m} edges do not fit on {n} vertices"));
    }
    // Sample the smaller of the edge set and its complement.
    let complement = (m as u64) > total / 2;
    let target = if complement { total - m as u64 } else { m as u64 };
    let mut chosen = HashSet::with_capacity(target as usize);
    while (chosen.len() as u64) < target {
        chosen.insert(rng.random_range(0..total));
    }
    let pairs: Vec<(usize, usize)> = if complement {
        (0..total).filter(|t| !chosen.contains(t)).map(triangular_pair).map(|(i, j)| (j, i)).collect()
    } else {
        let mut idx: Vec<u64> = chosen.into_iter().collect();
        idx.sort_unstable();
        idx.into_iter().map(triangular_pair).map(|(i, j)| (j, i)).collect()
    };
    Ok(build(n, pairs))
}

/// Uniform graph with exactly `m` edges on `n` vertices.
pub fn sample_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    sample_gnm_with(n, m, &mut stream(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_index_roundtrip() {
        let mut t = 0u64;
        for i in 1..200u64 {
            for j in 0..i {
                assert_eq!(triangular_pair(t), (i as usize, j as usize));
                t += 1;
            }
        }
    }

    #[test]
    fn er_with_unit_probability_is_complete() {
        let g = sample_sparse_er(&SparseErParams::new(4, 4.0).unwrap(), 11);
        assert_eq!(g.m(), 6);
        assert!(g.is_valid());
    }

    #[test]
    fn er_with_tiny_probability_is_empty() {
        let params = SparseErParams::new(4, 1e-4).unwrap();
        let nonempty = (0..50).filter(|&s| sample_sparse_er(&params, s).m() > 0).count();
        assert!(nonempty <= 1);
    }

    #[test]
    fn er_rejects_bad_params() {
        assert!(SparseErParams::new(10, 0.0).is_err());
        assert!(SparseErParams::new(10, 11.0).is_err());
        assert!(SparseErParams::new(0, 1.0).is_err());
    }

    #[test]
    fn sbm_param_errors() {
        assert!(LabelledSbmParams::with_halves(5, 2.0, 0.5).is_err());
        assert!(LabelledSbmParams::with_halves(10, 2.0, 2.0).is_err());
        assert!(LabelledSbmParams::with_halves(10, 2.0, -2.5).is_err());
        assert!(Labels::new(vec![1, 1, -1]).is_err());
        assert!(Labels::new(vec![1, 0]).is_err());
    }

    #[test]
    fn sbm_near_boundary_fills_blocks() {
        // lambda -> c: within pairs almost surely present, cross pairs almost never.
        let params = LabelledSbmParams::with_halves(4, 1.999_999, 1.999_998).unwrap();
        let g = sample_two_block_sbm(&params, 3);
        assert!(g.is_valid());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn sbm_respects_labels_for_arbitrary_assignment() {
        let labels = Labels::new(vec![1, -1, 1, -1, 1, -1]).unwrap();
        // c + lambda just below n: within pairs nearly certain; c - lambda tiny.
        let params = LabelledSbmParams::new(2.9, 2.899_999_9, labels).unwrap();
        let g = sample_two_block_sbm(&params, 8);
        for (i, j) in g.edges() {
            assert!(params.labels().same(i, j));
        }
    }

    #[test]
    fn pair_counts_for_halves() {
        let labels = Labels::halves(400).unwrap();
        assert_eq!(labels.pair_counts(), (39_800, 40_000));
    }

    #[test]
    fn graphon_single_vertex_is_empty() {
        let w = StepGraphon::two_block(0.9, 0.1).unwrap();
        let (g, z) = sample_graphon(1, &w, 5);
        assert_eq!(g.n(), 1);
        assert_eq!(g.m(), 0);
        assert_eq!(z.len(), 1);
    }

    #[test]
    fn graphon_block_edges_follow_latents() {
        let w = StepGraphon::new(vec![0.3, 0.7], vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let (g, z) = sample_graphon(60, &w, 2);
        let k0 = z.iter().filter(|&&b| b == 0).count();
        assert_eq!(g.m(), k0 * (k0.saturating_sub(1)) / 2);
        for (i, j) in g.edges() {
            assert_eq!((z[i], z[j]), (0, 0));
        }
    }

    #[test]
    fn graphon_validation_and_json() {
        assert!(StepGraphon::new(vec![0.5, 0.5], vec![vec![0.1, 0.2], vec![0.3, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![0.6, 0.6], vec![vec![0.1, 0.2], vec![0.2, 0.1]]).is_err());
        assert!(StepGraphon::new(vec![1.0], vec![vec![1.5]]).is_err());
        let w = StepGraphon::two_block(0.4, 0.1).unwrap();
        let back = StepGraphon::from_json(&w.to_json()).unwrap();
        assert_eq!(w, back);
        assert!(StepGraphon::from_json(r#"{"K":3,"pi":[1.0],"B":[[0.5]]}"#).is_err());
    }

    #[test]
    fn configuration_model_all_zero_degrees() {
        let g = sample_configuration_model(25, &DegreeModel::Explicit(vec![1.0]), 1).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(g.m(), 0);
    }

    #[test]
    fn configuration_model_parity_fix() {
        let mut rng = stream(4, 0);
        for _ in 0..20 {
            let s = sample_configuration_model_with(7, &DegreeModel::Poisson(1.3), &mut rng).unwrap();
            assert_eq!(s.stub_degrees.iter().sum::<usize>() % 2, 0);
            assert_eq!(s.graph.m() + s.erased, s.matched_pairs());
            assert!(s.graph.is_valid());
        }
    }

    #[test]
    fn degree_model_functionals() {
        let poisson = DegreeModel::Poisson(0.8);
        assert!((poisson.susceptibility_limit().unwrap() - 5.0).abs() < 1e-12);
        // P(D=1) = P(D=2) = 1/2: E[D] = 1.5, E[D(D-1)] = 1, θ = 2/3.
        let explicit = DegreeModel::Explicit(vec![0.0, 0.5, 0.5]);
        assert!((explicit.branching_factor() - 2.0 / 3.0).abs() < 1e-12);
        assert!(DegreeModel::Poisson(1.2).susceptibility_limit().is_err());
        assert!(DegreeModel::Explicit(vec![0.5, 0.6]).validate().is_err());
        assert!(DegreeModel::Poisson(-1.0).validate().is_err());
    }

    #[test]
    fn gnm_has_exact_edge_count() {
        for &(n, m) in &[(10, 0), (10, 7), (10, 40), (10, 45), (200, 500)] {
            let g = sample_gnm(n, m, 9).unwrap();
            assert_eq!(g.m(), m);
            assert!(g.is_valid());
        }
        assert!(sample_gnm(4, 7, 0).is_err());
    }

    #[test]
    fn samplers_are_deterministic() {
        let er = SparseErParams::new(300, 3.0).unwrap();
        assert_eq!(sample_sparse_er(&er, 42), sample_sparse_er(&er, 42));
        assert_ne!(sample_sparse_er(&er, 42), sample_sparse_er(&er, 43));
        let cm = DegreeModel::Poisson(2.0);
        assert_eq!(sample_configuration_model(300, &cm, 1).unwrap(), sample_configuration_model(300, &cm, 1).unwrap());
    }
}
