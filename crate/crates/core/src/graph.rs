//! Undirected simple graphs and the edge-list text format.
//!
//! The edge-list format is a header line `n m` followed by `m` lines `i j`
//! with 0-based vertex indices and `i < j`, LF line endings.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Undirected simple graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Self { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Parameter(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::Parameter(format!("self-loop at vertex {i}")));
            }
            pairs.push((i.min(j), i.max(j)));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_unique_pairs(n, &pairs))
    }

    /// Builds a simple graph from a multigraph edge list by dropping loops and
    /// collapsing parallel edges. Returns the graph and the number of erased
    /// half-pairs (loops plus surplus parallel copies).
    pub fn erased<I>(n: usize, edges: I) -> (Self, usize)
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut erased = 0;
        for (i, j) in edges {
            debug_assert!(i < n && j < n);
            if i == j {
                erased += 1;
            } else {
                pairs.push((i.min(j), i.max(j)));
            }
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        erased += before - pairs.len();
        (Self::from_unique_pairs(n, &pairs), erased)
    }

    /// Caller guarantees pairs are distinct, in range and loop-free.
    pub(crate) fn from_unique_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in pairs {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { adjacency, edge_count: pairs.len() }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Checks symmetry, simplicity and sortedness of the adjacency lists.
    pub fn is_valid(&self) -> bool {
        let n = self.n();
        let mut half = 0usize;
        for (i, list) in self.adjacency.iter().enumerate() {
            half += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &j in list {
                if j >= n || j == i || self.adjacency[j].binary_search(&i).is_err() {
                    return false;
                }
            }
        }
        half.is_multiple_of(2) && half / 2 == self.edge_count
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n(), self.m())?;
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))??;
        let (n, m) = parse_pair(&header, 1)?;
        let mut edges = Vec::with_capacity(m);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (i, j) = parse_pair(&line, k + 2)?;
            if i >= j {
                return Err(Error::Parse(format!("line {}: expected i < j, got {i} {j}", k + 2)));
            }
            edges.push((i, j));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::from_edges(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected two integers")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("line {lineno}: trailing tokens")));
    }
    Ok((a, b))
}
