use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simple undirected graph with edges stored as `(u, v)`, `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop on vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph {
            n,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        Graph::new(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Parses `u v` lines; blank lines and `#` comments are skipped. The vertex
    /// count is `n` if given, else one more than the largest label.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => {
                    return Err(Error::invalid(format!(
                        "line {}: expected \"u v\", got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in &self.edges {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }
}

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Uniform pairing-model sample of a simple `d`-regular graph on `n` vertices,
/// resampling the whole pairing whenever it has a loop or a repeated edge.
pub fn random_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(Error::invalid(format!(
            "no {d}-regular graph on {n} vertices (n·d odd)"
        )));
    }
    if d >= n {
        return Err(Error::invalid(format!(
            "degree {d} must be below vertex count {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
        }
        return Graph::new(n, seen);
    }
    Err(Error::guard(format!(
        "pairing model did not produce a simple {d}-regular graph on {n} vertices in {MAX_PAIRING_ATTEMPTS} attempts"
    )))
}
