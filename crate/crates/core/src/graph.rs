//! Simple undirected graphs on the dense vertex set `0..n`.
//!
//! All graphs built by the process are sparse (a few dozen neighbours per
//! vertex at most), so adjacency is a plain per-vertex neighbour list and
//! membership is a linear scan over the shorter of the two lists.

use std::fmt::Write as _;

use thiserror::Error;

/// An unordered vertex pair stored with the smaller endpoint first.
pub type Edge = (usize, usize);

/// Normalizes `(u, v)` so that the smaller endpoint comes first.
#[inline]
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge list line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// The complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    /// The cycle `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v && !g.has_edge(u, v) {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    /// The path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 1..n {
            g.insert_unchecked(u - 1, u);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n() || v >= self.n() {
            return false;
        }
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].contains(&b)
    }

    /// Adds the edge `uv`, rejecting loops, duplicates and unknown vertices.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            let (a, b) = edge(u, v);
            return Err(GraphError::DuplicateEdge(a, b));
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) {
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        self.edge_count += 1;
    }

    /// Removes `uv` if present and reports whether it was.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.has_edge(u, v) {
            return false;
        }
        self.adjacency[u].retain(|&x| x != v);
        self.adjacency[v].retain(|&x| x != u);
        self.edge_count -= 1;
        true
    }

    /// All edges with `u < v`, in ascending order of `u` then insertion order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Sorted edge list; used wherever output must not depend on insertion order.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut es: Vec<Edge> = self.edges().collect();
        es.sort_unstable();
        es
    }

    /// Subgraph induced by `keep`, relabelled densely in the order given.
    ///
    /// Returns the new graph and the map from new labels to old ones.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut new_label = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            new_label[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adjacency[v] {
                let j = new_label[w];
                if j != usize::MAX && i < j {
                    g.insert_unchecked(i, j);
                }
            }
        }
        (g, keep.to_vec())
    }

    /// One `u v` line per edge, `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.sorted_edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses the edge-list format. Blank lines and `#` comments are skipped.
    /// The vertex count is `n` if given, otherwise one more than the largest label.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph, GraphError> {
        let mut pairs = Vec::new();
        let mut max_label = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| -> Result<usize, GraphError> {
                let tok = parts.next().ok_or_else(|| GraphError::Parse {
                    line: idx + 1,
                    reason: format!("missing {what} endpoint"),
                })?;
                tok.parse::<usize>().map_err(|e| GraphError::Parse {
                    line: idx + 1,
                    reason: format!("bad vertex {tok:?}: {e}"),
                })
            };
            let u = next("first")?;
            let v = next("second")?;
            if parts.next().is_some() {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    reason: "trailing tokens".into(),
                });
            }
            max_label = Some(max_label.unwrap_or(0).max(u).max(v));
            pairs.push((u, v));
        }
        let n = n.unwrap_or_else(|| max_label.map_or(0, |m| m + 1));
        Graph::from_edges(n, pairs)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n() {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in self.sorted_edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}
