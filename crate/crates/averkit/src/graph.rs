//! Weighted directed graphs and the matrices derived from them.
//!
//! A [`WeightedDigraph`] is a finite node set `{0, ..., n-1}` together with
//! positive weights on ordered pairs; absent edges have weight zero and an
//! explicit weight-zero edge is rejected. Self-loops are allowed and are the
//! standard way to give an otherwise dangling node positive out-degree.
//!
//! [`DerivedMatrices`] bundles the quantities the rest of the crate works
//! with: the out-degree vector `w`, the row-stochastic matrix `P = D⁻¹W`,
//! the Laplacian `L = D − W`, and the lazified transition matrix
//! `P_α = αI + (1−α)P`.
//!
//! The module also implements the plain-text edge-list format used for
//! interchange: one `src<TAB>dst<TAB>weight` triple per line, `#` comments,
//! and an optional `n=<count>` header for graphs with trailing isolated
//! nodes. Writing a graph and parsing the result reproduces the weights
//! bit-for-bit because floats are printed with shortest round-trip
//! formatting.

use crate::error::{Error, Result};
use crate::tol;
use nalgebra::{DMatrix, DVector};

/// A directed graph with positive edge weights, stored as sorted
/// out-adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl WeightedDigraph {
    /// Builds a graph on `n` nodes from `(src, dst, weight)` triples.
    ///
    /// Weights must be strictly positive and finite, node ids must lie in
    /// `0..n`, and no ordered pair may appear twice.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(src, dst, weight) in edges {
            if src >= n {
                return Err(Error::NodeOutOfRange { node: src, n });
            }
            if dst >= n {
                return Err(Error::NodeOutOfRange { node: dst, n });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::NegativeWeight { src, dst, weight });
            }
            rows[src].push((dst, weight));
        }
        for (src, row) in rows.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(dst, _)| dst);
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(Error::DuplicateEdge { src, dst: pair[0].0 });
                }
            }
        }
        Ok(Self { n, rows })
    }

    /// Builds a graph from a dense weight matrix; strictly positive entries
    /// become edges, negative entries are rejected.
    pub fn from_dense(w: &DMatrix<f64>) -> Result<Self> {
        assert_eq!(w.nrows(), w.ncols(), "weight matrix must be square");
        let n = w.nrows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let wij = w[(i, j)];
                if wij != 0.0 {
                    edges.push((i, j, wij));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges (ordered pairs with positive weight).
    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Weight of the edge `(i, j)`, or `0.0` if absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |&(dst, _)| dst) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Out-edges of node `i` as `(dst, weight)` pairs, sorted by `dst`.
    pub fn out_edges(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Total out-weight `w_i = Σ_j W_ij` of node `i`.
    pub fn out_degree(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, w)| w).sum()
    }

    /// Total in-weight `Σ_j W_ji` of node `i`.
    pub fn in_degree(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.weight(j, i)).sum()
    }

    /// The out-degree vector `w = W·1`.
    pub fn out_degrees(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| self.out_degree(i))
    }

    /// Iterates over all edges in `(src, dst, weight)` order, sorted by
    /// source then destination.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(src, row)| row.iter().map(move |&(dst, w)| (src, dst, w)))
    }

    /// Materializes the dense weight matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, w) in self.edges() {
            m[(i, j)] = w;
        }
        m
    }

    /// Returns the first pair `(i, j)` with `|W_ij − W_ji| > tol`, or `None`
    /// when the weight matrix is symmetric within `tol`.
    pub fn asymmetric_pair(&self, tol: f64) -> Option<(usize, usize)> {
        for (i, j, w) in self.edges() {
            if j > i || self.weight(j, i) == 0.0 {
                let back = self.weight(j, i);
                if (w - back).abs() > tol {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
        None
    }

    /// Whether the weight matrix is symmetric within `tol`.
    pub fn is_undirected(&self, tol: f64) -> bool {
        self.asymmetric_pair(tol).is_none()
    }

    /// Subgraph induced by `nodes` (strictly ascending ids); `nodes[k]`
    /// becomes node `k` of the result. Edges with either endpoint outside
    /// the set are dropped.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let mut new_id = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            new_id[v] = k;
        }
        let rows = nodes
            .iter()
            .map(|&v| {
                self.rows[v]
                    .iter()
                    .filter(|&&(dst, _)| new_id[dst] != usize::MAX)
                    .map(|&(dst, w)| (new_id[dst], w))
                    .collect()
            })
            .collect();
        Self {
            n: nodes.len(),
            rows,
        }
    }

    /// Returns a copy in which every node with zero out-degree gains a
    /// self-loop of weight `loop_weight`; all other weights are unchanged.
    pub fn ensure_positive_outdegree(&self, loop_weight: f64) -> Self {
        assert!(
            loop_weight.is_finite() && loop_weight > 0.0,
            "loop weight must be positive"
        );
        let mut out = self.clone();
        for i in 0..self.n {
            if out.rows[i].is_empty() {
                out.rows[i].push((i, loop_weight));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Derived matrices
// ---------------------------------------------------------------------------

/// Dense matrices derived from a graph for a fixed inertia `α`.
///
/// Requires every node to have positive out-degree, so that the normalized
/// transition matrix `P = D⁻¹W` exists. Row sums satisfy `P·1 = 1`,
/// `L·1 = 0` and `P_α·1 = 1` up to rounding.
#[derive(Debug, Clone)]
pub struct DerivedMatrices {
    graph: WeightedDigraph,
    w: DVector<f64>,
    alpha: f64,
    p: DMatrix<f64>,
    laplacian: DMatrix<f64>,
    p_alpha: DMatrix<f64>,
}

impl DerivedMatrices {
    /// Computes `w`, `P`, `L` and `P_α` for the given graph.
    ///
    /// Fails if some node has zero out-degree, if `α ∉ [0, 1)`, or if the
    /// graph exceeds [`tol::DENSE_LIMIT`] nodes.
    pub fn new(graph: &WeightedDigraph, alpha: f64) -> Result<Self> {
        let n = graph.n();
        if n > tol::DENSE_LIMIT {
            return Err(Error::TooLargeForDense {
                n,
                max: tol::DENSE_LIMIT,
            });
        }
        if !(alpha.is_finite() && (0.0..1.0).contains(&alpha)) {
            return Err(Error::InvalidAlpha { alpha });
        }
        let w = graph.out_degrees();
        for i in 0..n {
            if w[i] <= 0.0 {
                return Err(Error::ZeroOutDegree { node: i });
            }
        }
        let mut p = DMatrix::zeros(n, n);
        let mut laplacian = DMatrix::zeros(n, n);
        for i in 0..n {
            laplacian[(i, i)] = w[i];
            for &(j, wij) in graph.out_edges(i) {
                p[(i, j)] = wij / w[i];
                laplacian[(i, j)] -= wij;
            }
        }
        let mut p_alpha = &p * (1.0 - alpha);
        for i in 0..n {
            p_alpha[(i, i)] += alpha;
        }
        Ok(Self {
            graph: graph.clone(),
            w,
            alpha,
            p,
            laplacian,
            p_alpha,
        })
    }

    /// The underlying graph.
    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// The out-degree vector `w = W·1`.
    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    /// The inertia parameter `α`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The row-stochastic matrix `P = D⁻¹W`.
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// The Laplacian `L = D − W`.
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// The lazified transition matrix `P_α = αI + (1−α)P`.
    pub fn p_alpha(&self) -> &DMatrix<f64> {
        &self.p_alpha
    }

    /// The diagonal out-degree matrix `D = diag(w)`, materialized on demand.
    pub fn degree_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.w)
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Structural predicates of a weighted digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    /// `W` is symmetric.
    pub undirected: bool,
    /// In-degrees equal out-degrees: `W·1 = W′·1`.
    pub balanced: bool,
    /// Detailed balance `w_i P_ij = w_j P_ji` holds for every pair. This is
    /// evaluated through `w` and `P` rather than `W`, so it provides an
    /// independent route to the same predicate as `undirected`.
    pub reversible: bool,
}

/// Classifies a graph with the default exact-identity tolerance.
pub fn classify(graph: &WeightedDigraph) -> Classification {
    classify_with(graph, tol::EXACT_IDENTITY)
}

/// Classifies a graph, comparing weight identities within `tol`.
pub fn classify_with(graph: &WeightedDigraph, tol: f64) -> Classification {
    let n = graph.n();
    let undirected = graph.is_undirected(tol);

    let mut balanced = true;
    for i in 0..n {
        if (graph.out_degree(i) - graph.in_degree(i)).abs() > tol {
            balanced = false;
            break;
        }
    }

    // Detailed balance, with P rows taken as zero for dangling nodes.
    let w = graph.out_degrees();
    let p = |i: usize, j: usize| {
        if w[i] > 0.0 {
            graph.weight(i, j) / w[i]
        } else {
            0.0
        }
    };
    let mut reversible = true;
    'outer: for i in 0..n {
        for &(j, _) in graph.out_edges(i) {
            if (w[i] * p(i, j) - w[j] * p(j, i)).abs() > tol {
                reversible = false;
                break 'outer;
            }
        }
    }

    Classification {
        undirected,
        balanced,
        reversible,
    }
}

// ---------------------------------------------------------------------------
// Edge-list text format
// ---------------------------------------------------------------------------

/// Serializes a graph in the tab-separated edge-list format.
///
/// The output starts with an `n=<count>` header so that trailing isolated
/// nodes survive a round trip, followed by one `src<TAB>dst<TAB>weight`
/// line per edge in `(src, dst)` order. Weights use shortest round-trip
/// float formatting, so parsing the output reproduces them exactly.
pub fn write_edge_list(graph: &WeightedDigraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("n={}\n", graph.n()));
    for (src, dst, w) in graph.edges() {
        out.push_str(&format!("{src}\t{dst}\t{w}\n"));
    }
    out
}

/// Parses the tab-separated edge-list format.
///
/// Empty lines and lines starting with `#` are skipped. An optional
/// `n=<count>` line fixes the node count; otherwise it is inferred as one
/// plus the largest node id mentioned.
pub fn parse_edge_list(text: &str) -> Result<WeightedDigraph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(count) = line.strip_prefix("n=") {
            let n: usize = count.trim().parse().map_err(|_| Error::ParseEdgeList {
                line: lineno,
                message: format!("invalid node count {count:?}"),
            })?;
            declared_n = Some(n);
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::ParseEdgeList {
                line: lineno,
                message: format!(
                    "expected `src<TAB>dst<TAB>weight`, found {} field(s)",
                    fields.len()
                ),
            });
        }
        let src: usize = fields[0].trim().parse().map_err(|_| Error::ParseEdgeList {
            line: lineno,
            message: format!("invalid source id {:?}", fields[0]),
        })?;
        let dst: usize = fields[1].trim().parse().map_err(|_| Error::ParseEdgeList {
            line: lineno,
            message: format!("invalid destination id {:?}", fields[1]),
        })?;
        let weight: f64 = fields[2].trim().parse().map_err(|_| Error::ParseEdgeList {
            line: lineno,
            message: format!("invalid weight {:?}", fields[2]),
        })?;
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((src, dst, weight));
    }

    let n = declared_n.unwrap_or(match max_id {
        Some(m) => m + 1,
        None => 0,
    });
    WeightedDigraph::from_edges(n, &edges)
}
