//! Asymptotic equilibria of the averaging dynamics.
//!
//! Once the sink components of a graph are known, the long-run state is
//! determined by two ingredients: each sink's internal consensus value
//! (its stationary average of the initial condition) and the `n × s`
//! *influence matrix* `H` whose entry `H_ik` is the probability that a
//! random walk started at node `i` is absorbed by sink `k`. The
//! equilibrium is then `x* = H·x̄`.
//!
//! `H` can be computed by three genuinely independent routes, which the
//! test suite plays against each other:
//!
//! - [`InfluenceMethod::BlockSolve`] — the absorbing-chain formula
//!   `(I − Q)⁻¹ R^{(k)} 1` on the regular block of `P_α` (default; the
//!   result does not depend on `α`);
//! - [`InfluenceMethod::LaplaceSolve`] — the boundary-value problem
//!   `L·h = 0` on regular rows with `h ≡ indicator` on sink rows;
//! - [`InfluenceMethod::MonteCarlo`] — absorption frequencies of seeded
//!   random walks, with binomial standard errors.

use crate::components::Condensation;
use crate::dynamics::centrality;
use crate::error::{Error, Result};
use crate::graph::DerivedMatrices;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// How to compute the influence matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfluenceMethod {
    /// Solve `(I − Q) Y = R^{(k)} 1` on the regular block of `P_α`.
    BlockSolve,
    /// Solve the Laplacian boundary-value problem `L·h = 0` with
    /// indicator values pinned on sink rows.
    LaplaceSolve,
    /// Estimate absorption frequencies from `samples` random walks per
    /// start node, using one counter-based RNG stream per node derived
    /// from `seed`.
    MonteCarlo { samples: usize, seed: u64 },
}

impl InfluenceMethod {
    /// Short stable name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            InfluenceMethod::BlockSolve => "block",
            InfluenceMethod::LaplaceSolve => "laplace",
            InfluenceMethod::MonteCarlo { .. } => "mc",
        }
    }
}

/// An influence matrix together with Monte Carlo standard errors when the
/// estimating route was used.
#[derive(Debug, Clone)]
pub struct InfluenceResult {
    /// Row-stochastic `n × s` absorption-probability matrix.
    pub h: DMatrix<f64>,
    /// Per-entry binomial standard errors (Monte Carlo only).
    pub stderr: Option<DMatrix<f64>>,
}

/// Internal consensus values of the sinks.
#[derive(Debug, Clone)]
pub struct SinkAverages {
    /// `x̄_k`: the value sink `k` agrees on, in sink order.
    pub xbar: DVector<f64>,
    /// Stationary distribution of each sink's induced subgraph.
    pub centralities: Vec<DVector<f64>>,
}

/// Full description of the asymptotic state reached from `x0`.
#[derive(Debug, Clone)]
pub struct EquilibriumProfile {
    /// Sink consensus values, in sink order.
    pub xbar: DVector<f64>,
    /// Influence matrix (block-solve route).
    pub h: DMatrix<f64>,
    /// Equilibrium state `x* = H·x̄`.
    pub x_star: DVector<f64>,
    /// Stationary distributions of the sink subgraphs.
    pub sink_centralities: Vec<DVector<f64>>,
}

/// Computes each sink's consensus value `x̄_k = Σ_{i∈S_k} π^{(k)}_i x0_i`,
/// where `π^{(k)}` is the stationary distribution of the sink's induced
/// subgraph. Singleton sinks keep their own initial value.
pub fn sink_averages(
    cond: &Condensation,
    m: &DerivedMatrices,
    x0: &DVector<f64>,
) -> Result<SinkAverages> {
    assert_eq!(x0.len(), m.n(), "initial state has wrong dimension");
    let s = cond.sink_count();
    let mut xbar = DVector::zeros(s);
    let mut centralities = Vec::with_capacity(s);
    for k in 0..s {
        let nodes = cond.sink_nodes(k);
        let pi = if nodes.len() == 1 {
            DVector::from_element(1, 1.0)
        } else {
            let sub = m.graph().induced(nodes);
            let sub_m = DerivedMatrices::new(&sub, 0.5)?;
            centrality(&sub_m)?
        };
        xbar[k] = nodes
            .iter()
            .enumerate()
            .map(|(idx, &v)| pi[idx] * x0[v])
            .sum();
        centralities.push(pi);
    }
    Ok(SinkAverages { xbar, centralities })
}

/// Computes the influence matrix by the requested route.
///
/// Rows of sink nodes are exact indicators for every route. The system
/// must have at least one sink (every finite graph does once dangling
/// nodes are repaired), and the Monte Carlo route additionally requires
/// `α ∈ (0, 1)`.
pub fn influence_matrix(
    cond: &Condensation,
    m: &DerivedMatrices,
    method: InfluenceMethod,
) -> Result<InfluenceResult> {
    match method {
        InfluenceMethod::BlockSolve => block_solve(cond, m).map(|h| InfluenceResult {
            h,
            stderr: None,
        }),
        InfluenceMethod::LaplaceSolve => laplace_solve(cond, m).map(|h| InfluenceResult {
            h,
            stderr: None,
        }),
        InfluenceMethod::MonteCarlo { samples, seed } => monte_carlo(cond, m, samples, seed),
    }
}

fn indicator_rows(cond: &Condensation, n: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(n, cond.sink_count());
    for v in 0..n {
        if let Some(k) = cond.sink_index_of(v) {
            h[(v, k)] = 1.0;
        }
    }
    h
}

fn block_solve(cond: &Condensation, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    let n = m.n();
    let s = cond.sink_count();
    let mut h = indicator_rows(cond, n);
    let regular = cond.regular();
    let r = regular.len();
    if r == 0 {
        return Ok(h);
    }

    // I − Q on the regular block of P_α.
    let mut a = DMatrix::zeros(r, r);
    for (ri, &i) in regular.iter().enumerate() {
        a[(ri, ri)] = 1.0;
        for (rj, &j) in regular.iter().enumerate() {
            a[(ri, rj)] -= m.p_alpha()[(i, j)];
        }
    }
    // Column k of the right-hand side: one-step mass into sink k.
    let mut b = DMatrix::zeros(r, s);
    for (ri, &i) in regular.iter().enumerate() {
        for &(j, _) in m.graph().out_edges(i) {
            if let Some(k) = cond.sink_index_of(j) {
                b[(ri, k)] += m.p_alpha()[(i, j)];
            }
        }
    }
    let y = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
    for (ri, &i) in regular.iter().enumerate() {
        for k in 0..s {
            h[(i, k)] = y[(ri, k)];
        }
    }
    Ok(h)
}

fn laplace_solve(cond: &Condensation, m: &DerivedMatrices) -> Result<DMatrix<f64>> {
    let n = m.n();
    let s = cond.sink_count();
    // Laplacian rows on regular nodes, identity rows on sink nodes.
    let mut a = m.laplacian().clone();
    let mut b = DMatrix::zeros(n, s);
    for v in 0..n {
        if let Some(k) = cond.sink_index_of(v) {
            for j in 0..n {
                a[(v, j)] = if j == v { 1.0 } else { 0.0 };
            }
            b[(v, k)] = 1.0;
        }
    }
    a.lu().solve(&b).ok_or(Error::SingularSystem)
}

fn monte_carlo(
    cond: &Condensation,
    m: &DerivedMatrices,
    samples: usize,
    seed: u64,
) -> Result<InfluenceResult> {
    let alpha = m.alpha();
    if alpha <= 0.0 {
        return Err(Error::InvalidAlpha { alpha });
    }
    assert!(samples > 0, "sample count must be positive");
    let n = m.n();
    let s = cond.sink_count();

    // Per-node sampling table: cumulative probabilities over P_α's row
    // support (self-loop mass α first, then scaled out-edges).
    let mut tables: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let w_i = m.w()[i];
        let mut cum = 0.0;
        let mut table = Vec::with_capacity(m.graph().out_edges(i).len() + 1);
        cum += alpha;
        table.push((i, cum));
        for &(j, wij) in m.graph().out_edges(i) {
            cum += (1.0 - alpha) * wij / w_i;
            table.push((j, cum));
        }
        tables.push(table);
    }

    let rows: Result<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|start| {
            if let Some(k) = cond.sink_index_of(start) {
                let mut row = vec![0.0; s];
                row[k] = 1.0;
                return Ok(row);
            }
            // One independent, scheduling-invariant stream per start node.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(start as u64 + 1);
            let mut counts = vec![0usize; s];
            for _ in 0..samples {
                let mut cur = start;
                let mut absorbed = false;
                for _ in 0..tol::STEP_CAP {
                    let table = &tables[cur];
                    let total = table.last().expect("non-empty row").1;
                    let u: f64 = rng.gen::<f64>() * total;
                    let pos = table.partition_point(|&(_, c)| c <= u);
                    cur = table[pos.min(table.len() - 1)].0;
                    if let Some(k) = cond.sink_index_of(cur) {
                        counts[k] += 1;
                        absorbed = true;
                        break;
                    }
                }
                if !absorbed {
                    return Err(Error::MonteCarloCapExceeded { cap: tol::STEP_CAP });
                }
            }
            Ok(counts
                .into_iter()
                .map(|c| c as f64 / samples as f64)
                .collect())
        })
        .collect();
    let rows = rows?;

    let h = DMatrix::from_fn(n, s, |i, k| rows[i][k]);
    let stderr = DMatrix::from_fn(n, s, |i, k| {
        if cond.sink_index_of(i).is_some() {
            0.0
        } else {
            let p = rows[i][k];
            (p * (1.0 - p) / samples as f64).sqrt()
        }
    });
    Ok(InfluenceResult {
        h,
        stderr: Some(stderr),
    })
}

/// Computes the full equilibrium description from `x0`: sink averages,
/// the (block-solve) influence matrix and `x* = H·x̄`.
pub fn equilibrium_profile(
    cond: &Condensation,
    m: &DerivedMatrices,
    x0: &DVector<f64>,
) -> Result<EquilibriumProfile> {
    let averages = sink_averages(cond, m, x0)?;
    let h = influence_matrix(cond, m, InfluenceMethod::BlockSolve)?.h;
    let x_star = &h * &averages.xbar;
    Ok(EquilibriumProfile {
        xbar: averages.xbar,
        h,
        x_star,
        sink_centralities: averages.centralities,
    })
}

/// JSON-serializable equilibrium report.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub xbar: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub x_star: Vec<f64>,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<Vec<f64>>>,
}

impl EquilibriumReport {
    /// Assembles a report from an influence result and sink averages.
    pub fn new(xbar: &DVector<f64>, inf: &InfluenceResult, method: InfluenceMethod) -> Self {
        let x_star = &inf.h * xbar;
        let to_rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect()
        };
        EquilibriumReport {
            xbar: xbar.iter().copied().collect(),
            h: to_rows(&inf.h),
            x_star: x_star.iter().copied().collect(),
            method: method.name().to_string(),
            stderr: inf.stderr.as_ref().map(|m| to_rows(m)),
        }
    }
}
