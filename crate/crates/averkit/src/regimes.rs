//! Polarization versus homogenization analysis.
//!
//! A structured family of graphs — two communities, each tied to its own
//! fixed-value terminal — exhibits both extremes: strong terminal links
//! pull each community to its terminal's value (polarization), while
//! strong cross-community links squeeze the community means together.
//! This module builds such graphs from validated block descriptions,
//! evaluates closed-form bounds on the community means and their gap,
//! measures how concentrated an equilibrium is (band fractions), checks
//! the mixing-time-based concentration bound on the symmetrized
//! companion graph, verifies the flow-conservation identity behind the
//! bounds, and sweeps parameter grids into CSV records.

use crate::components::{condense, is_connected, Condensation};
use crate::dynamics::{centrality, mixing_time};
use crate::electrical;
use crate::equilibrium::{influence_matrix, InfluenceMethod};
use crate::error::{Error, Result};
use crate::graph::{DerivedMatrices, WeightedDigraph};
use crate::tol;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

// ---------------------------------------------------------------------------
// Block description
// ---------------------------------------------------------------------------

/// Validated block description of a two-community graph.
///
/// Node order in the built graph: terminal 0, the `n0` community-0
/// nodes, the `n1` community-1 nodes, terminal 1. Block `a` holds
/// community-0 internal weights, `d` community-1 internal weights, and
/// `b`/`c` the cross-community weights; every community node links to
/// its terminal with weight `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCommunitySpec {
    pub n0: usize,
    pub n1: usize,
    pub gamma: f64,
    /// Constant row sum of `b`: each community-0 node's total cross weight.
    pub beta0: f64,
    /// Constant row sum of `c`: each community-1 node's total cross weight.
    pub beta1: f64,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

fn block_err(msg: impl Into<String>) -> Error {
    Error::InvalidBlockStructure(msg.into())
}

impl TwoCommunitySpec {
    /// Builds and validates a block description; `beta0`/`beta1` are
    /// derived from the (constant) row sums of the cross blocks.
    pub fn new(
        gamma: f64,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let n0 = a.nrows();
        let n1 = d.nrows();
        if n0 == 0 || n1 == 0 {
            return Err(block_err("communities must be non-empty"));
        }
        if !a.is_square() || !d.is_square() {
            return Err(block_err("internal blocks must be square"));
        }
        if b.shape() != (n0, n1) || c.shape() != (n1, n0) {
            return Err(block_err("cross blocks have mismatched shapes"));
        }
        let beta0 = b.row(0).sum();
        let beta1 = c.row(0).sum();
        let spec = TwoCommunitySpec {
            n0,
            n1,
            gamma,
            beta0,
            beta1,
            a,
            b,
            c,
            d,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(block_err("terminal link weight must be positive"));
        }
        for (name, m) in [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)] {
            if m.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(block_err(format!("block {name} has invalid entries")));
            }
        }
        for (name, m) in [("a", &self.a), ("d", &self.d)] {
            for i in 0..m.nrows() {
                for j in (i + 1)..m.ncols() {
                    if (m[(i, j)] - m[(j, i)]).abs() > tol::EXACT_IDENTITY {
                        return Err(block_err(format!("block {name} is not symmetric")));
                    }
                }
            }
        }
        for i in 0..self.n0 {
            for j in 0..self.n1 {
                if (self.b[(i, j)] - self.c[(j, i)]).abs() > tol::EXACT_IDENTITY {
                    return Err(block_err("cross blocks are not transposes"));
                }
            }
        }
        for i in 0..self.n0 {
            if (self.b.row(i).sum() - self.beta0).abs() > tol::EXACT_IDENTITY {
                return Err(block_err("cross block row sums are not constant"));
            }
        }
        for i in 0..self.n1 {
            if (self.c.row(i).sum() - self.beta1).abs() > tol::EXACT_IDENTITY {
                return Err(block_err("cross block row sums are not constant"));
            }
        }
        if !(self.beta0 > 0.0) || !(self.beta1 > 0.0) {
            return Err(block_err("cross weights must be positive"));
        }
        Ok(())
    }

    /// Total node count of the built graph.
    pub fn total_nodes(&self) -> usize {
        self.n0 + self.n1 + 2
    }

    /// Node id of terminal 0.
    pub fn terminal0(&self) -> usize {
        0
    }

    /// Node id of terminal 1.
    pub fn terminal1(&self) -> usize {
        self.n0 + self.n1 + 1
    }

    /// Node ids of community 0.
    pub fn community0(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n0
    }

    /// Node ids of community 1.
    pub fn community1(&self) -> std::ops::RangeInclusive<usize> {
        self.n0 + 1..=self.n0 + self.n1
    }
}

/// Assembles the graph described by a [`TwoCommunitySpec`]: terminals
/// are singleton self-loop sinks, community nodes carry a directed
/// weight-`gamma` link to their terminal, and the interior blocks are
/// laid in as given.
pub fn build_two_community(spec: &TwoCommunitySpec) -> Result<WeightedDigraph> {
    spec.validate()?;
    let n = spec.total_nodes();
    let mut w = DMatrix::<f64>::zeros(n, n);
    w[(0, 0)] = spec.gamma;
    w[(n - 1, n - 1)] = spec.gamma;
    for i in 0..spec.n0 {
        let row = 1 + i;
        w[(row, 0)] = spec.gamma;
        for j in 0..spec.n0 {
            w[(row, 1 + j)] = spec.a[(i, j)];
        }
        for j in 0..spec.n1 {
            w[(row, 1 + spec.n0 + j)] = spec.b[(i, j)];
        }
    }
    for i in 0..spec.n1 {
        let row = 1 + spec.n0 + i;
        w[(row, n - 1)] = spec.gamma;
        for j in 0..spec.n0 {
            w[(row, 1 + j)] = spec.c[(i, j)];
        }
        for j in 0..spec.n1 {
            w[(row, 1 + spec.n0 + j)] = spec.d[(i, j)];
        }
    }
    WeightedDigraph::from_dense(&w)
}

/// Arithmetic means of the equilibrium over the two communities.
pub fn community_means(x_star: &DVector<f64>, spec: &TwoCommunitySpec) -> (f64, f64) {
    assert_eq!(x_star.len(), spec.total_nodes(), "state has wrong dimension");
    let y0 = spec.community0().map(|v| x_star[v]).sum::<f64>() / spec.n0 as f64;
    let y1 = spec.community1().map(|v| x_star[v]).sum::<f64>() / spec.n1 as f64;
    (y0, y1)
}

// ---------------------------------------------------------------------------
// Closed-form mean bounds
// ---------------------------------------------------------------------------

/// Closed-form bounds: per-community deviation bounds
/// `(1 + n_h/n_{1−h} + γ/β_h)⁻¹` and the mean-gap bound
/// `(1 + β₀/γ + β₁/γ)⁻¹`.
pub fn mean_bound_values(spec: &TwoCommunitySpec) -> ([f64; 2], f64) {
    let (n0, n1) = (spec.n0 as f64, spec.n1 as f64);
    let bound_h = [
        1.0 / (1.0 + n0 / n1 + spec.gamma / spec.beta0),
        1.0 / (1.0 + n1 / n0 + spec.gamma / spec.beta1),
    ];
    let gap = 1.0 / (1.0 + spec.beta0 / spec.gamma + spec.beta1 / spec.gamma);
    (bound_h, gap)
}

/// Community-mean bounds evaluated against the solved equilibrium with
/// terminal values 0 and 1.
#[derive(Debug, Clone, Serialize)]
pub struct MeanBounds {
    /// Bounds on `|h − y_h|` for `h = 0, 1`.
    pub bound_h: [f64; 2],
    /// Bound on `y1 − y0`.
    pub gap_bound: f64,
    pub y0: f64,
    pub y1: f64,
    /// All three inequalities hold for the solved means.
    pub satisfied: bool,
}

/// Builds the graph, solves the equilibrium with terminal values 0 and
/// 1, and evaluates the closed-form mean bounds against it.
pub fn community_mean_bounds(spec: &TwoCommunitySpec) -> Result<MeanBounds> {
    let g = build_two_community(spec)?;
    let cond = condense(&g);
    let dm = DerivedMatrices::new(&g, 0.5)?;
    let h = influence_matrix(&cond, &dm, InfluenceMethod::BlockSolve)?.h;
    let x = &h * DVector::from_vec(vec![0.0, 1.0]);
    let (y0, y1) = community_means(&x, spec);
    let (bound_h, gap_bound) = mean_bound_values(spec);
    let satisfied = y0.abs() <= bound_h[0] + tol::SOLVED
        && (1.0 - y1).abs() <= bound_h[1] + tol::SOLVED
        && (y1 - y0) <= gap_bound + tol::SOLVED;
    Ok(MeanBounds {
        bound_h,
        gap_bound,
        y0,
        y1,
        satisfied,
    })
}

// ---------------------------------------------------------------------------
// Band-fraction metrics
// ---------------------------------------------------------------------------

/// Concentration metrics of an equilibrium at a fixed band width.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeMetrics {
    pub epsilon: f64,
    /// Largest fraction of nodes any single open band of radius
    /// `epsilon` can capture.
    pub homog_fraction: f64,
    /// Fraction of nodes within `epsilon` of some sink value.
    pub polar_fraction: f64,
}

/// Computes the band-fraction metrics of a state.
///
/// The best-center fraction is found exactly: sort the values, then for
/// each value count how many successors lie within a window of width
/// `2·epsilon` — sliding the open band's edge toward a sorted value
/// attains the supremum over all centers.
pub fn regime_metrics(
    x_star: &DVector<f64>,
    xbar: &DVector<f64>,
    epsilon: f64,
) -> RegimeMetrics {
    assert!(epsilon > 0.0, "band width must be positive");
    let n = x_star.len();
    let mut sorted: Vec<f64> = x_star.iter().copied().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite states"));

    let mut best = 0usize;
    let mut hi = 0usize;
    for lo in 0..n {
        if hi < lo {
            hi = lo;
        }
        while hi < n && sorted[hi] - sorted[lo] < 2.0 * epsilon {
            hi += 1;
        }
        best = best.max(hi - lo);
    }

    let polar = x_star
        .iter()
        .filter(|&&v| xbar.iter().any(|&s| (v - s).abs() < epsilon))
        .count();

    RegimeMetrics {
        epsilon,
        homog_fraction: best as f64 / n as f64,
        polar_fraction: polar as f64 / n as f64,
    }
}

// ---------------------------------------------------------------------------
// Concentration bound on the symmetrized companion graph
// ---------------------------------------------------------------------------

/// `ψ(y) = y · ln(e²/y)`, continuously extended by `ψ(0) = 0`.
pub fn psi(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        y * (2.0 - y.ln())
    }
}

/// Result of the mixing-based concentration check.
#[derive(Debug, Clone, Serialize)]
pub struct FluidityBound {
    /// Right side of the concentration inequality.
    pub bound: f64,
    /// `τ̃ · π̃_S`: slower mixing or heavier boundary mass both raise it.
    pub fluidity: f64,
    /// Fraction of nodes at least `epsilon` away from the weighted
    /// center.
    pub empirical_fraction: f64,
    /// `empirical_fraction ≤ bound`.
    pub holds: bool,
    /// Mixing time of the lazy walk on the companion graph.
    pub tilde_tau: usize,
    /// Aggregate companion-centrality mass of the sink nodes.
    pub tilde_pi_s: f64,
    /// Smallest companion-centrality entry.
    pub tilde_pi_star: f64,
    /// Largest gap between two sink values.
    pub delta: f64,
    /// The weighted center `π̃′x` the fractions are measured against.
    pub center: f64,
}

/// Evaluates the concentration bound: builds the symmetrized companion
/// graph, takes its centrality `π̃` and lazy mixing time `τ̃`, and
/// compares the fraction of nodes at least `epsilon` from the weighted
/// center `π̃′x` against `Δ/(ε·n·π̃_*) · ψ(τ̃·π̃_S)`.
pub fn concentration_bound(
    g: &WeightedDigraph,
    cond: &Condensation,
    xbar: &DVector<f64>,
    epsilon: f64,
) -> Result<FluidityBound> {
    assert!(epsilon > 0.0, "band width must be positive");
    assert_eq!(xbar.len(), cond.sink_count(), "one value per sink");
    let n = g.n();
    if n == 1 {
        return Ok(FluidityBound {
            bound: 0.0,
            fluidity: 0.0,
            empirical_fraction: 0.0,
            holds: true,
            tilde_tau: 0,
            tilde_pi_s: 1.0,
            tilde_pi_star: 1.0,
            delta: 0.0,
            center: xbar[0],
        });
    }

    let tilde = crate::generators::modified_tilde_graph(g, cond);
    if !is_connected(&tilde) {
        return Err(Error::ModifiedGraphDisconnected);
    }
    let dm_tilde = DerivedMatrices::new(&tilde, 0.5)?;
    let pi = centrality(&dm_tilde)?;
    let tau = mixing_time(&dm_tilde, &pi)?;
    let pi_s: f64 = cond.sink_nodes_flat().iter().map(|&v| pi[v]).sum();
    let pi_star = pi.min();

    let dm = DerivedMatrices::new(g, 0.5)?;
    let h = influence_matrix(cond, &dm, InfluenceMethod::BlockSolve)?.h;
    let x = &h * xbar;
    let delta = xbar.max() - xbar.min();
    let center = pi.dot(&x);
    let empirical = x.iter().filter(|&&v| (v - center).abs() >= epsilon).count() as f64
        / n as f64;

    let fluidity = tau as f64 * pi_s;
    let bound = delta / (epsilon * n as f64 * pi_star) * psi(fluidity);
    Ok(FluidityBound {
        bound,
        fluidity,
        empirical_fraction: empirical,
        holds: empirical <= bound + tol::EXACT_IDENTITY,
        tilde_tau: tau,
        tilde_pi_s: pi_s,
        tilde_pi_star: pi_star,
        delta,
        center,
    })
}

// ---------------------------------------------------------------------------
// Conservation identity
// ---------------------------------------------------------------------------

/// The three expressions that must agree at a two-community equilibrium,
/// plus the series-law floor on the terminal-to-terminal resistance.
#[derive(Debug, Clone, Serialize)]
pub struct ConservationCheck {
    /// Effective resistance between the two terminals (attachment links
    /// made bidirectional).
    pub resistance: f64,
    /// `1/(γn₀) + 1/(n₀β₀) + 1/(γn₁)`: what merging each community into
    /// one node leaves of the resistance.
    pub lower_bound: f64,
    /// `γ Σ_{community 0} x_i`: current absorbed by terminal 0.
    pub terminal_outflow: f64,
    /// `Σ W_ij (x_j − x_i)` over cross-community pairs: current over
    /// the cut.
    pub cross_cut_flow: f64,
    /// `γ Σ_{community 1} (1 − x_j)`: current injected by terminal 1.
    pub terminal_inflow: f64,
    /// The three currents agree with `1/R` within `1e−8`, and `R` is at
    /// or above the floor.
    pub holds: bool,
}

/// Verifies current conservation on a solved two-community equilibrium
/// with terminal values 0 and 1.
pub fn conservation_identity_check(
    g: &WeightedDigraph,
    x_star: &DVector<f64>,
    spec: &TwoCommunitySpec,
) -> Result<ConservationCheck> {
    spec.validate()?;
    let n = spec.total_nodes();
    assert_eq!(g.n(), n, "graph does not match the block description");
    assert_eq!(x_star.len(), n, "state has wrong dimension");

    // The interior must be symmetric for the current interpretation;
    // interior connectivity is not needed — the terminals may be the
    // only thing holding the circuit together.
    for i in 1..n - 1 {
        for &(j, w) in g.out_edges(i) {
            if (1..n - 1).contains(&j) && (w - g.weight(j, i)).abs() > tol::EXACT_IDENTITY {
                return Err(Error::NotUndirected {
                    i: i.min(j),
                    j: i.max(j),
                });
            }
        }
    }

    let (glued, map) = electrical::glue(g, &[vec![0], vec![n - 1]])?;
    let resistance = electrical::effective_resistance(&glued, &[map[0]], &[map[n - 1]])?;

    let gamma = spec.gamma;
    let terminal_outflow: f64 = spec.community0().map(|v| gamma * x_star[v]).sum();
    let terminal_inflow: f64 = spec.community1().map(|v| gamma * (1.0 - x_star[v])).sum();
    let mut cross_cut_flow = 0.0;
    for i in spec.community0() {
        for &(j, w) in g.out_edges(i) {
            if spec.community1().contains(&j) {
                cross_cut_flow += w * (x_star[j] - x_star[i]);
            }
        }
    }

    let (n0, n1) = (spec.n0 as f64, spec.n1 as f64);
    let lower_bound = 1.0 / (gamma * n0) + 1.0 / (n0 * spec.beta0) + 1.0 / (gamma * n1);

    let target = 1.0 / resistance;
    let holds = [terminal_outflow, cross_cut_flow, terminal_inflow]
        .iter()
        .all(|flow| (flow - target).abs() <= 1e-8)
        && resistance >= lower_bound - tol::SOLVED;
    Ok(ConservationCheck {
        resistance,
        lower_bound,
        terminal_outflow,
        cross_cut_flow,
        terminal_inflow,
        holds,
    })
}

// ---------------------------------------------------------------------------
// Parameter sweep
// ---------------------------------------------------------------------------

/// Grid of matched-communities instances to analyze.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Community sizes (`m`).
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Density constant for the community graphs.
    pub omega: f64,
    /// Band width for the fraction metrics.
    pub epsilon: f64,
}

/// One analyzed instance of the sweep grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub gamma: f64,
    pub beta: f64,
    pub n0: usize,
    pub n1: usize,
    pub y0: f64,
    pub y1: f64,
    pub bound_h0: f64,
    pub bound_h1: f64,
    pub gap_bound: f64,
    pub polar_frac: f64,
    pub homog_frac: f64,
    pub fluidity: f64,
    pub conc_bound: f64,
}

/// Analyzes every grid point (γ → β → size → seed order, parallelized)
/// and returns the records in grid order.
pub fn run_matched_er_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let mut grid = Vec::new();
    for &gamma in &cfg.gammas {
        for &beta in &cfg.betas {
            for &m in &cfg.sizes {
                for &seed in &cfg.seeds {
                    grid.push((gamma, beta, m, seed));
                }
            }
        }
    }
    grid.par_iter()
        .map(|&(gamma, beta, m, seed)| {
            let mc = crate::generators::matched_communities(m, cfg.omega, beta, gamma, seed)?;
            let cond = condense(&mc.graph);
            let dm = DerivedMatrices::new(&mc.graph, 0.5)?;
            let h = influence_matrix(&cond, &dm, InfluenceMethod::BlockSolve)?.h;
            let xbar = DVector::from_vec(vec![0.0, 1.0]);
            let x = &h * &xbar;
            let (y0, y1) = community_means(&x, &mc.spec);
            let (bound_h, gap_bound) = mean_bound_values(&mc.spec);
            let metrics = regime_metrics(&x, &xbar, cfg.epsilon);
            let t4 = concentration_bound(&mc.graph, &cond, &xbar, cfg.epsilon)?;
            Ok(SweepRecord {
                gamma,
                beta,
                n0: mc.spec.n0,
                n1: mc.spec.n1,
                y0,
                y1,
                bound_h0: bound_h[0],
                bound_h1: bound_h[1],
                gap_bound,
                polar_frac: metrics.polar_fraction,
                homog_frac: metrics.homog_fraction,
                fluidity: t4.fluidity,
                conc_bound: t4.bound,
            })
        })
        .collect()
}

/// Renders sweep records as CSV.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(
        "gamma,beta,n0,n1,y0,y1,bound_h0,bound_h1,gap_bound,polar_frac,homog_frac,fluidity,conc_bound\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.gamma,
            r.beta,
            r.n0,
            r.n1,
            r.y0,
            r.y1,
            r.bound_h0,
            r.bound_h1,
            r.gap_bound,
            r.polar_frac,
            r.homog_frac,
            r.fluidity,
            r.conc_bound
        ));
    }
    out
}
