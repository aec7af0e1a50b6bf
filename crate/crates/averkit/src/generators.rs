//! Reproducible graph families used throughout the test suite and CLI:
//! Erdős–Rényi graphs, toroidal grids, and the matched two-community
//! construction, plus the symmetrized companion graph that turns an
//! absorbing system into an undirected one for mixing analysis.

use crate::components::{is_connected, Condensation};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::regimes::{build_two_community, TwoCommunitySpec};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How many fresh sub-seeds [`matched_communities`] tries before giving
/// up on drawing two connected community graphs.
pub const CONNECTIVITY_RETRY_CAP: u32 = 100;

/// Full description of a generated instance, written as a JSON sidecar
/// next to emitted edge lists so every artifact is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorConfig {
    ErdosRenyi {
        n: usize,
        c: f64,
        seed: u64,
    },
    Torus {
        d: usize,
        side: usize,
        seed: u64,
    },
    MatchedEr {
        m: usize,
        omega: f64,
        beta: f64,
        gamma: f64,
        seed: u64,
        permuted_matching: bool,
    },
}

// ---------------------------------------------------------------------------
// Erdős–Rényi
// ---------------------------------------------------------------------------

/// Samples unordered pairs `i < j` independently with probability `p`.
fn sample_pairs(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

fn undirected_unit_graph(n: usize, pairs: &[(usize, usize)]) -> WeightedDigraph {
    let mut edges = Vec::with_capacity(2 * pairs.len());
    for &(i, j) in pairs {
        edges.push((i, j, 1.0));
        edges.push((j, i, 1.0));
    }
    WeightedDigraph::from_edges(n, &edges).expect("sampled pairs are valid edges")
}

/// Draws an undirected unit-weight random graph where each pair is
/// present independently with `p = c·ln(n)/n` (clamped to `[0, 1]`).
///
/// Returns the graph together with a connectivity flag; connectivity is
/// reported, never enforced.
pub fn erdos_renyi(n: usize, c: f64, seed: u64) -> (WeightedDigraph, bool) {
    assert!(n >= 2, "need at least two nodes");
    assert!(c > 0.0, "density constant must be positive");
    let p = (c * (n as f64).ln() / n as f64).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = undirected_unit_graph(n, &sample_pairs(n, p, &mut rng));
    let connected = is_connected(&g);
    (g, connected)
}

// ---------------------------------------------------------------------------
// Torus
// ---------------------------------------------------------------------------

/// Builds the unit-weight `d`-dimensional toroidal grid with `side^d`
/// nodes; every node has degree `2d`. The construction is deterministic;
/// `_seed` is accepted only so all generators share a call shape.
pub fn torus(d: usize, side: usize, _seed: u64) -> WeightedDigraph {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(side >= 3, "side length must be at least 3");
    let n = side.pow(d as u32);
    let mut edges = Vec::with_capacity(2 * n * d);
    for id in 0..n {
        // Mixed-radix coordinates of `id`, least-significant axis first.
        let mut rem = id;
        let mut stride = 1;
        for _axis in 0..d {
            let coord = rem % side;
            rem /= side;
            let neighbor = id - coord * stride + ((coord + 1) % side) * stride;
            edges.push((id, neighbor, 1.0));
            edges.push((neighbor, id, 1.0));
            stride *= side;
        }
    }
    WeightedDigraph::from_edges(n, &edges).expect("lattice edges are valid")
}

// ---------------------------------------------------------------------------
// Matched communities
// ---------------------------------------------------------------------------

/// A generated two-community instance: the full graph, its validated
/// block description, and the bookkeeping needed to reproduce it.
#[derive(Debug, Clone)]
pub struct MatchedCommunities {
    /// The assembled graph (terminal, community 0, community 1, terminal).
    pub graph: WeightedDigraph,
    /// Block description satisfied by construction.
    pub spec: TwoCommunitySpec,
    /// `matching[i]` is the community-1 partner of community-0 node `i`.
    pub matching: Vec<usize>,
    /// Internal undirected edge counts of the two community graphs.
    pub er_edges: [usize; 2],
    /// Sub-seeds consumed before both communities came out connected.
    pub attempts: u32,
    /// Reproducible description of this instance.
    pub config: GeneratorConfig,
}

/// Generates two independent random community graphs on `m` nodes each
/// (pair probability `ω·ln(m)/m`), joins them by a perfect matching of
/// weight-`beta` undirected links, and attaches every community-`h` node
/// to terminal `h` by a directed weight-`gamma` link.
///
/// Redraws with fresh sub-seeds until both community graphs are
/// connected, up to [`CONNECTIVITY_RETRY_CAP`] attempts.
pub fn matched_communities(
    m: usize,
    omega: f64,
    beta: f64,
    gamma: f64,
    seed: u64,
) -> Result<MatchedCommunities> {
    matched_communities_opts(m, omega, beta, gamma, seed, false)
}

/// As [`matched_communities`], with an optional seed-permuted matching
/// instead of the default identity matching `i ↔ i`.
pub fn matched_communities_opts(
    m: usize,
    omega: f64,
    beta: f64,
    gamma: f64,
    seed: u64,
    permuted_matching: bool,
) -> Result<MatchedCommunities> {
    assert!(m >= 2, "communities need at least two nodes");
    assert!(omega > 1.0, "density constant must exceed 1");
    assert!(beta > 0.0 && gamma > 0.0, "link weights must be positive");
    let p = (omega * (m as f64).ln() / m as f64).clamp(0.0, 1.0);

    for attempt in 0..CONNECTIVITY_RETRY_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64 + 1);
        let pairs0 = sample_pairs(m, p, &mut rng);
        let pairs1 = sample_pairs(m, p, &mut rng);
        let mut matching: Vec<usize> = (0..m).collect();
        if permuted_matching {
            matching.shuffle(&mut rng);
        }
        if !is_connected(&undirected_unit_graph(m, &pairs0))
            || !is_connected(&undirected_unit_graph(m, &pairs1))
        {
            continue;
        }

        let mut a = DMatrix::<f64>::zeros(m, m);
        for &(i, j) in &pairs0 {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        let mut d = DMatrix::<f64>::zeros(m, m);
        for &(i, j) in &pairs1 {
            d[(i, j)] = 1.0;
            d[(j, i)] = 1.0;
        }
        let mut b = DMatrix::<f64>::zeros(m, m);
        for (i, &j) in matching.iter().enumerate() {
            b[(i, j)] = beta;
        }
        let c = b.transpose();
        let spec = TwoCommunitySpec::new(gamma, a, b, c, d)?;
        let graph = build_two_community(&spec)?;
        return Ok(MatchedCommunities {
            graph,
            spec,
            matching,
            er_edges: [pairs0.len(), pairs1.len()],
            attempts: attempt + 1,
            config: GeneratorConfig::MatchedEr {
                m,
                omega,
                beta,
                gamma,
                seed,
                permuted_matching,
            },
        });
    }
    Err(Error::ConnectivityRetriesExhausted {
        attempts: CONNECTIVITY_RETRY_CAP,
    })
}

// ---------------------------------------------------------------------------
// Symmetrized companion graph
// ---------------------------------------------------------------------------

/// Builds the undirected companion graph of an absorbing system: rows of
/// regular nodes are kept as they are, every link from a regular node
/// into a sink is mirrored back, and all weight among sink nodes
/// (self-loops included) is erased.
///
/// The result can be disconnected (e.g. when no regular node feeds a
/// sink); callers that need connectivity must check it.
pub fn modified_tilde_graph(g: &WeightedDigraph, cond: &Condensation) -> WeightedDigraph {
    let n = g.n();
    let is_sink: Vec<bool> = (0..n).map(|v| cond.sink_index_of(v).is_some()).collect();
    let mut w = DMatrix::<f64>::zeros(n, n);
    for (i, j, weight) in g.edges() {
        if is_sink[i] {
            continue; // sink rows are rebuilt from mirrors below
        }
        w[(i, j)] = weight;
        if is_sink[j] {
            w[(j, i)] = weight;
        }
    }
    WeightedDigraph::from_dense(&w).expect("mirrored weights stay nonnegative")
}

// ---------------------------------------------------------------------------
// Single-community reduction
// ---------------------------------------------------------------------------

/// A matched-communities instance reduced to one regular community: the
/// opposite terminal is removed along with the opposite community's
/// internal links, and the opposite community's nodes are frozen into
/// boundary nodes.
#[derive(Debug, Clone)]
pub struct CommunityReduction {
    /// The reduced graph (original node order, one terminal dropped).
    pub graph: WeightedDigraph,
    /// Nodes that remain regular: community `h`.
    pub regular: Vec<usize>,
    /// Boundary nodes: community `h`'s own terminal plus every node of
    /// the opposite community.
    pub stubborn: Vec<usize>,
}

/// Reduces a matched instance to community `h`'s neighborhood.
pub fn reduce_to_community(mc: &MatchedCommunities, h: usize) -> CommunityReduction {
    assert!(h < 2, "community index is 0 or 1");
    let m = mc.spec.n0;
    debug_assert_eq!(mc.spec.n0, mc.spec.n1, "matched instances are balanced");
    let n_full = mc.graph.n();
    let removed = if h == 0 { n_full - 1 } else { 0 };
    // Old id → new id; ids after the removed node shift down by one.
    let new_id = |v: usize| if v > removed { v - 1 } else { v };

    let (own_terminal, regular_old, frozen_old): (usize, Vec<usize>, Vec<usize>) = if h == 0 {
        (0, (1..=m).collect(), (m + 1..=2 * m).collect())
    } else {
        (n_full - 1, (m + 1..=2 * m).collect(), (1..=m).collect())
    };

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    edges.push((new_id(own_terminal), new_id(own_terminal), mc.graph.weight(own_terminal, own_terminal)));
    for &v in &regular_old {
        for &(dst, weight) in mc.graph.out_edges(v) {
            if dst != removed {
                edges.push((new_id(v), new_id(dst), weight));
            }
        }
    }
    for &v in &frozen_old {
        edges.push((new_id(v), new_id(v), 1.0));
    }
    let graph = WeightedDigraph::from_edges(n_full - 1, &edges)
        .expect("reduction preserves edge validity");
    let mut stubborn: Vec<usize> = frozen_old.iter().map(|&v| new_id(v)).collect();
    stubborn.push(new_id(own_terminal));
    stubborn.sort_unstable();
    CommunityReduction {
        graph,
        regular: regular_old.iter().map(|&v| new_id(v)).collect(),
        stubborn,
    }
}

/// Closed-form prediction for the aggregate boundary mass of the
/// symmetrized single-community graph: `(γ+β)m / (2(γ+β)m + 2ℓ)`, with
/// `ℓ` the internal edge count of the community that stays regular.
pub fn stubborn_mass_prediction(mc: &MatchedCommunities, h: usize) -> f64 {
    assert!(h < 2, "community index is 0 or 1");
    let m = mc.spec.n0 as f64;
    let (gamma, beta) = (mc.spec.gamma, mc.spec.beta0);
    let ell = mc.er_edges[h] as f64;
    (gamma + beta) * m / (2.0 * (gamma + beta) * m + 2.0 * ell)
}
