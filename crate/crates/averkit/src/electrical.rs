//! The electrical-network view of averaging equilibria.
//!
//! When the restriction of the graph to its regular nodes is symmetric
//! and connected, the equilibrium can be read as a resistor network:
//! equilibrium values are voltages, `f_ij = W_ij (x_i − x_j)` are branch
//! currents obeying a node conservation law, and boundary (sink) nodes
//! act as terminals. This module solves the associated Dirichlet
//! problems, computes effective resistances three ways (direct solve,
//! unit-flow duality, Green matrix), reconstructs influence matrices from
//! resistance differences, and checks monotonicity of resistance under
//! graph surgery.

use crate::components::{condense, Condensation};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Preconditions
// ---------------------------------------------------------------------------

/// Verifies the structural gate for the electrical interpretation: the
/// weight matrix restricted to regular×regular pairs is symmetric, and
/// the regular restriction is connected. Sets with at most one regular
/// node pass vacuously.
pub fn check_undirected_restriction(g: &WeightedDigraph, cond: &Condensation) -> Result<()> {
    let regular = cond.regular();
    for &i in regular {
        for &(j, w) in g.out_edges(i) {
            if cond.sink_index_of(j).is_none() {
                let back = g.weight(j, i);
                if (w - back).abs() > tol::EXACT_IDENTITY {
                    return Err(Error::NotUndirected {
                        i: i.min(j),
                        j: i.max(j),
                    });
                }
            }
        }
    }
    if regular.len() > 1 {
        let sub = g.induced(regular);
        if !crate::components::is_connected(&sub) {
            return Err(Error::Disconnected);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

/// Merges each node group into a single node.
///
/// Parallel edges created by a merge have their weights summed; edges
/// internal to a multi-node group vanish (a singleton group keeps its
/// self-loop). Links touching a merged node are mirrored so the merged
/// node sees symmetric weights — directed attachments become undirected,
/// already-symmetric pairs are unchanged.
///
/// Returns the merged graph and the old-id → new-id mapping.
pub fn glue(
    g: &WeightedDigraph,
    groups: &[Vec<usize>],
) -> Result<(WeightedDigraph, Vec<usize>)> {
    let n = g.n();
    let mut group_of = vec![usize::MAX; n];
    for (gi, group) in groups.iter().enumerate() {
        if group.is_empty() {
            return Err(Error::BadNodeSets);
        }
        for &v in group {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if group_of[v] != usize::MAX {
                return Err(Error::OverlappingGroups { node: v });
            }
            group_of[v] = gi;
        }
    }

    // Each node's representative: the smallest member of its group.
    let mut rep = vec![0usize; n];
    for v in 0..n {
        rep[v] = if group_of[v] == usize::MAX {
            v
        } else {
            *groups[group_of[v]].iter().min().expect("non-empty group")
        };
    }
    let mut reps: Vec<usize> = (0..n).map(|v| rep[v]).collect();
    reps.sort_unstable();
    reps.dedup();
    let new_n = reps.len();
    let mut map = vec![0usize; n];
    for v in 0..n {
        map[v] = reps.binary_search(&rep[v]).expect("representative present");
    }

    let mut merged_node = vec![false; new_n];
    for group in groups {
        if group.len() > 1 {
            merged_node[map[group[0]]] = true;
        }
    }
    // Singleton groups are merged nodes too for mirroring purposes, but
    // they keep their self-loop below.
    let mut mirror_node = merged_node.clone();
    for group in groups {
        mirror_node[map[group[0]]] = true;
    }

    let mut w = DMatrix::<f64>::zeros(new_n, new_n);
    for (i, j, weight) in g.edges() {
        let (a, b) = (map[i], map[j]);
        if a == b {
            // Internal to a merged group: vanishes, except a plain
            // self-loop on a node that was not actually merged.
            if i == j && !merged_node[a] {
                w[(a, a)] += weight;
            }
            continue;
        }
        w[(a, b)] += weight;
    }
    for u in 0..new_n {
        if !mirror_node[u] {
            continue;
        }
        for v in 0..new_n {
            if v == u {
                continue;
            }
            let m = w[(u, v)].max(w[(v, u)]);
            w[(u, v)] = m;
            w[(v, u)] = m;
        }
    }
    Ok((WeightedDigraph::from_dense(&w)?, map))
}

// ---------------------------------------------------------------------------
// Dirichlet problems and effective resistance
// ---------------------------------------------------------------------------

/// Solution of the unit-voltage Dirichlet problem between two terminal
/// sets of an undirected graph.
#[derive(Debug, Clone)]
pub struct VoltageSolution {
    /// Node potentials; 1 on the source set, 0 on the target set.
    pub voltages: DVector<f64>,
    /// Branch currents `f_ij = W_ij (y_i − y_j)` on the weight support.
    pub flows: DMatrix<f64>,
    /// Effective resistance between the two sets.
    pub resistance: f64,
    /// Dissipated power `½ Σ_ij W_ij (y_i − y_j)²`.
    pub energy: f64,
    /// Source terminal set.
    pub sources: Vec<usize>,
    /// Target terminal set.
    pub targets: Vec<usize>,
}

fn check_terminal_sets(n: usize, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::BadNodeSets);
    }
    for &v in a.iter().chain(b) {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::BadNodeSets);
    }
    Ok(())
}

/// Solves the Dirichlet problem `y ≡ 1` on `a`, `y ≡ 0` on `b`,
/// `(L y)_i = 0` elsewhere, on an undirected graph.
///
/// Both terminal sets must lie in the same connected part of the graph;
/// spectator components (if any) are held at potential 0 and carry no
/// current.
pub fn voltage_solution(
    g: &WeightedDigraph,
    a: &[usize],
    b: &[usize],
) -> Result<VoltageSolution> {
    let n = g.n();
    check_terminal_sets(n, a, b)?;
    if let Some((i, j)) = g.asymmetric_pair(tol::EXACT_IDENTITY) {
        return Err(Error::NotUndirected { i, j });
    }

    // All terminals must share one connected part.
    let cond = condense(g);
    let home = cond.component_of(a[0]);
    if a.iter().chain(b).any(|&v| cond.component_of(v) != home) {
        return Err(Error::Disconnected);
    }
    let active: Vec<usize> = cond.components()[home].clone();
    let local_of = {
        let mut m = vec![usize::MAX; n];
        for (k, &v) in active.iter().enumerate() {
            m[v] = k;
        }
        m
    };
    let nn = active.len();

    let mut is_a = vec![false; n];
    for &v in a {
        is_a[v] = true;
    }
    let mut boundary_value = vec![None::<f64>; n];
    for &v in a {
        boundary_value[v] = Some(1.0);
    }
    for &v in b {
        boundary_value[v] = Some(0.0);
    }

    let mut mat = DMatrix::<f64>::zeros(nn, nn);
    let mut rhs = DVector::<f64>::zeros(nn);
    for (li, &v) in active.iter().enumerate() {
        if let Some(val) = boundary_value[v] {
            mat[(li, li)] = 1.0;
            rhs[li] = val;
        } else {
            for &(j, wij) in g.out_edges(v) {
                if j == v {
                    continue; // self-loops cancel in the Laplacian
                }
                mat[(li, li)] += wij;
                mat[(li, local_of[j])] -= wij;
            }
        }
    }
    let y_local = mat.lu().solve(&rhs).ok_or(Error::SingularSystem)?;

    let mut voltages = DVector::<f64>::zeros(n);
    for (li, &v) in active.iter().enumerate() {
        voltages[v] = y_local[li];
    }

    let mut flows = DMatrix::<f64>::zeros(n, n);
    let mut energy = 0.0;
    let mut outflow = 0.0;
    for (i, j, wij) in g.edges() {
        if i == j {
            continue;
        }
        let f = wij * (voltages[i] - voltages[j]);
        flows[(i, j)] = f;
        energy += 0.5 * wij * (voltages[i] - voltages[j]).powi(2);
        if is_a[i] && !is_a[j] {
            outflow += f;
        }
    }
    if outflow <= 0.0 {
        // A positive unit-voltage drop always pushes current out of the
        // source set of a connected network.
        return Err(Error::SingularSystem);
    }
    Ok(VoltageSolution {
        voltages,
        flows,
        resistance: 1.0 / outflow,
        energy,
        sources: a.to_vec(),
        targets: b.to_vec(),
    })
}

/// Effective resistance between two node sets of an undirected graph.
pub fn effective_resistance(g: &WeightedDigraph, a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(voltage_solution(g, a, b)?.resistance)
}

// ---------------------------------------------------------------------------
// Thompson duality
// ---------------------------------------------------------------------------

/// The optimal unit flow from `a` to `b`: `θ_ij = W_ij (y_i − y_j) · R`,
/// the voltage-problem current scaled to push exactly one unit across
/// every cut separating the terminal sets.
pub fn thompson_flow(g: &WeightedDigraph, a: &[usize], b: &[usize]) -> Result<DMatrix<f64>> {
    let sol = voltage_solution(g, a, b)?;
    Ok(sol.flows * sol.resistance)
}

/// Dissipation `½ Σ_ij θ_ij² / W_ij` of a flow over the weight support:
/// the dual objective whose minimum over unit flows equals the effective
/// resistance.
pub fn flow_energy(g: &WeightedDigraph, theta: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for (i, j, wij) in g.edges() {
        if i != j {
            total += 0.5 * theta[(i, j)].powi(2) / wij;
        }
    }
    total
}

/// Net flow across the cut `(u, V∖u)`.
pub fn cut_flow(theta: &DMatrix<f64>, u: &[usize]) -> f64 {
    let n = theta.nrows();
    let mut in_u = vec![false; n];
    for &v in u {
        in_u[v] = true;
    }
    let mut total = 0.0;
    for i in 0..n {
        if !in_u[i] {
            continue;
        }
        for j in 0..n {
            if !in_u[j] {
                total += theta[(i, j)];
            }
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Green matrix
// ---------------------------------------------------------------------------

/// Spectral pseudo-inverse of a connected undirected Laplacian:
/// `G = Σ_{l≥2} λ_l⁻¹ φ_l φ_l′` over the non-null eigenpairs.
#[derive(Debug, Clone)]
pub struct GreenMatrix {
    /// The matrix `G` itself.
    pub matrix: DMatrix<f64>,
    /// Non-null Laplacian eigenvalues, ascending.
    pub eigenvalues: DVector<f64>,
    /// Matching orthonormal eigenvectors (columns).
    pub eigenvectors: DMatrix<f64>,
}

/// Computes the Green matrix of an undirected connected graph.
///
/// Fails with [`Error::IllConditioned`] if a second eigenvalue falls
/// below [`tol::EIGENVALUE_CUTOFF`] — the numerical signature of an
/// effectively disconnected graph.
pub fn green_matrix(g: &WeightedDigraph) -> Result<GreenMatrix> {
    let n = g.n();
    if let Some((i, j)) = g.asymmetric_pair(tol::EXACT_IDENTITY) {
        return Err(Error::NotUndirected { i, j });
    }
    if !crate::components::is_connected(g) {
        return Err(Error::Disconnected);
    }

    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (i, j, wij) in g.edges() {
        if i != j {
            lap[(i, i)] += wij;
            lap[(i, j)] -= wij;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x]
            .partial_cmp(&eig.eigenvalues[y])
            .expect("finite eigenvalues")
    });

    // order[0] is the structural null eigenvalue; the rest must be
    // bounded away from zero.
    if n > 1 {
        let lambda2 = eig.eigenvalues[order[1]];
        if lambda2 < tol::EIGENVALUE_CUTOFF {
            return Err(Error::IllConditioned { eigenvalue: lambda2 });
        }
    }

    let m = n.saturating_sub(1);
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    let mut eigenvalues = DVector::<f64>::zeros(m);
    let mut eigenvectors = DMatrix::<f64>::zeros(n, m);
    for (col, &idx) in order.iter().skip(1).enumerate() {
        let lambda = eig.eigenvalues[idx];
        let phi = eig.eigenvectors.column(idx);
        eigenvalues[col] = lambda;
        eigenvectors.set_column(col, &phi);
        for i in 0..n {
            for j in 0..n {
                matrix[(i, j)] += phi[i] * phi[j] / lambda;
            }
        }
    }
    Ok(GreenMatrix {
        matrix,
        eigenvalues,
        eigenvectors,
    })
}

/// Effective resistance between single nodes `h` and `j` read off the
/// Green matrix: `G_hh − 2 G_hj + G_jj`.
pub fn resistance_via_green(green: &GreenMatrix, h: usize, j: usize) -> f64 {
    green.matrix[(h, h)] - 2.0 * green.matrix[(h, j)] + green.matrix[(j, j)]
}

// ---------------------------------------------------------------------------
// Influence and equilibrium from resistances
// ---------------------------------------------------------------------------

/// Reconstructs the influence matrix from effective resistances.
///
/// For each sink `k`, both `S_k` and the union of the other sinks are
/// merged into terminals `v` and `v̄` (mirroring their attachments), and
/// `H_ik = (R_{v↔v̄} + R_{i↔v̄} − R_{i↔v}) / (2 R_{v↔v̄})`.
///
/// This route never touches the absorbing-chain solves, which makes it
/// an independent cross-check of [`crate::equilibrium::influence_matrix`].
/// Requires the undirected-restriction gate to pass.
pub fn resistance_influence_matrix(
    g: &WeightedDigraph,
    cond: &Condensation,
) -> Result<DMatrix<f64>> {
    check_undirected_restriction(g, cond)?;
    let n = g.n();
    let s = cond.sink_count();
    if s == 0 {
        return Err(Error::BadNodeSets);
    }
    if s == 1 {
        return Ok(DMatrix::from_element(n, 1, 1.0));
    }

    let columns: Result<Vec<DVector<f64>>> = (0..s)
        .into_par_iter()
        .map(|k| {
            let own: Vec<usize> = cond.sink_nodes(k).to_vec();
            let others: Vec<usize> = (0..s)
                .filter(|&kk| kk != k)
                .flat_map(|kk| cond.sink_nodes(kk).iter().copied())
                .collect();
            let (glued, map) = glue(g, &[own.clone(), others.clone()])?;
            let v = map[own[0]];
            let vbar = map[others[0]];
            let r_pair = effective_resistance(&glued, &[v], &[vbar])?;
            let mut col = DVector::<f64>::zeros(n);
            for i in 0..n {
                let img = map[i];
                let r_iv = if img == v {
                    0.0
                } else {
                    effective_resistance(&glued, &[img], &[v])?
                };
                let r_ivbar = if img == vbar {
                    0.0
                } else {
                    effective_resistance(&glued, &[img], &[vbar])?
                };
                col[i] = (r_pair + r_ivbar - r_iv) / (2.0 * r_pair);
            }
            Ok(col)
        })
        .collect();
    let columns = columns?;
    Ok(DMatrix::from_fn(n, s, |i, k| columns[k][i]))
}

/// Equilibrium reconstructed purely from resistance differences:
/// `x_i = ½ Σ_k x̄_k (1 + (R_{i↔v̄_k} − R_{i↔v_k}) / R_{v_k↔v̄_k})`.
pub fn equilibrium_via_resistances(
    g: &WeightedDigraph,
    cond: &Condensation,
    xbar: &DVector<f64>,
) -> Result<DVector<f64>> {
    assert_eq!(xbar.len(), cond.sink_count(), "one value per sink");
    let h = resistance_influence_matrix(g, cond)?;
    Ok(&h * xbar)
}

// ---------------------------------------------------------------------------
// Rayleigh monotonicity
// ---------------------------------------------------------------------------

/// A local surgery on an undirected graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModification {
    /// Insert a new symmetric edge of the given weight.
    AddEdge { i: usize, j: usize, weight: f64 },
    /// Add `delta > 0` to an existing symmetric edge.
    IncreaseWeight { i: usize, j: usize, delta: f64 },
    /// Merge nodes `i` and `j` into one.
    GluePair { i: usize, j: usize },
}

/// Outcome of a monotonicity check.
#[derive(Debug, Clone)]
pub struct RayleighCheck {
    /// Resistance before the modification.
    pub before: f64,
    /// Resistance after the modification.
    pub after: f64,
    /// `after ≤ before` within an exact-identity slack.
    pub holds: bool,
}

/// Applies `modification` and verifies that the effective resistance
/// between `a` and `b` did not increase.
pub fn check_rayleigh(
    g: &WeightedDigraph,
    a: &[usize],
    b: &[usize],
    modification: GraphModification,
) -> Result<RayleighCheck> {
    let before = effective_resistance(g, a, b)?;
    let after = match modification {
        GraphModification::AddEdge { i, j, weight } => {
            if g.weight(i, j) != 0.0 || g.weight(j, i) != 0.0 {
                return Err(Error::DuplicateEdge { src: i, dst: j });
            }
            let mut w = g.to_dense();
            w[(i, j)] = weight;
            w[(j, i)] = weight;
            effective_resistance(&WeightedDigraph::from_dense(&w)?, a, b)?
        }
        GraphModification::IncreaseWeight { i, j, delta } => {
            assert!(delta > 0.0, "weight increment must be positive");
            let mut w = g.to_dense();
            assert!(w[(i, j)] > 0.0, "weight increase requires an existing edge");
            w[(i, j)] += delta;
            w[(j, i)] += delta;
            effective_resistance(&WeightedDigraph::from_dense(&w)?, a, b)?
        }
        GraphModification::GluePair { i, j } => {
            let (glued, map) = glue(g, &[vec![i, j]])?;
            let remap = |set: &[usize]| -> Vec<usize> {
                let mut out: Vec<usize> = set.iter().map(|&v| map[v]).collect();
                out.sort_unstable();
                out.dedup();
                out
            };
            let (na, nb) = (remap(a), remap(b));
            if na.iter().any(|v| nb.contains(v)) {
                return Err(Error::BadNodeSets);
            }
            effective_resistance(&glued, &na, &nb)?
        }
    };
    Ok(RayleighCheck {
        before,
        after,
        holds: after <= before + tol::EXACT_IDENTITY,
    })
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

/// JSON-serializable description of a solved electrical problem.
#[derive(Debug, Clone, Serialize)]
pub struct ElectricalReport {
    pub voltages: Vec<f64>,
    /// Effective resistances keyed `"src_ids|dst_ids"` (comma-joined).
    pub r_eff: BTreeMap<String, f64>,
    /// Branch currents as `(i, j, flow)` triples over undirected edges
    /// with `i < j`.
    pub flows: Vec<(usize, usize, f64)>,
    /// Dissipated power of the voltage solution (`= 1/R`).
    pub primal_energy: f64,
    /// Dissipation of the optimal unit flow (`= R`).
    pub dual_energy: f64,
}

/// Formats a terminal-pair key like `"0,1|5"`.
pub fn terminal_key(a: &[usize], b: &[usize]) -> String {
    let join = |s: &[usize]| {
        s.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{}|{}", join(a), join(b))
}

impl ElectricalReport {
    /// Builds the report for one solved terminal pair.
    pub fn from_solution(g: &WeightedDigraph, sol: &VoltageSolution) -> Self {
        let theta = &sol.flows * sol.resistance;
        let mut r_eff = BTreeMap::new();
        r_eff.insert(terminal_key(&sol.sources, &sol.targets), sol.resistance);
        let mut flows = Vec::new();
        for (i, j, _) in g.edges() {
            if i < j {
                flows.push((i, j, sol.flows[(i, j)]));
            }
        }
        ElectricalReport {
            voltages: sol.voltages.iter().copied().collect(),
            r_eff,
            flows,
            primal_energy: sol.energy,
            dual_energy: flow_energy(g, &theta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Terminal nodes 0 and 3 with an undirected interior pair 1 - 2 and
    /// directed attachments into the terminals.
    fn boundary_path() -> WeightedDigraph {
        WeightedDigraph::from_edges(
            4,
            &[
                (0, 0, 1.0),
                (1, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
                (2, 3, 1.0),
                (3, 3, 1.0),
            ],
        )
        .unwrap()
    }

    fn unit_path(n: usize) -> WeightedDigraph {
        let mut edges = Vec::new();
        for i in 0..n - 1 {
            edges.push((i, i + 1, 1.0));
            edges.push((i + 1, i, 1.0));
        }
        WeightedDigraph::from_edges(n, &edges).unwrap()
    }

    fn triangle() -> WeightedDigraph {
        WeightedDigraph::from_edges(
            3,
            &[
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
                (0, 2, 1.0),
                (2, 0, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn gate_accepts_directed_attachments_to_sinks() {
        let g = boundary_path();
        let cond = condense(&g);
        assert!(check_undirected_restriction(&g, &cond).is_ok());
    }

    #[test]
    fn gate_names_the_asymmetric_regular_pair() {
        // Make the interior pair asymmetric: 1 -> 2 has weight 2.
        let g = WeightedDigraph::from_edges(
            4,
            &[
                (0, 0, 1.0),
                (1, 0, 1.0),
                (1, 2, 2.0),
                (2, 1, 1.0),
                (2, 3, 1.0),
                (3, 3, 1.0),
            ],
        )
        .unwrap();
        let cond = condense(&g);
        match check_undirected_restriction(&g, &cond) {
            Err(Error::NotUndirected { i: 1, j: 2 }) => {}
            other => panic!("expected named asymmetric pair, got {other:?}"),
        }
    }

    #[test]
    fn gate_rejects_disconnected_interior() {
        // Two interior pairs, each feeding its own terminal, no link
        // between the pairs.
        let g = WeightedDigraph::from_edges(
            6,
            &[
                (0, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
                (1, 0, 1.0),
                (3, 4, 1.0),
                (4, 3, 1.0),
                (4, 5, 1.0),
                (5, 5, 1.0),
            ],
        )
        .unwrap();
        let cond = condense(&g);
        assert!(matches!(
            check_undirected_restriction(&g, &cond),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn glue_sums_parallel_edges() {
        // Undirected star: c in the middle of a and b; merging {a, b}
        // stacks their links to c.
        let g = WeightedDigraph::from_edges(
            3,
            &[
                (0, 2, 1.0),
                (2, 0, 1.0),
                (1, 2, 2.0),
                (2, 1, 2.0),
            ],
        )
        .unwrap();
        let (merged, map) = glue(&g, &[vec![0, 1]]).unwrap();
        assert_eq!(merged.n(), 2);
        assert_eq!(map, vec![0, 0, 1]);
        assert_eq!(merged.weight(0, 1), 3.0);
        assert_eq!(merged.weight(1, 0), 3.0);
    }

    #[test]
    fn glue_singleton_keeps_undirected_graph_intact() {
        let g = triangle();
        let (merged, map) = glue(&g, &[vec![1]]).unwrap();
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(merged, g);
    }

    #[test]
    fn glue_terminals_mirrors_their_attachments() {
        let g = boundary_path();
        let (merged, map) = glue(&g, &[vec![0], vec![3]]).unwrap();
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert_eq!(merged.weight(0, 1), 1.0);
        assert_eq!(merged.weight(1, 0), 1.0);
        assert_eq!(merged.weight(3, 2), 1.0);
        assert_eq!(merged.weight(2, 3), 1.0);
        // Singleton groups keep their self-loops.
        assert_eq!(merged.weight(0, 0), 1.0);
    }

    #[test]
    fn glue_rejects_overlapping_groups() {
        let g = triangle();
        assert!(matches!(
            glue(&g, &[vec![0, 1], vec![1, 2]]),
            Err(Error::OverlappingGroups { node: 1 })
        ));
    }

    #[test]
    fn glue_drops_internal_edges() {
        let g = triangle();
        let (merged, _) = glue(&g, &[vec![0, 1]]).unwrap();
        assert_eq!(merged.n(), 2);
        assert_eq!(merged.weight(0, 0), 0.0);
        assert_eq!(merged.weight(0, 1), 2.0);
    }

    #[test]
    fn unit_path_resistance_is_edge_count() {
        let g = unit_path(4);
        let r = effective_resistance(&g, &[0], &[3]).unwrap();
        assert_abs_diff_eq!(r, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn doubling_weights_halves_resistance() {
        let g = unit_path(4);
        let mut w = g.to_dense();
        w *= 2.0;
        let doubled = WeightedDigraph::from_dense(&w).unwrap();
        let r = effective_resistance(&doubled, &[0], &[3]).unwrap();
        assert_abs_diff_eq!(r, 1.5, epsilon = 1e-12);
    }

    #[test]
    fn triangle_pair_resistance_is_parallel_law() {
        let r = effective_resistance(&triangle(), &[0], &[2]).unwrap();
        assert_abs_diff_eq!(r, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn merged_terminal_sets_act_as_single_nodes() {
        let r = effective_resistance(&triangle(), &[0, 1], &[2]).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn voltage_solution_satisfies_boundary_and_conservation() {
        let g = unit_path(4);
        let sol = voltage_solution(&g, &[0], &[3]).unwrap();
        assert_eq!(sol.voltages[0], 1.0);
        assert_eq!(sol.voltages[3], 0.0);
        // Interior node conservation.
        for i in [1usize, 2] {
            let net: f64 = (0..4).map(|j| sol.flows[(i, j)]).sum();
            assert_abs_diff_eq!(net, 0.0, epsilon = 1e-12);
        }
        // Dissipated power equals 1/R.
        assert_abs_diff_eq!(sol.energy, 1.0 / sol.resistance, epsilon = 1e-12);
    }

    #[test]
    fn disconnected_terminals_are_rejected() {
        let g = WeightedDigraph::from_edges(
            4,
            &[(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            effective_resistance(&g, &[0], &[3]),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn spectator_components_do_not_disturb_the_solve() {
        // Path 0-1-2-3 plus an unrelated pair {4, 5}.
        let mut edges = vec![
            (0, 1, 1.0),
            (1, 0, 1.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 3, 1.0),
            (3, 2, 1.0),
        ];
        edges.push((4, 5, 1.0));
        edges.push((5, 4, 1.0));
        let g = WeightedDigraph::from_edges(6, &edges).unwrap();
        let r = effective_resistance(&g, &[0], &[3]).unwrap();
        assert_abs_diff_eq!(r, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn thompson_flow_is_unit_across_every_cut() {
        let g = unit_path(4);
        let theta = thompson_flow(&g, &[0], &[3]).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(theta[(i, i + 1)], 1.0, epsilon = 1e-12);
        }
        for cut in [vec![0], vec![0, 1], vec![0, 1, 2]] {
            assert_abs_diff_eq!(cut_flow(&theta, &cut), 1.0, epsilon = 1e-12);
        }
        // Dual dissipation equals the resistance.
        assert_abs_diff_eq!(flow_energy(&g, &theta), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn triangle_current_divider() {
        let theta = thompson_flow(&triangle(), &[0], &[2]).unwrap();
        assert_abs_diff_eq!(theta[(0, 2)], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(theta[(0, 1)], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(theta[(1, 2)], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn green_matrix_of_single_edge() {
        let g = unit_path(2);
        let green = green_matrix(&g).unwrap();
        let expected = [[0.25, -0.25], [-0.25, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(green.matrix[(i, j)], expected[i][j], epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(resistance_via_green(&green, 0, 1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn green_matrix_of_triangle() {
        let green = green_matrix(&triangle()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 2.0 / 9.0 } else { -1.0 / 9.0 };
                assert_abs_diff_eq!(green.matrix[(i, j)], expected, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(resistance_via_green(&green, 0, 2), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(resistance_via_green(&green, 1, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn green_matrix_identities() {
        let g = unit_path(5);
        let green = green_matrix(&g).unwrap();
        let n = 5;
        // G·1 = 0.
        let row_sums = &green.matrix * DVector::from_element(n, 1.0);
        assert!(row_sums.amax() < 1e-10);
        // L·G = I − (1/n)·11′.
        let mut lap = DMatrix::<f64>::zeros(n, n);
        for (i, j, wij) in g.edges() {
            lap[(i, i)] += wij;
            lap[(i, j)] -= wij;
        }
        let lg = lap * &green.matrix;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 - 1.0 / n as f64 } else { -1.0 / n as f64 };
                assert_abs_diff_eq!(lg[(i, j)], want, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn near_disconnection_is_reported_as_ill_conditioned() {
        let g = WeightedDigraph::from_edges(
            4,
            &[
                (0, 1, 1.0),
                (1, 0, 1.0),
                (2, 3, 1.0),
                (3, 2, 1.0),
                (1, 2, 1e-14),
                (2, 1, 1e-14),
            ],
        )
        .unwrap();
        assert!(matches!(
            green_matrix(&g),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn resistance_reconstruction_matches_boundary_path() {
        let g = boundary_path();
        let cond = condense(&g);
        let h = resistance_influence_matrix(&g, &cond).unwrap();
        let expected = [
            [1.0, 0.0],
            [2.0 / 3.0, 1.0 / 3.0],
            [1.0 / 3.0, 2.0 / 3.0],
            [0.0, 1.0],
        ];
        for i in 0..4 {
            for k in 0..2 {
                assert_abs_diff_eq!(h[(i, k)], expected[i][k], epsilon = 1e-10);
            }
        }
        let x = equilibrium_via_resistances(&g, &cond, &DVector::from_vec(vec![0.0, 1.0]))
            .unwrap();
        let want = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (got, w) in x.iter().zip(want) {
            assert_abs_diff_eq!(*got, w, epsilon = 1e-10);
        }
    }

    #[test]
    fn equal_sink_values_give_flat_equilibrium() {
        let g = boundary_path();
        let cond = condense(&g);
        let x = equilibrium_via_resistances(&g, &cond, &DVector::from_vec(vec![0.4, 0.4]))
            .unwrap();
        for v in x.iter() {
            assert_abs_diff_eq!(*v, 0.4, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_sink_reconstruction_is_all_ones() {
        let g = WeightedDigraph::from_edges(
            3,
            &[(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0)],
        )
        .unwrap();
        let cond = condense(&g);
        let h = resistance_influence_matrix(&g, &cond).unwrap();
        assert_eq!(h.ncols(), 1);
        for i in 0..3 {
            assert_eq!(h[(i, 0)], 1.0);
        }
    }

    #[test]
    fn shortcut_edge_decreases_end_to_end_resistance() {
        let g = unit_path(4);
        let check = check_rayleigh(
            &g,
            &[0],
            &[3],
            GraphModification::AddEdge {
                i: 0,
                j: 2,
                weight: 1.0,
            },
        )
        .unwrap();
        assert!(check.holds);
        assert!(check.after < check.before);
    }

    #[test]
    fn weight_increase_never_hurts() {
        let check = check_rayleigh(
            &unit_path(4),
            &[0],
            &[3],
            GraphModification::IncreaseWeight {
                i: 1,
                j: 2,
                delta: 3.0,
            },
        )
        .unwrap();
        assert!(check.holds);
        assert!(check.after < check.before);
    }

    #[test]
    fn gluing_interior_nodes_shortens_the_path() {
        let check = check_rayleigh(
            &unit_path(4),
            &[0],
            &[3],
            GraphModification::GluePair { i: 1, j: 2 },
        )
        .unwrap();
        assert!(check.holds);
        assert_abs_diff_eq!(check.after, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectator_modification_leaves_resistance_unchanged() {
        let mut edges = vec![
            (0, 1, 1.0),
            (1, 0, 1.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 3, 1.0),
            (3, 2, 1.0),
        ];
        edges.push((4, 5, 1.0));
        edges.push((5, 4, 1.0));
        let g = WeightedDigraph::from_edges(6, &edges).unwrap();
        let check = check_rayleigh(
            &g,
            &[0],
            &[3],
            GraphModification::IncreaseWeight {
                i: 4,
                j: 5,
                delta: 10.0,
            },
        )
        .unwrap();
        assert!(check.holds);
        assert_abs_diff_eq!(check.after, check.before, epsilon = 1e-12);
    }

    #[test]
    fn report_carries_duality_pair() {
        let g = unit_path(4);
        let sol = voltage_solution(&g, &[0], &[3]).unwrap();
        let report = ElectricalReport::from_solution(&g, &sol);
        let r = *report.r_eff.get("0|3").expect("terminal pair present");
        assert_abs_diff_eq!(r, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.primal_energy, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.dual_energy, 3.0, epsilon = 1e-12);
        assert_eq!(report.flows.len(), 3);
    }
}
