//! Strongly connected components, condensation and sink detection.
//!
//! The condensation of a digraph contracts each strongly connected
//! component to a single vertex, producing a DAG. Components with no
//! outgoing edges are *sinks*: once the averaging dynamics enters one it
//! never leaves, so sinks carry the asymptotic behaviour of the whole
//! system. Everything outside the sinks is the *regular* set `R`.
//!
//! Components are numbered in ascending order of their smallest node id,
//! which fixes a deterministic column order for sink-indexed quantities
//! downstream (influence matrices, sink averages).

use crate::graph::WeightedDigraph;
use serde_json::json;

/// The condensation of a digraph into strongly connected components.
#[derive(Debug, Clone)]
pub struct Condensation {
    components: Vec<Vec<usize>>,
    comp_of: Vec<usize>,
    reaches: Vec<Vec<bool>>,
    sinks: Vec<usize>,
    node_to_sink: Vec<Option<usize>>,
    regular: Vec<usize>,
}

/// Computes the strongly connected components of `graph` (iterative
/// Tarjan), their reachability order, and the sink/regular partition.
pub fn condense(graph: &WeightedDigraph) -> Condensation {
    let n = graph.n();
    const UNSET: usize = usize::MAX;

    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS stack of (node, next out-edge position) frames.
    let mut work: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        work.push((root, 0));

        while let Some(frame) = work.last_mut() {
            let v = frame.0;
            let edges = graph.out_edges(v);
            if frame.1 < edges.len() {
                let next = edges[frame.1].0;
                frame.1 += 1;
                if index[next] == UNSET {
                    index[next] = counter;
                    low[next] = counter;
                    counter += 1;
                    stack.push(next);
                    on_stack[next] = true;
                    work.push((next, 0));
                } else if on_stack[next] {
                    low[v] = low[v].min(index[next]);
                }
            } else {
                work.pop();
                if let Some(parent) = work.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let u = stack.pop().expect("tarjan stack underflow");
                        on_stack[u] = false;
                        comp.push(u);
                        if u == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }

    components.sort_unstable_by_key(|c| c[0]);
    let nc = components.len();
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }

    // Component DAG adjacency, deduplicated.
    let mut dag: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (i, j, _) in graph.edges() {
        let (a, b) = (comp_of[i], comp_of[j]);
        if a != b {
            dag[a].push(b);
        }
    }
    for row in &mut dag {
        row.sort_unstable();
        row.dedup();
    }

    // Reflexive transitive closure by DFS from each component.
    let mut reaches = vec![vec![false; nc]; nc];
    for start in 0..nc {
        let mut todo = vec![start];
        reaches[start][start] = true;
        while let Some(c) = todo.pop() {
            for &d in &dag[c] {
                if !reaches[start][d] {
                    reaches[start][d] = true;
                    todo.push(d);
                }
            }
        }
    }

    let sinks: Vec<usize> = (0..nc).filter(|&c| dag[c].is_empty()).collect();
    let mut node_to_sink = vec![None; n];
    for (k, &c) in sinks.iter().enumerate() {
        for &v in &components[c] {
            node_to_sink[v] = Some(k);
        }
    }
    let regular: Vec<usize> = (0..n).filter(|&v| node_to_sink[v].is_none()).collect();

    Condensation {
        components,
        comp_of,
        reaches,
        sinks,
        node_to_sink,
        regular,
    }
}

/// Whether the graph is strongly connected (exactly one component).
///
/// The empty graph is vacuously connected.
pub fn is_connected(graph: &WeightedDigraph) -> bool {
    graph.n() == 0 || condense(graph).components.len() == 1
}

impl Condensation {
    /// All components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Component index of a node.
    pub fn component_of(&self, node: usize) -> usize {
        self.comp_of[node]
    }

    /// Whether some path leads from component `from` into component `to`
    /// (reflexively true for `from == to`).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reaches[from][to]
    }

    /// Indices (into [`Self::components`]) of the sink components,
    /// ascending.
    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    /// Number of sink components.
    pub fn sink_count(&self) -> usize {
        self.sinks.len()
    }

    /// Nodes of the `k`-th sink component (`k` indexes [`Self::sinks`]).
    pub fn sink_nodes(&self, k: usize) -> &[usize] {
        &self.components[self.sinks[k]]
    }

    /// Position of `node`'s component in the sink list, or `None` for a
    /// regular node.
    pub fn sink_index_of(&self, node: usize) -> Option<usize> {
        self.node_to_sink[node]
    }

    /// Nodes outside every sink component, ascending.
    pub fn regular(&self) -> &[usize] {
        &self.regular
    }

    /// Nodes in sink components, ascending.
    pub fn sink_nodes_flat(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .sinks
            .iter()
            .flat_map(|&c| self.components[c].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Singleton sink components: nodes that keep their own value forever.
    pub fn stubborn_nodes(&self) -> Vec<usize> {
        self.sinks
            .iter()
            .filter(|&&c| self.components[c].len() == 1)
            .map(|&c| self.components[c][0])
            .collect()
    }

    /// JSON description: component node lists, sink component indices and
    /// the regular node set.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "components": self.components,
            "sinks": self.sinks,
            "regular": self.regular,
        })
    }
}
