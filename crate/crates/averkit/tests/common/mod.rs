//! Shared corpus builders for the integration tests.
//!
//! Every generator takes an explicit `ChaCha8Rng` so each test owns a fixed,
//! replayable instance stream; nothing here reads ambient randomness.

#![allow(dead_code)]

use std::collections::BTreeMap;

use averkit::nalgebra::{DMatrix, DVector};
use averkit::{Condensation, DerivedMatrices, WeightedDigraph};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fresh deterministic generator for one corpus index.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph with 1–4 designated absorbing nodes.
///
/// Nodes `0..s` carry only a self-loop; every other node gets one edge to a
/// strictly lower-numbered node (so every walk eventually descends into an
/// absorbing node) plus a few extra edges to arbitrary targets. The
/// condensation of the result therefore has exactly the `s` designated
/// singleton sinks and all remaining nodes regular.
pub fn random_sinked_digraph(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedDigraph {
    let n = rng.gen_range(6..=max_n);
    let s = rng.gen_range(1..=4usize.min(n - 2));
    let mut w: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for k in 0..s {
        w.insert((k, k), 1.0);
    }
    for i in s..n {
        let down = rng.gen_range(0..i);
        w.insert((i, down), rng.gen_range(0.2..2.0));
        for _ in 0..rng.gen_range(1..=3) {
            let t = rng.gen_range(0..n);
            if t != i {
                w.insert((i, t), rng.gen_range(0.2..2.0));
            }
        }
    }
    let edges: Vec<(usize, usize, f64)> = w.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    WeightedDigraph::from_edges(n, &edges).expect("corpus graph is valid")
}

/// Random instance whose regular part is undirected and connected, with 2–3
/// singleton absorbing nodes fed by one-way links.
///
/// Absorbing nodes are `0..s`; the interior `s..n` is a random spanning tree
/// plus extra symmetric edges. Each absorbing node receives at least one
/// directed edge from the interior, and a few interior nodes get more.
pub fn random_undirected_interior(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedDigraph {
    let n = rng.gen_range(8..=max_n);
    let s = rng.gen_range(2..=3);
    let mut w: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for k in 0..s {
        w.insert((k, k), 1.0);
    }
    for v in s + 1..n {
        let p = rng.gen_range(s..v);
        let weight = rng.gen_range(0.5..2.0);
        w.insert((v, p), weight);
        w.insert((p, v), weight);
    }
    for _ in 0..(n - s) / 2 {
        let a = rng.gen_range(s..n);
        let b = rng.gen_range(s..n);
        if a != b && !w.contains_key(&(a, b)) {
            let weight = rng.gen_range(0.5..2.0);
            w.insert((a, b), weight);
            w.insert((b, a), weight);
        }
    }
    for k in 0..s {
        let v = rng.gen_range(s..n);
        w.insert((v, k), rng.gen_range(0.5..2.0));
    }
    for v in s..n {
        if rng.gen_bool(0.25) {
            let k = rng.gen_range(0..s);
            w.insert((v, k), rng.gen_range(0.5..2.0));
        }
    }
    let edges: Vec<(usize, usize, f64)> = w.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    WeightedDigraph::from_edges(n, &edges).expect("corpus graph is valid")
}

/// Random connected undirected weighted graph: a uniform random spanning
/// tree skeleton plus about `n/2` extra symmetric edges.
pub fn random_connected_undirected(
    rng: &mut ChaCha8Rng,
    min_n: usize,
    max_n: usize,
) -> WeightedDigraph {
    let n = rng.gen_range(min_n..=max_n);
    let mut w: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        let weight = rng.gen_range(0.5..2.0);
        w.insert((v, p), weight);
        w.insert((p, v), weight);
    }
    for _ in 0..n / 2 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !w.contains_key(&(a, b)) {
            let weight = rng.gen_range(0.5..2.0);
            w.insert((a, b), weight);
            w.insert((b, a), weight);
        }
    }
    let edges: Vec<(usize, usize, f64)> = w.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    WeightedDigraph::from_edges(n, &edges).expect("corpus graph is valid")
}

/// Uniform random state vector in `[0, 1]^n`.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(0.0..1.0))
}

/// Relaxation estimate for an absorbing instance: the smallest power of two
/// `t` such that the regular block `Q` of the update matrix satisfies
/// `‖Q^t‖_∞ ≤ 1/e`, found by repeated squaring. The sup-norm distance to
/// equilibrium shrinks by at least `e` every `t` steps from then on, so a
/// constant multiple of the estimate drives it far below any fixed
/// tolerance.
pub fn relaxation_estimate(dm: &DerivedMatrices, cond: &Condensation) -> usize {
    let regular = cond.regular();
    if regular.is_empty() {
        return 1;
    }
    let pa = dm.p_alpha();
    let r = regular.len();
    let mut q = DMatrix::from_fn(r, r, |a, b| pa[(regular[a], regular[b])]);
    let mut steps = 1usize;
    for _ in 0..60 {
        let contraction = q
            .row_iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max);
        if contraction <= (-1.0_f64).exp() {
            return steps;
        }
        q = &q * &q;
        steps *= 2;
    }
    panic!("regular block failed to contract; instance is not absorbing");
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Median of a non-empty slice.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
