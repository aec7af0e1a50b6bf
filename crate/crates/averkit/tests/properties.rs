//! Cross-module invariants on randomized corpora: structural identities
//! that must hold wherever the individual pieces are combined, plus
//! determinism guarantees under different thread pools.

mod common;

use averkit::components::condense;
use averkit::dynamics::{centrality, conductance, mixing_time};
use averkit::electrical::{effective_resistance, flow_energy, thompson_flow, voltage_solution};
use averkit::equilibrium::{equilibrium_profile, influence_matrix, InfluenceMethod};
use averkit::generators::{
    erdos_renyi, matched_communities, modified_tilde_graph, reduce_to_community,
};
use averkit::nalgebra::DVector;
use averkit::regimes::{
    community_mean_bounds, regime_metrics, run_matched_er_sweep, sweep_csv, SweepConfig,
};
use averkit::DerivedMatrices;
use rand::Rng;

/// Dense random graphs mix dramatically slower than their size grows: mean
/// mixing time at n = 256 stays under twice the mean at n = 64 (a linear
/// trend would quadruple it).
#[test]
fn er_mixing_grows_sublinearly() {
    let mean_tau = |n: usize| -> f64 {
        let mut taus = Vec::new();
        let mut seed = 0u64;
        while taus.len() < 8 {
            let (g, connected) = erdos_renyi(n, 2.0, 10_000 + seed);
            seed += 1;
            if !connected {
                continue;
            }
            let dm = DerivedMatrices::new(&g, 0.5).unwrap();
            let pi = centrality(&dm).unwrap();
            taus.push(mixing_time(&dm, &pi).unwrap() as f64);
        }
        taus.iter().sum::<f64>() / taus.len() as f64
    };
    let small = mean_tau(64);
    let large = mean_tau(256);
    assert!(
        large < 2.0 * small,
        "mixing grew too fast: mean tau {small} at n=64, {large} at n=256"
    );
}

/// The minimum voltage energy and the minimum unit-flow dissipation are
/// exact reciprocals: their product is one.
#[test]
fn primal_dual_product_is_unity() {
    for i in 0..20u64 {
        let mut rng = common::rng(11_000 + i);
        let g = common::random_connected_undirected(&mut rng, 4, 40);
        let n = g.n();
        let a = rng.gen_range(0..n);
        let b = loop {
            let b = rng.gen_range(0..n);
            if b != a {
                break b;
            }
        };
        let sol = voltage_solution(&g, &[a], &[b]).unwrap();
        let theta = thompson_flow(&g, &[a], &[b]).unwrap();
        let product = sol.energy * flow_energy(&g, &theta);
        assert!(
            (product - 1.0).abs() < 1e-8,
            "graph {i}: energy product {product}"
        );
    }
}

/// Computed equilibria satisfy the balance equations exactly: the weighted
/// Laplacian applied to the equilibrium vanishes on every regular row.
#[test]
fn equilibria_satisfy_balance_equations() {
    for i in 0..20u64 {
        let mut rng = common::rng(12_000 + i);
        let g = common::random_undirected_interior(&mut rng, 40);
        let cond = condense(&g);
        let dm = DerivedMatrices::new(&g, 0.5).unwrap();
        let x0 = common::random_state(&mut rng, g.n());
        let profile = equilibrium_profile(&cond, &dm, &x0).unwrap();
        let residual = dm.laplacian() * &profile.x_star;
        for &r in cond.regular() {
            assert!(
                residual[r].abs() < 1e-9,
                "graph {i} node {r}: balance residual {:e}",
                residual[r]
            );
        }
    }
}

/// With boundary values 1 and 0 on two terminal nodes, each interior
/// voltage sits above or below one half exactly according to which terminal
/// is electrically closer; quantitatively, the offset from one half equals
/// half the relative resistance gap.
#[test]
fn voltage_bias_matches_resistance_gap() {
    for i in 0..10u64 {
        let mut rng = common::rng(13_000 + i);
        let g = common::random_connected_undirected(&mut rng, 5, 25);
        let n = g.n();
        let a = rng.gen_range(0..n);
        let b = loop {
            let b = rng.gen_range(0..n);
            if b != a {
                break b;
            }
        };
        let sol = voltage_solution(&g, &[a], &[b]).unwrap();
        let r_pair = sol.resistance;
        for v in 0..n {
            if v == a || v == b {
                continue;
            }
            let r_to_a = effective_resistance(&g, &[v], &[a]).unwrap();
            let r_to_b = effective_resistance(&g, &[v], &[b]).unwrap();
            let predicted = (r_to_b - r_to_a) / (2.0 * r_pair);
            let actual = sol.voltages[v] - 0.5;
            assert!(
                (actual - predicted).abs() < 1e-8,
                "graph {i} node {v}: offset {actual} vs resistance form {predicted}"
            );
        }
    }
}

/// The exact widest-band fraction is sandwiched by brute-force scans over a
/// fine grid of band centers: the grid can only undercount at the same
/// width, and a half-step widening makes the grid an overcount.
#[test]
fn band_fraction_matches_grid_scan() {
    let eps = 0.07;
    for i in 0..30u64 {
        let mut rng = common::rng(14_000 + i);
        let x = common::random_state(&mut rng, 50);
        let xbar = DVector::from_vec(vec![0.0, 1.0]);
        let exact = regime_metrics(&x, &xbar, eps).homog_fraction;
        let lo = x.min();
        let hi = x.max();
        let step = (hi - lo) / 10_000.0;
        let grid_fraction = |width: f64| -> f64 {
            let mut best = 0usize;
            for k in 0..=10_000usize {
                let c = lo + step * k as f64;
                let count = x.iter().filter(|&&v| (v - c).abs() < width).count();
                best = best.max(count);
            }
            best as f64 / x.len() as f64
        };
        let under = grid_fraction(eps);
        let over = grid_fraction(eps + 0.5 * step + 1e-12);
        assert!(
            under <= exact + 1e-12 && exact <= over + 1e-12,
            "vector {i}: grid sandwich {under} ≤ {exact} ≤ {over} failed"
        );
    }
}

/// Strengthening the anchors pulls the low community mean toward zero:
/// |y0| is nonincreasing in γ for each seed, and stays within its envelope.
#[test]
fn anchoring_pulls_means_down() {
    for seed in 0..5u64 {
        let mut last = f64::INFINITY;
        for &gamma in &[1.0, 10.0, 100.0] {
            let mc = matched_communities(32, 2.0, 1.0, gamma, 15_000 + seed).unwrap();
            let mb = community_mean_bounds(&mc.spec).unwrap();
            assert!(mb.satisfied, "gamma={gamma} seed={seed}: envelope violated");
            let y0 = mb.y0.abs();
            assert!(
                y0 <= last + 1e-9,
                "seed {seed}: |y0| rose from {last} to {y0} as gamma reached {gamma}"
            );
            last = y0;
        }
    }
}

/// Strengthening the cross-community coupling closes the gap between the
/// two community means: y1 − y0 is nonincreasing in β for each seed and
/// stays below its closed-form bound.
#[test]
fn coupling_closes_the_mean_gap() {
    for seed in 0..5u64 {
        let mut last = f64::INFINITY;
        for &beta in &[1.0, 10.0, 100.0] {
            let mc = matched_communities(32, 2.0, beta, 0.01, 16_000 + seed).unwrap();
            let mb = community_mean_bounds(&mc.spec).unwrap();
            let gap = mb.y1 - mb.y0;
            assert!(
                gap <= mb.gap_bound + 1e-9,
                "beta={beta} seed={seed}: gap {gap} above bound {}",
                mb.gap_bound
            );
            assert!(
                gap <= last + 1e-9,
                "seed {seed}: gap rose from {last} to {gap} as beta reached {beta}"
            );
            last = gap;
        }
    }
}

/// The companion graph of a community keeps its bottleneck structure: its
/// conductance stays within a factor of two of the community's own, on
/// instances small enough for exhaustive cut search.
#[test]
fn companion_conductance_tracks_community() {
    for &m in &[8usize, 9] {
        for seed in [1u64, 2] {
            let mc = matched_communities(m, 2.0, 0.1, 0.01, 9_000 + seed).unwrap();
            for h in 0..2usize {
                let ids: Vec<usize> = if h == 0 {
                    mc.spec.community0().collect()
                } else {
                    mc.spec.community1().collect()
                };
                let community = mc.graph.induced(&ids);
                let dm_c = DerivedMatrices::new(&community, 0.5).unwrap();
                let pi_c = centrality(&dm_c).unwrap();
                let (phi, _) = conductance(&dm_c, &pi_c).unwrap();

                let red = reduce_to_community(&mc, h);
                let tilde = modified_tilde_graph(&red.graph, &condense(&red.graph));
                let dm_t = DerivedMatrices::new(&tilde, 0.5).unwrap();
                let pi_t = centrality(&dm_t).unwrap();
                let (phi_tilde, _) = conductance(&dm_t, &pi_t).unwrap();

                let ratio = phi_tilde / phi;
                assert!(
                    (0.5..=2.0).contains(&ratio),
                    "m={m} seed={seed} side={h}: ratio {ratio} (phi={phi}, companion={phi_tilde})"
                );
            }
        }
    }
}

/// Sampled influence matrices are a pure function of the seed: running the
/// same estimate in pools of different widths yields bit-identical results.
#[test]
fn sampled_influence_is_pool_invariant() {
    let mut rng = common::rng(17_000);
    let g = common::random_sinked_digraph(&mut rng, 30);
    let cond = condense(&g);
    let dm = DerivedMatrices::new(&g, 0.5).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            influence_matrix(
                &cond,
                &dm,
                InfluenceMethod::MonteCarlo {
                    samples: 2_000,
                    seed: 4,
                },
            )
            .unwrap()
            .h
        })
    };
    assert_eq!(run(1), run(4), "sampling depends on the thread pool");
}

/// Sweep output is byte-identical across thread pools.
#[test]
fn sweep_is_pool_invariant() {
    let cfg = SweepConfig {
        gammas: vec![0.01, 1.0],
        betas: vec![1.0],
        sizes: vec![8],
        seeds: vec![1, 2],
        omega: 2.0,
        epsilon: 0.1,
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| sweep_csv(&run_matched_er_sweep(&cfg).unwrap()))
    };
    assert_eq!(run(1), run(4), "sweep output depends on the thread pool");
}
