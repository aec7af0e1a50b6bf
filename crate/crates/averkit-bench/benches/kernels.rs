//! Benchmarks of the numerical kernels that dominate real workloads: the
//! three influence-matrix routes, the electrical solves, mixing-time
//! measurement, and graph condensation.

use std::time::Duration;

use averkit::dynamics::{centrality, mixing_time};
use averkit::electrical::effective_resistance;
use averkit::equilibrium::{influence_matrix, InfluenceMethod};
use averkit::generators::{matched_communities, torus};
use averkit::{condense, DerivedMatrices};
use criterion::{criterion_group, criterion_main, Criterion};

/// The three routes to the same influence matrix on a 66-node
/// two-community instance.
fn influence_routes(c: &mut Criterion) {
    let mc = matched_communities(32, 2.0, 1.0, 1.0, 1).expect("instance generates");
    let cond = condense(&mc.graph);
    let dm = DerivedMatrices::new(&mc.graph, 0.5).expect("matrices build");

    let mut group = c.benchmark_group("influence");
    group.bench_function("block", |b| {
        b.iter(|| influence_matrix(&cond, &dm, InfluenceMethod::BlockSolve).unwrap())
    });
    group.bench_function("laplace", |b| {
        b.iter(|| influence_matrix(&cond, &dm, InfluenceMethod::LaplaceSolve).unwrap())
    });
    group.bench_function("mc_1k", |b| {
        b.iter(|| {
            influence_matrix(
                &cond,
                &dm,
                InfluenceMethod::MonteCarlo {
                    samples: 1_000,
                    seed: 7,
                },
            )
            .unwrap()
        })
    });
    group.finish();
}

/// One Dirichlet solve on an 8x8 toroidal grid.
fn electrical_kernels(c: &mut Criterion) {
    let grid = torus(2, 8, 0);
    c.bench_function("effective_resistance_torus_8x8", |b| {
        b.iter(|| effective_resistance(&grid, &[0], &[27]).unwrap())
    });
}

/// Mixing-time measurement by explicit matrix powers on a 32-node ring,
/// and condensation of a 130-node two-community graph.
fn dynamics_kernels(c: &mut Criterion) {
    let ring = torus(1, 32, 0);
    let dm = DerivedMatrices::new(&ring, 0.5).expect("matrices build");
    let pi = centrality(&dm).expect("ring is strongly connected");

    let mut group = c.benchmark_group("dynamics");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(3));
    group.bench_function("mixing_time_ring_32", |b| {
        b.iter(|| mixing_time(&dm, &pi).unwrap())
    });
    group.finish();

    let mc = matched_communities(64, 2.0, 1.0, 0.01, 2).expect("instance generates");
    c.bench_function("condense_n130", |b| b.iter(|| condense(&mc.graph)));
}

criterion_group!(benches, influence_routes, electrical_kernels, dynamics_kernels);
criterion_main!(benches);
