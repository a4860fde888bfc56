//! Benchmarks of the sampling and analysis kernels.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use geoknot_core::geometry::{lattice_writhe, writhe_matrix, PolygonalCurve};
use geoknot_core::lattice::{bfacf_move, chain_rng, load_seed_polygon, KnotClass, LatticePolygon};
use geoknot_core::probe::knn_mi;
use geoknot_core::topology::{vassiliev_v2_writhe, verify_knot_class};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Mixed 100-step trefoil used by the geometry benchmarks.
fn bench_polygon() -> LatticePolygon {
    let mut poly = load_seed_polygon(KnotClass::Trefoil).unwrap();
    let mut rng = chain_rng(17, 0);
    let mut moves = 0u64;
    while poly.len() < 100 || moves < 50_000 {
        bfacf_move(&mut poly, &mut rng, 100);
        moves += 1;
    }
    poly
}

fn jittered_curve(poly: &LatticePolygon) -> PolygonalCurve {
    poly.to_offlattice(0.1, 7).unwrap()
}

fn bench_kernels(c: &mut Criterion) {
    let poly = bench_polygon();
    let curve = jittered_curve(&poly);

    c.bench_function("writhe_matrix_n100", |b| {
        b.iter(|| writhe_matrix(&curve));
    });

    c.bench_function("lattice_writhe_n100", |b| {
        b.iter(|| lattice_writhe(&poly));
    });

    let w = writhe_matrix(&curve);
    c.bench_function("v2_contraction_n100", |b| {
        b.iter(|| vassiliev_v2_writhe(&w));
    });

    c.bench_function("verify_knot_class_n100", |b| {
        b.iter(|| verify_knot_class(&poly, KnotClass::Trefoil).unwrap());
    });

    c.bench_function("bfacf_moves_1k", |b| {
        b.iter_batched(
            || (poly.clone(), chain_rng(23, 1)),
            |(mut p, mut rng)| {
                for _ in 0..1000 {
                    bfacf_move(&mut p, &mut rng, 100);
                }
                p
            },
            BatchSize::SmallInput,
        );
    });

    let mut rng: ChaCha8Rng = chain_rng(29, 2);
    let labels: Vec<usize> = (0..2000).map(|i| i % 2).collect();
    let values: Vec<f64> = labels
        .iter()
        .map(|&l| l as f64 + rng.gen_range(-2.0..2.0))
        .collect();
    c.bench_function("knn_mi_n2000", |b| {
        b.iter(|| knn_mi(&values, &labels, 3).unwrap());
    });
}

criterion_group!(kernels, bench_kernels);
criterion_main!(kernels);
