//! Property tests over randomized move sequences, curves, and round trips.

use geoknot_core::geometry::{
    average_crossing_number, total_curvature, total_writhe, writhe_matrix, PolygonalCurve,
};
use geoknot_core::lattice::{
    bfacf_move, capture, chain_rng, load_seed_polygon, pivot_move, restore, KnotClass,
};
use proptest::prelude::*;

fn random_curve(seed: u64, n: usize) -> PolygonalCurve {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let r = 4.0 + rng.gen_range(-1.0..1.0);
            [
                r * t.cos() + rng.gen_range(-0.4..0.4),
                r * t.sin() + rng.gen_range(-0.4..0.4),
                rng.gen_range(-1.5..1.5),
            ]
        })
        .collect();
    PolygonalCurve::from_vertices(pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moves_preserve_polygon_invariants(seed in 0u64..1000, moves in 100usize..1500) {
        let mut poly = load_seed_polygon(KnotClass::Trefoil).unwrap();
        let mut rng = chain_rng(seed, 9);
        for step in 0..moves {
            let before = poly.len();
            let out = bfacf_move(&mut poly, &mut rng, 80);
            let expected = if out.accepted { before as i32 + out.delta_length } else { before as i32 };
            prop_assert_eq!(poly.len() as i32, expected);
            if step % 7 == 0 {
                let n = poly.len();
                pivot_move(&mut poly, &mut rng);
                prop_assert_eq!(poly.len(), n, "pivot changed length");
            }
            prop_assert!(poly.len() % 2 == 0 && poly.len() >= 4);
        }
        prop_assert!(poly.is_self_avoiding());
    }

    #[test]
    fn restored_checkpoint_replays_identically(seed in 0u64..1000) {
        let mut poly = load_seed_polygon(KnotClass::Unknot).unwrap();
        let mut rng = chain_rng(seed, 4);
        for _ in 0..300 {
            bfacf_move(&mut poly, &mut rng, 60);
        }
        let cp = capture(&poly, &rng);
        // Branch A: continue directly.
        let mut poly_a = poly.clone();
        let mut rng_a = rng.clone();
        for _ in 0..200 {
            bfacf_move(&mut poly_a, &mut rng_a, 60);
            pivot_move(&mut poly_a, &mut rng_a);
        }
        // Branch B: mutate, then restore and replay.
        for _ in 0..50 {
            bfacf_move(&mut poly, &mut rng, 60);
        }
        let (mut poly_b, mut rng_b) = restore(&cp);
        prop_assert_eq!(&poly_b, cp.polygon());
        for _ in 0..200 {
            bfacf_move(&mut poly_b, &mut rng_b, 60);
            pivot_move(&mut poly_b, &mut rng_b);
        }
        prop_assert_eq!(poly_a, poly_b);
        prop_assert_eq!(rng_a, rng_b);
    }

    #[test]
    fn writhe_invariants_on_random_curves(seed in 0u64..500, n in 12usize..40) {
        let c = random_curve(seed, n);
        let w = writhe_matrix(&c);
        let wr = total_writhe(&w);
        let acn = average_crossing_number(&w);
        prop_assert!(acn + 1e-12 >= wr.abs());
        // Mirror antisymmetry of writhe, invariance of ACN and curvature.
        let wm = writhe_matrix(&c.mirror());
        prop_assert!((total_writhe(&wm) + wr).abs() < 1e-9);
        prop_assert!((average_crossing_number(&wm) - acn).abs() < 1e-9);
        prop_assert!((total_curvature(&c.mirror()) - total_curvature(&c)).abs() < 1e-9);
        // Fenchel bound.
        prop_assert!(total_curvature(&c) >= 2.0 * std::f64::consts::PI - 1e-9);
        // Scale invariance of the dimensionless functionals.
        let ws = writhe_matrix(&c.scale(3.0));
        prop_assert!((total_writhe(&ws) - wr).abs() < 1e-8);
        prop_assert!((average_crossing_number(&ws) - acn).abs() < 1e-8);
        prop_assert!((total_curvature(&c.scale(3.0)) - total_curvature(&c)).abs() < 1e-9);
    }

    #[test]
    fn xyz_round_trip_on_random_curves(seed in 0u64..500, n in 8usize..60) {
        let c = random_curve(seed, n).centered();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.xyz");
        geoknot_core::io::write_xyz(&path, &c).unwrap();
        let back = geoknot_core::io::read_xyz(&path).unwrap();
        prop_assert_eq!(back.len(), c.len());
        for (a, b) in back.vertices().iter().zip(c.vertices()) {
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() < 1e-10);
            }
        }
    }
}
