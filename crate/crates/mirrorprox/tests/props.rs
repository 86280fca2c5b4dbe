//! Randomized property checks over the geometry primitives.

use mirrorprox::{
    entropic_update, euclidean_update, project_simplex_bisection, BlockLayout, FeasibleSet,
    MirrorMap, Vector,
};
use proptest::prelude::*;

fn feasible_from_raw(raw: &[f64], layout: &BlockLayout) -> Vector {
    let mut coords = vec![0.0; layout.dim()];
    for block in layout.blocks() {
        let len = block.len();
        let sum: f64 = raw[block.clone()].iter().map(|v| v + 0.05).sum();
        for i in block {
            coords[i] = (raw[i] + 0.05) / sum;
        }
        let _ = len;
    }
    Vector::new(coords).unwrap()
}

proptest! {
    #[test]
    fn projection_is_feasible_and_idempotent(
        z in prop::collection::vec(-50.0f64..50.0, 1..12)
    ) {
        let p = project_simplex_bisection(&z);
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let pp = project_simplex_bisection(&p);
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn bregman_divergences_are_nonnegative(
        raw_u in prop::collection::vec(0.0f64..1.0, 5),
        raw_x in prop::collection::vec(0.0f64..1.0, 5),
    ) {
        let layout = BlockLayout::new(&[2, 3]).unwrap();
        let u = feasible_from_raw(&raw_u, &layout);
        let x = feasible_from_raw(&raw_x, &layout);
        for map in [MirrorMap::entropic(), MirrorMap::euclidean()] {
            let b = map.bregman(&u, &x).unwrap();
            prop_assert!(b >= -1e-12, "{:?}: {b}", map.kind());
            // strong convexity: B(u,x) >= (alpha/2)||u-x||^2 in the map's
            // norm; the Euclidean 2-norm lower-bounds both block norms
            let d = u.dist2(&x);
            prop_assert!(b >= 0.5 * map.alpha() * d * d - 1e-12);
        }
    }

    #[test]
    fn mirror_updates_stay_feasible(
        raw_x in prop::collection::vec(0.0f64..1.0, 5),
        g in prop::collection::vec(-10.0f64..10.0, 5),
        gamma in 1e-4f64..5.0,
    ) {
        let layout = BlockLayout::new(&[2, 3]).unwrap();
        let set = FeasibleSet::product_of_simplices(&[2, 3]).unwrap();
        let x = feasible_from_raw(&raw_x, &layout);
        let e = entropic_update(&x, &g, gamma, &layout).unwrap();
        prop_assert!(set.contains(&e));
        prop_assert!(e.coords().iter().all(|&v| v > 0.0));
        let q = euclidean_update(&x, &g, gamma, &layout).unwrap();
        prop_assert!(set.contains(&q));
    }
}
