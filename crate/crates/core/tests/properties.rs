// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use proptest::prelude::*;
use sawlab_core::brownian::{excursion, hull_fill, rooted_loop};
use sawlab_core::curve::{curve_hausdorff, Geometry, PlanarCurve};
use sawlab_core::rng::substream;

fn curve() -> impl Strategy<Value = PlanarCurve> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..30)
        .prop_map(|v| PlanarCurve::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(), Geometry::Plane))
}

proptest! {
    #[test]
    fn hausdorff_is_symmetric(a in curve(), b in curve()) {
        prop_assert_eq!(curve_hausdorff(&a, &b).unwrap(), curve_hausdorff(&b, &a).unwrap());
    }

    #[test]
    fn hausdorff_obeys_the_triangle_inequality(a in curve(), b in curve(), c in curve()) {
        let ab = curve_hausdorff(&a, &b).unwrap();
        let bc = curve_hausdorff(&b, &c).unwrap();
        let ac = curve_hausdorff(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn excursions_stay_positive(seed in 0u64..1000) {
        let c = excursion(1.0, 500, &mut substream(seed, 0)).unwrap();
        prop_assert!(c.points[1..].iter().all(|z| z.im > 0.0));
    }

    #[test]
    fn loops_close_exactly(seed in 0u64..1000) {
        let c = rooted_loop(2.0, 300, &mut substream(seed, 0)).unwrap();
        prop_assert_eq!(c.points[0], *c.points.last().unwrap());
    }
}

#[test]
fn adding_a_curve_never_shrinks_the_hull() {
    let a = rooted_loop(1.0, 4000, &mut substream(1, 0)).unwrap();
    let b = rooted_loop(1.0, 4000, &mut substream(1, 1)).unwrap();
    // The grid is anchored at the lower-left corner of the input, so a shared
    // corner point puts both hulls on the same lattice of cells.
    let lo = a.points.iter().chain(&b.points).fold(Complex64::new(f64::INFINITY, f64::INFINITY), |m, z| {
        Complex64::new(m.re.min(z.re), m.im.min(z.im))
    });
    let corner = PlanarCurve::new(vec![lo], Geometry::Plane);
    let one = hull_fill(&[a.clone(), corner.clone()], 0.01).unwrap().region;
    let both = hull_fill(&[a, b, corner], 0.01).unwrap().region;
    assert_eq!(one.origin, both.origin);
    for (x, y) in one.cells() {
        assert!(both.get(x, y), "cell ({x}, {y}) lost");
    }
}
