use approx::assert_relative_eq;
use proptest::prelude::*;
use roadnet::geom::*;
use roadnet::terrain::HeightField;

fn points(max: usize) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 2..max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect::<Vec<_>>())
        .prop_filter("distinct ends", |p: &Vec<Point2>| p[0].dist(*p.last().unwrap()) > 1e-3)
}

/// Gently bending axis: x increases monotonically, y wanders.
fn axis() -> impl Strategy<Value = Polyline> {
    prop::collection::vec(-8.0..8.0f64, 3..7).prop_map(|ys| {
        Polyline::new(
            ys.iter()
                .enumerate()
                .map(|(k, &y)| Point2::new(40.0 * k as f64, y))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn simplification_is_idempotent(pts in points(16), eps in 0.0..5.0f64) {
        let once = douglas_peucker(&Polyline::new(pts).unwrap(), eps);
        let twice = douglas_peucker(&once, eps);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn simplification_stays_within_tolerance(pts in points(16), eps in 0.01..5.0f64) {
        let poly = Polyline::new(pts.clone()).unwrap();
        let out = douglas_peucker(&poly, eps);
        prop_assert_eq!(out.first(), poly.first());
        prop_assert_eq!(out.last(), poly.last());
        for p in pts {
            prop_assert!(out.distance_to(p) <= eps + 1e-9);
        }
    }

    #[test]
    fn offset_keeps_its_distance(poly in axis(), d in 1.0..8.0f64, left in any::<bool>()) {
        let curve = arc_length_parameterize(&poly).unwrap();
        let side = if left { Side::Left } else { Side::Right };
        let off = offset_polyline(&curve, d, side).unwrap();
        let dense = Polyline::new(curve.sample_uniform(2000)).unwrap();
        for p in off.points() {
            assert_relative_eq!(dense.distance_to(*p), d, max_relative = 1e-3);
        }
        // Offsetting back by the same distance returns to the axis.
        let back = arc_length_parameterize(&off).unwrap();
        let ret = offset_polyline(&back, d, side.opposite()).unwrap();
        for p in ret.points().iter().skip(2).take(ret.len().saturating_sub(4)) {
            prop_assert!(dense.distance_to(*p) < 0.05);
        }
    }

    #[test]
    fn fillet_is_symmetric(deg in 30.0..150.0f64, r in 2.0..40.0f64) {
        let line = |a: Point2, b: Point2| arc_length_parameterize(&Polyline::new(vec![a, b]).unwrap()).unwrap();
        let t = deg.to_radians();
        let a = line(Point2::new(0.0, 0.0), Point2::new(400.0, 0.0));
        let b = line(Point2::new(0.0, 0.0), Point2::new(400.0 * t.cos(), 400.0 * t.sin()));
        let ab = tangent_circle_fillet(&a, &b, r).unwrap();
        let ba = tangent_circle_fillet(&b, &a, r).unwrap();
        assert_relative_eq!(ab.center.x, ba.center.x, epsilon = 1e-7);
        assert_relative_eq!(ab.center.y, ba.center.y, epsilon = 1e-7);
        // Both tangency points sit R / tan(theta / 2) from the corner.
        let d = r / (0.5 * t).tan();
        assert_relative_eq!(ab.tangent_a.norm(), d, max_relative = 1e-7);
        assert_relative_eq!(ab.tangent_b.norm(), d, max_relative = 1e-7);
    }

    #[test]
    fn bilinear_reproduces_affine_terrain(
        a in -0.5..0.5f64, b in -0.5..0.5f64, c in -100.0..100.0f64,
        u in 0.0..1.0f64, v in 0.0..1.0f64,
    ) {
        let hf = HeightField::from_fn(20, 15, 3.0, Point2::new(10.0, -5.0), |x, y| a * x + b * y + c).unwrap();
        // Anywhere between the outermost cell centers.
        let (lo, hi) = (hf.cell_center(0, 0), hf.cell_center(19, 14));
        let (x, y) = (lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y));
        assert_relative_eq!(hf.sample(x, y).unwrap(), a * x + b * y + c, epsilon = 1e-9);
    }
}
