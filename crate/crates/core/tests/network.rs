use roadnet::geom::{signed_area, Point2, Polyline};
use roadnet::network::*;
use roadnet::ToleranceSet;

fn road(id: &str, pts: &[(f64, f64)], width: f64, speed: f64) -> RoadAxis {
    RoadAxis::new(
        id,
        Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap(),
        width,
        speed,
    )
}

fn star(angles_deg: &[f64], len: f64, width: f64, speed: f64) -> CenterlineSet {
    let roads = angles_deg
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let t = a.to_radians();
            road(
                &format!("arm{k}"),
                &[(0.0, 0.0), (len * t.cos(), len * t.sin())],
                width,
                speed,
            )
        })
        .collect();
    let set = CenterlineSet::new(roads);
    smooth_centerlines(&set, 2.0).unwrap()
}

/// Independent convexity oracle: every consecutive edge pair turns clockwise.
fn strictly_convex_cw(poly: &[Point2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        (b - a).cross(c - b) < 0.0
    })
}

#[test]
fn perpendicular_cross() {
    let net = build_network(
        &star(&[0.0, 90.0, 180.0, 270.0], 200.0, 8.0, 30.0),
        &ToleranceSet::default(),
    )
    .unwrap();
    assert_eq!(net.intersections.len(), 1);
    let x = &net.intersections[0];
    assert_eq!(x.arm_count(), 4);
    assert_eq!(net.links.len(), 8);
    assert_eq!(x.boundary.len(), 8);
    assert!(strictly_convex_cw(&x.boundary));
    assert!(signed_area(&x.boundary) < 0.0);
    // Symmetric arms get equal cuts.
    let d: Vec<f64> = x.arms.iter().map(|a| a.cut_center.norm()).collect();
    for v in &d {
        assert!((v - d[0]).abs() < 1e-6, "{d:?}");
    }
}

#[test]
fn cross_cut_matches_hand_construction() {
    // Perpendicular arms, half-width 4, radius R: the fillet is tangent to the
    // boundaries at distance 4 + R from the junction along each arm.
    let set = star(&[0.0, 90.0, 180.0, 270.0], 200.0, 8.0, 30.0);
    let r = fillet_radius(30.0, set.u, set.i).unwrap();
    let net = build_network(&set, &ToleranceSet::default()).unwrap();
    for a in &net.intersections[0].arms {
        assert!((a.cut_center.norm() - (4.0 + r)).abs() < 1e-6);
    }
}

#[test]
fn isolated_axis_gives_two_links() {
    let set = CenterlineSet::new(vec![road("a", &[(0.0, 0.0), (100.0, 0.0)], 6.0, 30.0)]);
    let net = build_network(&set, &ToleranceSet::default()).unwrap();
    assert_eq!(net.links.len(), 2);
    assert!(net.intersections.is_empty());
    assert!(net.relations.entries.is_empty());
    assert!(net
        .links
        .iter()
        .all(|l| l.from_intersection.is_none() && l.to_intersection.is_none()));
    let seg = &net.seg_axes[0];
    assert_eq!(seg.geometry.first(), Point2::new(0.0, 0.0));
    assert_eq!(seg.geometry.last(), Point2::new(100.0, 0.0));
}

#[test]
fn symmetric_y_junction() {
    let set = star(&[90.0, 210.0, 330.0], 150.0, 8.0, 25.0);
    let net = build_network(&set, &ToleranceSet::default()).unwrap();
    let x = &net.intersections[0];
    assert_eq!((x.arm_count(), x.boundary.len(), net.links.len()), (3, 6, 6));
    assert!(strictly_convex_cw(&x.boundary));
    // 120 degree corners: the fillet center sits on the bisector at distance
    // (h + R) / sin(60 deg); its tangency lies (h + R) / tan(60 deg) out along each arm.
    let r = fillet_radius(25.0, set.u, set.i).unwrap();
    let expected = (4.0 + r) / 60f64.to_radians().tan();
    for a in &x.arms {
        assert!(
            (a.cut_center.norm() - expected).abs() < 1e-6,
            "{} vs {expected}",
            a.cut_center.norm()
        );
    }
    for f in &x.fillets {
        let c = f.arc.center.norm();
        assert!((c - (4.0 + r) / 60f64.to_radians().sin()).abs() < 1e-6);
    }
}

#[test]
fn relation_signs_alternate_in_clockwise_order() {
    let net = build_network(&star(&[0.0, 100.0, 230.0], 150.0, 10.0, 30.0), &ToleranceSet::default()).unwrap();
    let x = &net.intersections[0];
    for (k, l) in x.links.iter().enumerate() {
        let sign = net.relations.sign_of(x.id, *l).unwrap();
        assert_eq!(sign, if k % 2 == 0 { Sign::Plus } else { Sign::Minus });
    }
    let plus = net.relations.entries.iter().filter(|r| r.sign == Sign::Plus).count();
    assert_eq!(plus, x.arm_count());
}

#[test]
fn t_junction_through_road_is_split() {
    let set = CenterlineSet::new(vec![
        road("main", &[(-200.0, 0.0), (200.0, 0.0)], 10.0, 30.0),
        road("side", &[(0.0, 0.0), (0.0, -150.0)], 7.0, 30.0),
    ]);
    let net = build_network(&smooth_centerlines(&set, 2.0).unwrap(), &ToleranceSet::default()).unwrap();
    assert_eq!(net.intersections.len(), 1);
    assert_eq!(net.intersections[0].arm_count(), 3);
    assert!(strictly_convex_cw(&net.intersections[0].boundary));
}

#[test]
fn link_boundary_is_parallel() {
    let set = CenterlineSet::new(vec![road(
        "s",
        &[(0.0, 0.0), (60.0, 20.0), (120.0, -10.0), (200.0, 30.0)],
        9.0,
        40.0,
    )]);
    let net = build_network(&smooth_centerlines(&set, 2.0).unwrap(), &ToleranceSet::default()).unwrap();
    for l in &net.links {
        let axis = &net.seg_axis(l.seg_axis).geometry;
        for p in l.boundary.points() {
            let d = axis.distance_to(*p);
            assert!((d - 4.5).abs() < 0.09, "distance {d}");
        }
    }
}

#[test]
fn seam_vertices_coincide_with_link_ends() {
    let net = build_network(&star(&[0.0, 90.0, 200.0], 150.0, 8.0, 30.0), &ToleranceSet::default()).unwrap();
    let x = &net.intersections[0];
    for a in &x.arms {
        let seg = net.seg_axis(a.seg_axis);
        let inbound = net.link(a.inbound);
        let end = |p: &Polyline| if a.at_start { p.first() } else { p.last() };
        assert_eq!(end(&seg.geometry), a.cut_center);
        assert_eq!(end(&inbound.boundary), a.cut_left);
        assert_eq!(end(&net.link(a.outbound).boundary), a.cut_right);
    }
}

#[test]
fn clustering_thresholds() {
    let pair = |x: f64| (Point2::new(x, 0.0), Point2::new(x, 1.0));
    assert_eq!(cluster_intersection_points(&[pair(0.0), pair(10.0)], 30.0).len(), 1);
    assert_eq!(cluster_intersection_points(&[pair(0.0), pair(100.0)], 30.0).len(), 2);
    let chain: Vec<_> = (0..5).map(|k| pair(20.0 * k as f64)).collect();
    let sets = cluster_intersection_points(&chain, 30.0);
    assert_eq!(sets.len(), 1);
    assert_eq!(sets[0].len(), 10);
}

#[test]
fn trim_keeps_farther_cut_and_breaks_ties_by_arc_length() {
    let c = |s: f64, x: f64| CutCandidate {
        arc_length: s,
        point: Point2::new(x, 0.0),
    };
    assert_eq!(
        trim_segment_ends(&[c(5.0, 5.0), c(9.0, 9.0)], Point2::default())
            .unwrap()
            .arc_length,
        9.0
    );
    assert_eq!(
        trim_segment_ends(&[c(7.0, 5.0), c(3.0, -5.0)], Point2::default())
            .unwrap()
            .arc_length,
        3.0
    );
    assert_eq!(
        trim_segment_ends(&[c(4.0, 4.0)], Point2::default()).unwrap().arc_length,
        4.0
    );
    assert!(trim_segment_ends(&[], Point2::default()).is_none());
}

#[test]
fn degenerate_collinear_arms_error_or_stay_convex() {
    match build_network(&star(&[0.0, 179.0, 181.0], 150.0, 8.0, 30.0), &ToleranceSet::default()) {
        Ok(net) => assert!(net.intersections.iter().all(|x| strictly_convex_cw(&x.boundary))),
        Err(e) => assert!(matches!(
            e,
            roadnet::Error::NonConvexIntersection { .. } | roadnet::Error::NoFilletExists { .. }
        )),
    }
}

#[test]
fn two_close_junctions_merge() {
    // A short connector between two T junctions is absorbed.
    let set = CenterlineSet::new(vec![
        road("w", &[(-150.0, 0.0), (0.0, 0.0)], 8.0, 30.0),
        road("mid", &[(0.0, 0.0), (12.0, 0.0)], 8.0, 30.0),
        road("e", &[(12.0, 0.0), (160.0, 0.0)], 8.0, 30.0),
        road("n", &[(0.0, 0.0), (0.0, 150.0)], 8.0, 30.0),
        road("s", &[(12.0, 0.0), (12.0, -150.0)], 8.0, 30.0),
    ]);
    let net = build_network(&smooth_centerlines(&set, 2.0).unwrap(), &ToleranceSet::default()).unwrap();
    assert_eq!(net.intersections.len(), 1);
    assert_eq!(net.intersections[0].arm_count(), 4);
    assert!(net.seg_axes.iter().all(|s| s.road != "mid"));
    assert!(strictly_convex_cw(&net.intersections[0].boundary));
}

#[test]
fn near_straight_unequal_widths_skip_the_fillet() {
    // 171.8 degrees between arms of width 6.4 and 9.6: the fillet would touch
    // the wider boundary behind the junction point.
    let set = CenterlineSet::new(vec![
        road("a", &[(0.0, 0.0), (-487.6, 349.6)], 6.4, 40.0),
        road("b", &[(0.0, 0.0), (-592.1, -96.9)], 8.6, 35.0),
        road("c", &[(0.0, 0.0), (-349.7, -487.6)], 6.4, 36.0),
        road("d", &[(0.0, 0.0), (532.6, -276.1)], 9.6, 33.0),
    ]);
    let net = build_network(&smooth_centerlines(&set, 2.0).unwrap(), &ToleranceSet::default()).unwrap();
    let x = &net.intersections[0];
    assert_eq!(x.arm_count(), 4);
    assert_eq!(x.fillets.len(), 3);
    assert!(strictly_convex_cw(&x.boundary));
}
