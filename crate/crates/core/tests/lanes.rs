use std::collections::BTreeSet;

use roadnet::geom::{Point2, Polyline};
use roadnet::lanes::*;
use roadnet::network::*;
use roadnet::profile::{build_elevation, ProfileParams};
use roadnet::terrain::HeightField;
use roadnet::ToleranceSet;

fn star(angles_deg: &[f64], width: f64, lanes: usize) -> RoadNetwork2D {
    let roads = angles_deg
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let t = a.to_radians();
            let pts = vec![Point2::new(0.0, 0.0), Point2::new(150.0 * t.cos(), 150.0 * t.sin())];
            let mut r = RoadAxis::new(format!("arm{k}"), Polyline::new(pts).unwrap(), width, 30.0);
            r.lanes = lanes;
            r
        })
        .collect();
    let set = smooth_centerlines(&CenterlineSet::new(roads), 2.0).unwrap();
    build_network(&set, &ToleranceSet::default()).unwrap()
}

fn hill() -> HeightField {
    HeightField::from_fn(170, 170, 2.0, Point2::new(-170.0, -170.0), |x, y| {
        20.0 + 0.02 * x - 0.01 * y
    })
    .unwrap()
}

fn graph(net: &RoadNetwork2D) -> LaneGraph {
    let elev = build_elevation(net, &hill(), &ProfileParams::default()).unwrap();
    build_lane_graph(net, &elev, &LaneParams::default()).unwrap()
}

/// Every `+` lane paired with every `-` lane of another road.
fn oracle(net: &RoadNetwork2D, g: &LaneGraph, x: IntersectionId) -> BTreeSet<(LLaneId, LLaneId)> {
    let has = |l: &LLane, s: Sign| l.relations.contains(&(x, s));
    let seg = |l: &LLane| net.link(l.link).seg_axis;
    let mut out = BTreeSet::new();
    for a in g.llanes.iter().filter(|l| has(l, Sign::Plus)) {
        for b in g.llanes.iter().filter(|l| has(l, Sign::Minus)) {
            if seg(a) != seg(b) {
                out.insert((a.id, b.id));
            }
        }
    }
    out
}

#[test]
fn cross_with_one_lane_each_way() {
    let net = star(&[0.0, 90.0, 180.0, 270.0], 8.0, 1);
    let g = graph(&net);
    assert_eq!(g.llanes.len(), 8);
    assert_eq!(g.ilanes.len(), 12);
    assert_eq!(g.connectors.len(), 12);
    for l in &g.llanes {
        assert_eq!(l.offset, 1.75);
    }
}

#[test]
fn walk_matches_exhaustive_pairs() {
    let cases: &[&[f64]] = &[
        &[0.0, 180.0],
        &[0.0, 150.0],
        &[90.0, 200.0, 330.0],
        &[0.0, 90.0, 180.0, 270.0],
        &[10.0, 80.0, 160.0, 230.0, 300.0],
    ];
    for &angles in cases {
        for lanes in [1, 2] {
            let net = star(angles, 16.0, lanes);
            let g = graph(&net);
            for x in &net.intersections {
                let got: BTreeSet<_> = g
                    .ilanes
                    .iter()
                    .filter(|i| i.intersection == x.id)
                    .map(|i| (i.from, i.to))
                    .collect();
                let n = g.ilanes.iter().filter(|i| i.intersection == x.id).count();
                assert_eq!(n, got.len(), "duplicate turning lanes");
                assert_eq!(got, oracle(&net, &g, x.id), "{angles:?} lanes {lanes}");
                let k = x.arm_count();
                assert_eq!(n, k * (k - 1) * lanes * lanes);
            }
        }
    }
}

#[test]
fn two_lanes_share_one_connector_per_link_pair() {
    let net = star(&[0.0, 90.0, 180.0, 270.0], 16.0, 2);
    let g = graph(&net);
    assert_eq!(g.ilanes.len(), 48);
    assert_eq!(g.connectors.len(), 12);
}

#[test]
fn t_junction_gives_six() {
    let g = graph(&star(&[0.0, 180.0, 270.0], 8.0, 1));
    assert_eq!(g.ilanes.len(), 6);
}

#[test]
fn overflow_is_rejected() {
    let net = star(&[0.0, 90.0, 180.0, 270.0], 8.0, 2);
    let elev = build_elevation(&net, &hill(), &ProfileParams::default()).unwrap();
    assert!(matches!(
        build_lane_graph(&net, &elev, &LaneParams::default()),
        Err(roadnet::Error::LaneOverflow { .. })
    ));
}

#[test]
fn turning_lanes_are_tangent_and_attached() {
    let net = star(&[0.0, 100.0, 215.0, 290.0], 12.0, 1);
    let elev = build_elevation(&net, &hill(), &ProfileParams::default()).unwrap();
    let g = build_lane_graph(&net, &elev, &LaneParams::default()).unwrap();
    for il in &g.ilanes {
        let (a, b) = (g.llane(il.from), g.llane(il.to));
        let c = il.geometry.ctrl;
        assert!(planar_angle(il.geometry.derivative(0.0).xy(), a.end_tangent) <= 1e-6);
        assert!(planar_angle(il.geometry.derivative(1.0).xy(), b.start_tangent) <= 1e-6);
        assert!((c[0] - a.end()).norm() < 1e-6);
        assert!((c[3] - b.start()).norm() < 1e-6);
        let z = elev.intersection_z(il.intersection);
        assert!(c.iter().all(|p| p.z == z));
        assert!(a.relations.contains(&(il.intersection, Sign::Plus)));
        assert!(b.relations.contains(&(il.intersection, Sign::Minus)));
    }
    // Lanes follow the seg axis tangent at their ends.
    for l in &g.llanes {
        let seg = net.seg_axis(net.link(l.link).seg_axis);
        let t = roadnet::geom::Curve2::tangent(&seg.curve, 0.0);
        let d = if net.link(l.link).side == roadnet::geom::Side::Right {
            l.start_tangent
        } else {
            l.end_tangent * -1.0
        };
        assert!(planar_angle(t, d) < 1e-12);
    }
}

#[test]
fn dead_end_has_no_turning_lanes() {
    let set = CenterlineSet::new(vec![RoadAxis::new(
        "a",
        Polyline::new(vec![Point2::new(-100.0, 0.0), Point2::new(100.0, 0.0)]).unwrap(),
        8.0,
        30.0,
    )]);
    let net = build_network(&set, &ToleranceSet::default()).unwrap();
    let g = graph(&net);
    assert_eq!(g.llanes.len(), 2);
    assert!(g.ilanes.is_empty() && g.connectors.is_empty());
    // Left lane runs against the axis.
    let left = g
        .llanes
        .iter()
        .find(|l| net.link(l.link).side == roadnet::geom::Side::Left)
        .unwrap();
    assert!(left.start().x > left.end().x);
}
