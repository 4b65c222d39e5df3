//! Junction detection: crossing splits, endpoint snapping and node discovery.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use super::types::RoadAxis;
use crate::error::Result;
use crate::geom::{point_segment_distance, segment_intersection, Point2, Polyline};

/// Road ends meeting at one junction point (at least two ends).
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub position: Point2,
    /// `(road index, at_start)` pairs, sorted.
    pub ends: Vec<(usize, bool)>,
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub roads: Vec<RoadAxis>,
    pub nodes: Vec<Node>,
    /// Node index at each road's `[start, end]`; `None` marks a dead end.
    pub road_nodes: Vec<[Option<usize>; 2]>,
    pub warnings: Vec<String>,
}

/// Splits axes at mid-axis crossings and T contacts, snaps endpoints closer
/// than `snap` together and collects junction nodes.
pub fn build_topology(roads: &[RoadAxis], snap: f64) -> Result<Topology> {
    let mut warnings = Vec::new();
    let split = split_roads(roads, snap)?;
    let (snapped, mut dropped) = snap_endpoints(split, snap)?;
    warnings.append(&mut dropped);

    let mut uf = UnionFind::<usize>::new(snapped.len() * 2);
    let ends: Vec<Point2> = snapped.iter().flat_map(|r| [r.axis.first(), r.axis.last()]).collect();
    let buckets = bucket_points(&ends, snap.max(1e-9));
    for (i, p) in ends.iter().enumerate() {
        for j in neighbours(&buckets, *p, snap.max(1e-9)) {
            if j > i && ends[j] == *p {
                uf.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..ends.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut members: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() >= 2).collect();
    members.sort();
    let mut road_nodes = vec![[None, None]; snapped.len()];
    let nodes = members
        .into_iter()
        .enumerate()
        .map(|(n, g)| {
            for &e in &g {
                road_nodes[e / 2][e % 2] = Some(n);
            }
            Node {
                position: ends[g[0]],
                ends: g.iter().map(|&e| (e / 2, e % 2 == 0)).collect(),
            }
        })
        .collect();
    Ok(Topology {
        roads: snapped,
        nodes,
        road_nodes,
        warnings,
    })
}

fn cell_key(p: Point2, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}

fn bucket_points(points: &[Point2], cell: f64) -> HashMap<(i64, i64), Vec<usize>> {
    let mut m: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        m.entry(cell_key(*p, cell)).or_default().push(i);
    }
    m
}

fn neighbours(buckets: &HashMap<(i64, i64), Vec<usize>>, p: Point2, cell: f64) -> Vec<usize> {
    let (cx, cy) = cell_key(p, cell);
    let mut out = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            if let Some(v) = buckets.get(&(cx + dx, cy + dy)) {
                out.extend_from_slice(v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// A split location on a road: segment index, parameter on it, point.
type SplitAt = (usize, f64, Point2);

fn split_roads(roads: &[RoadAxis], snap: f64) -> Result<Vec<RoadAxis>> {
    let mut seg_lens: Vec<f64> = roads
        .iter()
        .flat_map(|r| r.axis.points().windows(2).map(|w| w[0].dist(w[1])))
        .collect();
    if seg_lens.is_empty() {
        return Ok(Vec::new());
    }
    seg_lens.sort_by(f64::total_cmp);
    let cell = (2.0 * seg_lens[seg_lens.len() / 2]).max(2.0 * snap).max(1.0);

    // Segment grid.
    let mut grid: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (ri, r) in roads.iter().enumerate() {
        for (si, w) in r.axis.points().windows(2).enumerate() {
            let (a, b) = (cell_key(w[0], cell), cell_key(w[1], cell));
            for gx in a.0.min(b.0) - 1..=a.0.max(b.0) + 1 {
                for gy in a.1.min(b.1) - 1..=a.1.max(b.1) + 1 {
                    grid.entry((gx, gy)).or_default().push((ri, si));
                }
            }
        }
    }
    let near_end = |r: &RoadAxis, p: Point2| r.axis.first().dist(p) <= snap || r.axis.last().dist(p) <= snap;
    let seg = |ri: usize, si: usize| {
        let p = roads[ri].axis.points();
        (p[si], p[si + 1])
    };

    let mut splits: Vec<Vec<SplitAt>> = vec![Vec::new(); roads.len()];
    let mut pairs = BTreeSet::new();
    for cands in grid.values() {
        for (x, &a) in cands.iter().enumerate() {
            for &b in &cands[x + 1..] {
                if a.0 != b.0 {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    for ((ra, sa), (rb, sb)) in pairs {
        let (p1, p2) = seg(ra, sa);
        let (q1, q2) = seg(rb, sb);
        let Some((t, u)) = segment_intersection(p1, p2, q1, q2) else {
            continue;
        };
        let x = p1.lerp(p2, t);
        if !near_end(&roads[ra], x) {
            splits[ra].push((sa, t, x));
        }
        if !near_end(&roads[rb], x) {
            splits[rb].push((sb, u, x));
        }
    }
    // Endpoints resting on another road's interior without crossing it.
    for (ri, r) in roads.iter().enumerate() {
        for e in [r.axis.first(), r.axis.last()] {
            let Some(cands) = grid.get(&cell_key(e, cell)) else {
                continue;
            };
            for &(rj, sj) in cands {
                if rj == ri || near_end(&roads[rj], e) {
                    continue;
                }
                let (a, b) = seg(rj, sj);
                if point_segment_distance(e, a, b) <= snap {
                    let d = b - a;
                    let t = ((e - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
                    splits[rj].push((sj, t, a.lerp(b, t)));
                }
            }
        }
    }

    let mut out = Vec::with_capacity(roads.len());
    for (ri, r) in roads.iter().enumerate() {
        let mut cuts = std::mem::take(&mut splits[ri]);
        if cuts.is_empty() {
            out.push(r.clone());
            continue;
        }
        cuts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let pts = r.axis.points();
        let mut pieces: Vec<Vec<Point2>> = Vec::new();
        let mut cur = vec![pts[0]];
        let mut next_vertex = 1;
        for (si, _, x) in cuts {
            while next_vertex <= si {
                cur.push(pts[next_vertex]);
                next_vertex += 1;
            }
            let piece_start = cur[0];
            if x.dist(piece_start) <= snap || x.dist(r.axis.last()) <= snap {
                continue;
            }
            cur.push(x);
            pieces.push(std::mem::replace(&mut cur, vec![x]));
        }
        cur.extend_from_slice(&pts[next_vertex..]);
        pieces.push(cur);
        let multi = pieces.len() > 1;
        for (k, piece) in pieces.into_iter().enumerate() {
            let mut road = r.clone();
            road.axis = Polyline::new(piece)?;
            if multi {
                road.id = format!("{}:{k}", r.id);
            }
            out.push(road);
        }
    }
    Ok(out)
}

/// Moves endpoints closer than `snap` onto one representative position and
/// drops roads that collapse to a point.
fn snap_endpoints(roads: Vec<RoadAxis>, snap: f64) -> Result<(Vec<RoadAxis>, Vec<String>)> {
    let ends: Vec<Point2> = roads.iter().flat_map(|r| [r.axis.first(), r.axis.last()]).collect();
    let cell = snap.max(1e-9);
    let buckets = bucket_points(&ends, cell);
    let mut uf = UnionFind::<usize>::new(ends.len());
    for (i, p) in ends.iter().enumerate() {
        for j in neighbours(&buckets, *p, cell) {
            if j > i && ends[j].dist(*p) <= snap {
                uf.union(i, j);
            }
        }
    }
    let mut rep: HashMap<usize, Point2> = HashMap::new();
    for (i, p) in ends.iter().enumerate() {
        rep.entry(uf.find(i)).or_insert(*p);
    }
    let mut out = Vec::with_capacity(roads.len());
    let mut warnings = Vec::new();
    for (ri, mut r) in roads.into_iter().enumerate() {
        let a = rep[&uf.find(2 * ri)];
        let b = rep[&uf.find(2 * ri + 1)];
        let mut pts = r.axis.points().to_vec();
        let n = pts.len();
        pts[0] = a;
        pts[n - 1] = b;
        // Interior vertices swallowed by the snap radius go away.
        let mut kept = vec![a];
        kept.extend(
            pts[1..n - 1]
                .iter()
                .copied()
                .filter(|p| p.dist(a) > snap && p.dist(b) > snap),
        );
        kept.push(b);
        match Polyline::new(kept) {
            Ok(p) if p.length() > snap => {
                r.axis = p;
                out.push(r);
            }
            _ => warnings.push(format!("road {} collapsed under snapping and was dropped", r.id)),
        }
    }
    Ok((out, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn road(id: &str, pts: &[(f64, f64)]) -> RoadAxis {
        RoadAxis::new(
            id,
            Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap(),
            8.0,
            30.0,
        )
    }

    #[test]
    fn cross_of_two_axes_becomes_four_arms() {
        let t = build_topology(
            &[
                road("h", &[(-100.0, 0.0), (100.0, 0.0)]),
                road("v", &[(0.0, -100.0), (0.0, 100.0)]),
            ],
            0.5,
        )
        .unwrap();
        assert_eq!(t.roads.len(), 4);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.nodes[0].ends.len(), 4);
        assert!(t.nodes[0].position.norm() < 1e-12);
    }

    #[test]
    fn near_endpoints_snap_together() {
        let t = build_topology(
            &[
                road("a", &[(0.0, 0.0), (50.0, 0.0)]),
                road("b", &[(50.3, 0.2), (50.0, 60.0)]),
            ],
            0.5,
        )
        .unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.roads[1].axis.first(), t.roads[0].axis.last());
        assert_eq!(t.road_nodes[0], [None, Some(0)]);
    }

    #[test]
    fn t_contact_splits_the_through_road() {
        let t = build_topology(
            &[
                road("a", &[(-50.0, 0.0), (50.0, 0.0)]),
                road("b", &[(0.0, 0.3), (0.0, 80.0)]),
            ],
            0.5,
        )
        .unwrap();
        assert_eq!(t.roads.len(), 3);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.nodes[0].ends.len(), 3);
    }

    #[test]
    fn isolated_road_has_no_nodes() {
        let t = build_topology(&[road("a", &[(0.0, 0.0), (10.0, 0.0)])], 0.5).unwrap();
        assert!(t.nodes.is_empty());
        assert_eq!(t.road_nodes, vec![[None, None]]);
    }
}
