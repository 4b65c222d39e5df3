//! Links, intersections and the relation net from junction topology.
//!
//! Per junction node the arms are sorted counter-clockwise; every corner
//! narrower than a half turn receives a fillet between the facing
//! boundaries. Each fillet proposes a cut on both of its arms, and every arm
//! keeps the proposal farthest from the junction's tangency centroid. Nodes
//! whose tangency points come within `L_dis` of each other, or whose cuts
//! leave no room on the road between them, merge into one intersection. Cuts
//! are then pushed outward until the cut-line polygon is strictly convex.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use super::smooth::fillet_radius;
use super::topology::{build_topology, Topology};
use super::types::*;
use crate::error::{Error, Result};
use crate::geom::{
    arc_length_parameterize, douglas_peucker, offset_polyline_with_step, tangent_circle_fillet_with, Curve2,
    OffsetCurve, ParamCurve, Point2, Polyline, Side,
};
use crate::tolerance::ToleranceSet;

/// Step by which a non-convex arm's cut is pushed outward per iteration.
const CONVEXIFY_STEP: f64 = 0.25;
const CONVEXIFY_MAX_ITER: usize = 20_000;

/// A road seen from one of its ends, parameterized away from that end.
#[derive(Clone, Copy)]
struct ArmCurve<'a> {
    curve: &'a ParamCurve,
    reversed: bool,
}

impl Curve2 for ArmCurve<'_> {
    fn length(&self) -> f64 {
        self.curve.length()
    }
    fn position(&self, s: f64) -> Point2 {
        if self.reversed {
            self.curve.position(self.curve.length() - s)
        } else {
            self.curve.position(s)
        }
    }
    fn tangent(&self, s: f64) -> Point2 {
        if self.reversed {
            -self.curve.tangent(self.curve.length() - s)
        } else {
            self.curve.tangent(s)
        }
    }
}

/// Candidate cut line on a road axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutCandidate {
    /// Arc length from the road's start point.
    pub arc_length: f64,
    /// Axis point at `arc_length`.
    pub point: Point2,
}

/// Keeps the candidate farthest from `centroid`; exact ties go to the
/// smaller arc length.
pub fn trim_segment_ends(candidates: &[CutCandidate], centroid: Point2) -> Option<CutCandidate> {
    candidates.iter().copied().reduce(|best, c| {
        let (db, dc) = (best.point.dist(centroid), c.point.dist(centroid));
        let tie = (db - dc).abs() <= 1e-9 * db.max(dc).max(1.0);
        if (tie && c.arc_length < best.arc_length) || (!tie && dc > db) {
            c
        } else {
            best
        }
    })
}

/// Groups fillet tangency pairs into intersection point sets: two pairs
/// belong together when any of their points are closer than `l_dis`,
/// transitively. Pairs are never split.
pub fn cluster_intersection_points(pairs: &[(Point2, Point2)], l_dis: f64) -> Vec<Vec<Point2>> {
    let groups = cluster_pairs(pairs, l_dis, &[]);
    groups
        .into_iter()
        .map(|g| g.into_iter().flat_map(|i| [pairs[i].0, pairs[i].1]).collect())
        .collect()
}

/// Pair-index clusters; `extra` lists additional pair indices to join.
fn cluster_pairs(pairs: &[(Point2, Point2)], l_dis: f64, extra: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(pairs.len());
    for i in 0..pairs.len() {
        let a = [pairs[i].0, pairs[i].1];
        for j in i + 1..pairs.len() {
            let b = [pairs[j].0, pairs[j].1];
            if a.iter().any(|p| b.iter().any(|q| p.dist(*q) < l_dis)) {
                uf.union(i, j);
            }
        }
    }
    for &(i, j) in extra {
        uf.union(i, j);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..pairs.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Geometry of one arm as needed to assemble its intersection.
#[derive(Debug, Clone, Copy)]
pub struct ArmGeometry {
    pub seg_axis: SegAxisId,
    pub at_start: bool,
    pub inbound: LinkId,
    pub outbound: LinkId,
    pub cut_center: Point2,
    /// Cut line end on the left when looking away from the junction.
    pub cut_left: Point2,
    pub cut_right: Point2,
    pub direction: Point2,
}

/// Sorts the cut line ends clockwise around their centroid, checks strict
/// convexity and records the clockwise incident link order.
pub fn assemble_intersection(
    id: IntersectionId,
    arms: &[ArmGeometry],
    fillets: Vec<FilletRecord>,
    margin: f64,
) -> Result<Intersection> {
    let fail = |reason: String| Error::NonConvexIntersection {
        intersection: id.to_string(),
        reason,
    };
    if arms.len() < 2 {
        return Err(fail(format!("needs at least 2 arms, got {}", arms.len())));
    }
    let ring = clockwise_ring(arms);
    let order = ring.order.ok_or_else(|| fail("cut lines interleave".into()))?;
    if let Some(v) = ring.worst_turn.filter(|&t| t > -margin) {
        return Err(fail(format!("turn {v:.3e} at a vertex violates margin {margin}")));
    }
    let mut boundary = Vec::with_capacity(2 * arms.len());
    let mut links = Vec::with_capacity(2 * arms.len());
    let mut cw_arms = Vec::with_capacity(arms.len());
    for &a in &order {
        let arm = &arms[a];
        boundary.push(arm.cut_left);
        boundary.push(arm.cut_right);
        links.push(arm.inbound);
        links.push(arm.outbound);
        cw_arms.push(IntersectionArm {
            seg_axis: arm.seg_axis,
            at_start: arm.at_start,
            inbound: arm.inbound,
            outbound: arm.outbound,
            cut_center: arm.cut_center,
            cut_left: arm.cut_left,
            cut_right: arm.cut_right,
            direction: arm.direction,
        });
    }
    let mut members = boundary.clone();
    for f in &fillets {
        members.push(f.arc.tangent_a);
        members.push(f.arc.tangent_b);
    }
    Ok(Intersection {
        id,
        centroid: ring.centroid,
        boundary,
        members,
        arms: cw_arms,
        links,
        fillets,
    })
}

struct Ring {
    centroid: Point2,
    /// Arm indices in clockwise order when every arm's two points are adjacent.
    order: Option<Vec<usize>>,
    /// Largest normalized turn (negative means a clockwise turn).
    worst_turn: Option<f64>,
    /// Arms owning a vertex that violates `order` or the turn margin test.
    offenders: Vec<(usize, f64)>,
}

fn clockwise_ring(arms: &[ArmGeometry]) -> Ring {
    let pts: Vec<(Point2, usize, bool)> = arms
        .iter()
        .enumerate()
        .flat_map(|(i, a)| [(a.cut_left, i, true), (a.cut_right, i, false)])
        .collect();
    let n = pts.len() as f64;
    let centroid = pts.iter().fold(Point2::default(), |acc, p| acc + p.0) * (1.0 / n);
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        let ta = (pts[a].0 - centroid).angle();
        let tb = (pts[b].0 - centroid).angle();
        tb.total_cmp(&ta).then(a.cmp(&b))
    });
    // Rotate so the sequence starts at the left point of the lowest arm.
    let start = idx.iter().position(|&i| pts[i].1 == 0 && pts[i].2).unwrap_or(0);
    idx.rotate_left(start);

    let m = idx.len();
    let mut offenders = Vec::new();
    let mut paired = true;
    for k in (0..m).step_by(2) {
        let (a, b) = (pts[idx[k]], pts[idx[(k + 1) % m]]);
        if !(a.2 && !b.2 && a.1 == b.1) {
            paired = false;
        }
    }
    if !paired {
        // Any vertex whose neighbour is not its partner marks its arm.
        for k in 0..m {
            let (p, prev, next) = (pts[idx[k]], pts[idx[(k + m - 1) % m]], pts[idx[(k + 1) % m]]);
            let partner = if p.2 { next } else { prev };
            if partner.1 != p.1 || partner.2 == p.2 {
                offenders.push((p.1, f64::INFINITY));
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for k in 0..m {
        let prev = pts[idx[(k + m - 1) % m]].0;
        let cur = pts[idx[k]].0;
        let next = pts[idx[(k + 1) % m]].0;
        let (e0, e1) = (cur - prev, next - cur);
        let denom = e0.norm() * e1.norm();
        let turn = if denom > 0.0 { e0.cross(e1) / denom } else { 0.0 };
        worst = worst.max(turn);
        offenders.push((pts[idx[k]].1, turn));
    }
    let order = paired.then(|| (0..m).step_by(2).map(|k| pts[idx[k]].1).collect());
    Ring {
        centroid,
        order,
        worst_turn: Some(worst),
        offenders,
    }
}

/// Per-arm drafting state during construction.
#[derive(Debug, Clone)]
struct ArmDraft {
    road: usize,
    at_start: bool,
    candidates: Vec<CutCandidate>,
}

#[derive(Debug, Clone, Default)]
struct NodeDraft {
    arms: Vec<ArmDraft>,
    fillets: Vec<FilletRecord>,
}

fn road_s(at_start: bool, len: f64, s_out: f64) -> f64 {
    if at_start {
        s_out
    } else {
        len - s_out
    }
}

fn draft_node(
    topo: &Topology,
    curves: &[ParamCurve],
    node: usize,
    cl: &CenterlineSet,
    tol: &ToleranceSet,
) -> Result<NodeDraft> {
    let ends = &topo.nodes[node].ends;
    let mut arms: Vec<(f64, ArmDraft)> = ends
        .iter()
        .map(|&(road, at_start)| {
            let ac = ArmCurve {
                curve: &curves[road],
                reversed: !at_start,
            };
            (
                ac.tangent(0.0).angle(),
                ArmDraft {
                    road,
                    at_start,
                    candidates: Vec::new(),
                },
            )
        })
        .collect();
    arms.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then((a.1.road, a.1.at_start).cmp(&(b.1.road, b.1.at_start)))
    });
    let angles: Vec<f64> = arms.iter().map(|a| a.0).collect();
    let mut arms: Vec<ArmDraft> = arms.into_iter().map(|a| a.1).collect();
    let k = arms.len();
    let mut fillets = Vec::new();
    for i in 0..k {
        let j = (i + 1) % k;
        let mut sector = angles[j] - angles[i];
        if sector <= 0.0 {
            sector += std::f64::consts::TAU;
        }
        if sector >= std::f64::consts::PI || sector.sin().abs() < tol.parallel_angle.sin() {
            continue;
        }
        let (ra, rb) = (&topo.roads[arms[i].road], &topo.roads[arms[j].road]);
        let ca = ArmCurve {
            curve: &curves[arms[i].road],
            reversed: !arms[i].at_start,
        };
        let cb = ArmCurve {
            curve: &curves[arms[j].road],
            reversed: !arms[j].at_start,
        };
        let r = fillet_radius(ra.design_speed.min(rb.design_speed), cl.u, cl.i)?.max(tol.min_fillet_radius);
        let ba = OffsetCurve {
            base: &ca,
            offset: 0.5 * ra.width,
        };
        let bb = OffsetCurve {
            base: &cb,
            offset: -0.5 * rb.width,
        };
        if fillet_behind_corner(&ba, &bb, r) {
            // Near-straight continuation with unequal widths: the boundaries
            // diverge from the corner and there is nothing to round.
            continue;
        }
        let fitted = tangent_circle_fillet_with(&ba, &bb, r, tol.parallel_angle);
        if fitted.is_err() {
            // A fillet that overruns a short arm claims that whole arm; the
            // road is then absorbed and the two junctions merge.
            let h = 0.5 * ra.width.max(rb.width);
            let need = (h + r) / (0.5 * sector).tan().max(1e-3) + h;
            let (short, len) = if ca.length() <= cb.length() {
                (i, ca.length())
            } else {
                (j, cb.length())
            };
            if len < 1.5 * need {
                let at_start = arms[short].at_start;
                let end = curves[arms[short].road].length();
                arms[short].candidates.push(CutCandidate {
                    arc_length: road_s(at_start, end, end),
                    point: if short == i { ca.position(len) } else { cb.position(len) },
                });
                continue;
            }
        }
        let arc = fitted.map_err(|e| match e {
            Error::NoFilletExists { reason, .. } => Error::NoFilletExists {
                context: format!(
                    "junction at ({:.3}, {:.3}) between roads {} and {}",
                    topo.nodes[node].position.x, topo.nodes[node].position.y, ra.id, rb.id
                ),
                reason,
            },
            other => other,
        })?;
        fillets.push(FilletRecord {
            arc,
            boundary_tangent_a: ca.tangent(arc.param_a),
            boundary_tangent_b: cb.tangent(arc.param_b),
        });
        let proposals = [
            (i, ca.position(arc.param_a), arc.param_a),
            (j, cb.position(arc.param_b), arc.param_b),
        ];
        for (arm, point, s) in proposals {
            let len = curves[arms[arm].road].length();
            let at_start = arms[arm].at_start;
            arms[arm].candidates.push(CutCandidate {
                arc_length: road_s(at_start, len, s),
                point,
            });
        }
    }
    Ok(NodeDraft { arms, fillets })
}

/// True when the fillet circle built on the boundary tangent lines touches
/// either boundary before its start.
fn fillet_behind_corner<A: Curve2, B: Curve2>(a: &A, b: &B, r: f64) -> bool {
    let (ta, tb) = (a.tangent(0.0), b.tangent(0.0));
    let sin = ta.cross(tb);
    if sin.abs() < 1e-12 {
        return false;
    }
    let (off_a, off_b) = if sin > 0.0 { (r, -r) } else { (-r, r) };
    let ca = a.position(0.0) + ta.perp() * off_a;
    let cb = b.position(0.0) + tb.perp() * off_b;
    let d = cb - ca;
    d.cross(tb) / sin < 0.0 || d.cross(ta) / sin < 0.0
}

/// Builds the semantic network from (smoothed) centerlines.
pub fn build_network(cl: &CenterlineSet, tol: &ToleranceSet) -> Result<RoadNetwork2D> {
    cl.validate()?;
    let topo = build_topology(&cl.roads, tol.snap)?;
    let mut warnings = topo.warnings.clone();
    let curves: Vec<ParamCurve> = topo
        .roads
        .iter()
        .map(|r| arc_length_parameterize(&r.axis).map_err(|_| Error::DegenerateAxis { road: r.id.clone() }))
        .collect::<Result<_>>()?;
    let lens: Vec<f64> = curves.iter().map(|c| c.length()).collect();

    let drafts: Vec<NodeDraft> = (0..topo.nodes.len())
        .into_par_iter()
        .map(|n| draft_node(&topo, &curves, n, cl, tol))
        .collect::<Result<_>>()?;

    // Trimmed cut per (road, end), as outward arc length.
    let mut base_cut: BTreeMap<(usize, bool), f64> = BTreeMap::new();
    for (n, d) in drafts.iter().enumerate() {
        let tangency: Vec<Point2> = d
            .fillets
            .iter()
            .flat_map(|f| [f.arc.tangent_a, f.arc.tangent_b])
            .collect();
        let centroid = if tangency.is_empty() {
            topo.nodes[n].position
        } else {
            tangency.iter().fold(Point2::default(), |a, p| a + *p) * (1.0 / tangency.len() as f64)
        };
        for arm in &d.arms {
            let len = lens[arm.road];
            let cut = match trim_segment_ends(&arm.candidates, centroid) {
                Some(c) => road_s(arm.at_start, len, c.arc_length),
                None => tol.min_cut_distance.min(0.5 * len),
            };
            base_cut.insert((arm.road, arm.at_start), cut);
        }
    }

    // Merge nodes, absorb roads and convexify until stable.
    let mut forced: BTreeSet<usize> = BTreeSet::new();
    let (clusters, absorbed, cuts) = loop {
        let (clusters, absorbed) = cluster_nodes(&topo, &drafts, &base_cut, &lens, &forced, cl.l_dis, tol);
        let mut cuts = base_cut.clone();
        for c in &clusters {
            let arms = cluster_arms(&topo, c, &absorbed);
            if arms.len() < 2 {
                continue;
            }
            convexify(&arms, &curves, &topo, &mut cuts, tol)?;
        }
        let mut grew = false;
        for (r, ends) in topo.road_nodes.iter().enumerate() {
            if absorbed.contains(&r) || ends[0].is_none() || ends[1].is_none() {
                continue;
            }
            if cuts[&(r, true)] + cuts[&(r, false)] + tol.min_link_length > lens[r] {
                grew |= forced.insert(r);
            }
        }
        if !grew {
            break (clusters, absorbed, cuts);
        }
    };
    for &r in &absorbed {
        warnings.push(format!("road {} absorbed into an intersection", topo.roads[r].id));
    }

    // Intersection ids for clusters that still have at least two arms.
    let mut node_int: Vec<Option<IntersectionId>> = vec![None; topo.nodes.len()];
    let mut int_clusters = Vec::new();
    for c in &clusters {
        let arms = cluster_arms(&topo, c, &absorbed);
        if arms.len() < 2 {
            if !arms.is_empty() {
                warnings.push(format!(
                    "junction of road {} lost its other arms and became a dead end",
                    topo.roads[arms[0].0].id
                ));
            }
            continue;
        }
        let id = IntersectionId(int_clusters.len() as u32);
        for &n in c {
            node_int[n] = Some(id);
        }
        int_clusters.push((id, c.clone(), arms));
    }

    // Seg axes.
    struct SegDraft {
        road: usize,
        s0: f64,
        s1: f64,
        start: Option<IntersectionId>,
        end: Option<IntersectionId>,
    }
    let mut segs = Vec::new();
    let mut seg_of_road: BTreeMap<usize, SegAxisId> = BTreeMap::new();
    for (r, ends) in topo.road_nodes.iter().enumerate() {
        if absorbed.contains(&r) {
            continue;
        }
        let start = ends[0].and_then(|n| node_int[n]);
        let end = ends[1].and_then(|n| node_int[n]);
        let s0 = if start.is_some() { cuts[&(r, true)] } else { 0.0 };
        let s1 = if end.is_some() {
            lens[r] - cuts[&(r, false)]
        } else {
            lens[r]
        };
        seg_of_road.insert(r, SegAxisId(segs.len() as u32));
        segs.push(SegDraft {
            road: r,
            s0,
            s1,
            start,
            end,
        });
    }

    let built: Vec<(SegAxis, [Link; 2])> = segs
        .par_iter()
        .enumerate()
        .map(|(k, d)| {
            let road = &topo.roads[d.road];
            let id = SegAxisId(k as u32);
            let slice = curves[d.road].slice(d.s0, d.s1);
            let links = [LinkId(2 * k as u32), LinkId(2 * k as u32 + 1)];
            let axis = sample_axis(&slice, tol)?;
            let mk = |side: Side, lid: LinkId| -> Result<Link> {
                let boundary = offset_polyline_with_step(&slice, 0.5 * road.width, side, tol.offset_step).map_err(
                    |e| match e {
                        Error::OffsetCollapse {
                            distance,
                            removed,
                            total,
                            ..
                        } => Error::OffsetCollapse {
                            context: format!("road {}", road.id),
                            distance,
                            removed,
                            total,
                        },
                        other => other,
                    },
                )?;
                let boundary = douglas_peucker(&boundary, tol.dp_epsilon);
                let mut polygon = axis.points().to_vec();
                polygon.extend(boundary.points().iter().rev().copied());
                Ok(Link {
                    id: lid,
                    seg_axis: id,
                    side,
                    boundary,
                    polygon,
                    from_intersection: d.start,
                    to_intersection: d.end,
                })
            };
            let left = mk(Side::Left, links[0])?;
            let right = mk(Side::Right, links[1])?;
            let seg = SegAxis {
                id,
                road: road.id.clone(),
                geometry: axis,
                curve: slice,
                links,
                start: d.start,
                end: d.end,
                width: road.width,
                design_speed: road.design_speed,
                lanes: road.lanes,
                lane_width: road.effective_lane_width(),
            };
            Ok((seg, [left, right]))
        })
        .collect::<Result<_>>()?;
    let mut seg_axes = Vec::with_capacity(built.len());
    let mut links = Vec::with_capacity(2 * built.len());
    for (s, [l, r]) in built {
        seg_axes.push(s);
        links.push(l);
        links.push(r);
    }

    let intersections: Vec<Intersection> = int_clusters
        .par_iter()
        .map(|(id, nodes, arms)| {
            let geoms: Vec<ArmGeometry> = arms
                .iter()
                .map(|&(r, at_start)| {
                    let seg = &seg_axes[seg_of_road[&r].index()];
                    let s = if at_start { 0.0 } else { seg.curve.length() };
                    let center = seg.curve.position(s);
                    let n = seg.curve.normal(s);
                    let h = seg.half_width();
                    let (left, right) = (center + n * h, center + n * (-h));
                    let t = seg.curve.tangent(s);
                    ArmGeometry {
                        seg_axis: seg.id,
                        at_start,
                        inbound: if at_start { seg.links[0] } else { seg.links[1] },
                        outbound: if at_start { seg.links[1] } else { seg.links[0] },
                        cut_center: center,
                        cut_left: if at_start { left } else { right },
                        cut_right: if at_start { right } else { left },
                        direction: if at_start { t } else { -t },
                    }
                })
                .collect();
            let fillets = nodes.iter().flat_map(|&n| drafts[n].fillets.iter().copied()).collect();
            assemble_intersection(*id, &geoms, fillets, 0.0)
        })
        .collect::<Result<_>>()?;

    let mut relations = RelationNet::default();
    for x in &intersections {
        for a in &x.arms {
            relations.entries.push(Relation {
                intersection: x.id,
                link: a.inbound,
                sign: Sign::Plus,
            });
            relations.entries.push(Relation {
                intersection: x.id,
                link: a.outbound,
                sign: Sign::Minus,
            });
        }
    }

    let net = RoadNetwork2D {
        seg_axes,
        links,
        intersections,
        relations,
        params: NetworkParams {
            source: cl.source.clone(),
            u: cl.u,
            i: cl.i,
            l_dis: cl.l_dis,
            tolerances: *tol,
        },
        warnings,
    };
    net.check_integrity()?;
    Ok(net)
}

fn sample_axis(slice: &ParamCurve, tol: &ToleranceSet) -> Result<Polyline> {
    let n = ((slice.length() / tol.offset_step).ceil() as usize).max(1);
    let pts = Polyline::new(slice.sample_uniform(n))?;
    Ok(douglas_peucker(&pts, tol.dp_epsilon))
}

/// Arms `(road, at_start)` of a node cluster, excluding absorbed roads.
fn cluster_arms(topo: &Topology, cluster: &[usize], absorbed: &BTreeSet<usize>) -> Vec<(usize, bool)> {
    let mut arms: Vec<(usize, bool)> = cluster
        .iter()
        .flat_map(|&n| topo.nodes[n].ends.iter().copied())
        .filter(|(r, _)| !absorbed.contains(r))
        .collect();
    arms.sort();
    arms
}

/// Node clusters and absorbed roads.
fn cluster_nodes(
    topo: &Topology,
    drafts: &[NodeDraft],
    cuts: &BTreeMap<(usize, bool), f64>,
    lens: &[f64],
    forced: &BTreeSet<usize>,
    l_dis: f64,
    tol: &ToleranceSet,
) -> (Vec<Vec<usize>>, BTreeSet<usize>) {
    let n = topo.nodes.len();
    let mut uf = UnionFind::<usize>::new(n);

    // Tangency proximity; pairs of the same node always belong together.
    let mut pairs = Vec::new();
    let mut owner = Vec::new();
    for (k, d) in drafts.iter().enumerate() {
        for f in &d.fillets {
            pairs.push((f.arc.tangent_a, f.arc.tangent_b));
            owner.push(k);
        }
    }
    let mut same_node = Vec::new();
    for i in 1..pairs.len() {
        if owner[i] == owner[i - 1] {
            same_node.push((i - 1, i));
        }
    }
    for g in cluster_pairs(&pairs, l_dis, &same_node) {
        for w in g.windows(2) {
            uf.union(owner[w[0]], owner[w[1]]);
        }
    }

    let mut absorbed = BTreeSet::new();
    for (r, ends) in topo.road_nodes.iter().enumerate() {
        let c0 = ends[0].map_or(0.0, |_| cuts[&(r, true)]);
        let c1 = ends[1].map_or(0.0, |_| cuts[&(r, false)]);
        let overlap = c0 + c1 + tol.min_link_length > lens[r];
        match (ends[0], ends[1]) {
            (Some(a), Some(b)) if overlap || forced.contains(&r) => {
                uf.union(a, b);
            }
            (Some(_), None) | (None, Some(_)) if overlap => {
                absorbed.insert(r);
            }
            _ => {}
        }
    }
    for (r, ends) in topo.road_nodes.iter().enumerate() {
        if let [Some(a), Some(b)] = *ends {
            if uf.equiv(a, b) {
                absorbed.insert(r);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    clusters.sort();
    (clusters, absorbed)
}

/// Pushes arm cuts outward until the cut-line polygon is strictly convex
/// with the configured turn margin.
fn convexify(
    arms: &[(usize, bool)],
    curves: &[ParamCurve],
    topo: &Topology,
    cuts: &mut BTreeMap<(usize, bool), f64>,
    tol: &ToleranceSet,
) -> Result<()> {
    let geom = |cuts: &BTreeMap<(usize, bool), f64>| -> Vec<ArmGeometry> {
        arms.iter()
            .map(|&(r, at_start)| {
                let c = &curves[r];
                let s = road_s(at_start, c.length(), cuts[&(r, at_start)]);
                let center = c.position(s);
                let n = c.normal(s);
                let h = 0.5 * topo.roads[r].width;
                let (left, right) = (center + n * h, center + n * (-h));
                ArmGeometry {
                    seg_axis: SegAxisId(0),
                    at_start,
                    inbound: LinkId(0),
                    outbound: LinkId(0),
                    cut_center: center,
                    cut_left: if at_start { left } else { right },
                    cut_right: if at_start { right } else { left },
                    direction: Point2::default(),
                }
            })
            .collect()
    };
    for _ in 0..CONVEXIFY_MAX_ITER {
        let ring = clockwise_ring(&geom(cuts));
        let bad: BTreeSet<usize> = ring
            .offenders
            .iter()
            .filter(|(_, t)| *t > -tol.convex_margin)
            .map(|(a, _)| *a)
            .collect();
        if ring.order.is_some() && bad.is_empty() {
            return Ok(());
        }
        for a in bad {
            let (r, at_start) = arms[a];
            let limit = curves[r].length() - tol.min_link_length;
            let c = cuts.get_mut(&(r, at_start)).expect("cut recorded");
            if *c + CONVEXIFY_STEP > limit {
                let p = topo.roads[r].axis.points()[if at_start { 0 } else { topo.roads[r].axis.len() - 1 }];
                return Err(Error::NonConvexIntersection {
                    intersection: format!("junction at ({:.3}, {:.3})", p.x, p.y),
                    reason: format!("road {} too short to make the cut polygon convex", topo.roads[r].id),
                });
            }
            *c += CONVEXIFY_STEP;
        }
    }
    Err(Error::NonConvexIntersection {
        intersection: "junction".into(),
        reason: "convexification did not converge".into(),
    })
}
