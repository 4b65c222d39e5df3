//! Traffic layer: lanes along links, turning lanes across intersections and
//! link-to-link connectors.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{cubic_bezier_from_tangents, CubicBezier3, Curve2, Point2, Point3, Side, DEFAULT_HANDLE_SCALE};
use crate::network::{id_type, Intersection, IntersectionId, LinkId, RoadNetwork2D, Sign};
use crate::profile::ElevationModel;

id_type!(LLaneId, "llane");
id_type!(ILaneId, "ilane");

/// Lane running inside one link, in driving direction.
#[derive(Debug, Clone)]
pub struct LLane {
    pub id: LLaneId,
    pub link: LinkId,
    /// 1 is next to the seg axis.
    pub index: usize,
    /// Lateral distance from the seg axis.
    pub offset: f64,
    pub centerline: Vec<Point3>,
    /// Unit planar directions of travel at the two ends.
    pub start_tangent: Point2,
    pub end_tangent: Point2,
    /// `-` where the lane starts at an intersection, `+` where it ends at one.
    pub relations: Vec<(IntersectionId, Sign)>,
}

impl LLane {
    pub fn start(&self) -> Point3 {
        self.centerline[0]
    }

    pub fn end(&self) -> Point3 {
        *self.centerline.last().unwrap()
    }
}

/// Turning movement across an intersection.
#[derive(Debug, Clone)]
pub struct ILane {
    pub id: ILaneId,
    pub intersection: IntersectionId,
    pub from: LLaneId,
    pub to: LLaneId,
    pub geometry: CubicBezier3,
}

/// Topological adjacency of two links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Connector {
    pub from_link: LinkId,
    pub to_link: LinkId,
    /// Lowest-id turning lane realizing the connection.
    pub witness: ILaneId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LaneRef {
    L(LLaneId),
    I(ILaneId),
}

impl fmt::Display for LaneRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LaneRef::L(id) => id.fmt(f),
            LaneRef::I(id) => id.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct LaneParams {
    /// Spacing of lane centerline vertices, meters.
    pub step: f64,
    /// Bezier handle length as a fraction of the chord.
    pub handle_scale: f64,
}

impl Default for LaneParams {
    fn default() -> Self {
        Self {
            step: 2.0,
            handle_scale: DEFAULT_HANDLE_SCALE,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LaneGraph {
    pub llanes: Vec<LLane>,
    pub ilanes: Vec<ILane>,
    pub connectors: Vec<Connector>,
    /// Successors of each lane in driving order.
    pub successors: BTreeMap<LaneRef, Vec<LaneRef>>,
    pub warnings: Vec<String>,
}

impl LaneGraph {
    pub fn llane(&self, id: LLaneId) -> &LLane {
        &self.llanes[id.index()]
    }

    pub fn ilane(&self, id: ILaneId) -> &ILane {
        &self.ilanes[id.index()]
    }

    pub fn successors_of(&self, lane: LaneRef) -> &[LaneRef] {
        self.successors.get(&lane).map_or(&[], |v| v.as_slice())
    }
}

/// Lanes of every link. Road-right links drive along the seg axis, road-left
/// links against it.
pub fn generate_l_lanes(net: &RoadNetwork2D, elevation: &ElevationModel, params: &LaneParams) -> Result<Vec<LLane>> {
    let per_link = net
        .links
        .par_iter()
        .map(|link| {
            let seg = net.seg_axis(link.seg_axis);
            let half = seg.half_width();
            if seg.lanes as f64 * seg.lane_width > half + 1e-9 {
                return Err(Error::LaneOverflow {
                    link: link.id.to_string(),
                    lanes: seg.lanes,
                    lane_width: seg.lane_width,
                    half_width: half,
                });
            }
            let profile = elevation.profile(seg.id);
            let curve = &seg.curve;
            let stations = curve.stations(((curve.length() / params.step).ceil() as usize).max(1));
            let forward = link.side == Side::Right;
            let (first, last) = if forward {
                (seg.start, seg.end)
            } else {
                (seg.end, seg.start)
            };
            let mut relations = Vec::new();
            if let Some(x) = first {
                relations.push((x, Sign::Minus));
            }
            if let Some(x) = last {
                relations.push((x, Sign::Plus));
            }
            let sgn = link.side.sign();
            let lanes = (1..=seg.lanes)
                .map(|index| {
                    let offset = (index as f64 - 0.5) * seg.lane_width;
                    let mut pts: Vec<Point3> = stations
                        .iter()
                        .map(|&s| (curve.position(s) + curve.normal(s) * (sgn * offset)).with_z(profile.eval(s)))
                        .collect();
                    let (mut t0, mut t1) = (curve.tangent(0.0), curve.tangent(curve.length()));
                    if !forward {
                        pts.reverse();
                        (t0, t1) = (t1 * -1.0, t0 * -1.0);
                    }
                    LLane {
                        id: LLaneId(0),
                        link: link.id,
                        index,
                        offset,
                        centerline: pts,
                        start_tangent: t0,
                        end_tangent: t1,
                        relations: relations.clone(),
                    }
                })
                .collect::<Vec<_>>();
            Ok(lanes)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<LLane> = per_link.into_iter().flatten().collect();
    for (k, l) in out.iter_mut().enumerate() {
        l.id = LLaneId(k as u32);
    }
    Ok(out)
}

/// Turning movements `(from lane, to lane)` at one intersection, following
/// the clockwise link walk: every incoming link (even positions, sign `+`)
/// visits the following links cyclically and pairs its lanes with the lanes
/// of each outgoing (`-`) link that belongs to another road.
pub fn turning_pairs(
    net: &RoadNetwork2D,
    x: &Intersection,
    lanes_of: &BTreeMap<LinkId, Vec<LLaneId>>,
) -> Vec<(LLaneId, LLaneId)> {
    let m = x.links.len();
    let sign = |pos: usize| net.relations.sign_of(x.id, x.links[pos]);
    let mut pairs = Vec::new();
    let empty = Vec::new();
    for i in (0..m).filter(|&i| sign(i) == Some(Sign::Plus)) {
        let from_link = x.links[i];
        let from_seg = net.link(from_link).seg_axis;
        for step in 1..m {
            let k = (i + step) % m;
            let to_link = x.links[k];
            if sign(k) != Some(Sign::Minus) || net.link(to_link).seg_axis == from_seg {
                continue;
            }
            for &a in lanes_of.get(&from_link).unwrap_or(&empty) {
                for &b in lanes_of.get(&to_link).unwrap_or(&empty) {
                    pairs.push((a, b));
                }
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    pairs.retain(|p| seen.insert(*p));
    pairs
}

/// Builds the turning lanes of one intersection. Pairs whose ends coincide
/// are skipped with a warning.
pub fn generate_i_lanes(
    net: &RoadNetwork2D,
    x: &Intersection,
    llanes: &[LLane],
    lanes_of: &BTreeMap<LinkId, Vec<LLaneId>>,
    z: f64,
    params: &LaneParams,
) -> (Vec<ILane>, Vec<String>) {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (a, b) in turning_pairs(net, x, lanes_of) {
        let (from, to) = (&llanes[a.index()], &llanes[b.index()]);
        let t0 = from.end_tangent.with_z(0.0);
        let t1 = to.start_tangent.with_z(0.0);
        match cubic_bezier_from_tangents(
            from.end().xy().with_z(z),
            t0,
            to.start().xy().with_z(z),
            t1,
            params.handle_scale,
        ) {
            Ok(geometry) => out.push(ILane {
                id: ILaneId(0),
                intersection: x.id,
                from: a,
                to: b,
                geometry,
            }),
            Err(e) => warnings.push(format!("{}: no turning lane {a} -> {b}: {e}", x.id)),
        }
    }
    (out, warnings)
}

/// One connector per linked pair of links, witnessed by its lowest-id lane.
pub fn build_connectors(ilanes: &[ILane], llanes: &[LLane]) -> Vec<Connector> {
    let mut best: BTreeMap<(LinkId, LinkId), ILaneId> = BTreeMap::new();
    for il in ilanes {
        let key = (llanes[il.from.index()].link, llanes[il.to.index()].link);
        best.entry(key).and_modify(|w| *w = (*w).min(il.id)).or_insert(il.id);
    }
    best.into_iter()
        .map(|((from_link, to_link), witness)| Connector {
            from_link,
            to_link,
            witness,
        })
        .collect()
}

/// Assembles the full lane graph of a network.
pub fn build_lane_graph(net: &RoadNetwork2D, elevation: &ElevationModel, params: &LaneParams) -> Result<LaneGraph> {
    let llanes = generate_l_lanes(net, elevation, params)?;
    let mut lanes_of: BTreeMap<LinkId, Vec<LLaneId>> = BTreeMap::new();
    for l in &llanes {
        lanes_of.entry(l.link).or_default().push(l.id);
    }
    let per_x: Vec<(Vec<ILane>, Vec<String>)> = net
        .intersections
        .par_iter()
        .map(|x| generate_i_lanes(net, x, &llanes, &lanes_of, elevation.intersection_z(x.id), params))
        .collect();
    let mut ilanes = Vec::new();
    let mut warnings = Vec::new();
    for (il, w) in per_x {
        ilanes.extend(il);
        warnings.extend(w);
    }
    for (k, il) in ilanes.iter_mut().enumerate() {
        il.id = ILaneId(k as u32);
    }
    let connectors = build_connectors(&ilanes, &llanes);

    let mut successors: BTreeMap<LaneRef, Vec<LaneRef>> = BTreeMap::new();
    for il in &ilanes {
        successors
            .entry(LaneRef::L(il.from))
            .or_default()
            .push(LaneRef::I(il.id));
        successors.entry(LaneRef::I(il.id)).or_default().push(LaneRef::L(il.to));
    }
    Ok(LaneGraph {
        llanes,
        ilanes,
        connectors,
        successors,
        warnings,
    })
}

/// Planar angle between two directions, radians.
pub fn planar_angle(a: Point2, b: Point2) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_angle_basics() {
        assert_eq!(planar_angle(Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)), 0.0);
        assert!(
            (planar_angle(Point2::new(1.0, 0.0), Point2::new(0.0, -1.0)) - std::f64::consts::FRAC_PI_2).abs() < 1e-15
        );
    }

    #[test]
    fn connectors_dedupe_and_keep_lowest_witness() {
        let lane = |id: u32, link: u32| LLane {
            id: LLaneId(id),
            link: LinkId(link),
            index: 1,
            offset: 1.75,
            centerline: vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)],
            start_tangent: Point2::new(1.0, 0.0),
            end_tangent: Point2::new(1.0, 0.0),
            relations: vec![],
        };
        let llanes = vec![lane(0, 0), lane(1, 0), lane(2, 3), lane(3, 3)];
        let bez = CubicBezier3 {
            ctrl: [Point3::new(0.0, 0.0, 0.0); 4],
        };
        let il = |id: u32, from: u32, to: u32| ILane {
            id: ILaneId(id),
            intersection: IntersectionId(0),
            from: LLaneId(from),
            to: LLaneId(to),
            geometry: bez,
        };
        let c = build_connectors(&[il(4, 1, 3), il(2, 0, 2), il(3, 1, 2)], &llanes);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].witness, ILaneId(2));
        assert!(build_connectors(&[], &llanes).is_empty());
    }
}
