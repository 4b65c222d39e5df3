use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Arc, ParamCurve, Point2, Polyline, Side};
use crate::tolerance::ToleranceSet;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "_{}"), self.0)
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

pub(crate) use id_type;

id_type!(LinkId, "link");
id_type!(IntersectionId, "int");
id_type!(SegAxisId, "seg");

/// One input road center axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadAxis {
    pub id: String,
    pub axis: Polyline,
    /// Full carriageway width in meters.
    pub width: f64,
    /// Design speed in km/h.
    pub design_speed: f64,
    /// Lanes per direction.
    pub lanes: usize,
    /// Lane width; `None` means [`DEFAULT_LANE_WIDTH`].
    pub lane_width: Option<f64>,
}

impl RoadAxis {
    pub fn new(id: impl Into<String>, axis: Polyline, width: f64, design_speed: f64) -> Self {
        Self {
            id: id.into(),
            axis,
            width,
            design_speed,
            lanes: 1,
            lane_width: None,
        }
    }

    pub fn effective_lane_width(&self) -> f64 {
        self.lane_width.unwrap_or(DEFAULT_LANE_WIDTH)
    }
}

/// Default side-way force coefficient.
pub const DEFAULT_U: f64 = 0.10;
/// Default superelevation.
pub const DEFAULT_I: f64 = 0.05;
pub const DEFAULT_LANE_WIDTH: f64 = 3.5;
/// Default intersection size threshold in meters.
pub const DEFAULT_L_DIS: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CenterlineSet {
    pub roads: Vec<RoadAxis>,
    pub u: f64,
    pub i: f64,
    pub l_dis: f64,
    /// Where the centerlines came from, recorded in the output metadata.
    pub source: Option<String>,
}

impl CenterlineSet {
    pub fn new(roads: Vec<RoadAxis>) -> Self {
        Self {
            roads,
            u: DEFAULT_U,
            i: DEFAULT_I,
            l_dis: DEFAULT_L_DIS,
            source: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u + self.i > 0.0) {
            return Err(Error::InvalidParams(format!(
                "u + i must be positive, got {}",
                self.u + self.i
            )));
        }
        if !(self.l_dis > 0.0) {
            return Err(Error::InvalidParams(format!(
                "L_dis must be positive, got {}",
                self.l_dis
            )));
        }
        for r in &self.roads {
            if !(r.width > 0.0) || !r.width.is_finite() {
                return Err(Error::InvalidParams(format!("road {}: width must be positive", r.id)));
            }
            if !(r.design_speed >= 0.0) || !r.design_speed.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "road {}: design speed must be >= 0",
                    r.id
                )));
            }
            if r.lanes == 0 {
                return Err(Error::InvalidParams(format!("road {}: lane count must be >= 1", r.id)));
            }
        }
        Ok(())
    }
}

/// Center axis of a road segment between two intersections (or dead ends).
#[derive(Debug, Clone)]
pub struct SegAxis {
    pub id: SegAxisId,
    pub road: String,
    pub geometry: Polyline,
    /// Arc-length parameterized axis; `geometry` is its simplified sampling.
    pub curve: ParamCurve,
    /// `[left, right]` links relative to the axis direction.
    pub links: [LinkId; 2],
    pub start: Option<IntersectionId>,
    pub end: Option<IntersectionId>,
    pub width: f64,
    pub design_speed: f64,
    pub lanes: usize,
    pub lane_width: f64,
}

impl SegAxis {
    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    pub fn link(&self, side: Side) -> LinkId {
        match side {
            Side::Left => self.links[0],
            Side::Right => self.links[1],
        }
    }
}

/// One half of a road segment.
#[derive(Debug, Clone)]
pub struct Link {
    pub id: LinkId,
    pub seg_axis: SegAxisId,
    pub side: Side,
    /// Offset of the seg axis by half the road width.
    pub boundary: Polyline,
    /// Axis points forward, then boundary points backward; implicitly closed.
    pub polygon: Vec<Point2>,
    /// Intersection at the start of the seg axis, `None` at a dead end.
    pub from_intersection: Option<IntersectionId>,
    /// Intersection at the end of the seg axis, `None` at a dead end.
    pub to_intersection: Option<IntersectionId>,
}

/// A seg axis end attached to an intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionArm {
    pub seg_axis: SegAxisId,
    /// The seg axis starts at this intersection (otherwise it ends here).
    pub at_start: bool,
    /// Link on the left when looking away from the intersection ("+").
    pub inbound: LinkId,
    /// Link on the right when looking away from the intersection ("-").
    pub outbound: LinkId,
    /// Axis point on the cut line.
    pub cut_center: Point2,
    pub cut_left: Point2,
    pub cut_right: Point2,
    /// Unit axis direction at the cut, pointing away from the intersection.
    pub direction: Point2,
}

/// A fillet built at a junction corner, with the boundary directions at its
/// tangency points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilletRecord {
    pub arc: Arc,
    pub boundary_tangent_a: Point2,
    pub boundary_tangent_b: Point2,
}

#[derive(Debug, Clone)]
pub struct Intersection {
    pub id: IntersectionId,
    /// Convex polygon, clockwise, two vertices per arm.
    pub boundary: Vec<Point2>,
    /// Point set from which the boundary was assembled (cut line ends and
    /// fillet tangency points).
    pub members: Vec<Point2>,
    /// Arms in clockwise order, starting with the arm owning `boundary[0]`.
    pub arms: Vec<IntersectionArm>,
    /// Incident links in clockwise boundary order (`2 k`).
    pub links: Vec<LinkId>,
    pub fillets: Vec<FilletRecord>,
    pub centroid: Point2,
}

impl Intersection {
    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation {
    pub intersection: IntersectionId,
    pub link: LinkId,
    pub sign: Sign,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelationNet {
    pub entries: Vec<Relation>,
}

impl RelationNet {
    pub fn sign_of(&self, intersection: IntersectionId, link: LinkId) -> Option<Sign> {
        self.entries
            .iter()
            .find(|r| r.intersection == intersection && r.link == link)
            .map(|r| r.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkParams {
    pub source: Option<String>,
    pub u: f64,
    pub i: f64,
    pub l_dis: f64,
    pub tolerances: ToleranceSet,
}

#[derive(Debug, Clone)]
pub struct RoadNetwork2D {
    pub seg_axes: Vec<SegAxis>,
    pub links: Vec<Link>,
    pub intersections: Vec<Intersection>,
    pub relations: RelationNet,
    pub params: NetworkParams,
    pub warnings: Vec<String>,
}

impl RoadNetwork2D {
    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn seg_axis(&self, id: SegAxisId) -> &SegAxis {
        &self.seg_axes[id.index()]
    }

    pub fn intersection(&self, id: IntersectionId) -> &Intersection {
        &self.intersections[id.index()]
    }

    /// Checks that every referenced id exists and that each link touches at
    /// most two intersections.
    pub fn check_integrity(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Input(format!("network integrity: {m}")));
        for (i, s) in self.seg_axes.iter().enumerate() {
            if s.id.index() != i {
                return bad(format!("{} stored at index {i}", s.id));
            }
            for l in s.links {
                if l.index() >= self.links.len() || self.links[l.index()].seg_axis != s.id {
                    return bad(format!("{} references {l}", s.id));
                }
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            if l.id.index() != i || l.seg_axis.index() >= self.seg_axes.len() {
                return bad(format!("{} malformed", l.id));
            }
            for x in [l.from_intersection, l.to_intersection].into_iter().flatten() {
                if x.index() >= self.intersections.len() {
                    return bad(format!("{} references missing {x}", l.id));
                }
            }
        }
        for x in &self.intersections {
            if x.links.len() != 2 * x.arms.len() || x.boundary.len() != 2 * x.arms.len() {
                return bad(format!("{} has inconsistent arm/link counts", x.id));
            }
            for l in &x.links {
                let link = self.links.get(l.index());
                if link.is_none_or(|k| k.from_intersection != Some(x.id) && k.to_intersection != Some(x.id)) {
                    return bad(format!("{} lists {l} which does not reference it", x.id));
                }
            }
        }
        for r in &self.relations.entries {
            if r.link.index() >= self.links.len() || r.intersection.index() >= self.intersections.len() {
                return bad(format!("relation ({}, {}) dangling", r.intersection, r.link));
            }
        }
        Ok(())
    }
}
