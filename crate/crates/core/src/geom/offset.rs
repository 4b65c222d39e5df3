use serde::{Deserialize, Serialize};

use super::curve::{Curve2, ParamCurve};
use super::point::{segment_intersection, Point2};
use super::polyline::Polyline;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Offsets `curve` by `d` toward `side`, sampling at the default 1 m step.
pub fn offset_polyline(curve: &ParamCurve, d: f64, side: Side) -> Result<Polyline> {
    offset_polyline_with_step(curve, d, side, 1.0)
}

/// Offsets `curve` by `d` toward `side`, sampling every `step` meters of arc length.
///
/// Loops created where the curvature radius is below `d` are cut out at the
/// self-crossing point.
pub fn offset_polyline_with_step(curve: &ParamCurve, d: f64, side: Side, step: f64) -> Result<Polyline> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParams(format!(
            "offset distance must be positive, got {d}"
        )));
    }
    let n = ((curve.length() / step).ceil() as usize).max(1);
    let signed = side.sign() * d;
    let stations = curve.stations(n);
    let mut folds = false;
    let raw: Vec<Point2> = stations
        .iter()
        .map(|&s| {
            if 1.0 - curve.curvature(s) * signed <= 0.0 {
                folds = true;
            }
            curve.position(s) + curve.normal(s) * signed
        })
        .collect();

    let total = raw.len();
    let clipped = if folds { clip_loops(raw) } else { raw };
    let removed = total.saturating_sub(clipped.len());
    if removed * 2 > total {
        return Err(Error::OffsetCollapse {
            context: "centerline".into(),
            distance: d,
            removed,
            total,
        });
    }
    Polyline::new(clipped)
}

/// Removes closed loops from a polyline by joining each self-crossing pair
/// of segments at their intersection point.
pub(crate) fn clip_loops(mut pts: Vec<Point2>) -> Vec<Point2> {
    'outer: loop {
        let n = pts.len();
        if n < 4 {
            return pts;
        }
        for i in 0..n - 1 {
            // Search from the far end so the widest loop goes first.
            for j in (i + 2..n - 1).rev() {
                if let Some((t, _)) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                    let x = pts[i].lerp(pts[i + 1], t);
                    let mut next = Vec::with_capacity(n);
                    next.extend_from_slice(&pts[..=i]);
                    next.push(x);
                    next.extend_from_slice(&pts[j + 1..]);
                    pts = next;
                    continue 'outer;
                }
            }
        }
        return pts;
    }
}
