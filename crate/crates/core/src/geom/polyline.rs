use serde::{Deserialize, Serialize};

use super::point::Point2;
use crate::error::{Error, Result};

/// Minimum separation between consecutive points.
pub const MIN_SEPARATION: f64 = 1e-9;

/// Open polyline with at least two distinct consecutive points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polyline {
    points: Vec<Point2>,
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicates.
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolyline(format!("non-finite point {p:?}")));
        }
        let mut out: Vec<Point2> = Vec::with_capacity(points.len());
        for p in points {
            match out.last() {
                Some(q) if q.dist(p) <= MIN_SEPARATION => {}
                _ => out.push(p),
            }
        }
        if out.len() < 2 {
            return Err(Error::DegeneratePolyline(format!(
                "{} distinct point(s), need at least 2",
                out.len()
            )));
        }
        Ok(Self { points: out })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Point2 {
        self.points[0]
    }

    pub fn last(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// Sum of segment lengths.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    /// Distance from `p` to the nearest point of the polyline.
    pub fn distance_to(&self, p: Point2) -> f64 {
        self.points
            .windows(2)
            .map(|w| super::point::point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }
}

impl TryFrom<Vec<Point2>> for Polyline {
    type Error = Error;
    fn try_from(points: Vec<Point2>) -> Result<Self> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Point2> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_collapsed() {
        let p = Polyline::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn single_distinct_point_is_rejected() {
        let err = Polyline::new(vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)]);
        assert!(matches!(err, Err(Error::DegeneratePolyline(_))));
        assert!(Polyline::new(vec![Point2::new(f64::NAN, 0.0), Point2::new(1.0, 0.0)]).is_err());
    }
}
