use super::types::CenterlineSet;
use crate::error::{Error, Result};
use crate::geom::{arc_length_parameterize, Curve2, Polyline};

/// Replaces every axis by its interpolating spline resampled at uniform arc
/// length, with spacing at most `spacing`. Endpoints are kept bit-exact.
pub fn smooth_centerlines(raw: &CenterlineSet, spacing: f64) -> Result<CenterlineSet> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidParams(format!(
            "smoothing spacing must be positive, got {spacing}"
        )));
    }
    let mut out = raw.clone();
    for road in &mut out.roads {
        if road.axis.length() <= 0.0 {
            return Err(Error::DegenerateAxis { road: road.id.clone() });
        }
        let curve = arc_length_parameterize(&road.axis)?;
        let n = ((curve.length() / spacing).ceil() as usize).max(1);
        road.axis =
            Polyline::new(curve.sample_uniform(n)).map_err(|_| Error::DegenerateAxis { road: road.id.clone() })?;
    }
    Ok(out)
}

/// Minimum curve radius `v^2 / (127 (u + i))` in meters for a design speed in km/h.
pub fn fillet_radius(v: f64, u: f64, i: f64) -> Result<f64> {
    if !(u + i > 0.0) {
        return Err(Error::InvalidParams(format!("u + i must be positive, got {}", u + i)));
    }
    if !(v >= 0.0) {
        return Err(Error::InvalidParams(format!("design speed must be >= 0, got {v}")));
    }
    Ok(v * v / (127.0 * (u + i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use crate::network::types::RoadAxis;

    fn set(axes: Vec<Vec<(f64, f64)>>) -> CenterlineSet {
        CenterlineSet::new(
            axes.into_iter()
                .enumerate()
                .map(|(k, pts)| {
                    let p = Polyline::new(pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect()).unwrap();
                    RoadAxis::new(format!("r{k}"), p, 8.0, 30.0)
                })
                .collect(),
        )
    }

    fn max_turn(p: &Polyline) -> f64 {
        p.points()
            .windows(3)
            .map(|w| {
                let a = w[1] - w[0];
                let b = w[2] - w[1];
                a.cross(b).atan2(a.dot(b)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn straight_axis_resamples_to_51_points() {
        let s = smooth_centerlines(&set(vec![vec![(0.0, 0.0), (100.0, 0.0)]]), 2.0).unwrap();
        let p = s.roads[0].axis.points();
        assert_eq!(p.len(), 51);
        assert!(p.iter().all(|q| q.y == 0.0));
    }

    #[test]
    fn right_angle_is_softened() {
        let raw = set(vec![vec![(0.0, 0.0), (50.0, 0.0), (50.0, 50.0)]]);
        let s = smooth_centerlines(&raw, 2.0).unwrap();
        assert!(max_turn(&s.roads[0].axis) < max_turn(&raw.roads[0].axis));
    }

    #[test]
    fn shared_endpoints_survive() {
        let s = smooth_centerlines(
            &set(vec![
                vec![(0.0, 0.0), (30.0, 7.0), (60.0, 0.0)],
                vec![(0.0, 0.0), (-3.0, 40.0)],
            ]),
            2.0,
        )
        .unwrap();
        assert_eq!(s.roads[0].axis.first(), Point2::new(0.0, 0.0));
        assert_eq!(s.roads[1].axis.first(), Point2::new(0.0, 0.0));
    }

    #[test]
    fn radius_formula() {
        assert_eq!(fillet_radius(0.0, 0.1, 0.05).unwrap(), 0.0);
        assert!((fillet_radius(40.0, 0.10, 0.05).unwrap() - 1600.0 / (127.0 * 0.15)).abs() < 1e-12);
        assert!(fillet_radius(40.0, 0.1, -0.1).is_err());
    }
}
