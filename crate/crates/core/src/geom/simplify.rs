//! Douglas-Peucker polyline simplification.

use super::point::{point_segment_distance, Point2};
use super::polyline::Polyline;

/// Indices of the points kept by Douglas-Peucker with tolerance `eps`.
///
/// A point survives only if its distance to the current chord is strictly
/// greater than `eps`; the first maximum wins ties.
pub fn douglas_peucker_indices(points: &[Point2], eps: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let (mut far, mut dmax) = (a, -1.0);
        for i in a + 1..b {
            let d = point_segment_distance(points[i], points[a], points[b]);
            if d > dmax {
                dmax = d;
                far = i;
            }
        }
        if dmax > eps {
            keep[far] = true;
            stack.push((far, b));
            stack.push((a, far));
        }
    }
    (0..n).filter(|&i| keep[i]).collect()
}

pub fn douglas_peucker(poly: &Polyline, eps: f64) -> Polyline {
    let pts = poly.points();
    let kept: Vec<Point2> = douglas_peucker_indices(pts, eps.max(0.0))
        .into_iter()
        .map(|i| pts[i])
        .collect();
    Polyline::new(kept).expect("endpoints of a valid polyline are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn collinear_middle_is_dropped() {
        let out = douglas_peucker(&poly(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]), 0.1);
        assert_eq!(out, poly(&[(0.0, 0.0), (10.0, 0.0)]));
    }

    #[test]
    fn deviation_above_eps_is_kept() {
        let p = poly(&[(0.0, 0.0), (5.0, 1.0), (10.0, 0.0)]);
        assert_eq!(douglas_peucker(&p, 0.5), p);
    }

    #[test]
    fn zero_eps_drops_only_exact_collinear() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 1.0), (4.0, 0.0)]);
        let out = douglas_peucker(&p, 0.0);
        assert_eq!(out.len(), 4);
    }
}
