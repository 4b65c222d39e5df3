//! Circular fillets tangent to two curves.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::curve::{Curve2, OffsetCurve};
use super::point::{segment_intersection, Point2};
use crate::error::{Error, Result};

/// Circular arc tangent to two boundary curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Point2,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    /// Counter-clockwise sweep from the start to the end angle.
    pub ccw: bool,
    /// Tangency point on the first boundary.
    pub tangent_a: Point2,
    /// Tangency point on the second boundary.
    pub tangent_b: Point2,
    /// Arc-length parameter of `tangent_a` on the first boundary.
    pub param_a: f64,
    /// Arc-length parameter of `tangent_b` on the second boundary.
    pub param_b: f64,
}

impl Arc {
    /// Angle (radians, modulo pi) between the circle's tangent at `at` and
    /// the direction `curve_tangent`.
    pub fn tangency_residual(&self, at: Point2, curve_tangent: Point2) -> f64 {
        let circle_tangent = (at - self.center).perp().normalized();
        let t = curve_tangent.normalized();
        circle_tangent.cross(t).abs().asin()
    }
}

/// Circle of radius `r` tangent to both `a` and `b`.
///
/// Both curves are expected to start near the corner they form and run away
/// from it. The circle sits on the side of each curve that faces the other
/// one, so swapping the arguments yields the same circle.
pub fn tangent_circle_fillet<A: Curve2, B: Curve2>(a: &A, b: &B, r: f64) -> Result<Arc> {
    tangent_circle_fillet_with(a, b, r, 1e-3)
}

pub fn tangent_circle_fillet_with<A: Curve2, B: Curve2>(a: &A, b: &B, r: f64, parallel_angle: f64) -> Result<Arc> {
    let fail = |reason: String| Error::NoFilletExists {
        context: "boundary pair".into(),
        reason,
    };
    if !(r > 0.0) || !r.is_finite() {
        return Err(fail(format!("radius must be positive, got {r}")));
    }
    let ta = a.tangent(0.0);
    let tb = b.tangent(0.0);
    let sin = ta.cross(tb);
    if sin.abs().asin() < parallel_angle {
        return Err(fail(format!("boundaries are parallel within {parallel_angle} rad")));
    }
    let (off_a, off_b) = if sin > 0.0 { (r, -r) } else { (-r, r) };
    let ca = OffsetCurve { base: a, offset: off_a };
    let cb = OffsetCurve { base: b, offset: off_b };

    let step = (a.length().min(b.length()) / 64.0).clamp(1e-3, 1.0);
    let pa = sample(&ca, step);
    let pb = sample(&cb, step);
    let (sa0, sb0) =
        first_crossing(&pa, &pb).ok_or_else(|| fail(format!("radius {r} m does not fit between the boundaries")))?;
    let (sa, sb) = refine_crossing(&ca, &cb, sa0, sb0);

    let center = ca.position(sa);
    let tangent_a = a.position(sa);
    let tangent_b = b.position(sb);
    let start_angle = (tangent_a - center).angle();
    let end_angle = (tangent_b - center).angle();
    let ccw = (tangent_a - center).cross(tangent_b - center) > 0.0;
    Ok(Arc {
        center,
        radius: r,
        start_angle,
        end_angle,
        ccw,
        tangent_a,
        tangent_b,
        param_a: sa,
        param_b: sb,
    })
}

fn sample<C: Curve2>(c: &C, step: f64) -> Vec<(f64, Point2)> {
    let len = c.length();
    let n = ((len / step).ceil() as usize).max(1);
    (0..=n)
        .map(|i| {
            let s = if i == n { len } else { len * i as f64 / n as f64 };
            (s, c.position(s))
        })
        .collect()
}

/// First crossing along `a` of the sampled polylines `a` and `b`.
fn first_crossing(a: &[(f64, Point2)], b: &[(f64, Point2)]) -> Option<(f64, f64)> {
    let cell = a
        .windows(2)
        .chain(b.windows(2))
        .map(|w| w[0].1.dist(w[1].1))
        .fold(0.0, f64::max)
        .max(1e-6)
        * 4.0;
    let key = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (j, w) in b.windows(2).enumerate() {
        let (k0, k1) = (key(w[0].1), key(w[1].1));
        for gx in k0.0.min(k1.0)..=k0.0.max(k1.0) {
            for gy in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                grid.entry((gx, gy)).or_default().push(j);
            }
        }
    }
    for w in a.windows(2) {
        let (k0, k1) = (key(w[0].1), key(w[1].1));
        let mut best: Option<(f64, f64)> = None;
        for gx in k0.0.min(k1.0)..=k0.0.max(k1.0) {
            for gy in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                let Some(cands) = grid.get(&(gx, gy)) else { continue };
                for &j in cands {
                    let (q0, q1) = (b[j], b[j + 1]);
                    if let Some((t, u)) = segment_intersection(w[0].1, w[1].1, q0.1, q1.1) {
                        let sa = w[0].0 + t * (w[1].0 - w[0].0);
                        let sb = q0.0 + u * (q1.0 - q0.0);
                        if best.is_none_or(|bst| sa < bst.0) {
                            best = Some((sa, sb));
                        }
                    }
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Newton iteration on `ca(sa) - cb(sb) = 0`.
fn refine_crossing<A: Curve2, B: Curve2>(ca: &A, cb: &B, mut sa: f64, mut sb: f64) -> (f64, f64) {
    let (la, lb) = (ca.length(), cb.length());
    for _ in 0..60 {
        let f = ca.position(sa) - cb.position(sb);
        if f.norm() < 1e-12 {
            break;
        }
        let h = 1e-6;
        let da = (ca.position((sa + h).min(la)) - ca.position((sa - h).max(0.0)))
            * (1.0 / ((sa + h).min(la) - (sa - h).max(0.0)));
        let db = (cb.position((sb + h).min(lb)) - cb.position((sb - h).max(0.0)))
            * (1.0 / ((sb + h).min(lb) - (sb - h).max(0.0)));
        // Solve [da, -db] [dsa, dsb]^T = -f.
        let det = da.cross(-db);
        if det.abs() < 1e-14 {
            break;
        }
        let dsa = (-f).cross(-db) / det;
        let dsb = da.cross(-f) / det;
        let na = (sa + dsa).clamp(0.0, la);
        let nb = (sb + dsb).clamp(0.0, lb);
        if (na - sa).abs() < 1e-14 && (nb - sb).abs() < 1e-14 {
            break;
        }
        sa = na;
        sb = nb;
    }
    (sa, sb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::curve::{arc_length_parameterize, ParamCurve};
    use crate::geom::polyline::Polyline;

    fn line(a: (f64, f64), b: (f64, f64)) -> ParamCurve {
        arc_length_parameterize(&Polyline::new(vec![Point2::new(a.0, a.1), Point2::new(b.0, b.1)]).unwrap()).unwrap()
    }

    #[test]
    fn axis_aligned_corner() {
        let a = line((0.0, 0.0), (0.0, 50.0));
        let b = line((0.0, 0.0), (50.0, 0.0));
        let arc = tangent_circle_fillet(&a, &b, 5.0).unwrap();
        assert!(arc.center.dist(Point2::new(5.0, 5.0)) < 1e-9);
        assert!(arc.tangent_a.dist(Point2::new(0.0, 5.0)) < 1e-9);
        assert!(arc.tangent_b.dist(Point2::new(5.0, 0.0)) < 1e-9);
    }

    #[test]
    fn sixty_degree_corner_center_on_bisector() {
        let a = line((0.0, 0.0), (100.0, 0.0));
        let dir = Point2::new(60f64.to_radians().cos(), 60f64.to_radians().sin());
        let b = line((0.0, 0.0), (100.0 * dir.x, 100.0 * dir.y));
        let arc = tangent_circle_fillet(&a, &b, 5.0).unwrap();
        // Hand geometry: |center| = R / sin(30 deg) = 10 along the 30 degree bisector.
        assert!((arc.center.norm() - 10.0).abs() < 1e-9);
        assert!((arc.center.angle() - 30f64.to_radians()).abs() < 1e-9);
        assert!(arc.tangency_residual(arc.tangent_a, a.tangent(arc.param_a)) < 1e-6);
        assert!(arc.tangency_residual(arc.tangent_b, b.tangent(arc.param_b)) < 1e-6);
    }

    #[test]
    fn near_parallel_has_no_fillet() {
        let a = line((0.0, 0.0), (100.0, 0.0));
        let ang: f64 = 1e-4;
        let b = line((0.0, 1.0), (100.0 * ang.cos(), 1.0 + 100.0 * ang.sin()));
        assert!(matches!(
            tangent_circle_fillet(&a, &b, 5.0),
            Err(Error::NoFilletExists { .. })
        ));
    }

    #[test]
    fn radius_too_large_has_no_fillet() {
        let a = line((0.0, 0.0), (10.0, 0.0));
        let b = line((0.0, 0.0), (0.0, 10.0));
        assert!(tangent_circle_fillet(&a, &b, 50.0).is_err());
    }

    #[test]
    fn swapping_boundaries_gives_same_circle() {
        let a = line((0.0, 0.0), (80.0, 10.0));
        let b = line((0.0, 0.0), (-20.0, 70.0));
        let ab = tangent_circle_fillet(&a, &b, 7.0).unwrap();
        let ba = tangent_circle_fillet(&b, &a, 7.0).unwrap();
        assert!(ab.center.dist(ba.center) < 1e-9 * 7.0);
    }
}
