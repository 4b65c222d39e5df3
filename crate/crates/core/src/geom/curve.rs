//! Arc-length parameterized planar curves.
//!
//! Input polylines are interpolated with a centripetal Catmull-Rom spline
//! (one cubic Hermite segment per input segment) and then reparameterized by
//! arc length. Arc length is tabulated with Gauss-Legendre quadrature on a
//! fixed number of sub-intervals per segment; evaluation inverts the table
//! with a safeguarded Newton iteration.

use std::sync::Arc;

use super::point::Point2;
use super::polyline::Polyline;
use crate::error::{Error, Result};

const SUBDIVISIONS: usize = 8;

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Anything that can be walked by arc length.
pub trait Curve2 {
    fn length(&self) -> f64;
    fn position(&self, s: f64) -> Point2;
    /// Unit tangent.
    fn tangent(&self, s: f64) -> Point2;

    /// Unit left normal.
    fn normal(&self, s: f64) -> Point2 {
        self.tangent(s).perp()
    }
}

#[derive(Debug, Clone, Copy)]
struct Hermite {
    p0: Point2,
    p1: Point2,
    m0: Point2,
    m1: Point2,
}

impl Hermite {
    fn eval(&self, u: f64) -> Point2 {
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        self.p0 * h00 + self.m0 * h10 + self.p1 * h01 + self.m1 * h11
    }

    fn d1(&self, u: f64) -> Point2 {
        let u2 = u * u;
        let h00 = 6.0 * u2 - 6.0 * u;
        let h10 = 3.0 * u2 - 4.0 * u + 1.0;
        let h01 = -6.0 * u2 + 6.0 * u;
        let h11 = 3.0 * u2 - 2.0 * u;
        self.p0 * h00 + self.m0 * h10 + self.p1 * h01 + self.m1 * h11
    }

    fn d2(&self, u: f64) -> Point2 {
        let h00 = 12.0 * u - 6.0;
        let h10 = 6.0 * u - 4.0;
        let h01 = -12.0 * u + 6.0;
        let h11 = 6.0 * u - 2.0;
        self.p0 * h00 + self.m0 * h10 + self.p1 * h01 + self.m1 * h11
    }

    fn speed(&self, u: f64) -> f64 {
        self.d1(u).norm()
    }

    fn arc(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(x, w)| w * self.speed(mid + half * x))
            .sum::<f64>()
            * half
    }
}

#[derive(Debug, Clone, Copy)]
struct Station {
    seg: usize,
    u0: f64,
    u1: f64,
    s0: f64,
    point: Point2,
}

#[derive(Debug)]
struct Spline {
    segs: Vec<Hermite>,
    stations: Vec<Station>,
    total: f64,
    first: Point2,
    last: Point2,
}

impl Spline {
    fn build(points: &[Point2]) -> Spline {
        let n = points.len();
        let dt: Vec<f64> = points.windows(2).map(|w| w[0].dist(w[1]).sqrt()).collect();
        // Tangent at each node w.r.t. the centripetal knot parameter.
        let mut m = vec![Point2::default(); n];
        for i in 0..n {
            m[i] = if i == 0 || i == n - 1 {
                continue;
            } else {
                let (a, b) = (dt[i - 1], dt[i]);
                (points[i] - points[i - 1]) * (1.0 / a) - (points[i + 1] - points[i - 1]) * (1.0 / (a + b))
                    + (points[i + 1] - points[i]) * (1.0 / b)
            };
        }
        // Ends take the tangent of the parabola through the end chord and the
        // neighbouring node tangent; two-point input stays a straight chord.
        if n == 2 {
            m[0] = (points[1] - points[0]) * (1.0 / dt[0]);
            m[1] = m[0];
        } else {
            m[0] = (points[1] - points[0]) * (2.0 / dt[0]) - m[1];
            m[n - 1] = (points[n - 1] - points[n - 2]) * (2.0 / dt[n - 2]) - m[n - 2];
        }
        let segs: Vec<Hermite> = (0..n - 1)
            .map(|i| Hermite {
                p0: points[i],
                p1: points[i + 1],
                m0: m[i] * dt[i],
                m1: m[i + 1] * dt[i],
            })
            .collect();

        let mut stations = Vec::with_capacity(segs.len() * SUBDIVISIONS);
        let mut s = 0.0;
        for (k, seg) in segs.iter().enumerate() {
            for j in 0..SUBDIVISIONS {
                let u0 = j as f64 / SUBDIVISIONS as f64;
                let u1 = (j + 1) as f64 / SUBDIVISIONS as f64;
                stations.push(Station {
                    seg: k,
                    u0,
                    u1,
                    s0: s,
                    point: seg.eval(u0),
                });
                s += seg.arc(u0, u1);
            }
        }
        Spline {
            segs,
            stations,
            total: s,
            first: points[0],
            last: points[n - 1],
        }
    }

    /// Segment index and local parameter for arc length `s`.
    fn locate(&self, s: f64) -> (usize, f64) {
        if s <= 0.0 {
            return (0, 0.0);
        }
        if s >= self.total {
            return (self.segs.len() - 1, 1.0);
        }
        let idx = self.stations.partition_point(|st| st.s0 <= s) - 1;
        let st = self.stations[idx];
        let seg = &self.segs[st.seg];
        let target = s - st.s0;
        let sub_len = self.stations.get(idx + 1).map_or(self.total, |n| n.s0) - st.s0;
        let (mut lo, mut hi) = (st.u0, st.u1);
        let mut u = st.u0 + (st.u1 - st.u0) * (target / sub_len).clamp(0.0, 1.0);
        for _ in 0..50 {
            let f = seg.arc(st.u0, u) - target;
            if f.abs() < 1e-13 {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let d = seg.speed(u);
            let mut next = u - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() < 1e-16 {
                u = next;
                break;
            }
            u = next;
        }
        (st.seg, u)
    }
}

/// Arc-length parameterized interpolating curve, possibly a sub-range of a
/// longer curve.
#[derive(Debug, Clone)]
pub struct ParamCurve {
    spline: Arc<Spline>,
    start: f64,
    end: f64,
}

impl ParamCurve {
    fn inner(&self, s: f64) -> f64 {
        if s >= self.end - self.start {
            self.end
        } else if s <= 0.0 {
            self.start
        } else {
            self.start + s
        }
    }

    /// View of the sub-range `[s0, s1]`, re-based to start at zero.
    pub fn slice(&self, s0: f64, s1: f64) -> ParamCurve {
        let a = self.inner(s0.max(0.0));
        let b = self.inner(s1.min(self.length()));
        ParamCurve {
            spline: Arc::clone(&self.spline),
            start: a,
            end: b.max(a),
        }
    }

    /// Signed curvature (positive when turning left).
    pub fn curvature(&self, s: f64) -> f64 {
        let (k, u) = self.spline.locate(self.inner(s));
        let seg = &self.spline.segs[k];
        let d1 = seg.d1(u);
        let d2 = seg.d2(u);
        d1.cross(d2) / d1.norm().powi(3)
    }

    /// Samples `n + 1` points at uniform arc-length spacing.
    pub fn sample_uniform(&self, n: usize) -> Vec<Point2> {
        let len = self.length();
        (0..=n)
            .map(|i| {
                if i == n {
                    self.position(len)
                } else {
                    self.position(len * i as f64 / n as f64)
                }
            })
            .collect()
    }

    /// Arc lengths of `n + 1` uniform stations; the last one is exactly the length.
    pub fn stations(&self, n: usize) -> Vec<f64> {
        let len = self.length();
        (0..=n)
            .map(|i| if i == n { len } else { len * i as f64 / n as f64 })
            .collect()
    }

    /// Nearest point on the curve: returns `(s, distance)`.
    ///
    /// Coarse scan over the tabulated stations, then Newton refinement on
    /// `(C(s) - p) . T(s) = 0`. Ties resolve to the smaller `s`.
    pub fn nearest(&self, p: Point2) -> (f64, f64) {
        let len = self.length();
        let sp = &self.spline;
        let lo = sp.stations.partition_point(|st| st.s0 < self.start);
        let hi = sp.stations.partition_point(|st| st.s0 <= self.end);
        let mut candidates: Vec<f64> = vec![0.0, len];
        let mut scored: Vec<(f64, f64)> = sp.stations[lo..hi]
            .iter()
            .map(|st| (st.point.dist(p), st.s0 - self.start))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        candidates.extend(scored.iter().take(3).map(|c| c.1.clamp(0.0, len)));

        let mut best = (0.0, f64::INFINITY);
        for s0 in candidates {
            let s = self.refine_nearest(p, s0);
            let d = self.position(s).dist(p);
            if d < best.1 - 1e-12 || (d <= best.1 + 1e-12 && s < best.0) {
                best = (s, d);
            }
        }
        best
    }

    fn refine_nearest(&self, p: Point2, mut s: f64) -> f64 {
        let len = self.length();
        for _ in 0..40 {
            let c = self.position(s);
            let t = self.tangent(s);
            let g = (c - p).dot(t);
            let dg = 1.0 + self.curvature(s) * (c - p).dot(t.perp());
            let step = if dg > 1e-6 { g / dg } else { g };
            let next = (s - step).clamp(0.0, len);
            if (next - s).abs() < 1e-13 {
                return next;
            }
            s = next;
        }
        s
    }
}

impl Curve2 for ParamCurve {
    fn length(&self) -> f64 {
        self.end - self.start
    }

    fn position(&self, s: f64) -> Point2 {
        let t = self.inner(s);
        if t <= 0.0 {
            return self.spline.first;
        }
        if t >= self.spline.total {
            return self.spline.last;
        }
        let (k, u) = self.spline.locate(t);
        self.spline.segs[k].eval(u)
    }

    fn tangent(&self, s: f64) -> Point2 {
        let (k, u) = self.spline.locate(self.inner(s));
        self.spline.segs[k].d1(u).normalized()
    }
}

/// Parallel curve at signed distance `offset` (positive = left) of a base
/// curve, parameterized by the base curve's arc length.
#[derive(Debug, Clone, Copy)]
pub struct OffsetCurve<'a, C: Curve2> {
    pub base: &'a C,
    pub offset: f64,
}

impl<C: Curve2> Curve2 for OffsetCurve<'_, C> {
    fn length(&self) -> f64 {
        self.base.length()
    }
    fn position(&self, s: f64) -> Point2 {
        self.base.position(s) + self.base.normal(s) * self.offset
    }
    fn tangent(&self, s: f64) -> Point2 {
        self.base.tangent(s)
    }
}

/// Fits the interpolating curve through `poly` and parameterizes it by arc length.
pub fn arc_length_parameterize(poly: &Polyline) -> Result<ParamCurve> {
    if poly.len() < 2 {
        return Err(Error::DegeneratePolyline("fewer than 2 points".into()));
    }
    let spline = Spline::build(poly.points());
    let total = spline.total;
    Ok(ParamCurve {
        spline: Arc::new(spline),
        start: 0.0,
        end: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(pts: &[(f64, f64)]) -> ParamCurve {
        let p = Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap();
        arc_length_parameterize(&p).unwrap()
    }

    #[test]
    fn straight_segment() {
        let c = curve(&[(0.0, 0.0), (100.0, 0.0)]);
        assert!((c.length() - 100.0).abs() < 1e-9);
        let p = c.position(50.0);
        assert!((p.x - 50.0).abs() < 1e-9 && p.y.abs() < 1e-12);
    }

    #[test]
    fn square_wave_is_at_least_chord_sum() {
        let c = curve(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (2.0, 1.0)]);
        assert!(c.length() >= 3.0);
        for (s, q) in [(0.0, (0.0, 0.0)), (c.length(), (2.0, 1.0))] {
            let p = c.position(s);
            assert!((p.x - q.0).abs() < 1e-12 && (p.y - q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_circle_length() {
        let pts: Vec<(f64, f64)> = (0..32)
            .map(|i| {
                let a = std::f64::consts::FRAC_PI_2 * i as f64 / 31.0;
                (a.cos(), a.sin())
            })
            .collect();
        let c = curve(&pts);
        let rel = (c.length() - std::f64::consts::FRAC_PI_2).abs() / std::f64::consts::FRAC_PI_2;
        assert!(rel < 0.01, "relative error {rel}");
    }

    #[test]
    fn passes_through_inputs_in_order() {
        let pts = [(0.0, 0.0), (3.0, 1.0), (5.0, 4.0), (9.0, 4.5)];
        let c = curve(&pts);
        let mut last_s = -1.0;
        for &(x, y) in &pts {
            let (s, d) = c.nearest(Point2::new(x, y));
            assert!(d < 1e-6, "distance {d}");
            assert!(s > last_s);
            last_s = s;
        }
    }

    #[test]
    fn slice_endpoints_are_exact() {
        let c = curve(&[(0.0, 0.0), (10.0, 3.0), (20.0, 0.0)]);
        let sl = c.slice(2.5, 17.25);
        assert_eq!(sl.position(0.0), c.position(2.5));
        assert_eq!(sl.position(sl.length()), c.position(17.25));
    }
}
