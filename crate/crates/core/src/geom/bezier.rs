use serde::{Deserialize, Serialize};

use super::point::Point3;
use crate::error::{Error, Result};

/// Default handle length as a fraction of the chord (Hermite-to-Bezier).
pub const DEFAULT_HANDLE_SCALE: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicBezier3 {
    pub ctrl: [Point3; 4],
}

impl CubicBezier3 {
    pub fn eval(&self, t: f64) -> Point3 {
        let [p0, p1, p2, p3] = self.ctrl;
        let mt = 1.0 - t;
        p0 * (mt * mt * mt) + p1 * (3.0 * mt * mt * t) + p2 * (3.0 * mt * t * t) + p3 * (t * t * t)
    }

    pub fn derivative(&self, t: f64) -> Point3 {
        let [p0, p1, p2, p3] = self.ctrl;
        let mt = 1.0 - t;
        (p1 - p0) * (3.0 * mt * mt) + (p2 - p1) * (6.0 * mt * t) + (p3 - p2) * (3.0 * t * t)
    }

    pub fn second_derivative(&self, t: f64) -> Point3 {
        let [p0, p1, p2, p3] = self.ctrl;
        (p2 - p1 * 2.0 + p0) * (6.0 * (1.0 - t)) + (p3 - p2 * 2.0 + p1) * (6.0 * t)
    }

    pub fn curvature(&self, t: f64) -> f64 {
        let d1 = self.derivative(t);
        let d2 = self.second_derivative(t);
        d1.cross(d2).norm() / d1.norm().powi(3)
    }

    /// `n + 1` points at uniform parameter spacing; both ends exact.
    pub fn sample(&self, n: usize) -> Vec<Point3> {
        (0..=n)
            .map(|i| match i {
                0 => self.ctrl[0],
                i if i == n => self.ctrl[3],
                i => self.eval(i as f64 / n as f64),
            })
            .collect()
    }
}

/// Cubic Bezier leaving `p0` along `t0` and arriving at `p1` along `t1`.
pub fn cubic_bezier_from_tangents(
    p0: Point3,
    t0: Point3,
    p1: Point3,
    t1: Point3,
    handle_scale: f64,
) -> Result<CubicBezier3> {
    let chord = (p1 - p0).norm();
    if chord < 1e-6 {
        return Err(Error::DegenerateSpan(chord));
    }
    let lambda = handle_scale * chord;
    Ok(CubicBezier3 {
        ctrl: [p0, p0 + t0 * lambda, p1 - t1 * lambda, p1],
    })
}
