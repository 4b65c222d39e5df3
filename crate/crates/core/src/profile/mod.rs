//! Longitudinal road elevation: flat intersections, curvature-bounded
//! profile curves along seg axes, and cross-section extrusion over links.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{fit_bspline_with, Curve2, FitOptions, ParamCurve, PiecewiseBSpline, Point2};
use crate::network::{Intersection, IntersectionId, RoadNetwork2D, SegAxis, SegAxisId};
use crate::terrain::HeightField;

/// Relative slack allowed on the certificates, absorbing sweep rounding.
pub const CERTIFICATE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileParams {
    /// Sampling interval along the axis in meters.
    pub ds: f64,
    /// Longitudinal grade bound (0.08 = 8 %).
    pub slope_max: f64,
    /// Curvature bound of the fitted profile, 1/m.
    pub kappa_max: f64,
    /// Largest admitted jump of discrete curvature between samples, 1/m.
    pub dk_max: f64,
    /// Copied from the tolerance set by the pipeline.
    #[serde(skip)]
    pub fit_tolerance: f64,
    #[serde(skip)]
    pub max_pieces: usize,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self {
            ds: 5.0,
            slope_max: 0.08,
            kappa_max: 0.1,
            dk_max: 0.1,
            fit_tolerance: 0.5,
            max_pieces: 64,
        }
    }
}

impl ProfileParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ds", self.ds),
            ("slope_max", self.slope_max),
            ("kappa_max", self.kappa_max),
            ("dk_max", self.dk_max),
            ("fit_tolerance", self.fit_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_pieces == 0 {
            return Err(Error::InvalidParams("max_pieces must be >= 1".into()));
        }
        Ok(())
    }
}

/// Terrain samples admitted along one seg axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlVectorSet {
    pub seg_axis: SegAxisId,
    pub ds: f64,
    /// `(s, h)` with strictly increasing `s`; first is `s = 0`, last is `s = S`.
    pub samples: Vec<(f64, f64)>,
    /// Number of candidates that were rejected.
    pub dropped: usize,
}

/// Signed curvature of the circle through three `(s, h)` points.
fn menger(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (ab, bc, ac) = ((b.0 - a.0, b.1 - a.1), (c.0 - b.0, c.1 - b.1), (c.0 - a.0, c.1 - a.1));
    let cross = ab.0 * bc.1 - ab.1 * bc.0;
    let den = ab.0.hypot(ab.1) * bc.0.hypot(bc.1) * ac.0.hypot(ac.1);
    if den == 0.0 {
        0.0
    } else {
        2.0 * cross / den
    }
}

/// Admission filter over raw `(s, h)` candidates. The first and last
/// candidates are always kept. An interior candidate is rejected when its
/// grade to the last kept sample or to the final sample exceeds `slope_max`,
/// or when its discrete curvature differs from the previous one by more than
/// `dk_max`. The grade test against the final sample keeps the retained set
/// reachable: consecutive kept samples never exceed `slope_max` unless the
/// two end samples already do.
pub fn admit_samples(candidates: &[(f64, f64)], slope_max: f64, dk_max: f64) -> (Vec<(f64, f64)>, usize) {
    let n = candidates.len();
    let end = candidates.last().copied().unwrap_or_default();
    let mut kept: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut dropped = 0;
    for (j, &c) in candidates.iter().enumerate() {
        if j == 0 || j + 1 == n {
            kept.push(c);
            continue;
        }
        let last = *kept.last().unwrap();
        let slope = ((c.1 - last.1).abs() / (c.0 - last.0)).max((end.1 - c.1).abs() / (end.0 - c.0));
        let k = kept.len();
        let kappa_jump = if k >= 2 {
            let prev = if k >= 3 {
                menger(kept[k - 3], kept[k - 2], kept[k - 1])
            } else {
                0.0
            };
            (menger(kept[k - 2], kept[k - 1], c) - prev).abs()
        } else {
            0.0
        };
        if slope > slope_max || kappa_jump > dk_max {
            dropped += 1;
        } else {
            kept.push(c);
        }
    }
    (kept, dropped)
}

/// Samples terrain at `n * ds` along the axis plus its end point.
pub fn sample_control_vectors(
    seg_axis: SegAxisId,
    axis: &ParamCurve,
    hf: &HeightField,
    ds: f64,
    slope_max: f64,
    dk_max: f64,
) -> Result<ControlVectorSet> {
    if !(ds > 0.0) {
        return Err(Error::InvalidParams(format!(
            "sampling interval must be positive, got {ds}"
        )));
    }
    let len = axis.length();
    let mut stations: Vec<f64> = (0..=(len / ds).floor() as usize).map(|n| n as f64 * ds).collect();
    // A station within a micrometer of the end is replaced by the end itself.
    if len - stations.last().unwrap() < 1e-6 {
        stations.pop();
    }
    stations.push(len);
    let mut candidates = Vec::with_capacity(stations.len());
    for s in stations {
        let p = axis.position(s);
        candidates.push((s, hf.sample(p.x, p.y)?));
    }
    let (samples, dropped) = admit_samples(&candidates, slope_max, dk_max);
    Ok(ControlVectorSet {
        seg_axis,
        ds,
        samples,
        dropped,
    })
}

/// Flat elevation assigned to a whole intersection polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionElevation {
    pub intersection: IntersectionId,
    pub z: f64,
}

/// Mean terrain elevation over the boundary vertices.
pub fn flatten_intersection(x: &Intersection, hf: &HeightField) -> Result<IntersectionElevation> {
    let mut sum = 0.0;
    for p in &x.boundary {
        sum += hf.sample(p.x, p.y)?;
    }
    Ok(IntersectionElevation {
        intersection: x.id,
        z: sum / x.boundary.len().max(1) as f64,
    })
}

/// Fitted elevation `h(s)` along one seg axis.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub seg_axis: SegAxisId,
    pub length: f64,
    pub spline: PiecewiseBSpline,
    pub control: ControlVectorSet,
    pub breakpoints: Vec<f64>,
    pub smoothing: f64,
    /// Maximum deviation from the admitted samples.
    pub residual: f64,
    /// Dense-sweep maxima.
    pub max_curvature: f64,
    pub max_slope: f64,
    /// Elevations enforced at `s = 0` and `s = S`.
    pub pinned: [Option<f64>; 2],
}

impl ProfileCurve {
    /// Elevation at arc length `s`, clamped to `[0, S]`.
    pub fn eval(&self, s: f64) -> f64 {
        self.spline.eval(s.clamp(self.spline.start(), self.spline.end()))
    }

    pub fn slope(&self, s: f64) -> f64 {
        self.spline.slope(s.clamp(self.spline.start(), self.spline.end()))
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.spline.curvature(s.clamp(self.spline.start(), self.spline.end()))
    }

    /// Sweep step used for the certificates.
    pub fn certificate_step(&self) -> f64 {
        (self.control.ds / 10.0).min(0.5)
    }

    fn certify(&mut self) {
        let (k, sl) = self.spline.sweep_maxima(self.certificate_step());
        self.max_curvature = k;
        self.max_slope = sl;
    }

    pub fn passes(&self, params: &ProfileParams) -> bool {
        self.max_curvature <= params.kappa_max * (1.0 + CERTIFICATE_SLACK)
            && self.max_slope <= params.slope_max * (1.0 + CERTIFICATE_SLACK)
    }
}

fn with_seg_context(e: Error, seg: impl std::fmt::Display) -> Error {
    match e {
        Error::InfeasibleFit { context, reason } => Error::InfeasibleFit {
            context: format!("{seg} ({context})"),
            reason,
        },
        other => other,
    }
}

/// Fits a curvature- and slope-bounded profile through the admitted samples.
pub fn fit_profile(cv: &ControlVectorSet, params: &ProfileParams) -> Result<ProfileCurve> {
    if cv.samples.len() < 2 {
        return Err(Error::InvalidParams(format!(
            "{}: need at least 2 control vectors",
            cv.seg_axis
        )));
    }
    let opts = FitOptions {
        slope_max: Some(params.slope_max),
        fit_tolerance: Some(params.fit_tolerance),
        max_pieces: params.max_pieces,
        ..FitOptions::new(params.kappa_max)
    };
    let out = fit_bspline_with(&cv.samples, &opts).map_err(|e| with_seg_context(e, cv.seg_axis))?;
    let mut p = ProfileCurve {
        seg_axis: cv.seg_axis,
        length: cv.samples.last().unwrap().0,
        spline: out.spline,
        control: cv.clone(),
        breakpoints: out.breakpoints,
        smoothing: out.smoothing,
        residual: out.residual,
        max_curvature: 0.0,
        max_slope: 0.0,
        pinned: [None, None],
    };
    p.certify();
    Ok(p)
}

/// Elevation over one link: the profile value at the nearest axis point.
#[derive(Debug, Clone, Copy)]
pub struct LinkSurface<'a> {
    pub axis: &'a ParamCurve,
    pub profile: &'a ProfileCurve,
}

impl LinkSurface<'_> {
    pub fn z_at(&self, p: Point2) -> f64 {
        self.profile.eval(self.axis.nearest(p).0)
    }

    /// Elevation of the cross-section at arc length `s`.
    pub fn z_at_station(&self, s: f64) -> f64 {
        self.profile.eval(s)
    }
}

pub fn elevate_link<'a>(seg: &'a SegAxis, profile: &'a ProfileCurve) -> LinkSurface<'a> {
    LinkSurface {
        axis: &seg.curve,
        profile,
    }
}

/// Refits one profile so its junction ends match the intersection plates.
/// Ends already at the target are left as they are.
pub fn pin_profile(
    profile: &ProfileCurve,
    start: Option<(IntersectionId, f64)>,
    end: Option<(IntersectionId, f64)>,
    params: &ProfileParams,
) -> Result<ProfileCurve> {
    let off = |s: f64, t: Option<(IntersectionId, f64)>| t.is_some_and(|(_, z)| profile.eval(s) != z);
    if !off(0.0, start) && !off(profile.length, end) {
        let mut p = profile.clone();
        p.pinned = [start.map(|t| t.1), end.map(|t| t.1)];
        return Ok(p);
    }
    let opts = FitOptions {
        slope_max: Some(params.slope_max),
        fit_tolerance: None,
        max_pieces: params.max_pieces,
        pin_start: start.map(|t| t.1),
        pin_end: end.map(|t| t.1),
        initial_breakpoints: Some(profile.breakpoints.clone()),
        min_smoothing: Some(profile.smoothing),
        ..FitOptions::new(params.kappa_max)
    };
    let seam = [start, end]
        .iter()
        .flatten()
        .map(|(x, _)| format!("{}/{x}", profile.seg_axis))
        .collect::<Vec<_>>()
        .join(", ");
    let out = fit_bspline_with(&profile.control.samples, &opts).map_err(|e| match e {
        Error::InfeasibleFit { reason, .. } => Error::InfeasibleFit {
            context: format!("seam {seam}"),
            reason,
        },
        other => other,
    })?;
    let samples = &profile.control.samples;
    let residual = samples
        .iter()
        .map(|&(s, h)| (out.spline.eval(s) - h).abs())
        .fold(0.0, f64::max);
    let mut p = ProfileCurve {
        spline: out.spline,
        breakpoints: out.breakpoints,
        smoothing: out.smoothing,
        residual,
        pinned: [start.map(|t| t.1), end.map(|t| t.1)],
        ..profile.clone()
    };
    p.certify();
    if !p.passes(params) {
        return Err(Error::InfeasibleFit {
            context: format!("seam {seam}"),
            reason: format!(
                "certificates fail after pinning: |k| {} slope {}",
                p.max_curvature, p.max_slope
            ),
        });
    }
    Ok(p)
}

/// Pins every profile end that touches an intersection to its plate height.
/// `profiles` and `elevations` are indexed by seg axis and intersection id.
pub fn stitch_junctions(
    net: &RoadNetwork2D,
    profiles: &[ProfileCurve],
    elevations: &[IntersectionElevation],
    params: &ProfileParams,
) -> Result<Vec<ProfileCurve>> {
    net.seg_axes
        .par_iter()
        .map(|seg| {
            let target = |x: Option<IntersectionId>| x.map(|id| (id, elevations[id.index()].z));
            pin_profile(&profiles[seg.id.index()], target(seg.start), target(seg.end), params)
        })
        .collect()
}

/// All elevation data for a network.
#[derive(Debug, Clone)]
pub struct ElevationModel {
    /// Indexed by seg axis id.
    pub profiles: Vec<ProfileCurve>,
    /// Indexed by intersection id.
    pub intersections: Vec<IntersectionElevation>,
    pub params: ProfileParams,
}

impl ElevationModel {
    pub fn profile(&self, seg: SegAxisId) -> &ProfileCurve {
        &self.profiles[seg.index()]
    }

    pub fn intersection_z(&self, id: IntersectionId) -> f64 {
        self.intersections[id.index()].z
    }

    pub fn surface<'a>(&'a self, net: &'a RoadNetwork2D, seg: SegAxisId) -> LinkSurface<'a> {
        elevate_link(net.seg_axis(seg), self.profile(seg))
    }
}

/// Samples, fits and stitches every profile, and flattens every intersection.
pub fn build_elevation(net: &RoadNetwork2D, hf: &HeightField, params: &ProfileParams) -> Result<ElevationModel> {
    params.validate()?;
    let intersections = net
        .intersections
        .par_iter()
        .map(|x| flatten_intersection(x, hf))
        .collect::<Result<Vec<_>>>()?;
    let raw = net
        .seg_axes
        .par_iter()
        .map(|seg| {
            let cv = sample_control_vectors(seg.id, &seg.curve, hf, params.ds, params.slope_max, params.dk_max)?;
            fit_profile(&cv, params)
        })
        .collect::<Result<Vec<_>>>()?;
    let profiles = stitch_junctions(net, &raw, &intersections, params)?;
    Ok(ElevationModel {
        profiles,
        intersections,
        params: *params,
    })
}

/// Writes `s, h, kappa, slope` rows at `step` spacing plus the end point.
pub fn write_profile_csv(profile: &ProfileCurve, step: f64, path: &Path) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Format {
            path: path.display().to_string(),
            reason: format!("{other:?}"),
        },
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["s", "h", "kappa", "slope"]).map_err(io)?;
    let n = (profile.length / step).ceil().max(1.0) as usize;
    for j in 0..=n {
        let s = if j == n { profile.length } else { j as f64 * step };
        let row = [s, profile.eval(s), profile.curvature(s), profile.slope(s)];
        w.write_record(row.iter().map(|v| format!("{v:.6}"))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{arc_length_parameterize, Polyline};

    fn straight(len: f64) -> ParamCurve {
        arc_length_parameterize(&Polyline::new(vec![Point2::new(0.0, 5.0), Point2::new(len, 5.0)]).unwrap()).unwrap()
    }

    fn field(f: impl Fn(f64, f64) -> f64) -> HeightField {
        HeightField::from_fn(120, 10, 1.0, Point2::new(0.0, 0.0), f).unwrap()
    }

    #[test]
    fn flat_terrain_keeps_every_sample() {
        let cv = sample_control_vectors(SegAxisId(0), &straight(100.0), &field(|_, _| 7.0), 10.0, 0.08, 0.1).unwrap();
        assert_eq!(cv.samples.len(), 11);
        assert!(cv.samples.iter().all(|s| s.1 == 7.0));
        assert_eq!(cv.dropped, 0);
    }

    #[test]
    fn spike_is_dropped() {
        let raw: Vec<(f64, f64)> = (0..=10)
            .map(|n| (10.0 * n as f64, if n == 4 { 50.0 } else { 0.0 }))
            .collect();
        let (kept, dropped) = admit_samples(&raw, 0.08, 0.1);
        assert_eq!(dropped, 1);
        assert!(kept.iter().all(|s| s.0 != 40.0));
    }

    #[test]
    fn sample_count_bounded_by_length() {
        let cv =
            sample_control_vectors(SegAxisId(0), &straight(100.0), &field(|x, _| 0.01 * x), 10.0, 0.08, 0.1).unwrap();
        // Interior stations are multiples of ds; the end point closes the set.
        assert!(cv.samples.len() - 1 <= 10);
        let cv = sample_control_vectors(SegAxisId(0), &straight(103.0), &field(|_, _| 0.0), 10.0, 0.08, 0.1).unwrap();
        assert!((cv.samples.last().unwrap().0 - 103.0).abs() < 1e-9);
        assert_eq!(cv.samples.len(), 12);
    }

    #[test]
    fn flatten_is_the_vertex_mean() {
        let hf = field(|x, _| x);
        let x = Intersection {
            id: IntersectionId(0),
            boundary: [10.5, 12.5, 14.5, 12.5].iter().map(|&x| Point2::new(x, 5.0)).collect(),
            members: vec![],
            arms: vec![],
            links: vec![],
            fillets: vec![],
            centroid: Point2::default(),
        };
        assert!((flatten_intersection(&x, &hf).unwrap().z - 12.5).abs() < 1e-9);
    }

    #[test]
    fn parabola_certificate() {
        let samples: Vec<(f64, f64)> = (0..=20)
            .map(|n| (n as f64 * 0.5, 0.04 * (n as f64 * 0.5).powi(2)))
            .collect();
        let cv = ControlVectorSet {
            seg_axis: SegAxisId(0),
            ds: 0.5,
            samples,
            dropped: 0,
        };
        let params = ProfileParams {
            slope_max: 1.0,
            ..ProfileParams::default()
        };
        let p = fit_profile(&cv, &params).unwrap();
        assert!(p.max_curvature <= 0.1 * (1.0 + CERTIFICATE_SLACK));
        assert!((p.curvature(0.0) - 0.08).abs() < 5e-3, "{}", p.curvature(0.0));
    }

    #[test]
    fn affine_profile_has_zero_curvature() {
        let samples: Vec<(f64, f64)> = (0..=20)
            .map(|n| (5.0 * n as f64, 3.0 + 0.02 * 5.0 * n as f64))
            .collect();
        let cv = ControlVectorSet {
            seg_axis: SegAxisId(0),
            ds: 5.0,
            samples,
            dropped: 0,
        };
        let p = fit_profile(&cv, &ProfileParams::default()).unwrap();
        assert!(p.max_curvature < 1e-9);
        assert!((p.max_slope - 0.02).abs() < 1e-9);
    }

    #[test]
    fn pinning_moves_the_end_only_locally() {
        let samples: Vec<(f64, f64)> = (0..=40)
            .map(|n| (5.0 * n as f64, 2.0 * (n as f64 * 0.1).sin()))
            .collect();
        let cv = ControlVectorSet {
            seg_axis: SegAxisId(0),
            ds: 5.0,
            samples,
            dropped: 0,
        };
        let params = ProfileParams::default();
        let p = fit_profile(&cv, &params).unwrap();
        let z = p.eval(200.0) - 0.4;
        let q = pin_profile(&p, None, Some((IntersectionId(0), z)), &params).unwrap();
        assert_eq!(q.eval(200.0), z);
        assert!(q.passes(&params));
        let change = (0..=2000)
            .map(|j| (q.eval(j as f64 * 0.1) - p.eval(j as f64 * 0.1)).abs())
            .fold(0.0, f64::max);
        assert!(change <= 0.4 + 1e-9, "{change}");
        // Already matching: unchanged.
        let r = pin_profile(&q, None, Some((IntersectionId(0), z)), &params).unwrap();
        assert_eq!(r.breakpoints, q.breakpoints);
        assert_eq!(r.eval(100.0), q.eval(100.0));
    }
}
