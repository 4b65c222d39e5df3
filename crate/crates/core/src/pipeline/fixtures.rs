//! Deterministic synthetic inputs for demos, tests and timing runs.

use crate::error::Result;
use crate::geom::{Point2, Polyline};
use crate::network::{CenterlineSet, RoadAxis};
use crate::terrain::HeightField;

fn axis(pts: &[(f64, f64)]) -> Polyline {
    Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).expect("fixture axis has distinct points")
}

/// `nx` north-south and `ny` east-west straight roads `spacing` apart, each
/// overhanging the outermost crossing by half a spacing.
///
/// Produces `nx * ny` four-way junctions and `2 (2 nx ny + nx + ny)` links.
pub fn grid_centerlines(nx: usize, ny: usize, spacing: f64, width: f64, design_speed: f64) -> CenterlineSet {
    let over = 0.5 * spacing;
    let (w, h) = ((nx.max(1) - 1) as f64 * spacing, (ny.max(1) - 1) as f64 * spacing);
    let mut roads = Vec::with_capacity(nx + ny);
    for c in 0..nx {
        let x = c as f64 * spacing;
        roads.push(RoadAxis::new(
            format!("ns{c}"),
            axis(&[(x, -over), (x, h + over)]),
            width,
            design_speed,
        ));
    }
    for r in 0..ny {
        let y = r as f64 * spacing;
        roads.push(RoadAxis::new(
            format!("ew{r}"),
            axis(&[(-over, y), (w + over, y)]),
            width,
            design_speed,
        ));
    }
    CenterlineSet::new(roads)
}

/// Link count of [`grid_centerlines`].
pub fn grid_link_count(nx: usize, ny: usize) -> usize {
    2 * (2 * nx * ny + nx + ny)
}

/// Straight arms radiating from the origin at the given headings (degrees).
pub fn star_centerlines(headings_deg: &[f64], widths: &[f64], arm_length: f64, design_speed: f64) -> CenterlineSet {
    let roads = headings_deg
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let t = a.to_radians();
            let end = (arm_length * t.cos(), arm_length * t.sin());
            RoadAxis::new(
                format!("arm{k}"),
                axis(&[(0.0, 0.0), end]),
                widths[k % widths.len()],
                design_speed,
            )
        })
        .collect();
    CenterlineSet::new(roads)
}

/// Axis-aligned box around every centerline vertex, grown by `margin`.
pub fn bounds(set: &CenterlineSet, margin: f64) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in set.roads.iter().flat_map(|r| r.axis.points()) {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo - Point2::new(margin, margin), hi + Point2::new(margin, margin))
}

/// Heightfield covering `set` (plus `margin`) sampled from `f`.
pub fn terrain_for(
    set: &CenterlineSet,
    margin: f64,
    cellsize: f64,
    f: impl Fn(f64, f64) -> f64,
) -> Result<HeightField> {
    let (lo, hi) = bounds(set, margin);
    let nc = ((hi.x - lo.x) / cellsize).ceil() as usize;
    let nr = ((hi.y - lo.y) / cellsize).ceil() as usize;
    HeightField::from_fn(nc, nr, cellsize, lo, f)
}

/// Gentle rolling hills with grades well below 8 %.
pub fn rolling(x: f64, y: f64) -> f64 {
    100.0 + 4.0 * (x / 300.0).sin() * (y / 400.0).cos() + 0.002 * x
}

/// Height of the ridge fixture: a 60 m Gaussian ridge running north-south
/// through `x = 250`.
pub fn ridge(x: f64, _y: f64) -> f64 {
    let d = (x - 250.0) / 70.0;
    60.0 * (-0.5 * d * d).exp()
}

/// A single 500 m road crossing [`ridge`] at right angles.
pub fn ridge_fixture() -> Result<(CenterlineSet, HeightField)> {
    let mut road = RoadAxis::new("ridge_road", axis(&[(0.0, 0.0), (250.0, 0.0), (500.0, 0.0)]), 8.0, 40.0);
    road.lanes = 1;
    let set = CenterlineSet::new(vec![road]);
    let hf = terrain_for(&set, 50.0, 5.0, ridge)?;
    Ok((set, hf))
}

/// A ridge road joined by two side streets, so that the ridge profile is
/// pinned to intersection plates on both sides of the crest.
pub fn ridge_network_fixture() -> Result<(CenterlineSet, HeightField)> {
    let mut set = CenterlineSet::new(vec![
        RoadAxis::new(
            "ridge_road",
            axis(&[(-100.0, 0.0), (0.0, 0.0), (250.0, 0.0), (500.0, 0.0), (600.0, 0.0)]),
            8.0,
            40.0,
        ),
        RoadAxis::new("west", axis(&[(0.0, -150.0), (0.0, 150.0)]), 8.0, 30.0),
        RoadAxis::new("east", axis(&[(500.0, -150.0), (500.0, 150.0)]), 8.0, 30.0),
    ]);
    set.source = Some("ridge_network_fixture".into());
    let hf = terrain_for(&set, 50.0, 5.0, ridge)?;
    Ok((set, hf))
}
