//! Geometry kernel: arc-length curves, offsets, fillets, simplification and
//! curvature-bounded spline fitting.
//!
//!     cargo run --example geometry

use roadnet::geom::*;

fn main() -> roadnet::Result<()> {
    let raw = Polyline::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(40.0, 0.3),
        Point2::new(80.0, -0.2),
        Point2::new(120.0, 15.0),
        Point2::new(160.0, 40.0),
    ])?;

    // Near-collinear vertices disappear under a 0.5 m tolerance.
    let simple = douglas_peucker(&raw, 0.5);
    println!("simplified {} -> {} points", raw.len(), simple.len());

    let axis = arc_length_parameterize(&simple)?;
    println!(
        "axis length {:.3} m, curvature at mid {:.5} 1/m",
        axis.length(),
        axis.curvature(0.5 * axis.length())
    );

    let left = offset_polyline(&axis, 4.0, Side::Left)?;
    let dense = Polyline::new(axis.sample_uniform(4000))?;
    let worst = left
        .points()
        .iter()
        .map(|p| (dense.distance_to(*p) - 4.0).abs())
        .fold(0.0, f64::max);
    println!("left boundary: {} points, max distance error {worst:.2e} m", left.len());

    // A 20 m fillet between two roads meeting at 70 degrees.
    let t = 70f64.to_radians();
    let a = arc_length_parameterize(&Polyline::new(vec![Point2::new(0.0, 0.0), Point2::new(200.0, 0.0)])?)?;
    let b = arc_length_parameterize(&Polyline::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(200.0 * t.cos(), 200.0 * t.sin()),
    ])?)?;
    let arc = tangent_circle_fillet(&a, &b, 20.0)?;
    println!(
        "fillet center ({:.3}, {:.3}), tangency at s = {:.3} and {:.3}, residual {:.1e} rad",
        arc.center.x,
        arc.center.y,
        arc.param_a,
        arc.param_b,
        arc.tangency_residual(arc.tangent_a, a.tangent(arc.param_a))
    );

    // Vertical profile: noisy hill samples fitted under |kappa| <= 0.1.
    let samples: Vec<(f64, f64)> = (0..=40)
        .map(|k| {
            let s = 5.0 * k as f64;
            (s, 10.0 * (-((s - 100.0) / 40.0).powi(2)).exp() + 0.2 * (s * 1.7).sin())
        })
        .collect();
    let spline = fit_bspline_monotone_curvature(&samples, 0.1)?;
    let (kappa, slope) = spline.sweep_maxima(0.05);
    println!(
        "profile spline: {} monotone-curvature pieces, max |kappa| {kappa:.4}, max |slope| {slope:.4}",
        spline.pieces().len()
    );
    Ok(())
}
