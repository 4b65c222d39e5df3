//! Vertical profiles over a 60 m ridge: sample admission, constrained fitting,
//! flat intersection plates and seam stitching.
//!
//!     cargo run --example profiles

use roadnet::network::{build_network, smooth_centerlines};
use roadnet::pipeline::fixtures::ridge_network_fixture;
use roadnet::profile::{build_elevation, write_profile_csv, ProfileParams};
use roadnet::ToleranceSet;

fn main() -> roadnet::Result<()> {
    let (set, hf) = ridge_network_fixture()?;
    let net = build_network(&smooth_centerlines(&set, 2.0)?, &ToleranceSet::default())?;
    let params = ProfileParams::default();
    let elev = build_elevation(&net, &hf, &params)?;

    for x in &net.intersections {
        println!("{} plate at z = {:.3} m", x.id, elev.intersection_z(x.id));
    }
    println!("seg axis      length  samples  dropped  max|kappa|  max|slope|  residual  pinned");
    for p in &elev.profiles {
        let pins: Vec<String> = p
            .pinned
            .iter()
            .map(|z| z.map_or("-".into(), |z| format!("{z:.2}")))
            .collect();
        println!(
            "{:<12} {:>7.1} {:>8} {:>8} {:>11.5} {:>11.4} {:>9.3}  {}",
            p.seg_axis.to_string(),
            p.length,
            p.control.samples.len(),
            p.control.dropped,
            p.max_curvature,
            p.max_slope,
            p.residual,
            pins.join("/")
        );
        assert!(p.passes(&params));
    }

    let ridge = elev
        .profiles
        .iter()
        .max_by(|a, b| a.length.total_cmp(&b.length))
        .expect("fixture has profiles");
    let terrain_peak = (0..=100)
        .map(|k| hf.sample(k as f64 * 5.0, 0.0).unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    let road_peak = (0..=500)
        .map(|k| ridge.eval(ridge.length * k as f64 / 500.0))
        .fold(0.0, f64::max);
    println!(
        "terrain crest {terrain_peak:.1} m, road crest {road_peak:.1} m (grade limit {:.0} %)",
        100.0 * params.slope_max
    );

    let csv = std::env::temp_dir().join("roadnet_ridge_profile.csv");
    write_profile_csv(ridge, 1.0, &csv)?;
    println!("wrote {}", csv.display());
    Ok(())
}
