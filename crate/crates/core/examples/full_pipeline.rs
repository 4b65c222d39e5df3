//! End to end: writes inputs, runs every stage to disk, then validates the
//! written outputs.
//!
//!     cargo run --example full_pipeline -- /tmp/roadnet_demo

use std::path::PathBuf;

use roadnet::network::write_centerlines;
use roadnet::pipeline::fixtures::{grid_centerlines, rolling, terrain_for};
use roadnet::pipeline::{run_pipeline, validate_outputs, OrthoGeoreference, PipelineConfig};
use roadnet::terrain::save_asc;

fn main() -> roadnet::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("roadnet_demo"));
    std::fs::create_dir_all(&dir).map_err(|e| roadnet::Error::io(&dir, e))?;

    let set = grid_centerlines(3, 2, 240.0, 10.0, 30.0);
    let hf = terrain_for(&set, 40.0, 4.0, rolling)?;
    write_centerlines(&set, &dir.join("roads.geojson"))?;
    save_asc(&hf, &dir.join("dem.asc"))?;

    let o = hf.origin();
    let cfg = PipelineConfig {
        centerlines: dir.join("roads.geojson"),
        heightfield: dir.join("dem.asc"),
        out_dir: dir.join("out"),
        ortho: Some(OrthoGeoreference {
            origin: [o.x, o.y],
            width: hf.width(),
            height: hf.height(),
            image: Some("ortho.png".into()),
        }),
        ..PipelineConfig::default()
    };
    let report = run_pipeline(&cfg)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.counts).expect("counts serialize")
    );
    for t in &report.timings {
        println!("{:<20} {:>8.3} s", t.stage, t.seconds);
    }

    let v = validate_outputs(&cfg.out_dir)?;
    for c in &v.checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    println!("outputs in {}", cfg.out_dir.display());
    Ok(())
}
