//! Writes ready-to-run inputs for the `roadnet` command line tool.
//!
//!     cargo run --example make_fixtures -- fixtures
//!     cargo run --bin roadnet -- build --config fixtures/grid/config.json
//!
//! Each fixture directory gets `roads.geojson`, a heightfield and
//! `config.json` with paths relative to itself.

use std::path::{Path, PathBuf};

use roadnet::network::{write_centerlines, CenterlineSet};
use roadnet::pipeline::fixtures::{
    grid_centerlines, ridge, ridge_network_fixture, rolling, star_centerlines, terrain_for,
};
use roadnet::pipeline::{OrthoGeoreference, PipelineConfig};
use roadnet::terrain::{save_asc, save_pgm, HeightField};

fn write(dir: &Path, set: &CenterlineSet, hf: &HeightField, pgm: bool) -> roadnet::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| roadnet::Error::io(dir, e))?;
    write_centerlines(set, &dir.join("roads.geojson"))?;
    let heightfield = if pgm {
        save_pgm(hf, &dir.join("dem.pgm"))?;
        PathBuf::from("dem.pgm")
    } else {
        save_asc(hf, &dir.join("dem.asc"))?;
        PathBuf::from("dem.asc")
    };
    let o = hf.origin();
    let cfg = PipelineConfig {
        centerlines: "roads.geojson".into(),
        heightfield,
        out_dir: "out".into(),
        ortho: Some(OrthoGeoreference {
            origin: [o.x, o.y],
            width: hf.width(),
            height: hf.height(),
            image: Some("ortho.png".into()),
        }),
        ..PipelineConfig::default()
    };
    let text = serde_json::to_string_pretty(&cfg).expect("config serializes");
    std::fs::write(dir.join("config.json"), text).map_err(|e| roadnet::Error::io(dir.join("config.json"), e))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() -> roadnet::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));

    let grid = grid_centerlines(4, 4, 250.0, 9.0, 20.0);
    write(
        &root.join("grid"),
        &grid,
        &terrain_for(&grid, 60.0, 5.0, rolling)?,
        false,
    )?;

    let cross = star_centerlines(&[0.0, 90.0, 180.0, 270.0], &[8.0], 150.0, 30.0);
    write(
        &root.join("cross"),
        &cross,
        &terrain_for(&cross, 30.0, 2.0, |_, _| 50.0)?,
        false,
    )?;

    let (ridge_set, _) = ridge_network_fixture()?;
    write(
        &root.join("ridge"),
        &ridge_set,
        &terrain_for(&ridge_set, 50.0, 5.0, ridge)?,
        true,
    )?;
    Ok(())
}
