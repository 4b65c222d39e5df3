//! Classifies heightfield cells into intersection, link and off-road regions
//! and prints the mask as text.
//!
//!     cargo run --example terrain_mask

use roadnet::network::{build_network, smooth_centerlines};
use roadnet::pipeline::fixtures::{star_centerlines, terrain_for};
use roadnet::terrain::{segment_elevation, Region};
use roadnet::ToleranceSet;

fn main() -> roadnet::Result<()> {
    let set = star_centerlines(&[0.0, 90.0, 200.0], &[10.0, 8.0, 8.0], 60.0, 15.0);
    let hf = terrain_for(&set, 8.0, 2.0, |x, y| 30.0 + 0.03 * x + 0.01 * y)?;
    let net = build_network(&smooth_centerlines(&set, 2.0)?, &ToleranceSet::default())?;
    let mask = segment_elevation(&hf, &net);

    // North at the top: rows are stored south first.
    for row in (0..mask.nrows()).rev() {
        let line: String = (0..mask.ncols())
            .map(|col| match mask.get(col, row) {
                Some(Region::Intersection(_)) => '#',
                Some(Region::Link(l)) if l.index() % 2 == 0 => '>',
                Some(Region::Link(_)) => '<',
                None => '.',
            })
            .collect();
        println!("{line}");
    }
    println!(
        "{} road + {} non-road = {} cells ({} x {})",
        mask.road_cells(),
        mask.non_road_cells(),
        mask.total_cells(),
        hf.ncols(),
        hf.nrows()
    );
    Ok(())
}
