//! Wall time of the in-memory pipeline on growing street grids.
//!
//!     cargo run --release --example scaling

use std::time::Instant;

use roadnet::pipeline::fixtures::{grid_centerlines, rolling, terrain_for};
use roadnet::pipeline::{compute, PipelineConfig};

fn main() -> roadnet::Result<()> {
    println!("{:>6} {:>14} {:>10}", "links", "intersections", "seconds");
    for (nx, ny) in [(2, 3), (4, 5), (6, 7), (9, 10), (12, 13), (15, 16)] {
        let set = grid_centerlines(nx, ny, 200.0, 9.0, 30.0);
        let hf = terrain_for(&set, 60.0, 5.0, rolling)?;
        let t0 = Instant::now();
        let out = compute(&set, &hf, &PipelineConfig::default())?;
        let secs = t0.elapsed().as_secs_f64();
        println!(
            "{:>6} {:>14} {:>10.3}",
            out.report.counts.links, out.report.counts.intersections, secs
        );
    }
    Ok(())
}
