//! Lane graph for a four-way junction with two lanes per direction: lanes on
//! links, turning lanes inside the junction and link-to-link connectors.
//!
//!     cargo run --example lane_graph

use roadnet::lanes::{build_lane_graph, LaneParams, LaneRef};
use roadnet::network::{build_network, smooth_centerlines};
use roadnet::pipeline::fixtures::{star_centerlines, terrain_for};
use roadnet::profile::{build_elevation, ProfileParams};
use roadnet::ToleranceSet;

fn main() -> roadnet::Result<()> {
    let mut set = star_centerlines(&[0.0, 90.0, 180.0, 270.0], &[16.0], 120.0, 30.0);
    for r in &mut set.roads {
        r.lanes = 2;
    }
    let hf = terrain_for(&set, 20.0, 2.0, |x, y| 12.0 + 0.02 * x - 0.01 * y)?;
    let net = build_network(&smooth_centerlines(&set, 2.0)?, &ToleranceSet::default())?;
    let elev = build_elevation(&net, &hf, &ProfileParams::default())?;
    let g = build_lane_graph(&net, &elev, &LaneParams::default())?;

    println!(
        "{} link lanes, {} turning lanes, {} connectors",
        g.llanes.len(),
        g.ilanes.len(),
        g.connectors.len()
    );
    for c in &g.connectors {
        println!("connector {} -> {} (witness {})", c.from_link, c.to_link, c.witness);
    }

    let first = &g.llanes[0];
    println!("successors of {} (offset {:.2} m):", first.id, first.offset);
    for s in g.successors_of(LaneRef::L(first.id)) {
        if let LaneRef::I(id) = s {
            let il = g.ilane(*id);
            let len: f64 = il.geometry.sample(32).windows(2).map(|w| (w[1] - w[0]).norm()).sum();
            println!("    {id}: to {} via {:.1} m Bezier", il.to, len);
        }
    }
    Ok(())
}
