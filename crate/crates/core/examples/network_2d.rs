//! Builds the planar road network (seg axes, links, convex intersections and
//! the +/- relation net) from GeoJSON centerlines.
//!
//!     cargo run --example network_2d

use roadnet::network::{build_network, parse_centerlines, smooth_centerlines};
use roadnet::pipeline::export_semantic_json;
use roadnet::ToleranceSet;

// Projected meters; a through road, a crossing street and a side street.
const ROADS: &str = r#"{
  "type": "FeatureCollection",
  "features": [
    {"type": "Feature", "properties": {"id": "main", "width": 12, "design_speed": 40, "lanes": 1},
     "geometry": {"type": "LineString", "coordinates": [[500000, 4000000], [500400, 4000020], [500800, 4000000]]}},
    {"type": "Feature", "properties": {"id": "cross", "width": 8, "design_speed": 30},
     "geometry": {"type": "LineString", "coordinates": [[500400, 3999800], [500405, 4000250]]}},
    {"type": "Feature", "properties": {"id": "spur", "width": 7, "design_speed": 25},
     "geometry": {"type": "LineString", "coordinates": [[500700, 4000005], [500760, 3999820]]}}
  ]
}"#;

fn main() -> roadnet::Result<()> {
    let raw = parse_centerlines(ROADS)?;
    let tol = ToleranceSet::default();
    let set = smooth_centerlines(&raw, tol.smoothing_spacing)?;
    let net = build_network(&set, &tol)?;

    println!(
        "{} seg axes, {} links, {} intersections",
        net.seg_axes.len(),
        net.links.len(),
        net.intersections.len()
    );
    for x in &net.intersections {
        println!(
            "{}: {} arms, {} boundary vertices, {} fillets, centroid ({:.1}, {:.1})",
            x.id,
            x.arm_count(),
            x.boundary.len(),
            x.fillets.len(),
            x.centroid.x,
            x.centroid.y
        );
        let signs: Vec<String> = x
            .links
            .iter()
            .map(|l| {
                format!(
                    "{l}{}",
                    net.relations.sign_of(x.id, *l).expect("incident link has a sign")
                )
            })
            .collect();
        println!("    clockwise links: {}", signs.join(" "));
    }
    for seg in &net.seg_axes {
        println!(
            "{} (road {}): {:.1} m, width {}",
            seg.id,
            seg.road,
            seg.geometry.length(),
            seg.width
        );
    }

    let out = std::env::temp_dir().join("roadnet_network_2d.json");
    export_semantic_json(&net, None, None, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
