//! Semantic 2D road network: links, intersections, seg axes and the +/-
//! relation net.

mod build;
mod input;
mod smooth;
mod topology;
mod types;

pub use build::{
    assemble_intersection, build_network, cluster_intersection_points, trim_segment_ends, ArmGeometry, CutCandidate,
};
pub use input::{centerlines_to_geojson, parse_centerlines, read_centerlines, write_centerlines};
pub use smooth::{fillet_radius, smooth_centerlines};
pub use topology::{build_topology, Node, Topology};
pub use types::*;
