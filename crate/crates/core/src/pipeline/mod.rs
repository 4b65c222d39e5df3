//! End-to-end driver: configuration, stage orchestration, meshing and file
//! exports.

mod config;
mod export;
pub mod fixtures;
mod mesh;
mod run;
mod validate;

pub use config::{HeightFormatName, OrthoGeoreference, PipelineConfig};
pub use export::{export_obj, export_semantic_json, obj_text, r6, semantic_json, SCHEMA_VERSION};
pub use mesh::{build_mesh, fan_triangulate, MeshRegion, RoadMesh, MIN_TRIANGLE_AREA};
pub use run::{
    apply_overrides, compute, compute_network, load_inputs, profile_params, run_network, run_pipeline, run_profiles,
    write_outputs, write_profiles, write_report, Certificates, Counts, PipelineOutput, PipelineReport, StageTiming,
};
pub use validate::{parse_obj, validate_outputs, Check, ObjGroup, ObjGroups, ValidationReport};
