use std::path::Path;

use roadnet::geom::{Point2, Polyline};
use roadnet::network::{write_centerlines, CenterlineSet, RoadAxis};
use roadnet::pipeline::fixtures::{star_centerlines, terrain_for};
use roadnet::pipeline::*;
use roadnet::terrain::save_asc;

fn cross() -> CenterlineSet {
    star_centerlines(&[0.0, 90.0, 180.0, 270.0], &[8.0], 150.0, 30.0)
}

fn write_inputs(dir: &Path, set: &CenterlineSet) -> PipelineConfig {
    write_centerlines(set, &dir.join("roads.geojson")).unwrap();
    save_asc(
        &terrain_for(set, 30.0, 2.0, |x, y| 40.0 + 0.01 * x + 0.02 * y).unwrap(),
        &dir.join("dem.asc"),
    )
    .unwrap();
    PipelineConfig {
        centerlines: dir.join("roads.geojson"),
        heightfield: dir.join("dem.asc"),
        out_dir: dir.join("out"),
        ..PipelineConfig::default()
    }
}

#[test]
fn cross_fixture_report() {
    let set = cross();
    let hf = terrain_for(&set, 30.0, 2.0, |_, _| 12.0).unwrap();
    let out = compute(&set, &hf, &PipelineConfig::default()).unwrap();
    let c = &out.report.counts;
    assert_eq!((c.intersections, c.links, c.ilanes, c.connectors), (1, 8, 12, 12));
    assert!(out.report.certificates.all_pass);
    // Flat terrain: every mesh vertex at one height.
    assert!(out.mesh.regions.iter().flat_map(|r| &r.vertices).all(|v| v.z == 12.0));
    assert_eq!(c.road_cells + c.non_road_cells, c.total_cells);
    let stages: Vec<&str> = out.report.timings.iter().map(|t| t.stage.as_str()).collect();
    assert_eq!(
        stages,
        [
            "smooth_centerlines",
            "build_network",
            "segment_elevation",
            "profiles",
            "lanes",
            "mesh"
        ]
    );
}

#[test]
fn short_link_strip_counts() {
    let set = CenterlineSet::new(vec![RoadAxis::new(
        "s",
        Polyline::new(vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)]).unwrap(),
        8.0,
        30.0,
    )]);
    let hf = terrain_for(&set, 10.0, 1.0, |_, _| 0.0).unwrap();
    let cfg = PipelineConfig {
        mesh_step: 5.0,
        ..PipelineConfig::default()
    };
    let out = compute(&set, &hf, &cfg).unwrap();
    for r in &out.mesh.regions {
        assert_eq!(r.vertices.len(), 6, "3 cross-sections of 2 vertices");
        assert_eq!(r.triangles.len(), 4);
        assert!(r.triangles.iter().all(|&t| r.triangle_area(t) > MIN_TRIANGLE_AREA));
    }
}

#[test]
fn empty_input_reports_no_roads() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = write_inputs(dir.path(), &cross());
    std::fs::write(&cfg.centerlines, r#"{"type":"FeatureCollection","features":[]}"#).unwrap();
    cfg.out_dir = dir.path().join("empty");
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(err.to_string().contains("no roads"), "{err}");
    assert_ne!(err.exit_code(), 0);
}

#[test]
fn missing_input_is_an_io_error() {
    let cfg = PipelineConfig {
        centerlines: "/nonexistent/roads.geojson".into(),
        heightfield: "/nonexistent/dem.asc".into(),
        ..PipelineConfig::default()
    };
    assert_eq!(run_pipeline(&cfg).unwrap_err().exit_code(), 3);
}

#[test]
fn files_round_trip_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = write_inputs(dir.path(), &cross());
    cfg.ortho = Some(OrthoGeoreference {
        origin: [-180.0, -180.0],
        width: 360.0,
        height: 360.0,
        image: Some("ortho.png".into()),
    });
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.counts.ilanes, 12);
    for f in [
        "network.json",
        "roads.obj",
        "roads.mtl",
        "report.json",
        "profiles/seg_0.csv",
    ] {
        assert!(cfg.out_dir.join(f).exists(), "{f}");
    }
    let obj = std::fs::read_to_string(cfg.out_dir.join("roads.obj")).unwrap();
    assert!(obj.contains("\no int_0\n") && obj.contains("\no link_7\n") && obj.contains("\nvt "));
    let v = validate_outputs(&cfg.out_dir).unwrap();
    assert!(v.passed(), "{:?}", v.checks);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cfg.out_dir.join("network.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(json["ilanes"][0]["samples"].as_array().unwrap().len(), 16);
    assert_eq!(json["ilanes"][0]["control_points"].as_array().unwrap().len(), 4);
}

#[test]
fn validate_catches_a_broken_seam() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_inputs(dir.path(), &cross());
    run_pipeline(&cfg).unwrap();
    let path = cfg.out_dir.join("roads.obj");
    let obj = std::fs::read_to_string(&path).unwrap();
    // Lift the first vertex of the intersection fan.
    let mut lines: Vec<String> = obj.lines().map(String::from).collect();
    let k = lines.iter().position(|l| l.starts_with("v ")).unwrap();
    lines[k] = format!("{} 999.000000", lines[k].rsplit_once(' ').unwrap().0);
    std::fs::write(&path, lines.join("\n")).unwrap();
    let v = validate_outputs(&cfg.out_dir).unwrap();
    let failed: Vec<&str> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert!(
        failed.contains(&"intersection_flatness") && failed.contains(&"seam_watertightness"),
        "{failed:?}"
    );
}

#[test]
fn network_and_profile_stages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_inputs(dir.path(), &cross());
    let net = run_network(&cfg).unwrap();
    assert_eq!(net.links.len(), 8);
    let json = std::fs::read_to_string(cfg.out_dir.join("network.json")).unwrap();
    assert!(!json.contains("\"ilanes\""));
    let elev = run_profiles(&cfg).unwrap();
    assert_eq!(elev.profiles.len(), 4);
    let csv = std::fs::read_to_string(cfg.out_dir.join("profiles/seg_0.csv")).unwrap();
    assert!(csv.starts_with("s,h,kappa,slope\n"));
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path(), &cross());
    let text = r#"{"centerlines": "roads.geojson", "heightfield": "dem.asc", "out_dir": "o", "profile": {"ds": 4.0}}"#;
    std::fs::write(dir.path().join("config.json"), text).unwrap();
    let cfg = PipelineConfig::load(&dir.path().join("config.json")).unwrap();
    assert_eq!(cfg.centerlines, dir.path().join("roads.geojson"));
    assert_eq!(cfg.profile.ds, 4.0);
    assert_eq!(cfg.profile.slope_max, 0.08);
    assert_eq!(profile_params(&cfg).fit_tolerance, cfg.tolerances.fit_tolerance);
    let bad = PipelineConfig { mesh_step: -1.0, ..cfg };
    assert!(matches!(bad.validate(), Err(roadnet::Error::InvalidParams(_))));
}
