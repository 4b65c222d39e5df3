use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::PipelineConfig;
use super::export::{export_obj, export_semantic_json, write_text};
use super::mesh::{build_mesh, RoadMesh};
use crate::error::{Error, Result};
use crate::lanes::{build_lane_graph, LaneGraph};
use crate::network::{build_network, read_centerlines, smooth_centerlines, CenterlineSet, RoadNetwork2D};
use crate::profile::{build_elevation, write_profile_csv, ElevationModel, ProfileParams};
use crate::terrain::{load_heightfield, segment_elevation, HeightField, RoadMask};

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub roads: usize,
    pub seg_axes: usize,
    pub links: usize,
    pub intersections: usize,
    pub llanes: usize,
    pub ilanes: usize,
    pub connectors: usize,
    pub mesh_vertices: usize,
    pub mesh_triangles: usize,
    pub road_cells: usize,
    pub non_road_cells: usize,
    pub total_cells: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Certificates {
    pub max_curvature: f64,
    pub max_slope: f64,
    pub max_residual: f64,
    pub kappa_max: f64,
    pub slope_max: f64,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Machine-readable summary written as `report.json`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PipelineReport {
    pub counts: Counts,
    pub certificates: Certificates,
    pub warnings: Vec<String>,
    pub timings: Vec<StageTiming>,
    pub total_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

/// In-memory results of every stage.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub network: RoadNetwork2D,
    pub mask: RoadMask,
    pub elevation: ElevationModel,
    pub lanes: LaneGraph,
    pub mesh: RoadMesh,
    pub report: PipelineReport,
}

struct Clock {
    timings: Vec<StageTiming>,
}

impl Clock {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        log::info!("stage {name}");
        let out = f().map_err(|e| e.in_stage(name));
        self.timings.push(StageTiming {
            stage: name.into(),
            seconds: t0.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Applies the configured overrides to a loaded centerline set.
pub fn apply_overrides(set: &mut CenterlineSet, cfg: &PipelineConfig) {
    if let Some(v) = cfg.u {
        set.u = v;
    }
    if let Some(v) = cfg.i {
        set.i = v;
    }
    if let Some(v) = cfg.l_dis {
        set.l_dis = v;
    }
    for r in &mut set.roads {
        if let Some(w) = cfg.lane_width {
            r.lane_width = Some(w);
        }
        if let Some(n) = cfg.lanes_per_link {
            r.lanes = n;
        }
    }
}

/// Profile parameters with the fitting tolerances taken from the tolerance set.
pub fn profile_params(cfg: &PipelineConfig) -> ProfileParams {
    ProfileParams {
        fit_tolerance: cfg.tolerances.fit_tolerance,
        max_pieces: cfg.tolerances.max_pieces,
        ..cfg.profile
    }
}

fn smoothed_network(set: &CenterlineSet, cfg: &PipelineConfig, clock: &mut Clock) -> Result<RoadNetwork2D> {
    if set.roads.is_empty() {
        return Err(Error::Input("no roads".into()).in_stage("load"));
    }
    let smooth = clock.stage("smooth_centerlines", || {
        smooth_centerlines(set, cfg.tolerances.smoothing_spacing)
    })?;
    clock.stage("build_network", || build_network(&smooth, &cfg.tolerances))
}

/// 2D stage only.
pub fn compute_network(set: &CenterlineSet, cfg: &PipelineConfig) -> Result<RoadNetwork2D> {
    cfg.validate()?;
    smoothed_network(set, cfg, &mut Clock { timings: vec![] })
}

/// Runs every stage on in-memory inputs.
pub fn compute(set: &CenterlineSet, hf: &HeightField, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let t0 = Instant::now();
    let mut clock = Clock { timings: vec![] };
    let network = smoothed_network(set, cfg, &mut clock)?;
    let mask = clock.stage("segment_elevation", || Ok(segment_elevation(hf, &network)))?;
    let params = profile_params(cfg);
    let elevation = clock.stage("profiles", || build_elevation(&network, hf, &params))?;
    let lanes = clock.stage("lanes", || build_lane_graph(&network, &elevation, &cfg.lanes))?;
    let mesh = clock.stage("mesh", || {
        Ok(build_mesh(&network, &elevation, cfg.mesh_step, cfg.ortho.as_ref()))
    })?;

    let mut certs = Certificates {
        kappa_max: params.kappa_max,
        slope_max: params.slope_max,
        all_pass: true,
        ..Default::default()
    };
    for p in &elevation.profiles {
        certs.max_curvature = certs.max_curvature.max(p.max_curvature);
        certs.max_slope = certs.max_slope.max(p.max_slope);
        certs.max_residual = certs.max_residual.max(p.residual);
        certs.all_pass &= p.passes(&params);
    }
    let warnings = network
        .warnings
        .iter()
        .chain(&mask.warnings)
        .chain(&lanes.warnings)
        .cloned()
        .collect();
    let report = PipelineReport {
        counts: Counts {
            roads: set.roads.len(),
            seg_axes: network.seg_axes.len(),
            links: network.links.len(),
            intersections: network.intersections.len(),
            llanes: lanes.llanes.len(),
            ilanes: lanes.ilanes.len(),
            connectors: lanes.connectors.len(),
            mesh_vertices: mesh.vertex_count(),
            mesh_triangles: mesh.triangle_count(),
            road_cells: mask.road_cells(),
            non_road_cells: mask.non_road_cells(),
            total_cells: mask.total_cells(),
        },
        certificates: certs,
        warnings,
        timings: clock.timings,
        total_seconds: t0.elapsed().as_secs_f64(),
        outputs: vec![],
    };
    Ok(PipelineOutput {
        network,
        mask,
        elevation,
        lanes,
        mesh,
        report,
    })
}

pub fn write_profiles(elev: &ElevationModel, dir: &Path, step: f64) -> Result<Vec<PathBuf>> {
    let dir = dir.join("profiles");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    elev.profiles
        .iter()
        .map(|p| {
            let path = dir.join(format!("{}.csv", p.seg_axis));
            write_profile_csv(p, step, &path).map(|_| path)
        })
        .collect()
}

pub fn write_report(report: &PipelineReport, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    write_text(path, &(text + "\n"))
}

/// Writes `network.json`, `roads.obj` (+ `.mtl`), `profiles/*.csv` and
/// `report.json` into `dir`.
pub fn write_outputs(out: &mut PipelineOutput, cfg: &PipelineConfig, dir: &Path) -> Result<()> {
    let t0 = Instant::now();
    let net_path = dir.join("network.json");
    let obj_path = dir.join("roads.obj");
    let texture = cfg.ortho.as_ref().and_then(|o| o.image.as_deref());
    let written = (|| -> Result<Vec<PathBuf>> {
        export_semantic_json(&out.network, Some(&out.elevation), Some(&out.lanes), &net_path)?;
        export_obj(&out.mesh, &obj_path, texture)?;
        let mut paths = vec![net_path.clone(), obj_path.clone()];
        if cfg.ortho.is_some() {
            paths.push(obj_path.with_extension("mtl"));
        }
        paths.extend(write_profiles(&out.elevation, dir, cfg.csv_step)?);
        Ok(paths)
    })()
    .map_err(|e| e.in_stage("export"))?;
    out.report.timings.push(StageTiming {
        stage: "export".into(),
        seconds: t0.elapsed().as_secs_f64(),
    });
    out.report.total_seconds += t0.elapsed().as_secs_f64();
    out.report.outputs = written;
    let report_path = dir.join("report.json");
    out.report.outputs.push(report_path.clone());
    write_report(&out.report, &report_path)
}

pub fn load_inputs(cfg: &PipelineConfig, heightfield: bool) -> Result<(CenterlineSet, Option<HeightField>)> {
    cfg.require_inputs(heightfield).map_err(|e| e.in_stage("load"))?;
    let mut set = read_centerlines(&cfg.centerlines).map_err(|e| e.in_stage("load"))?;
    apply_overrides(&mut set, cfg);
    let hf = if heightfield {
        Some(
            load_heightfield(&cfg.heightfield, cfg.heightfield_format.map(Into::into))
                .map_err(|e| e.in_stage("load"))?,
        )
    } else {
        None
    };
    Ok((set, hf))
}

/// Full pipeline from files to files.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let (set, hf) = load_inputs(cfg, true)?;
    let load_s = t0.elapsed().as_secs_f64();
    let mut out = compute(&set, hf.as_ref().expect("heightfield requested"), cfg)?;
    out.report.timings.insert(
        0,
        StageTiming {
            stage: "load".into(),
            seconds: load_s,
        },
    );
    out.report.total_seconds += load_s;
    write_outputs(&mut out, cfg, &cfg.out_dir)?;
    Ok(out.report)
}

/// 2D network only; writes `network.json` without elevations or lanes.
pub fn run_network(cfg: &PipelineConfig) -> Result<RoadNetwork2D> {
    cfg.validate()?;
    let (set, _) = load_inputs(cfg, false)?;
    let net = compute_network(&set, cfg)?;
    export_semantic_json(&net, None, None, &cfg.out_dir.join("network.json")).map_err(|e| e.in_stage("export"))?;
    Ok(net)
}

/// Network plus elevation; writes the profile CSV files.
pub fn run_profiles(cfg: &PipelineConfig) -> Result<ElevationModel> {
    cfg.validate()?;
    let (set, hf) = load_inputs(cfg, true)?;
    let net = compute_network(&set, cfg)?;
    let elev = build_elevation(&net, hf.as_ref().expect("heightfield requested"), &profile_params(cfg))
        .map_err(|e| e.in_stage("profiles"))?;
    write_profiles(&elev, &cfg.out_dir, cfg.csv_step).map_err(|e| e.in_stage("export"))?;
    Ok(elev)
}
