use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::mesh::RoadMesh;
use crate::error::{Error, Result};
use crate::geom::{Point2, Point3, Polyline};
use crate::lanes::LaneGraph;
use crate::network::RoadNetwork2D;
use crate::profile::{ElevationModel, ProfileCurve};

pub const SCHEMA_VERSION: &str = "1.0";

/// Rounds to 6 decimals; negative zero becomes zero so output is stable.
pub fn r6(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn p2(p: Point2) -> Value {
    json!([r6(p.x), r6(p.y)])
}

fn p3(p: Point3) -> Value {
    json!([r6(p.x), r6(p.y), r6(p.z)])
}

fn ring(ps: &[Point2]) -> Value {
    Value::Array(ps.iter().map(|&p| p2(p)).collect())
}

fn line(p: &Polyline) -> Value {
    ring(p.points())
}

fn profile_json(p: &ProfileCurve) -> Value {
    let pieces: Vec<Value> = p
        .spline
        .pieces()
        .iter()
        .map(|pc| {
            json!({
                "knots": pc.knots().iter().map(|&k| r6(k)).collect::<Vec<_>>(),
                "control_points": pc.control_points().iter().map(|&(s, h)| json!([r6(s), r6(h)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "length": r6(p.length),
        "control_vectors": p.control.samples.iter().map(|&(s, h)| json!([r6(s), r6(h)])).collect::<Vec<_>>(),
        "dropped_samples": p.control.dropped,
        "datum": r6(p.spline.datum()),
        "breakpoints": p.breakpoints.iter().map(|&b| r6(b)).collect::<Vec<_>>(),
        "residual": r6(p.residual),
        "max_curvature": r6(p.max_curvature),
        "max_slope": r6(p.max_slope),
        "pinned": p.pinned.map(|z| z.map(r6)),
        "pieces": pieces,
    })
}

/// Semantic network document: geometry, topology, elevations and lanes.
pub fn semantic_json(net: &RoadNetwork2D, elev: Option<&ElevationModel>, lanes: Option<&LaneGraph>) -> Value {
    let seg_axes: Vec<Value> = net
        .seg_axes
        .iter()
        .map(|s| {
            let mut v = json!({
                "id": s.id,
                "road": s.road,
                "start": s.start,
                "end": s.end,
                "links": s.links,
                "width": r6(s.width),
                "design_speed": r6(s.design_speed),
                "lanes": s.lanes,
                "lane_width": r6(s.lane_width),
                "length": r6(crate::geom::Curve2::length(&s.curve)),
                "geometry": line(&s.geometry),
            });
            if let Some(e) = elev {
                v["profile"] = profile_json(e.profile(s.id));
            }
            v
        })
        .collect();
    let links: Vec<Value> = net
        .links
        .iter()
        .map(|l| {
            json!({
                "id": l.id,
                "seg_axis": l.seg_axis,
                "side": l.side,
                "from_intersection": l.from_intersection,
                "to_intersection": l.to_intersection,
                "boundary": line(&l.boundary),
                "polygon": ring(&l.polygon),
            })
        })
        .collect();
    let intersections: Vec<Value> = net
        .intersections
        .iter()
        .map(|x| {
            let arms: Vec<Value> = x
                .arms
                .iter()
                .map(|a| {
                    json!({
                        "seg_axis": a.seg_axis,
                        "at_start": a.at_start,
                        "inbound": a.inbound,
                        "outbound": a.outbound,
                        "cut_center": p2(a.cut_center),
                        "cut_left": p2(a.cut_left),
                        "cut_right": p2(a.cut_right),
                    })
                })
                .collect();
            let fillets: Vec<Value> = x
                .fillets
                .iter()
                .map(|f| {
                    json!({
                        "center": p2(f.arc.center),
                        "radius": r6(f.arc.radius),
                        "tangent_a": p2(f.arc.tangent_a),
                        "tangent_b": p2(f.arc.tangent_b),
                    })
                })
                .collect();
            let mut v = json!({
                "id": x.id,
                "boundary": ring(&x.boundary),
                "centroid": p2(x.centroid),
                "links": x.links,
                "arms": arms,
                "fillets": fillets,
            });
            if let Some(e) = elev {
                v["z"] = json!(r6(e.intersection_z(x.id)));
            }
            v
        })
        .collect();
    let relations: Vec<Value> = net
        .relations
        .entries
        .iter()
        .map(|r| json!({"intersection": r.intersection, "link": r.link, "sign": r.sign}))
        .collect();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "source": net.params.source,
        "params": {
            "u": r6(net.params.u),
            "i": r6(net.params.i),
            "l_dis": r6(net.params.l_dis),
            "tolerances": net.params.tolerances,
        },
        "seg_axes": seg_axes,
        "links": links,
        "intersections": intersections,
        "relations": relations,
        "warnings": net.warnings,
    });
    if let Some(e) = elev {
        doc["params"]["profile"] = serde_json::to_value(e.params).unwrap_or(Value::Null);
    }
    if let Some(g) = lanes {
        doc["llanes"] = g
            .llanes
            .iter()
            .map(|l| {
                json!({
                    "id": l.id,
                    "link": l.link,
                    "index": l.index,
                    "offset": r6(l.offset),
                    "relations": l.relations.iter().map(|(x, s)| json!([x, s])).collect::<Vec<_>>(),
                    "centerline": l.centerline.iter().map(|&p| p3(p)).collect::<Vec<_>>(),
                })
            })
            .collect();
        doc["ilanes"] = g
            .ilanes
            .iter()
            .map(|il| {
                json!({
                    "id": il.id,
                    "intersection": il.intersection,
                    "from": il.from,
                    "to": il.to,
                    "control_points": il.geometry.ctrl.iter().map(|&p| p3(p)).collect::<Vec<_>>(),
                    "samples": il.geometry.sample(15).into_iter().map(p3).collect::<Vec<_>>(),
                })
            })
            .collect();
        doc["connectors"] = serde_json::to_value(&g.connectors).unwrap_or(Value::Null);
        doc["lane_warnings"] = json!(g.warnings);
    }
    doc
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn export_semantic_json(
    net: &RoadNetwork2D,
    elev: Option<&ElevationModel>,
    lanes: Option<&LaneGraph>,
    path: &Path,
) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&semantic_json(net, elev, lanes)).map_err(|e| Error::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    write_text(path, &text)
}

/// Wavefront OBJ text. One `o` group per region; `vt` records and a
/// material reference are written when the mesh carries texture coordinates.
pub fn obj_text(mesh: &RoadMesh, mtllib: Option<&str>) -> String {
    let mut out = String::from("# road surface mesh\n");
    if let Some(m) = mtllib {
        let _ = writeln!(out, "mtllib {m}");
    }
    let mut base = 1usize;
    let f6 = |v: f64| r6(v);
    for r in &mesh.regions {
        let _ = writeln!(out, "o {}", r.name);
        if mtllib.is_some() {
            out.push_str("usemtl road\n");
        }
        for v in &r.vertices {
            let _ = writeln!(out, "v {:.6} {:.6} {:.6}", f6(v.x), f6(v.y), f6(v.z));
        }
        if let Some(uv) = &r.uvs {
            for t in uv {
                let _ = writeln!(out, "vt {:.6} {:.6}", f6(t[0]), f6(t[1]));
            }
        }
        for t in &r.triangles {
            let [a, b, c] = t.map(|i| base + i as usize);
            if r.uvs.is_some() {
                let _ = writeln!(out, "f {a}/{a} {b}/{b} {c}/{c}");
            } else {
                let _ = writeln!(out, "f {a} {b} {c}");
            }
        }
        base += r.vertices.len();
    }
    out
}

/// Writes `roads.obj`-style output; with `texture` a sibling `.mtl` file is
/// written that references the image without reading it.
pub fn export_obj(mesh: &RoadMesh, path: &Path, texture: Option<&str>) -> Result<()> {
    let textured = mesh.regions.iter().any(|r| r.uvs.is_some());
    let mtl_name = path.with_extension("mtl");
    let mtllib = textured
        .then(|| mtl_name.file_name().map(|n| n.to_string_lossy().into_owned()))
        .flatten();
    if mtllib.is_some() {
        let mut mtl = String::from("newmtl road\nKa 1.000000 1.000000 1.000000\nKd 1.000000 1.000000 1.000000\n");
        if let Some(t) = texture {
            let _ = writeln!(mtl, "map_Kd {t}");
        }
        write_text(&mtl_name, &mtl)?;
    }
    write_text(path, &obj_text(mesh, mtllib.as_deref()))
}

#[cfg(test)]
mod tests {
    use super::super::mesh::MeshRegion;
    use super::*;

    #[test]
    fn single_triangle_obj() {
        let mesh = RoadMesh {
            regions: vec![MeshRegion {
                name: "link_7".into(),
                vertices: vec![
                    Point3::new(0.0, 0.0, 1.0),
                    Point3::new(1.0, 0.0, 1.0),
                    Point3::new(0.0, 1.0, 1.0),
                ],
                uvs: None,
                triangles: vec![[0, 1, 2]],
            }],
        };
        let text = obj_text(&mesh, None);
        assert!(text.contains("o link_7\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 1);
        assert!(text.contains("f 1 2 3\n"));
    }

    #[test]
    fn rounding_is_stable() {
        assert_eq!(r6(-1e-9), 0.0);
        assert!(r6(-1e-9).is_sign_positive());
        assert_eq!(r6(1.23456789), 1.234568);
    }
}
