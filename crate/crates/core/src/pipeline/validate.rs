//! Invariant checks on an existing output directory.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Offending entities, empty when the check passed.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, failures: Vec<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: failures.is_empty(),
            failures,
        });
    }
}

/// Vertices and triangles of each `o` group in an OBJ file.
/// A group's own vertices and its faces (0-based pool indices).
pub type ObjGroup = (Vec<[f64; 3]>, Vec<[usize; 3]>);

#[derive(Debug, Clone, Default)]
pub struct ObjGroups {
    /// Every vertex in file order; faces index into this pool.
    pub pool: Vec<[f64; 3]>,
    pub groups: BTreeMap<String, ObjGroup>,
}

pub fn parse_obj(text: &str) -> std::result::Result<ObjGroups, String> {
    let mut out = ObjGroups::default();
    let mut current: Option<String> = None;
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("o") => {
                let name = it.next().ok_or(format!("line {}: unnamed group", n + 1))?.to_string();
                out.groups.entry(name.clone()).or_default();
                current = Some(name);
            }
            Some("v") => {
                let v: Vec<f64> = it
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| format!("line {}: {e}", n + 1))?;
                if v.len() != 3 {
                    return Err(format!("line {}: vertex needs 3 coordinates", n + 1));
                }
                let p = [v[0], v[1], v[2]];
                out.pool.push(p);
                if let Some(g) = &current {
                    out.groups.get_mut(g).unwrap().0.push(p);
                }
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| t.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| format!("line {}: {e}", n + 1))?;
                if idx.len() != 3 || idx.iter().any(|&i| i == 0 || i > out.pool.len()) {
                    return Err(format!("line {}: bad face", n + 1));
                }
                let g = current
                    .as_ref()
                    .ok_or(format!("line {}: face outside a group", n + 1))?;
                out.groups
                    .get_mut(g)
                    .unwrap()
                    .1
                    .push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok(out)
}

fn pt(v: &Value) -> Option<Point2> {
    Some(Point2::new(v.get(0)?.as_f64()?, v.get(1)?.as_f64()?))
}

fn pts(v: &Value) -> Vec<Point2> {
    v.as_array()
        .map(|a| a.iter().filter_map(pt).collect())
        .unwrap_or_default()
}

fn id_str(v: &Value) -> String {
    v.as_str().unwrap_or("?").to_string()
}

/// Runs the invariant suite on `network.json` and `roads.obj` in `dir`.
pub fn validate_outputs(dir: &Path) -> Result<ValidationReport> {
    let read = |name: &str| {
        let p = dir.join(name);
        std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))
    };
    let json_path = dir.join("network.json");
    let doc: Value = serde_json::from_str(&read("network.json")?).map_err(|e| Error::Format {
        path: json_path.display().to_string(),
        reason: e.to_string(),
    })?;
    let obj = parse_obj(&read("roads.obj")?).map_err(|reason| Error::Format {
        path: dir.join("roads.obj").display().to_string(),
        reason,
    })?;
    let empty = vec![];
    let arr = |k: &str| doc.get(k).and_then(Value::as_array).unwrap_or(&empty);
    let mut rep = ValidationReport::default();

    rep.push(
        "schema_version",
        if doc.get("schema_version").and_then(Value::as_str).is_some() {
            vec![]
        } else {
            vec!["network.json".into()]
        },
    );

    // Strictly convex, clockwise intersection polygons.
    let mut bad = vec![];
    for x in arr("intersections") {
        let b = pts(&x["boundary"]);
        let n = b.len();
        let ok = n >= 3 && (0..n).all(|i| (b[(i + 1) % n] - b[i]).cross(b[(i + 2) % n] - b[(i + 1) % n]) < 0.0);
        if !ok {
            bad.push(id_str(&x["id"]));
        }
    }
    rep.push("intersection_convexity", bad);

    // Signs alternate + / - in clockwise link order.
    let mut signs: BTreeMap<(String, String), String> = BTreeMap::new();
    for r in arr("relations") {
        signs.insert((id_str(&r["intersection"]), id_str(&r["link"])), id_str(&r["sign"]));
    }
    let mut bad = vec![];
    for x in arr("intersections") {
        let id = id_str(&x["id"]);
        let links = x["links"].as_array().unwrap_or(&empty);
        for (k, l) in links.iter().enumerate() {
            let want = if k % 2 == 0 { "+" } else { "-" };
            if signs.get(&(id.clone(), id_str(l))).map(String::as_str) != Some(want) {
                bad.push(format!("{id}/{}", id_str(l)));
            }
        }
    }
    rep.push("relation_signs", bad);

    // Flat intersections and exact seams in the mesh.
    let key = |p: [f64; 3]| (p[0].to_bits(), p[1].to_bits(), p[2].to_bits());
    let mut flat = vec![];
    let mut seams = vec![];
    for x in arr("intersections") {
        let id = id_str(&x["id"]);
        let Some(z) = x.get("z").and_then(Value::as_f64) else {
            continue;
        };
        let Some((verts, _)) = obj.groups.get(&id) else {
            flat.push(format!("{id} missing from mesh"));
            continue;
        };
        if verts.iter().any(|v| v[2] != z) {
            flat.push(id.clone());
        }
        let mine: HashSet<_> = verts.iter().map(|&v| key(v)).collect();
        for arm in x["arms"].as_array().unwrap_or(&empty) {
            for link in [&arm["inbound"], &arm["outbound"]] {
                let lname = id_str(link);
                let Some((lv, _)) = obj.groups.get(&lname) else {
                    seams.push(format!("{lname} missing from mesh"));
                    continue;
                };
                let lset: HashSet<_> = lv.iter().map(|&v| key(v)).collect();
                for corner in [
                    "cut_center",
                    if link == &arm["inbound"] {
                        "cut_left"
                    } else {
                        "cut_right"
                    },
                ] {
                    let Some(p) = pt(&arm[corner]) else { continue };
                    let v = key([p.x, p.y, z]);
                    if !mine.contains(&v) || !lset.contains(&v) {
                        seams.push(format!("{id}/{lname}/{corner}"));
                    }
                }
            }
        }
    }
    rep.push("intersection_flatness", flat);
    rep.push("seam_watertightness", seams);

    // Counter-clockwise, non-degenerate triangles.
    let pool = &obj.pool;
    let mut bad = vec![];
    for (name, (_, tris)) in &obj.groups {
        for t in tris {
            let [a, b, c] = t.map(|i| Point2::new(pool[i][0], pool[i][1]));
            if 0.5 * (b - a).cross(c - a) <= 1e-9 {
                bad.push(name.clone());
                break;
            }
        }
    }
    rep.push("triangle_orientation", bad);

    // Profile certificates against the recorded bounds.
    let prof = &doc["params"]["profile"];
    if let (Some(k), Some(s)) = (prof["kappa_max"].as_f64(), prof["slope_max"].as_f64()) {
        let mut bad = vec![];
        for seg in arr("seg_axes") {
            let p = &seg["profile"];
            let (mk, ms) = (
                p["max_curvature"].as_f64().unwrap_or(f64::NAN),
                p["max_slope"].as_f64().unwrap_or(f64::NAN),
            );
            // Values are rounded to 1e-6 on export.
            if !(mk <= k * (1.0 + 1e-6) + 1e-6) || !(ms <= s * (1.0 + 1e-6) + 1e-6) {
                bad.push(id_str(&seg["id"]));
            }
        }
        rep.push("profile_certificates", bad);
    }

    // Turning lanes attach to their lanes and sit on the plate height.
    if let Some(ilanes) = doc.get("ilanes").and_then(Value::as_array) {
        let llanes: BTreeMap<String, &Value> = arr("llanes").iter().map(|l| (id_str(&l["id"]), l)).collect();
        let zs: BTreeMap<String, f64> = arr("intersections")
            .iter()
            .filter_map(|x| Some((id_str(&x["id"]), x.get("z")?.as_f64()?)))
            .collect();
        let p3 =
            |v: &Value| -> Option<[f64; 3]> { Some([v.get(0)?.as_f64()?, v.get(1)?.as_f64()?, v.get(2)?.as_f64()?]) };
        let close = |a: [f64; 3], b: [f64; 3]| (0..3).all(|k| (a[k] - b[k]).abs() <= 2e-6);
        let mut bad = vec![];
        let mut seen = HashSet::new();
        for il in ilanes {
            let id = id_str(&il["id"]);
            let ctrl: Vec<[f64; 3]> = il["control_points"]
                .as_array()
                .unwrap_or(&empty)
                .iter()
                .filter_map(p3)
                .collect();
            let from = llanes
                .get(&id_str(&il["from"]))
                .and_then(|l| l["centerline"].as_array()?.last().and_then(p3));
            let to = llanes
                .get(&id_str(&il["to"]))
                .and_then(|l| l["centerline"].as_array()?.first().and_then(p3));
            let z = zs.get(&id_str(&il["intersection"])).copied();
            let ok = ctrl.len() == 4
                && from.is_some_and(|p| close(p, ctrl[0]))
                && to.is_some_and(|p| close(p, ctrl[3]))
                && z.is_some_and(|z| ctrl.iter().all(|c| c[2] == z))
                && seen.insert((id_str(&il["from"]), id_str(&il["to"])));
            if !ok {
                bad.push(id);
            }
        }
        rep.push("ilane_attachment", bad);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_groups_are_parsed() {
        let g = parse_obj("o a\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\no b\nv 5 5 5\n").unwrap();
        assert_eq!(g.groups["a"].0.len(), 3);
        assert_eq!(g.groups["a"].1, vec![[0, 1, 2]]);
        assert_eq!(g.groups["b"].0.len(), 1);
        assert!(parse_obj("f 1 2 3\n").is_err());
    }
}
