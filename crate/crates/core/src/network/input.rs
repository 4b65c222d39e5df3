//! GeoJSON centerline ingestion.

use std::path::Path;

use serde_json::{json, Value};

use super::types::{CenterlineSet, RoadAxis};
use crate::error::{Error, Result};
use crate::geom::{Point2, Polyline};

/// Reads a FeatureCollection of LineString (or MultiLineString) features.
///
/// Each feature needs numeric `width` (m) and `design_speed` (km/h)
/// properties; `id`, `lanes` and `lane_width` are optional.
pub fn read_centerlines(path: &Path) -> Result<CenterlineSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut set = parse_centerlines(&text).map_err(|e| match e {
        Error::Input(reason) => Error::Format {
            path: path.display().to_string(),
            reason,
        },
        other => other,
    })?;
    set.source = Some(path.display().to_string());
    Ok(set)
}

pub fn parse_centerlines(text: &str) -> Result<CenterlineSet> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid JSON: {e}")))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::Input("expected a GeoJSON FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Input("FeatureCollection without a features array".into()))?;

    let mut roads = Vec::new();
    for (fi, f) in features.iter().enumerate() {
        let geom = f
            .get("geometry")
            .ok_or_else(|| Error::Input(format!("feature {fi}: no geometry")))?;
        let props = f.get("properties").cloned().unwrap_or(Value::Null);
        let number = |key: &str| props.get(key).and_then(Value::as_f64);
        let width = number("width").ok_or_else(|| Error::Input(format!("feature {fi}: missing numeric `width`")))?;
        let speed = number("design_speed")
            .ok_or_else(|| Error::Input(format!("feature {fi}: missing numeric `design_speed`")))?;
        let base_id = match props.get("id").or_else(|| f.get("id")) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => format!("road_{fi}"),
        };
        let lanes = props.get("lanes").and_then(Value::as_u64).unwrap_or(1) as usize;
        let lane_width = number("lane_width");

        let lines: Vec<&Value> = match geom.get("type").and_then(Value::as_str) {
            Some("LineString") => vec![geom.get("coordinates").unwrap_or(&Value::Null)],
            Some("MultiLineString") => geom
                .get("coordinates")
                .and_then(Value::as_array)
                .map(|a| a.iter().collect())
                .unwrap_or_default(),
            other => {
                return Err(Error::Input(format!(
                    "feature {fi}: unsupported geometry type {}",
                    other.unwrap_or("<none>")
                )))
            }
        };
        for (li, coords) in lines.iter().enumerate() {
            let pts = parse_coords(coords).map_err(|r| Error::Input(format!("feature {fi}: {r}")))?;
            let id = if lines.len() > 1 {
                format!("{base_id}.{li}")
            } else {
                base_id.clone()
            };
            let axis = Polyline::new(pts).map_err(|e| Error::Input(format!("feature {fi}: {e}")))?;
            let mut road = RoadAxis::new(id, axis, width, speed);
            road.lanes = lanes;
            road.lane_width = lane_width;
            roads.push(road);
        }
    }
    check_projected(&roads)?;
    let set = CenterlineSet::new(roads);
    set.validate()?;
    Ok(set)
}

fn parse_coords(v: &Value) -> std::result::Result<Vec<Point2>, String> {
    let arr = v.as_array().ok_or("coordinates must be an array")?;
    arr.iter()
        .map(|c| {
            let xy = c
                .as_array()
                .filter(|a| a.len() >= 2)
                .ok_or("each position needs x and y")?;
            match (xy[0].as_f64(), xy[1].as_f64()) {
                (Some(x), Some(y)) => Ok(Point2::new(x, y)),
                _ => Err("non-numeric coordinate".to_string()),
            }
        })
        .collect()
}

/// Rejects inputs whose every coordinate fits in longitude/latitude ranges.
fn check_projected(roads: &[RoadAxis]) -> Result<()> {
    let geographic = !roads.is_empty()
        && roads
            .iter()
            .flat_map(|r| r.axis.points())
            .all(|p| p.x.abs() <= 180.0 && p.y.abs() <= 90.0);
    if geographic {
        return Err(Error::Input(
            "coordinates look geographic (all |x| <= 180 and |y| <= 90); reproject to a metric CRS".into(),
        ));
    }
    Ok(())
}

/// Serializes centerlines back to a GeoJSON FeatureCollection.
pub fn centerlines_to_geojson(set: &CenterlineSet) -> Value {
    let features: Vec<Value> = set
        .roads
        .iter()
        .map(|r| {
            let coords: Vec<Value> = r.axis.points().iter().map(|p| json!([p.x, p.y])).collect();
            let mut props = json!({
                "id": r.id,
                "width": r.width,
                "design_speed": r.design_speed,
                "lanes": r.lanes,
            });
            if let Some(lw) = r.lane_width {
                props["lane_width"] = json!(lw);
            }
            json!({
                "type": "Feature",
                "properties": props,
                "geometry": { "type": "LineString", "coordinates": coords },
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn write_centerlines(set: &CenterlineSet, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&centerlines_to_geojson(set)).expect("JSON value serializes");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
