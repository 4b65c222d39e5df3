//! ESRI ASCII grid and PGM + JSON sidecar heightfield formats.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat};
use serde::{Deserialize, Serialize};

use super::HeightField;
use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightFormat {
    Asc,
    Pgm,
}

impl HeightFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "asc" => Some(HeightFormat::Asc),
            "pgm" => Some(HeightFormat::Pgm),
            _ => None,
        }
    }
}

/// Georeference sidecar of a PGM heightfield: elevation = pixel * scale + offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgmGeoreference {
    /// Lower-left corner of the raster.
    pub origin: [f64; 2],
    pub cellsize: f64,
    pub scale: f64,
    pub offset: f64,
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Loads a heightfield; the format is inferred from the extension when `None`.
pub fn load_heightfield(path: &Path, format: Option<HeightFormat>) -> Result<HeightField> {
    let format = format
        .or_else(|| HeightFormat::from_path(path))
        .ok_or_else(|| format_err(path, "unknown heightfield extension (expected .asc or .pgm)"))?;
    match format {
        HeightFormat::Asc => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_asc(&text).map_err(|r| format_err(path, r))
        }
        HeightFormat::Pgm => load_pgm(path),
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("geo.json")
}

fn parse_asc(text: &str) -> std::result::Result<HeightField, String> {
    let mut tokens = text.split_whitespace().peekable();
    let (mut ncols, mut nrows, mut cellsize, mut nodata) = (None, None, None, None);
    let (mut x, mut y, mut centered) = (None, None, false);
    while let Some(tok) = tokens.peek() {
        if tok.parse::<f64>().is_ok() {
            break;
        }
        let key = tokens.next().unwrap_or_default().to_ascii_lowercase();
        let val: f64 = tokens
            .next()
            .ok_or(format!("header `{key}` has no value"))?
            .parse()
            .map_err(|_| format!("header `{key}` is not numeric"))?;
        match key.as_str() {
            "ncols" => ncols = Some(val as usize),
            "nrows" => nrows = Some(val as usize),
            "cellsize" => cellsize = Some(val),
            "nodata_value" => nodata = Some(val),
            "xllcorner" => x = Some(val),
            "yllcorner" => y = Some(val),
            "xllcenter" => {
                x = Some(val);
                centered = true;
            }
            "yllcenter" => {
                y = Some(val);
                centered = true;
            }
            other => return Err(format!("unknown header `{other}`")),
        }
    }
    let (ncols, nrows) = (ncols.ok_or("missing ncols")?, nrows.ok_or("missing nrows")?);
    let cellsize = cellsize.ok_or("missing cellsize")?;
    let (mut x, mut y) = (x.ok_or("missing xllcorner")?, y.ok_or("missing yllcorner")?);
    if centered {
        x -= 0.5 * cellsize;
        y -= 0.5 * cellsize;
    }
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad value `{t}`")))
        .collect::<std::result::Result<_, _>>()?;
    if values.len() != ncols * nrows {
        return Err(format!("expected {} values, found {}", ncols * nrows, values.len()));
    }
    // File rows run north to south.
    let mut cells: Vec<Option<f64>> = Vec::with_capacity(values.len());
    for r in (0..nrows).rev() {
        for &v in &values[r * ncols..(r + 1) * ncols] {
            cells.push((Some(v) != nodata).then_some(v));
        }
    }
    let data = fill_nodata(cells, ncols, nrows).ok_or("grid has no valid cells")?;
    HeightField::new(ncols, nrows, cellsize, Point2::new(x, y), data).map_err(|e| e.to_string())
}

/// Replaces missing cells by the value of the nearest valid cell in
/// breadth-first (4-neighbour) order.
fn fill_nodata(cells: Vec<Option<f64>>, ncols: usize, nrows: usize) -> Option<Vec<f64>> {
    if cells.iter().all(Option::is_some) {
        return Some(cells.into_iter().flatten().collect());
    }
    let mut out = cells.clone();
    let mut queue: VecDeque<usize> = (0..cells.len()).filter(|&i| cells[i].is_some()).collect();
    if queue.is_empty() {
        return None;
    }
    while let Some(i) = queue.pop_front() {
        let (c, r) = (i % ncols, i / ncols);
        let v = out[i];
        let mut visit = |j: usize| {
            if out[j].is_none() {
                out[j] = v;
                queue.push_back(j);
            }
        };
        if c > 0 {
            visit(i - 1);
        }
        if c + 1 < ncols {
            visit(i + 1);
        }
        if r > 0 {
            visit(i - ncols);
        }
        if r + 1 < nrows {
            visit(i + ncols);
        }
    }
    Some(out.into_iter().flatten().collect())
}

fn load_pgm(path: &Path) -> Result<HeightField> {
    let side = sidecar_path(path);
    let geo_text =
        std::fs::read_to_string(&side).map_err(|_| Error::MissingGeoreference(side.display().to_string()))?;
    let geo: PgmGeoreference = serde_json::from_str(&geo_text).map_err(|e| format_err(&side, e.to_string()))?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let img =
        image::load_from_memory_with_format(&bytes, ImageFormat::Pnm).map_err(|e| format_err(path, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let raw: Vec<f64> = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw().into_iter().map(f64::from).collect(),
        DynamicImage::ImageLuma16(g) => g.into_raw().into_iter().map(f64::from).collect(),
        _ => return Err(format_err(path, "expected a single-channel graymap")),
    };
    let mut data = Vec::with_capacity(raw.len());
    for r in (0..h).rev() {
        data.extend(raw[r * w..(r + 1) * w].iter().map(|&p| p * geo.scale + geo.offset));
    }
    HeightField::new(w, h, geo.cellsize, Point2::new(geo.origin[0], geo.origin[1]), data)
        .map_err(|e| format_err(path, e.to_string()))
}

/// Writes an ESRI ASCII grid.
pub fn save_asc(hf: &HeightField, path: &Path) -> Result<()> {
    let mut s = String::new();
    let o = hf.origin();
    let _ = writeln!(s, "ncols {}", hf.ncols());
    let _ = writeln!(s, "nrows {}", hf.nrows());
    let _ = writeln!(s, "xllcorner {}", o.x);
    let _ = writeln!(s, "yllcorner {}", o.y);
    let _ = writeln!(s, "cellsize {}", hf.cellsize());
    let _ = writeln!(s, "NODATA_value -9999");
    for r in (0..hf.nrows()).rev() {
        let row: Vec<String> = (0..hf.ncols()).map(|c| format!("{}", hf.value(c, r))).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Writes a 16-bit binary PGM plus its sidecar, quantizing elevations
/// linearly between the field's minimum and maximum.
pub fn save_pgm(hf: &HeightField, path: &Path) -> Result<PgmGeoreference> {
    let (lo, hi) = hf.min_max();
    let scale = if hi > lo { (hi - lo) / f64::from(u16::MAX) } else { 1.0 };
    let mut pixels = Vec::with_capacity(hf.len() * 2);
    for r in (0..hf.nrows()).rev() {
        for c in 0..hf.ncols() {
            let q = ((hf.value(c, r) - lo) / scale).round().clamp(0.0, f64::from(u16::MAX)) as u16;
            pixels.extend_from_slice(&q.to_be_bytes());
        }
    }
    let mut bytes = format!("P5\n{} {}\n{}\n", hf.ncols(), hf.nrows(), u16::MAX).into_bytes();
    bytes.extend_from_slice(&pixels);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let geo = PgmGeoreference {
        origin: [hf.origin().x, hf.origin().y],
        cellsize: hf.cellsize(),
        scale,
        offset: lo,
    };
    let side = sidecar_path(path);
    std::fs::write(&side, serde_json::to_string_pretty(&geo).expect("sidecar serializes"))
        .map_err(|e| Error::io(&side, e))?;
    Ok(geo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asc_two_by_two() {
        let hf = parse_asc("ncols 2\nnrows 2\nxllcorner 100\nyllcorner 200\ncellsize 10\n1 2\n3 4\n").unwrap();
        assert_eq!(hf.origin(), Point2::new(100.0, 200.0));
        // First file row is the northern one.
        assert_eq!(
            (hf.value(0, 1), hf.value(1, 1), hf.value(0, 0), hf.value(1, 0)),
            (1.0, 2.0, 3.0, 4.0)
        );
    }

    #[test]
    fn constant_grid_min_equals_max() {
        let hf = parse_asc("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n7 7 7\n").unwrap();
        assert_eq!(hf.min_max(), (7.0, 7.0));
    }

    #[test]
    fn nodata_takes_nearest_value() {
        let hf =
            parse_asc("ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n5 -9999 -9999\n")
                .unwrap();
        assert_eq!(hf.data(), &[5.0, 5.0, 5.0]);
    }

    #[test]
    fn pgm_8bit_with_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dem.pgm");
        let mut bytes = b"P5\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 200]);
        std::fs::write(&path, bytes).unwrap();
        let geo = PgmGeoreference {
            origin: [0.0, 0.0],
            cellsize: 5.0,
            scale: 0.5,
            offset: 0.0,
        };
        std::fs::write(dir.path().join("dem.geo.json"), serde_json::to_string(&geo).unwrap()).unwrap();
        let hf = load_heightfield(&path, None).unwrap();
        assert_eq!(hf.data(), &[5.0, 100.0]);
    }

    #[test]
    fn pgm_without_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dem.pgm");
        std::fs::write(&path, b"P5\n1 1\n255\n\x01").unwrap();
        assert!(matches!(
            load_heightfield(&path, None),
            Err(Error::MissingGeoreference(_))
        ));
    }

    #[test]
    fn pgm_round_trip_16bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ramp.pgm");
        let hf = HeightField::from_fn(4, 3, 2.0, Point2::new(10.0, 20.0), |x, y| x + 2.0 * y).unwrap();
        let geo = save_pgm(&hf, &path).unwrap();
        let back = load_heightfield(&path, Some(HeightFormat::Pgm)).unwrap();
        assert_eq!(back.origin(), hf.origin());
        for (a, b) in back.data().iter().zip(hf.data()) {
            assert!((a - b).abs() <= geo.scale);
        }
    }

    #[test]
    fn asc_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.asc");
        let hf = HeightField::from_fn(3, 2, 1.5, Point2::new(-4.0, 9.0), |x, y| x * y).unwrap();
        save_asc(&hf, &path).unwrap();
        assert_eq!(load_heightfield(&path, None).unwrap(), hf);
    }
}
