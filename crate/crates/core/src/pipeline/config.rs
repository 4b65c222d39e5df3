use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanes::LaneParams;
use crate::profile::ProfileParams;
use crate::terrain::HeightFormat;
use crate::tolerance::ToleranceSet;

/// Planar placement of an ortho image used for texture coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoGeoreference {
    /// Lower-left corner in world coordinates.
    pub origin: [f64; 2],
    pub width: f64,
    pub height: f64,
    /// Texture file referenced from the material library; never read.
    #[serde(default)]
    pub image: Option<String>,
}

impl OrthoGeoreference {
    pub fn uv(&self, x: f64, y: f64) -> [f64; 2] {
        [(x - self.origin[0]) / self.width, (y - self.origin[1]) / self.height]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightFormatName {
    Asc,
    Pgm,
}

impl From<HeightFormatName> for HeightFormat {
    fn from(f: HeightFormatName) -> Self {
        match f {
            HeightFormatName::Asc => HeightFormat::Asc,
            HeightFormatName::Pgm => HeightFormat::Pgm,
        }
    }
}

/// Everything a pipeline run needs. Relative paths in a config file are
/// resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub centerlines: PathBuf,
    pub heightfield: PathBuf,
    pub heightfield_format: Option<HeightFormatName>,
    pub ortho: Option<OrthoGeoreference>,
    pub out_dir: PathBuf,
    pub tolerances: ToleranceSet,
    /// Overrides of the network constants; `None` keeps the defaults.
    pub l_dis: Option<f64>,
    pub u: Option<f64>,
    pub i: Option<f64>,
    pub profile: ProfileParams,
    pub lanes: LaneParams,
    /// Applied to every road when set, replacing per-road properties.
    pub lane_width: Option<f64>,
    pub lanes_per_link: Option<usize>,
    /// Mesh cross-section spacing in meters.
    pub mesh_step: f64,
    /// Spacing of the rows written to the profile CSV files.
    pub csv_step: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            centerlines: PathBuf::new(),
            heightfield: PathBuf::new(),
            heightfield_format: None,
            ortho: None,
            out_dir: PathBuf::from("out"),
            tolerances: ToleranceSet::default(),
            l_dis: None,
            u: None,
            i: None,
            profile: ProfileParams::default(),
            lanes: LaneParams::default(),
            lane_width: None,
            lanes_per_link: None,
            mesh_step: 2.0,
            csv_step: 1.0,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.centerlines, &mut cfg.heightfield, &mut cfg.out_dir] {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Checks numeric ranges. Input existence is checked separately so the
    /// network-only stage can run without a heightfield.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        let t = &self.tolerances;
        let positive = [
            ("snap", t.snap),
            ("offset_step", t.offset_step),
            ("smoothing_spacing", t.smoothing_spacing),
            ("fit_tolerance", t.fit_tolerance),
            ("min_link_length", t.min_link_length),
            ("mesh_step", self.mesh_step),
            ("csv_step", self.csv_step),
            ("lanes.step", self.lanes.step),
            ("lanes.handle_scale", self.lanes.handle_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let non_negative = [
            ("dp_epsilon", t.dp_epsilon),
            ("min_fillet_radius", t.min_fillet_radius),
            ("parallel_angle", t.parallel_angle),
            ("convex_margin", t.convex_margin),
            ("min_cut_distance", t.min_cut_distance),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if let Some(v) = self.l_dis.filter(|v| !(*v > 0.0)) {
            return bad(format!("l_dis must be positive, got {v}"));
        }
        if let Some(v) = self.lane_width.filter(|v| !(*v > 0.0)) {
            return bad(format!("lane_width must be positive, got {v}"));
        }
        if self.lanes_per_link == Some(0) {
            return bad("lanes_per_link must be >= 1".into());
        }
        if let Some(o) = &self.ortho {
            if !(o.width > 0.0 && o.height > 0.0) {
                return bad("ortho width and height must be positive".into());
            }
        }
        self.profile.validate()
    }

    pub fn require_inputs(&self, heightfield: bool) -> Result<()> {
        let mut needed = vec![&self.centerlines];
        if heightfield {
            needed.push(&self.heightfield);
        }
        for p in needed {
            if p.as_os_str().is_empty() {
                return Err(Error::Input("input path not set".into()));
            }
            if !p.exists() {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file does not exist"),
                ));
            }
        }
        Ok(())
    }
}
