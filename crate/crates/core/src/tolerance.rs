//! Numeric tolerances shared by every stage.

use serde::{Deserialize, Serialize};

/// All geometric and fitting tolerances in one place.
///
/// Lengths are meters, curvatures are 1/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSet {
    /// Endpoints closer than this are treated as one junction node.
    pub snap: f64,
    /// Arc-length step used when sampling curves for offsets.
    pub offset_step: f64,
    /// Uniform resampling step of smoothed centerlines.
    pub smoothing_spacing: f64,
    /// Maximum absolute deviation of a fitted profile from its samples.
    pub fit_tolerance: f64,
    /// Maximum number of knot spans tried before a fit is declared infeasible.
    pub max_pieces: usize,
    /// Douglas-Peucker epsilon applied to link polygons.
    pub dp_epsilon: f64,
    /// Lower bound on the fillet radius (design speed 0 gives radius 0).
    pub min_fillet_radius: f64,
    /// Boundaries closer than this angle are treated as parallel.
    pub parallel_angle: f64,
    /// Minimum turning margin enforced at every intersection polygon vertex.
    pub convex_margin: f64,
    /// Cut distance used for arms that receive no fillet at all.
    pub min_cut_distance: f64,
    /// Minimum length of a seg axis left between two intersections.
    pub min_link_length: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            snap: 0.5,
            offset_step: 1.0,
            smoothing_spacing: 2.0,
            fit_tolerance: 0.5,
            max_pieces: 64,
            dp_epsilon: 0.02,
            min_fillet_radius: 0.5,
            parallel_angle: 1e-3,
            convex_margin: 0.01,
            min_cut_distance: 2.0,
            min_link_length: 1.0,
        }
    }
}
