//! Planar and spatial curve primitives.

pub mod bezier;
pub mod bspline;
pub mod curve;
pub mod fillet;
pub mod offset;
pub mod point;
pub mod polyline;
pub mod simplify;

pub use bezier::{cubic_bezier_from_tangents, CubicBezier3, DEFAULT_HANDLE_SCALE};
pub use bspline::{fit_bspline_monotone_curvature, fit_bspline_with, FitOptions, FitOutcome, PiecewiseBSpline};
pub use curve::{arc_length_parameterize, Curve2, OffsetCurve, ParamCurve};
pub use fillet::{tangent_circle_fillet, tangent_circle_fillet_with, Arc};
pub use offset::{offset_polyline, offset_polyline_with_step, Side};
pub use point::{point_in_polygon, point_segment_distance, segment_intersection, signed_area, Point2, Point3};
pub use polyline::Polyline;
pub use simplify::{douglas_peucker, douglas_peucker_indices};
