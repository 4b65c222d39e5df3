//! Road network compiler: centerlines and a heightfield in; a semantic road
//! network, a watertight road surface mesh and a lane graph out.
//!
//! Stages, each usable on its own:
//!
//! * [`geom`]: arc-length curves, offsets, fillets, Douglas-Peucker and
//!   curvature-bounded B-spline fitting.
//! * [`network`]: GeoJSON ingestion, seg axes, links, convex intersections
//!   and the `+`/`-` relation net.
//! * [`terrain`]: heightfields (ESRI ASCII grid, PGM) and road masks.
//! * [`profile`]: vertical profiles with slope and curvature certificates,
//!   flat intersection plates and seam stitching.
//! * [`lanes`]: link lanes, turning lanes and connectors.
//! * [`pipeline`]: configuration, meshing, exports and output validation.
//!
//! ```no_run
//! use roadnet::pipeline::{run_pipeline, PipelineConfig};
//!
//! let cfg = PipelineConfig::load("fixtures/grid/config.json".as_ref())?;
//! let report = run_pipeline(&cfg)?;
//! println!("{} links", report.counts.links);
//! # Ok::<(), roadnet::Error>(())
//! ```

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the numerical recurrences they implement.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod geom;
pub mod lanes;
pub mod network;
pub mod pipeline;
pub mod profile;
pub mod terrain;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::ToleranceSet;
