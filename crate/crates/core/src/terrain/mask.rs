use rayon::prelude::*;
use serde::Serialize;

use super::HeightField;
use crate::geom::{point_in_polygon, Point2};
use crate::network::{IntersectionId, LinkId, RoadNetwork2D};

/// Road region owning a raster cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    Intersection(IntersectionId),
    Link(LinkId),
}

/// Per-cell road classification with the heightfield's dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadMask {
    ncols: usize,
    nrows: usize,
    cells: Vec<Option<Region>>,
    pub warnings: Vec<String>,
}

impl RoadMask {
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Row 0 is the south edge, as in [`HeightField`].
    pub fn get(&self, col: usize, row: usize) -> Option<Region> {
        self.cells[row * self.ncols + col]
    }

    pub fn cells(&self) -> &[Option<Region>] {
        &self.cells
    }

    pub fn road_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn non_road_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.len()
    }
}

struct Shape<'a> {
    region: Region,
    ring: &'a [Point2],
    min: Point2,
    max: Point2,
}

/// Classifies every cell center against the intersection and link polygons.
/// Intersections take precedence over links; lower ids win within a class.
pub fn segment_elevation(hf: &HeightField, net: &RoadNetwork2D) -> RoadMask {
    let mut shapes: Vec<Shape> = Vec::new();
    let mut warnings = Vec::new();
    let regions = net
        .intersections
        .iter()
        .map(|x| (Region::Intersection(x.id), x.boundary.as_slice()))
        .chain(net.links.iter().map(|l| (Region::Link(l.id), l.polygon.as_slice())));
    for (region, ring) in regions {
        if ring.len() < 3 {
            continue;
        }
        let (min, max) = ring.iter().fold(
            (
                Point2::new(f64::INFINITY, f64::INFINITY),
                Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), p| {
                (
                    Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
                )
            },
        );
        if !hf.contains(min) || !hf.contains(max) {
            warnings.push(format!("{region:?} extends beyond the heightfield and is clipped"));
        }
        shapes.push(Shape { region, ring, min, max });
    }

    let (nc, cs, o) = (hf.ncols(), hf.cellsize(), hf.origin());
    let mut cells = vec![None; hf.len()];
    cells.par_chunks_mut(nc).enumerate().for_each(|(row, out)| {
        let y = o.y + (row as f64 + 0.5) * cs;
        for s in shapes.iter().filter(|s| s.min.y <= y && y <= s.max.y) {
            let c0 = (((s.min.x - o.x) / cs - 0.5).ceil().max(0.0)) as usize;
            let c1 = ((s.max.x - o.x) / cs - 0.5).floor();
            if c1 < 0.0 {
                continue;
            }
            let c1 = (c1 as usize).min(nc - 1);
            for (col, cell) in out.iter_mut().enumerate().take(c1 + 1).skip(c0) {
                if cell.is_none() && point_in_polygon(hf.cell_center(col, row), s.ring) {
                    *cell = Some(s.region);
                }
            }
        }
    });
    RoadMask {
        ncols: nc,
        nrows: hf.nrows(),
        cells,
        warnings,
    }
}
