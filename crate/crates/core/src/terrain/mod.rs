//! Georeferenced heightfields and road-area segmentation.

mod io;
mod mask;

pub use io::{load_heightfield, save_asc, save_pgm, HeightFormat, PgmGeoreference};
pub use mask::{segment_elevation, Region, RoadMask};

use crate::error::{Error, Result};
use crate::geom::Point2;

/// Elevation raster over an axis-aligned rectangle.
///
/// Row 0 is the southernmost row; `origin` is the lower-left corner of the
/// lower-left cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    ncols: usize,
    nrows: usize,
    cellsize: f64,
    origin: Point2,
    data: Vec<f64>,
}

impl HeightField {
    /// `data` is row-major with row 0 at the south edge.
    pub fn new(ncols: usize, nrows: usize, cellsize: f64, origin: Point2, data: Vec<f64>) -> Result<Self> {
        if ncols == 0 || nrows == 0 {
            return Err(Error::InvalidParams("heightfield needs at least one cell".into()));
        }
        if !(cellsize > 0.0) || !cellsize.is_finite() {
            return Err(Error::InvalidParams(format!(
                "cell size must be positive, got {cellsize}"
            )));
        }
        if data.len() != ncols * nrows {
            return Err(Error::InvalidParams(format!(
                "expected {} values, got {}",
                ncols * nrows,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite elevation {v}")));
        }
        Ok(Self {
            ncols,
            nrows,
            cellsize,
            origin,
            data,
        })
    }

    /// Samples `f(x, y)` at every cell center.
    pub fn from_fn(
        ncols: usize,
        nrows: usize,
        cellsize: f64,
        origin: Point2,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(ncols * nrows);
        for r in 0..nrows {
            for c in 0..ncols {
                let p = Self::center_of(origin, cellsize, c, r);
                data.push(f(p.x, p.y));
            }
        }
        Self::new(ncols, nrows, cellsize, origin, data)
    }

    fn center_of(origin: Point2, cellsize: f64, col: usize, row: usize) -> Point2 {
        Point2::new(
            origin.x + (col as f64 + 0.5) * cellsize,
            origin.y + (row as f64 + 0.5) * cellsize,
        )
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn cellsize(&self) -> f64 {
        self.cellsize
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.ncols + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2 {
        Self::center_of(self.origin, self.cellsize, col, row)
    }

    pub fn width(&self) -> f64 {
        self.ncols as f64 * self.cellsize
    }

    pub fn height(&self) -> f64 {
        self.nrows as f64 * self.cellsize
    }

    /// Corners of the covered rectangle, counter-clockwise from the lower-left.
    pub fn corners(&self) -> [Point2; 4] {
        let o = self.origin;
        let (w, h) = (self.width(), self.height());
        [
            o,
            Point2::new(o.x + w, o.y),
            Point2::new(o.x + w, o.y + h),
            Point2::new(o.x, o.y + h),
        ]
    }

    pub fn contains(&self, p: Point2) -> bool {
        let (dx, dy) = (p.x - self.origin.x, p.y - self.origin.y);
        dx >= 0.0 && dy >= 0.0 && dx <= self.width() && dy <= self.height()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Bilinear interpolation between the four surrounding cell centers,
    /// held constant beyond the outermost centers.
    pub fn sample(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(Point2::new(x, y)) {
            return Err(Error::OutOfBounds { x, y });
        }
        let (c0, tx) = axis_weight((x - self.origin.x) / self.cellsize - 0.5, self.ncols);
        let (r0, ty) = axis_weight((y - self.origin.y) / self.cellsize - 0.5, self.nrows);
        let c1 = (c0 + 1).min(self.ncols - 1);
        let r1 = (r0 + 1).min(self.nrows - 1);
        let lerp = |a: f64, b: f64, t: f64| (1.0 - t) * a + t * b;
        let south = lerp(self.value(c0, r0), self.value(c1, r0), tx);
        let north = lerp(self.value(c0, r1), self.value(c1, r1), tx);
        Ok(lerp(south, north, ty))
    }
}

/// Lower node index and fractional weight along one axis.
fn axis_weight(f: f64, n: usize) -> (usize, f64) {
    if n == 1 || f <= 0.0 {
        return (0, 0.0);
    }
    let max = (n - 1) as f64;
    if f >= max {
        return (n - 2, 1.0);
    }
    let i = f.floor() as usize;
    (i, f - i as f64)
}

/// Elevation at `(x, y)`; see [`HeightField::sample`].
pub fn sample_elevation(hf: &HeightField, x: f64, y: f64) -> Result<f64> {
    hf.sample(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_center_is_exact() {
        let hf = HeightField::new(2, 2, 10.0, Point2::new(0.0, 0.0), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(hf.sample(5.0, 5.0).unwrap(), 1.0);
        assert_eq!(hf.sample(15.0, 15.0).unwrap(), 4.0);
    }

    #[test]
    fn midpoint_between_two_cells() {
        let hf = HeightField::new(2, 1, 1.0, Point2::new(0.0, 0.0), vec![10.0, 20.0]).unwrap();
        assert_eq!(hf.sample(1.0, 0.5).unwrap(), 15.0);
    }

    #[test]
    fn outside_is_rejected() {
        let hf = HeightField::new(1, 1, 1.0, Point2::new(0.0, 0.0), vec![0.0]).unwrap();
        assert!(matches!(hf.sample(1.5, 0.5), Err(Error::OutOfBounds { .. })));
    }

    #[test]
    fn continuous_across_cell_edges() {
        let hf = HeightField::from_fn(5, 4, 2.0, Point2::new(0.0, 0.0), |x, y| (x * 0.3).sin() + y * y * 0.01).unwrap();
        for k in 1..4 {
            let x = 1.0 + 2.0 * k as f64;
            let a = hf.sample(x - 1e-12, 3.3).unwrap();
            let b = hf.sample(x + 1e-12, 3.3).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }
}
