use rayon::prelude::*;

use super::config::OrthoGeoreference;
use crate::geom::{Curve2, Point2, Point3, Side};
use crate::network::RoadNetwork2D;
use crate::profile::ElevationModel;

/// Triangles smaller than this (m²) are dropped.
pub const MIN_TRIANGLE_AREA: f64 = 1e-9;

/// Triangulated surface of one link or intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshRegion {
    /// `link_N` or `int_N`.
    pub name: String,
    pub vertices: Vec<Point3>,
    pub uvs: Option<Vec<[f64; 2]>>,
    /// Counter-clockwise seen from above.
    pub triangles: Vec<[u32; 3]>,
}

impl MeshRegion {
    pub fn triangle_area(&self, t: [u32; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i as usize].xy());
        0.5 * (b - a).cross(c - a)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoadMesh {
    pub regions: Vec<MeshRegion>,
}

impl RoadMesh {
    pub fn vertex_count(&self) -> usize {
        self.regions.iter().map(|r| r.vertices.len()).sum()
    }

    pub fn triangle_count(&self) -> usize {
        self.regions.iter().map(|r| r.triangles.len()).sum()
    }
}

/// Fan from `center` over a clockwise ring; one triangle per ring vertex.
pub fn fan_triangulate(ring_cw: &[Point2], center: Point2, z: f64) -> (Vec<Point3>, Vec<[u32; 3]>) {
    let n = ring_cw.len() as u32;
    let mut v: Vec<Point3> = ring_cw.iter().map(|p| p.with_z(z)).collect();
    v.push(center.with_z(z));
    let tris = (0..n).map(|i| [n, (i + 1) % n, i]).collect();
    (v, tris)
}

fn keep_nondegenerate(region: &mut MeshRegion) {
    let tris = std::mem::take(&mut region.triangles);
    region.triangles = tris
        .into_iter()
        .filter(|&t| region.triangle_area(t) > MIN_TRIANGLE_AREA)
        .collect();
}

/// Link strips between seg axis and boundary, and intersection fans.
///
/// Strip cross-sections sit every `step` meters of arc length, and both of
/// their vertices carry the profile height at that station. The first and
/// last cross-sections reproduce the intersection seam vertices exactly.
pub fn build_mesh(
    net: &RoadNetwork2D,
    elev: &ElevationModel,
    step: f64,
    ortho: Option<&OrthoGeoreference>,
) -> RoadMesh {
    let links = net.links.par_iter().map(|link| {
        let seg = net.seg_axis(link.seg_axis);
        let curve = &seg.curve;
        let profile = elev.profile(seg.id);
        let stations = curve.stations(((curve.length() / step).ceil() as usize).max(1));
        let signed = link.side.sign() * seg.half_width();
        let n = stations.len() as u32;
        let mut vertices: Vec<Point3> = stations
            .iter()
            .map(|&s| curve.position(s).with_z(profile.eval(s)))
            .collect();
        vertices.extend(
            stations
                .iter()
                .map(|&s| (curve.position(s) + curve.normal(s) * signed).with_z(profile.eval(s))),
        );
        let mut triangles = Vec::with_capacity(2 * (n as usize - 1));
        for j in 0..n - 1 {
            let (a0, a1, b0, b1) = (j, j + 1, n + j, n + j + 1);
            match link.side {
                Side::Left => triangles.extend([[a0, a1, b1], [a0, b1, b0]]),
                Side::Right => triangles.extend([[a0, b1, a1], [a0, b0, b1]]),
            }
        }
        MeshRegion {
            name: link.id.to_string(),
            vertices,
            uvs: None,
            triangles,
        }
    });
    let intersections = net.intersections.par_iter().map(|x| {
        // Axis ends lie on the cut edges; inserting them keeps the seams
        // free of T-vertices.
        let mut ring = Vec::with_capacity(3 * x.arms.len());
        let m = x.boundary.len();
        for i in 0..m {
            let (p, q) = (x.boundary[i], x.boundary[(i + 1) % m]);
            ring.push(p);
            if let Some(a) = x
                .arms
                .iter()
                .find(|a| (a.cut_left == p && a.cut_right == q) || (a.cut_right == p && a.cut_left == q))
            {
                ring.push(a.cut_center);
            }
        }
        let (vertices, triangles) = fan_triangulate(&ring, x.centroid, elev.intersection_z(x.id));
        MeshRegion {
            name: x.id.to_string(),
            vertices,
            uvs: None,
            triangles,
        }
    });
    let mut regions: Vec<MeshRegion> = intersections.chain(links).collect();
    for r in &mut regions {
        keep_nondegenerate(r);
        if let Some(o) = ortho {
            r.uvs = Some(r.vertices.iter().map(|v| o.uv(v.x, v.y)).collect());
        }
    }
    RoadMesh { regions }
}
