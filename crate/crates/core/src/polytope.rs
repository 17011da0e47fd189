//! Bounded convex polytopes from halfspace lists (n = 2, 3).
//!
//! Vertex enumeration by constraint-tuple intersection, per-halfspace face
//! extraction, point-to-body distances and the Hausdorff metric. This is the
//! workhorse behind truncations and all Hausdorff-based continuity checks.

use crate::error::{Error, Result};
use crate::vecmath as vm;

/// Closed halfspace `{ y : <y, normal> <= offset }` with unit normal.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    fn violation(&self, y: &[f64]) -> f64 {
        vm::dot(y, &self.normal) - self.offset
    }
}

/// A bounded convex polytope with enumerated vertices and per-halfspace
/// faces. Faces are vertex chains: a segment for n = 2, a cyclically ordered
/// convex polygon for n = 3. Lower-dimensional (degenerate) polytopes are
/// allowed; their faces may repeat geometry.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<Vec<f64>>>,
}

/// Incidence/feasibility tolerance, scaled to the point's magnitude.
fn feas_tol(y: &[f64]) -> f64 {
    1e-9 * (1.0 + vm::norm(y))
}

fn push_dedup(points: &mut Vec<Vec<f64>>, p: Vec<f64>) {
    let tol = feas_tol(&p);
    if points.iter().all(|q| vm::dist(q, &p) > tol) {
        points.push(p);
    }
}

impl Polytope {
    /// Enumerates vertices and faces of the intersection of `halfspaces`.
    ///
    /// The intersection must be bounded; unbounded inputs make the vertex
    /// hull silently incomplete, so callers are expected to include bounding
    /// constraints (cone truncations always do).
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Polytope> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let hs = &halfspaces;
        let m = hs.len();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let feasible = |y: &[f64]| hs.iter().all(|h| h.violation(y) <= feas_tol(y));

        if dim == 2 {
            for i in 0..m {
                for j in i + 1..m {
                    let mat = [
                        [hs[i].normal[0], hs[i].normal[1]],
                        [hs[j].normal[0], hs[j].normal[1]],
                    ];
                    if let Some(p) = vm::solve2(&mat, &[hs[i].offset, hs[j].offset]) {
                        if feasible(&p) {
                            push_dedup(&mut vertices, p.to_vec());
                        }
                    }
                }
            }
        } else {
            for i in 0..m {
                for j in i + 1..m {
                    for k in j + 1..m {
                        let mat = [
                            [hs[i].normal[0], hs[i].normal[1], hs[i].normal[2]],
                            [hs[j].normal[0], hs[j].normal[1], hs[j].normal[2]],
                            [hs[k].normal[0], hs[k].normal[1], hs[k].normal[2]],
                        ];
                        let b = [hs[i].offset, hs[j].offset, hs[k].offset];
                        if let Some(p) = vm::solve3(&mat, &b) {
                            if feasible(&p) {
                                push_dedup(&mut vertices, p.to_vec());
                            }
                        }
                    }
                }
            }
        }

        let faces = faces_from_vertices(dim, hs, &vertices);
        Ok(Polytope {
            dim,
            halfspaces,
            vertices,
            faces,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.violation(y) <= feas_tol(y))
    }

    /// Euclidean distance from `p` to the polytope (0 inside).
    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.contains(p) {
            return 0.0;
        }
        let mut best = self
            .vertices
            .iter()
            .map(|v| vm::dist(p, v))
            .fold(f64::INFINITY, f64::min);
        for face in &self.faces {
            match face.len() {
                0 | 1 => {}
                2 => best = best.min(vm::point_segment_distance(p, &face[0], &face[1])),
                _ => best = best.min(point_polygon_distance(p, face)),
            }
        }
        best
    }
}

/// Collects, for every halfspace, the vertices lying on its boundary plane
/// and orders them into a face chain.
fn faces_from_vertices(
    dim: usize,
    hs: &[Halfspace],
    vertices: &[Vec<f64>],
) -> Vec<Vec<Vec<f64>>> {
    let mut faces = Vec::with_capacity(hs.len());
    for h in hs {
        let mut on: Vec<Vec<f64>> = vertices
            .iter()
            .filter(|v| h.violation(v).abs() <= feas_tol(v))
            .cloned()
            .collect();
        if on.len() < 2 {
            faces.push(on);
            continue;
        }
        if dim == 2 {
            // Extreme points along the boundary line.
            let d = vm::perp2(&h.normal);
            let (mut lo, mut hi) = (0usize, 0usize);
            for (i, v) in on.iter().enumerate() {
                if vm::dot(v, &d) < vm::dot(&on[lo], &d) {
                    lo = i;
                }
                if vm::dot(v, &d) > vm::dot(&on[hi], &d) {
                    hi = i;
                }
            }
            faces.push(vec![on[lo].clone(), on[hi].clone()]);
        } else {
            order_cyclic(&mut on, &h.normal);
            faces.push(on);
        }
    }
    faces
}

/// Orders coplanar points counter-clockwise around their centroid, as seen
/// from the `normal` side.
pub fn order_cyclic(points: &mut [Vec<f64>], normal: &[f64]) {
    if points.len() < 3 {
        return;
    }
    let k = points.len() as f64;
    let mut c = vec![0.0; 3];
    for p in points.iter() {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi / k;
        }
    }
    let (e1, e2) = vm::plane_basis(normal);
    points.sort_by(|a, b| {
        let da = vm::sub(a, &c);
        let db = vm::sub(b, &c);
        let aa = vm::dot(&da, &e2).atan2(vm::dot(&da, &e1));
        let ab = vm::dot(&db, &e2).atan2(vm::dot(&db, &e1));
        aa.total_cmp(&ab)
    });
}

/// Area of a planar convex polygon embedded in R^3 (vertices in cyclic
/// order).
pub fn polygon_area3(verts: &[Vec<f64>]) -> f64 {
    if verts.len() < 3 {
        return 0.0;
    }
    let mut s = [0.0f64; 3];
    for i in 1..verts.len() - 1 {
        let a = vm::sub(&verts[i], &verts[0]);
        let b = vm::sub(&verts[i + 1], &verts[0]);
        let c = vm::cross3(&a, &b);
        for (si, ci) in s.iter_mut().zip(&c) {
            *si += ci;
        }
    }
    0.5 * vm::norm(&s)
}

/// Distance from a point to a convex polygon in R^3 (cyclic vertices).
pub fn point_polygon_distance(p: &[f64], verts: &[Vec<f64>]) -> f64 {
    debug_assert!(verts.len() >= 3);
    let a = vm::sub(&verts[1], &verts[0]);
    let b = vm::sub(&verts[2], &verts[0]);
    let n = vm::cross3(&a, &b);
    let n = match vm::normalized(&n) {
        Some(n) => n,
        None => {
            // Degenerate polygon: fall back to edges.
            return verts
                .windows(2)
                .map(|wd| vm::point_segment_distance(p, &wd[0], &wd[1]))
                .fold(f64::INFINITY, f64::min);
        }
    };
    let h = vm::dot(&vm::sub(p, &verts[0]), &n);
    let foot = vm::add_scaled(p, &n, -h);
    // Inside test: the foot must be on the inner side of every edge.
    let mut inside = true;
    for i in 0..verts.len() {
        let v0 = &verts[i];
        let v1 = &verts[(i + 1) % verts.len()];
        let edge = vm::sub(v1, v0);
        let out = vm::cross3(&edge, &n);
        if vm::dot(&vm::sub(&foot, v0), &out) > feas_tol(&foot) {
            inside = false;
            break;
        }
    }
    if inside {
        return h.abs();
    }
    (0..verts.len())
        .map(|i| vm::point_segment_distance(p, &verts[i], &verts[(i + 1) % verts.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two bounded polytopes, evaluated as the larger
/// of the two directed vertex-to-body distances.
pub fn hausdorff_distance(a: &Polytope, b: &Polytope) -> f64 {
    let d_ab = a
        .vertices
        .iter()
        .map(|v| b.distance_to_point(v))
        .fold(0.0f64, f64::max);
    let d_ba = b
        .vertices
        .iter()
        .map(|v| a.distance_to_point(v))
        .fold(0.0f64, f64::max);
    d_ab.max(d_ba)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polytope {
        Polytope::from_halfspaces(
            2,
            vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, -1.0], 0.0),
                Halfspace::new(vec![1.0, 0.0], 1.0),
                Halfspace::new(vec![0.0, 1.0], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn square_vertices_and_faces() {
        let sq = unit_square();
        assert_eq!(sq.vertices.len(), 4);
        assert!(sq.contains(&[0.5, 0.5]));
        assert!(!sq.contains(&[1.5, 0.5]));
        for f in &sq.faces {
            assert_eq!(f.len(), 2);
        }
        assert!((sq.distance_to_point(&[2.0, 0.5]) - 1.0).abs() < 1e-12);
        assert!((sq.distance_to_point(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_distance() {
        let mut hs = Vec::new();
        for k in 0..3 {
            let mut n = vec![0.0; 3];
            n[k] = -1.0;
            hs.push(Halfspace::new(n.clone(), 0.0));
            n[k] = 1.0;
            hs.push(Halfspace::new(n, 1.0));
        }
        let cube = Polytope::from_halfspaces(3, hs).unwrap();
        assert_eq!(cube.vertices.len(), 8);
        assert!((cube.distance_to_point(&[0.5, 0.5, 3.0]) - 2.0).abs() < 1e-12);
        assert!((cube.distance_to_point(&[2.0, 2.0, 2.0]) - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(cube.distance_to_point(&[0.5, 0.5, 0.5]), 0.0);
    }

    #[test]
    fn hausdorff_of_shifted_squares() {
        let a = unit_square();
        let b = Polytope::from_halfspaces(
            2,
            vec![
                Halfspace::new(vec![-1.0, 0.0], -0.25),
                Halfspace::new(vec![0.0, -1.0], 0.0),
                Halfspace::new(vec![1.0, 0.0], 1.25),
                Halfspace::new(vec![0.0, 1.0], 1.0),
            ],
        )
        .unwrap();
        assert!((hausdorff_distance(&a, &b) - 0.25).abs() < 1e-12);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
    }

    #[test]
    fn degenerate_segment_polytope() {
        // x + y = sqrt(2) clipped to the quadrant: a diagonal segment.
        let s2 = 2f64.sqrt();
        let h = (0.5f64).sqrt();
        let p = Polytope::from_halfspaces(
            2,
            vec![
                Halfspace::new(vec![-1.0, 0.0], 0.0),
                Halfspace::new(vec![0.0, -1.0], 0.0),
                Halfspace::new(vec![h, h], 1.0),
                Halfspace::new(vec![-h, -h], -1.0),
            ],
        )
        .unwrap();
        assert_eq!(p.vertices.len(), 2);
        for v in &p.vertices {
            assert!((v[0] + v[1] - s2).abs() < 1e-9);
        }
        assert!((p.distance_to_point(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
