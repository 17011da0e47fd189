//! Polyhedral C-pseudo-cones as Wulff shapes.
//!
//! A body is stored as `K = [h] = C ∩ ⋂_i { y : <y, u_i> <= -h_i }` with
//! distinct unit directions `u_i` strictly inside `Ω_{C°}` and support
//! numbers `h_i > 0`. Radial and support functions, facet enumeration
//! (n = 2, 3), tightening (replacing `h_i` by the attained support values),
//! restriction to direction subsets, and truncations `K ∩ C⁻(t)` with the
//! Hausdorff metric live here.

use std::sync::Arc;

use crate::cone::{Cone, INTERIOR_MARGIN};
use crate::error::{Error, Result};
use crate::polytope::{self, Halfspace, Polytope};
use crate::vecmath as vm;

/// Angular threshold under which two facet directions count as duplicates.
const DIR_DISTINCT_TOL: f64 = 1e-9;

/// Incidence and dedup tolerance for facet vertices.
fn vertex_tol(y: &[f64]) -> f64 {
    1e-9 * (1.0 + vm::norm(y))
}

#[derive(Debug, Clone)]
pub struct PseudoCone {
    cone: Arc<Cone>,
    directions: Vec<Vec<f64>>,
    support_numbers: Vec<f64>,
    tightened: bool,
}

/// The bounded part of the boundary of a polyhedral pseudo-cone.
///
/// `facets[i]` is the (possibly empty or degenerate) face in the hyperplane
/// `{ <y, u_i> = -h_i }`: up to two endpoints for n = 2, a cyclically
/// ordered convex polygon for n = 3. `vertices` is the union of all facet
/// vertices; `ridges` collects the faces of dimension <= n-2 (vertices for
/// n = 2, facet edges for n = 3), all of (n-1)-measure zero.
#[derive(Debug, Clone)]
pub struct FacetComplex {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Vec<Vec<f64>>>,
    pub ridges: Vec<Vec<Vec<f64>>>,
}

impl FacetComplex {
    /// Whether facet `i` carries positive (n-1)-dimensional measure.
    pub fn is_facet_nondegenerate(&self, dim: usize, i: usize) -> bool {
        let f = &self.facets[i];
        if dim == 2 {
            f.len() == 2 && vm::dist(&f[0], &f[1]) > 1e-9
        } else {
            f.len() >= 3 && polytope::polygon_area3(f) > 1e-15
        }
    }
}

/// A body truncated at height `t`: the bounded polytope `K ∩ C⁻(t)`.
#[derive(Debug, Clone)]
pub struct TruncatedBody {
    pub polytope: Polytope,
    pub height: f64,
}

impl PseudoCone {
    /// Validates directions and support numbers and builds the Wulff shape.
    pub fn new(cone: Arc<Cone>, directions: Vec<Vec<f64>>, support_numbers: Vec<f64>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::EmptyDirections);
        }
        if directions.len() != support_numbers.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} directions vs {} support numbers",
                directions.len(),
                support_numbers.len()
            )));
        }
        let mut dirs = Vec::with_capacity(directions.len());
        for u in &directions {
            let u = vm::normalized(u).ok_or(Error::ZeroVector)?;
            if !cone.in_dual_interior(&u) {
                return Err(Error::OutsideDualInterior);
            }
            dirs.push(u);
        }
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                if vm::angle_between_units(&dirs[i], &dirs[j]) <= DIR_DISTINCT_TOL {
                    return Err(Error::DuplicateDirection(i, j));
                }
            }
        }
        for (i, &h) in support_numbers.iter().enumerate() {
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::NonPositiveSupport(i));
            }
        }
        let pc = PseudoCone {
            cone,
            directions: dirs,
            support_numbers,
            tightened: false,
        };
        // The represented set is never empty: a far enough multiple of
        // v_frak satisfies every constraint strictly.
        debug_assert!({
            let r = pc.radial_function_unchecked(pc.cone.v_frak());
            let p = vm::scale(pc.cone.v_frak(), r + 1.0);
            pc.contains(&p, 1e-9)
        });
        Ok(pc)
    }

    pub fn cone(&self) -> &Arc<Cone> {
        &self.cone
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn support_numbers(&self) -> &[f64] {
        &self.support_numbers
    }

    pub fn is_tightened(&self) -> bool {
        self.tightened
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.cone.contains(y, tol)
            && self
                .directions
                .iter()
                .zip(&self.support_numbers)
                .all(|(u, &h)| vm::dot(y, u) <= -h + tol)
    }

    /// The scaled body `t K`, `t > 0` (support numbers scale linearly;
    /// tightness is preserved).
    pub fn scaled(&self, t: f64) -> PseudoCone {
        debug_assert!(t > 0.0);
        PseudoCone {
            cone: self.cone.clone(),
            directions: self.directions.clone(),
            support_numbers: self.support_numbers.iter().map(|h| h * t).collect(),
            tightened: self.tightened,
        }
    }

    /// Replaces the support vector wholesale (used by the solver); the
    /// result is marked not tightened.
    pub fn with_support_numbers(&self, h: Vec<f64>) -> Result<PseudoCone> {
        PseudoCone::new(self.cone.clone(), self.directions.clone(), h)
    }

    /// Radial function `ρ(v) = max_i h_i / |<v, u_i>|` for `v ∈ int C`,
    /// together with the argmax index set (the radial Gauss map when it is
    /// a singleton). Ties are resolved within a relative 1e-9 band.
    pub fn radial_function(&self, v: &[f64]) -> Result<(f64, Vec<usize>)> {
        if !self.cone.contains_interior(v) {
            return Err(Error::OutsideDomain);
        }
        let mut best = f64::NEG_INFINITY;
        let mut candidates = Vec::new();
        for (i, (u, &h)) in self.directions.iter().zip(&self.support_numbers).enumerate() {
            let r = h / (-vm::dot(v, u));
            if r > best {
                best = r;
            }
            candidates.push((i, r));
        }
        let argmax: Vec<usize> = candidates
            .into_iter()
            .filter(|&(_, r)| best - r <= 1e-9 * best)
            .map(|(i, _)| i)
            .collect();
        Ok((best, argmax))
    }

    /// Radial function without the interiority check; `v` must satisfy
    /// `<v, u_i> < 0` for every direction.
    #[inline]
    pub fn radial_function_unchecked(&self, v: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (u, &h) in self.directions.iter().zip(&self.support_numbers) {
            let r = h / (-vm::dot(v, u));
            if r > best {
                best = r;
            }
        }
        best
    }

    /// Index attaining the radial maximum (lowest index on ties).
    #[inline]
    pub fn radial_argmax(&self, v: &[f64]) -> usize {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (i, (u, &h)) in self.directions.iter().zip(&self.support_numbers).enumerate() {
            let r = h / (-vm::dot(v, u));
            if r > best {
                best = r;
                arg = i;
            }
        }
        arg
    }

    /// Support function `h_K(u) = max_{y ∈ K} <u, y>` for `u` strictly
    /// inside `Ω_{C°}`; the maximum sits on a vertex of the bounded part of
    /// the boundary. Returns the (negative) value; the absolute support is
    /// its negation.
    pub fn support_function(&self, u: &[f64]) -> Result<f64> {
        let u = vm::normalized(u).ok_or(Error::ZeroVector)?;
        if !self.cone.in_dual_interior(&u) {
            return Err(Error::OutsideDualInterior);
        }
        let complex = self.facet_complex()?;
        Ok(complex
            .vertices
            .iter()
            .map(|y| vm::dot(&u, y))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Enumerates the bounded boundary faces (n = 2, 3).
    ///
    /// Every facet is cut out inside its own hyperplane by the remaining
    /// halfspaces; this keeps each facet a small 1-D interval / 2-D
    /// halfplane intersection instead of a global vertex enumeration.
    pub fn facet_complex(&self) -> Result<FacetComplex> {
        let dim = self.dim();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let halfspaces = self.halfspaces();
        let mut facets = Vec::with_capacity(self.directions.len());
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for i in 0..self.directions.len() {
            let facet = if dim == 2 {
                self.facet_segment(i, &halfspaces)
            } else {
                self.facet_polygon(i, &halfspaces)
            };
            for v in &facet {
                let tol = vertex_tol(v);
                if vertices.iter().all(|q| vm::dist(q, v) > tol) {
                    vertices.push(v.clone());
                }
            }
            facets.push(facet);
        }
        let mut ridges: Vec<Vec<Vec<f64>>> = Vec::new();
        if dim == 2 {
            for v in &vertices {
                ridges.push(vec![v.clone()]);
            }
        } else {
            for f in &facets {
                if f.len() < 2 {
                    continue;
                }
                let k = f.len();
                for e in 0..k {
                    let (a, b) = (&f[e], &f[(e + 1) % k]);
                    if k == 2 && e == 1 {
                        break;
                    }
                    let dup = ridges.iter().any(|r| {
                        (vm::dist(&r[0], a) < vertex_tol(a) && vm::dist(&r[1], b) < vertex_tol(b))
                            || (vm::dist(&r[0], b) < vertex_tol(b)
                                && vm::dist(&r[1], a) < vertex_tol(a))
                    });
                    if !dup {
                        ridges.push(vec![a.clone(), b.clone()]);
                    }
                }
            }
        }
        // Facet vertices must satisfy every constraint and lie on their
        // plane; both are 1e-9 invariants of the construction.
        debug_assert!(facets.iter().enumerate().all(|(i, f)| f.iter().all(|y| {
            self.contains(y, vertex_tol(y))
                && (vm::dot(y, &self.directions[i]) + self.support_numbers[i]).abs() < vertex_tol(y)
        })));
        Ok(FacetComplex {
            vertices,
            facets,
            ridges,
        })
    }

    /// All constraints of `K`: cone facets through the origin plus the
    /// direction halfspaces.
    fn halfspaces(&self) -> Vec<Halfspace> {
        let mut hs: Vec<Halfspace> = self
            .cone
            .facet_normals()
            .iter()
            .map(|w| Halfspace::new(w.clone(), 0.0))
            .collect();
        for (u, &h) in self.directions.iter().zip(&self.support_numbers) {
            hs.push(Halfspace::new(u.clone(), -h));
        }
        hs
    }

    /// n = 2 facet: a 1-D interval inside the facet line.
    fn facet_segment(&self, i: usize, halfspaces: &[Halfspace]) -> Vec<Vec<f64>> {
        let u = &self.directions[i];
        let h = self.support_numbers[i];
        let p0 = vm::scale(u, -h);
        let d = vm::perp2(u);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (j, hs) in halfspaces.iter().enumerate() {
            if j == self.cone.facet_normals().len() + i {
                continue;
            }
            let coeff = vm::dot(&d, &hs.normal);
            let rhs = hs.offset - vm::dot(&p0, &hs.normal);
            if coeff > 1e-12 {
                hi = hi.min(rhs / coeff);
            } else if coeff < -1e-12 {
                lo = lo.max(rhs / coeff);
            } else if rhs < -1e-12 * (1.0 + h) {
                return Vec::new();
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            // Cannot happen for interior directions; facets are compact.
            return Vec::new();
        }
        let a = vm::add_scaled(&p0, &d, lo);
        if hi - lo < -vertex_tol(&a) {
            return Vec::new();
        }
        let b = vm::add_scaled(&p0, &d, hi);
        if vm::dist(&a, &b) <= vertex_tol(&a) {
            return vec![a];
        }
        vec![a, b]
    }

    /// n = 3 facet: a 2-D halfplane intersection inside the facet plane.
    fn facet_polygon(&self, i: usize, halfspaces: &[Halfspace]) -> Vec<Vec<f64>> {
        let u = &self.directions[i];
        let h = self.support_numbers[i];
        let p0 = vm::scale(u, -h);
        let (e1, e2) = vm::plane_basis(u);
        // Each ambient halfspace restricts to a halfplane a·x <= b in the
        // chart y = p0 + x1 e1 + x2 e2.
        let mut planes: Vec<([f64; 2], f64)> = Vec::new();
        for (j, hs) in halfspaces.iter().enumerate() {
            if j == self.cone.facet_normals().len() + i {
                continue;
            }
            let a = [vm::dot(&e1, &hs.normal), vm::dot(&e2, &hs.normal)];
            let b = hs.offset - vm::dot(&p0, &hs.normal);
            planes.push((a, b));
        }
        let scale_tol = 1e-9 * (1.0 + h);
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for a in 0..planes.len() {
            for b in a + 1..planes.len() {
                let mat = [planes[a].0, planes[b].0];
                if let Some(x) = vm::solve2(&mat, &[planes[a].1, planes[b].1]) {
                    let feasible = planes
                        .iter()
                        .all(|(n, c)| n[0] * x[0] + n[1] * x[1] <= c + scale_tol * (1.0 + vm::norm(&x)));
                    if feasible && pts.iter().all(|p| vm::dist(p, &x) > scale_tol) {
                        pts.push(x);
                    }
                }
            }
        }
        if pts.is_empty() {
            return Vec::new();
        }
        // Cyclic order in the chart around the centroid.
        let k = pts.len() as f64;
        let c = pts.iter().fold([0.0, 0.0], |acc, p| {
            [acc[0] + p[0] / k, acc[1] + p[1] / k]
        });
        pts.sort_by(|p, q| {
            let ap = (p[1] - c[1]).atan2(p[0] - c[0]);
            let aq = (q[1] - c[1]).atan2(q[0] - c[0]);
            ap.total_cmp(&aq)
        });
        pts.iter()
            .map(|x| {
                let mut y = p0.clone();
                for (yi, (e1i, e2i)) in y.iter_mut().zip(e1.iter().zip(e2.iter())) {
                    *yi += x[0] * e1i + x[1] * e2i;
                }
                y
            })
            .collect()
    }

    /// Returns the same point set with `h_i` replaced by the attained
    /// absolute support values `h̄_K(u_i) >= h_i`; idempotent.
    pub fn tighten(&self) -> Result<PseudoCone> {
        let complex = self.facet_complex()?;
        let mut h = Vec::with_capacity(self.directions.len());
        for (u, &h_old) in self.directions.iter().zip(&self.support_numbers) {
            let hk = complex
                .vertices
                .iter()
                .map(|y| vm::dot(u, y))
                .fold(f64::NEG_INFINITY, f64::max);
            h.push((-hk).max(h_old));
        }
        Ok(PseudoCone {
            cone: self.cone.clone(),
            directions: self.directions.clone(),
            support_numbers: h,
            tightened: true,
        })
    }

    /// The C-determined set `K^(β) = C ∩ ⋂_{u ∈ β} H⁻_K(u)` over a subset
    /// of the direction indices, using tightened support numbers. Satisfies
    /// `K ⊆ K^(β)`.
    pub fn restrict(&self, subset: &[usize]) -> Result<PseudoCone> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let tight = self.tighten()?;
        let mut dirs = Vec::with_capacity(subset.len());
        let mut hs = Vec::with_capacity(subset.len());
        for &i in subset {
            dirs.push(tight.directions[i].clone());
            hs.push(tight.support_numbers[i]);
        }
        let mut pc = PseudoCone::new(self.cone.clone(), dirs, hs)?;
        pc.tightened = true;
        Ok(pc)
    }

    /// `K ∩ C⁻(t)` as a bounded polytope.
    pub fn truncate(&self, t: f64) -> Result<TruncatedBody> {
        // Feasible iff the lowest point of K sits at height <= t.
        let min_height = self
            .facet_complex()?
            .vertices
            .iter()
            .map(|y| self.cone.height(y))
            .fold(f64::INFINITY, f64::min);
        if t < min_height - 1e-9 * (1.0 + t.abs()) {
            return Err(Error::EmptyTruncation(t));
        }
        let mut hs = self.halfspaces();
        hs.push(Halfspace::new(self.cone.v_frak().to_vec(), t));
        let polytope = Polytope::from_halfspaces(self.dim(), hs)?;
        if polytope.is_empty() {
            return Err(Error::EmptyTruncation(t));
        }
        Ok(TruncatedBody {
            polytope,
            height: t,
        })
    }

    /// Distance of `K` from the origin.
    pub fn distance_from_origin(&self) -> Result<f64> {
        let rho_v = self.radial_function_unchecked(self.cone.v_frak());
        let trunc = self.truncate(2.0 * rho_v)?;
        let origin = vec![0.0; self.dim()];
        Ok(trunc.polytope.distance_to_point(&origin))
    }
}

/// Hausdorff distance between two truncated bodies.
pub fn hausdorff_distance(a: &TruncatedBody, b: &TruncatedBody) -> f64 {
    polytope::hausdorff_distance(&a.polytope, &b.polytope)
}

/// The margin by which `u` clears the strict interiority requirement; kept
/// for callers that want to check before constructing.
pub fn direction_margin(cone: &Cone, u: &[f64]) -> f64 {
    cone.delta_c(u) - INTERIOR_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pyramid_cone, quadrant_cone};

    fn s2() -> f64 {
        2f64.sqrt()
    }

    /// The quadrant body with the single facet x + y >= sqrt(2).
    fn q2_single() -> PseudoCone {
        let c = quadrant_cone();
        let u = vec![-(0.5f64.sqrt()), -(0.5f64.sqrt())];
        PseudoCone::new(c, vec![u], vec![1.0]).unwrap()
    }

    /// Two directions; the second is slack at h = 0.1.
    fn q2_two(slack_h: f64) -> PseudoCone {
        let c = quadrant_cone();
        let s = 0.5f64.sqrt();
        let u2 = vm::normalized(&[-1.0, -2.0]).unwrap();
        PseudoCone::new(c, vec![vec![-s, -s], u2], vec![1.0, slack_h]).unwrap()
    }

    #[test]
    fn construction_validation() {
        let c = quadrant_cone();
        let s = 0.5f64.sqrt();
        assert!(matches!(
            PseudoCone::new(c.clone(), vec![], vec![]),
            Err(Error::EmptyDirections)
        ));
        assert!(matches!(
            PseudoCone::new(c.clone(), vec![vec![0.0, -1.0]], vec![1.0]),
            Err(Error::OutsideDualInterior)
        ));
        assert!(matches!(
            PseudoCone::new(c.clone(), vec![vec![-s, -s]], vec![0.0]),
            Err(Error::NonPositiveSupport(0))
        ));
        assert!(matches!(
            PseudoCone::new(
                c,
                vec![vec![-s, -s], vec![-s - 1e-12, -s + 1e-12]],
                vec![1.0, 1.0]
            ),
            Err(Error::DuplicateDirection(0, 1))
        ));
    }

    #[test]
    fn radial_closed_forms() {
        let pc = q2_single();
        let s = 0.5f64.sqrt();
        let (rho, arg) = pc.radial_function(&[s, s]).unwrap();
        assert!((rho - 1.0).abs() < 1e-14);
        assert_eq!(arg, vec![0]);
        let (rho, _) = pc.radial_function(&[0.6, 0.8]).unwrap();
        assert!((rho - 5.0 * s2() / 7.0).abs() < 1e-14);
        // The radial point lies on the boundary.
        let p = vm::scale(&[0.6, 0.8], rho);
        assert!((vm::dot(&p, &pc.directions()[0]) + 1.0).abs() < 1e-12);
        assert!(matches!(
            pc.radial_function(&[1.0, 0.0]),
            Err(Error::OutsideDomain)
        ));
        assert!(matches!(
            pc.radial_function(&[-1.0, 0.3]),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn radial_homogeneity_under_scaling() {
        let pc = q2_two(0.4);
        let scaled = pc.scaled(3.0);
        for v in [[0.6, 0.8], [0.9, 0.43589], [0.3, 0.95]] {
            let v = vm::normalized(&v).unwrap();
            let (r1, _) = pc.radial_function(&v).unwrap();
            let (r3, _) = scaled.radial_function(&v).unwrap();
            assert!((r3 - 3.0 * r1).abs() < 1e-12 * r3.abs());
        }
    }

    #[test]
    fn support_closed_forms() {
        let pc = q2_single();
        let s = 0.5f64.sqrt();
        let h = pc.support_function(&[-s, -s]).unwrap();
        assert!((h + 1.0).abs() < 1e-12);
        // Vertex oracle: vertices are (sqrt(2),0) and (0,sqrt(2)).
        let u = vm::normalized(&[-1.0, -2.0]).unwrap();
        let h = pc.support_function(&u).unwrap();
        assert!((h + s2() / 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            pc.support_function(&[0.0, -1.0]),
            Err(Error::OutsideDualInterior)
        ));
    }

    #[test]
    fn support_matches_radial_supremum() {
        // h_K(u) = sup_v <u,v> ρ(v) over the open sector: dense grid plus
        // golden-section refinement (the supremum may sit at the boundary).
        let pc = q2_two(0.8).tighten().unwrap();
        let s = 0.5f64.sqrt();
        let value = |u: &[f64], phi: f64| {
            let v = [phi.cos(), phi.sin()];
            vm::dot(u, &v) * pc.radial_function_unchecked(&v)
        };
        for u in [
            vec![-s, -s],
            vm::normalized(&[-1.0, -2.0]).unwrap(),
            vm::normalized(&[-0.3, -0.8]).unwrap(),
        ] {
            let h = pc.support_function(&u).unwrap();
            let n = 20000;
            let grid = std::f64::consts::FRAC_PI_2 / n as f64;
            let (mut best_phi, mut sup) = (0.0, f64::NEG_INFINITY);
            for i in 0..=n {
                let phi = grid * i as f64;
                let val = value(&u, phi);
                if val > sup {
                    sup = val;
                    best_phi = phi;
                }
            }
            let (mut lo, mut hi) = (
                (best_phi - grid).max(0.0),
                (best_phi + grid).min(std::f64::consts::FRAC_PI_2),
            );
            for _ in 0..80 {
                let m1 = lo + 0.382 * (hi - lo);
                let m2 = lo + 0.618 * (hi - lo);
                if value(&u, m1) > value(&u, m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            sup = sup.max(value(&u, 0.5 * (lo + hi)));
            assert!((h - sup).abs() < 1e-6, "u={u:?}: {h} vs {sup}");
        }
    }

    #[test]
    fn facet_complex_q2() {
        let pc = q2_single();
        let fc = pc.facet_complex().unwrap();
        assert_eq!(fc.facets.len(), 1);
        let f = &fc.facets[0];
        assert_eq!(f.len(), 2);
        assert!(f.iter().any(|p| vm::dist(p, &[s2(), 0.0]) < 1e-9));
        assert!(f.iter().any(|p| vm::dist(p, &[0.0, s2()]) < 1e-9));
        assert_eq!(fc.vertices.len(), 2);
        assert_eq!(fc.ridges.len(), 2);
    }

    #[test]
    fn facet_complex_slack_direction() {
        let pc = q2_two(0.1);
        let fc = pc.facet_complex().unwrap();
        assert!(fc.is_facet_nondegenerate(2, 0));
        assert!(fc.facets[1].is_empty(), "slack constraint has no facet");
        // A binding second direction (h above the slack threshold sqrt(2/5))
        // produces two nondegenerate facets.
        let pc = q2_two(0.8);
        let fc = pc.facet_complex().unwrap();
        assert!(fc.is_facet_nondegenerate(2, 0));
        assert!(fc.is_facet_nondegenerate(2, 1));
    }

    #[test]
    fn facet_complex_o3_square() {
        let c = pyramid_cone();
        let pc = PseudoCone::new(c, vec![vec![0.0, 0.0, -1.0]], vec![1.0]).unwrap();
        let fc = pc.facet_complex().unwrap();
        assert_eq!(fc.facets[0].len(), 4);
        for p in &fc.facets[0] {
            assert!((p[2] - 1.0).abs() < 1e-9);
            assert!((p[0].abs() - 1.0).abs() < 1e-9);
            assert!((p[1].abs() - 1.0).abs() < 1e-9);
        }
        assert_eq!(fc.vertices.len(), 4);
        assert_eq!(fc.ridges.len(), 4);
    }

    #[test]
    fn tighten_and_idempotence() {
        let pc = q2_two(0.1);
        let tight = pc.tighten().unwrap();
        assert!(tight.is_tightened());
        assert!((tight.support_numbers()[0] - 1.0).abs() < 1e-12);
        assert!((tight.support_numbers()[1] - s2() / 5f64.sqrt()).abs() < 1e-12);
        let again = tight.tighten().unwrap();
        for (a, b) in again.support_numbers().iter().zip(tight.support_numbers()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tighten_preserves_the_point_set() {
        let pc = q2_two(0.1);
        let tight = pc.tighten().unwrap();
        for i in 1..60 {
            let phi = std::f64::consts::FRAC_PI_2 * (i as f64) / 60.0;
            let v = [phi.cos(), phi.sin()];
            let a = pc.radial_function_unchecked(&v);
            let b = tight.radial_function_unchecked(&v);
            assert!((a - b).abs() <= 1e-12 * a, "radial mismatch at {phi}");
        }
    }

    #[test]
    fn restrict_drops_constraints() {
        let pc = q2_two(0.5);
        let full = pc.restrict(&[0, 1]).unwrap();
        let tight = pc.tighten().unwrap();
        for (a, b) in full.support_numbers().iter().zip(tight.support_numbers()) {
            assert!((a - b).abs() < 1e-12);
        }
        let single = pc.restrict(&[0]).unwrap();
        assert_eq!(single.directions().len(), 1);
        assert!((single.support_numbers()[0] - 1.0).abs() < 1e-12);
        assert!(matches!(pc.restrict(&[]), Err(Error::EmptySubset)));
        // Containment K ⊆ K^(β): radial function can only shrink.
        for i in 1..40 {
            let phi = std::f64::consts::FRAC_PI_2 * (i as f64) / 40.0;
            let v = [phi.cos(), phi.sin()];
            let r_full = pc.radial_function_unchecked(&v);
            let r_single = single.radial_function_unchecked(&v);
            assert!(r_single <= r_full + 1e-12);
        }
    }

    #[test]
    fn truncation_and_hausdorff() {
        let pc = q2_single();
        let t1 = pc.truncate(1.0).unwrap();
        assert_eq!(t1.polytope.vertices.len(), 2);
        for v in &t1.polytope.vertices {
            assert!((v[0] + v[1] - s2()).abs() < 1e-9);
        }
        assert!(matches!(
            pc.truncate(0.9),
            Err(Error::EmptyTruncation(_))
        ));
        let t3 = pc.truncate(3.0).unwrap();
        assert_eq!(hausdorff_distance(&t3, &t3), 0.0);

        // Translation bound: moving K by ε v_frak moves truncations by <= ε.
        let eps = 1e-3;
        let vf = pc.cone().v_frak().to_vec();
        let mut hs: Vec<Halfspace> = Vec::new();
        for w in pc.cone().facet_normals() {
            hs.push(Halfspace::new(w.clone(), eps * vm::dot(w, &vf)));
        }
        for (u, &h) in pc.directions().iter().zip(pc.support_numbers()) {
            hs.push(Halfspace::new(u.clone(), -h + eps * vm::dot(u, &vf)));
        }
        hs.push(Halfspace::new(vf.clone(), 3.0));
        let shifted = TruncatedBody {
            polytope: Polytope::from_halfspaces(2, hs).unwrap(),
            height: 3.0,
        };
        let d = hausdorff_distance(&t3, &shifted);
        assert!(d <= eps * (1.0 + 1e-9), "d={d} eps={eps}");
    }

    #[test]
    fn scaling_of_vertices_is_linear() {
        let pc = q2_two(0.5);
        let fc1 = pc.facet_complex().unwrap();
        let fc2 = pc.scaled(2.0).facet_complex().unwrap();
        for (f1, f2) in fc1.facets.iter().zip(&fc2.facets) {
            assert_eq!(f1.len(), f2.len());
            for v1 in f1 {
                let target = vm::scale(v1, 2.0);
                assert!(f2.iter().any(|v2| vm::dist(v2, &target) < 1e-12));
            }
        }
    }

    #[test]
    fn wulff_continuity_under_uniform_perturbation() {
        // d_H([h+ε]∩C⁻(t), [h]∩C⁻(t)) halves along with ε and reaches 0.
        let pc = q2_two(0.5);
        let base = pc.truncate(4.0).unwrap();
        let mut prev = f64::INFINITY;
        let mut eps = 0.05;
        for _ in 0..10 {
            let h: Vec<f64> = pc.support_numbers().iter().map(|x| x + eps).collect();
            let moved = pc.with_support_numbers(h).unwrap();
            let d = hausdorff_distance(&moved.truncate(4.0).unwrap(), &base);
            assert!(d <= prev + 1e-15);
            assert!(d > 0.0);
            prev = d;
            eps *= 0.5;
        }
        assert!(prev < 1e-3);
    }
}
