//! Pointed full-dimensional polyhedral cones and their dual data.
//!
//! A cone is kept in both representations: facet normals `w_j` with
//! `C = { y : <y, w_j> <= 0 }`, and unit extreme rays `r_k` with
//! `C = pos{ r_k }`. The dual cone is `C° = { x : <x, r_k> <= 0 }`, so the
//! facet normals of `C°` are exactly the rays of `C`. A distinguished unit
//! vector `v_frak` with `v_frak ∈ int C` and `-v_frak ∈ int C°` defines
//! heights, cross-sections `C(t)` and truncations `C⁻(t)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vecmath as vm;

/// Strictness margin for interiority tests on unit-scale data.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Membership slack for unit-scale boundary tests.
const MEMBER_TOL: f64 = 1e-12;

/// Angular tolerance under which two unit directions count as equal.
const DIR_DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Cone {
    dim: usize,
    facet_normals: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
    v_frak: Vec<f64>,
}

impl Cone {
    /// Builds a cone from the outer unit normals of its facets.
    ///
    /// Inputs are normalized; `v_frak` defaults to the normalized sum of the
    /// extreme rays and is validated for strict interiority on both sides.
    pub fn from_facet_normals(
        dim: usize,
        normals: &[Vec<f64>],
        v_frak: Option<Vec<f64>>,
    ) -> Result<Arc<Cone>> {
        check_dim(dim)?;
        let normals = normalize_all(dim, normals)?;
        // Candidate extreme rays live on intersections of facet planes.
        let candidates = ray_candidates(dim, &normals);
        let in_cone = |y: &[f64]| normals.iter().all(|w| vm::dot(y, w) <= MEMBER_TOL);
        // Pointedness first: a direction whose opposite also satisfies every
        // inequality spans a line inside C.
        for r in &candidates {
            let neg = vm::scale(r, -1.0);
            if in_cone(&neg) {
                return Err(Error::NotPointed);
            }
        }
        if vm::rank(&candidates, 1e-9) < dim {
            return Err(Error::NotFullDimensional);
        }
        let (rays, facets) = canonicalize_rays(dim, candidates)?;
        finish(dim, facets, rays, v_frak)
    }

    /// Builds a cone from generators (extreme rays need not be isolated by
    /// the caller; interior generators are dropped).
    pub fn from_rays(dim: usize, rays: &[Vec<f64>], v_frak: Option<Vec<f64>>) -> Result<Arc<Cone>> {
        check_dim(dim)?;
        let rays = normalize_all(dim, rays)?;
        // An antipodal generator pair spans a line.
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                let neg = vm::scale(&rays[j], -1.0);
                if vm::angle_between_units(&rays[i], &neg) <= DIR_DEDUP_TOL {
                    return Err(Error::NotPointed);
                }
            }
        }
        if vm::rank(&rays, 1e-9) < dim {
            return Err(Error::NotFullDimensional);
        }
        let (rays, facets) = canonicalize_rays(dim, rays)?;
        finish(dim, facets, rays, v_frak)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Outer unit facet normals of `C`, in canonical cyclic order.
    pub fn facet_normals(&self) -> &[Vec<f64>] {
        &self.facet_normals
    }

    /// Unit extreme rays of `C`, in canonical cyclic order.
    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    /// Facet normals of the dual cone `C°`; these equal the rays of `C`.
    pub fn dual_facet_normals(&self) -> &[Vec<f64>] {
        &self.rays
    }

    pub fn v_frak(&self) -> &[f64] {
        &self.v_frak
    }

    /// Height of a point: `<y, v_frak>`.
    pub fn height(&self, y: &[f64]) -> f64 {
        vm::dot(y, &self.v_frak)
    }

    /// Signed slack of the most violated facet inequality (<= 0 inside).
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        self.facet_normals
            .iter()
            .map(|w| vm::dot(y, w))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.max_violation(y) <= tol
    }

    /// Strict interior test with the crate-wide margin.
    pub fn contains_interior(&self, y: &[f64]) -> bool {
        self.max_violation(y) < -INTERIOR_MARGIN * (1.0 + vm::norm(y))
    }

    pub fn in_dual(&self, u: &[f64], tol: f64) -> bool {
        self.rays.iter().all(|r| vm::dot(u, r) <= tol)
    }

    /// Strict interior of `C°`.
    pub fn in_dual_interior(&self, u: &[f64]) -> bool {
        self.rays
            .iter()
            .all(|r| vm::dot(u, r) < -INTERIOR_MARGIN * (1.0 + vm::norm(u)))
    }

    /// Spherical distance of the unit vector `u` from the boundary of
    /// `Ω_{C°}`.
    ///
    /// The boundary lies on the great spheres `{ <x, r> = 0 }` over the
    /// extreme rays `r` of `C`, and for `u ∈ cl Ω_{C°}` the nearest boundary
    /// point sits on the nearest of those spheres, giving
    /// `δ_C(u) = min_r arcsin(-<u, r>)`. Values are negative outside the
    /// closed dual cone and zero on its boundary.
    pub fn delta_c(&self, u: &[f64]) -> f64 {
        self.rays
            .iter()
            .map(|r| (-vm::dot(u, r)).clamp(-1.0, 1.0).asin())
            .fold(f64::INFINITY, f64::min)
    }

    /// Vertices of the cross-section `C(t) = { y ∈ C : <y, v_frak> = t }`:
    /// segment endpoints for n = 2, a cyclically ordered polygon for n = 3.
    pub fn cross_section(&self, t: f64) -> Vec<Vec<f64>> {
        debug_assert!(t > 0.0);
        self.rays
            .iter()
            .map(|r| vm::scale(r, t / vm::dot(r, &self.v_frak)))
            .collect()
    }

    /// Spherical Lebesgue measure of `Ω_C`: the sector angle for n = 2, the
    /// spherical polygon area (sum of l'Huilier excesses over the ray fan)
    /// for n = 3.
    pub fn omega_measure(&self) -> f64 {
        if self.dim == 2 {
            return vm::angle_between_units(&self.rays[0], &self.rays[1]);
        }
        let apex = &self.v_frak;
        let k = self.rays.len();
        let mut total = 0.0;
        for i in 0..k {
            let a = &self.rays[i];
            let b = &self.rays[(i + 1) % k];
            total += spherical_triangle_excess(apex, a, b);
        }
        total
    }

    /// Angular interval `(θ_lo, θ_hi)` of the sector `Ω_C` (n = 2 only).
    pub fn sector_angles(&self) -> (f64, f64) {
        debug_assert_eq!(self.dim, 2);
        let lo = self.rays[0][1].atan2(self.rays[0][0]);
        let width = vm::angle_between_units(&self.rays[0], &self.rays[1]);
        (lo, lo + width)
    }
}

/// l'Huilier's formula for the spherical excess (area) of the triangle with
/// unit vertices a, b, c.
pub fn spherical_triangle_excess(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let sa = vm::angle_between_units(b, c);
    let sb = vm::angle_between_units(a, c);
    let sc = vm::angle_between_units(a, b);
    let s = 0.5 * (sa + sb + sc);
    let t = (0.5 * s).tan()
        * (0.5 * (s - sa)).tan()
        * (0.5 * (s - sb)).tan()
        * (0.5 * (s - sc)).tan();
    4.0 * t.max(0.0).sqrt().atan()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn normalize_all(dim: usize, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != dim {
            return Err(Error::UnsupportedDimension(v.len()));
        }
        out.push(vm::normalized(v).ok_or(Error::ZeroVector)?);
    }
    if out.is_empty() {
        return Err(Error::NotFullDimensional);
    }
    Ok(out)
}

/// Directions lying on intersections of facet planes and inside the cone.
fn ray_candidates(dim: usize, normals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let in_cone = |y: &[f64]| normals.iter().all(|w| vm::dot(y, w) <= MEMBER_TOL);
    let mut cands: Vec<Vec<f64>> = Vec::new();
    let mut push = |d: Vec<f64>| {
        if in_cone(&d) && cands.iter().all(|c| vm::angle_between_units(c, &d) > DIR_DEDUP_TOL) {
            cands.push(d);
        }
    };
    if dim == 2 {
        for w in normals {
            let p = vm::perp2(w);
            push(p.to_vec());
            push(vec![-p[0], -p[1]]);
        }
    } else {
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                let c = vm::cross3(&normals[i], &normals[j]);
                if let Some(d) = vm::normalized(&c) {
                    push(d.clone());
                    push(vm::scale(&d, -1.0));
                }
            }
        }
    }
    cands
}

/// Reduces a generator set to extreme rays in cyclic order and derives the
/// facet normals. Errors with `NotPointed` when no open halfspace contains
/// all generators.
/// (extreme rays, facet normals), both in cyclic order.
type RaysAndFacets = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn canonicalize_rays(dim: usize, rays: Vec<Vec<f64>>) -> Result<RaysAndFacets> {
    if dim == 2 {
        let mut order: Vec<usize> = (0..rays.len()).collect();
        let angle = |i: usize| rays[i][1].atan2(rays[i][0]);
        order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        // Largest circular gap; the occupied sector is its complement.
        let k = order.len();
        let (mut gap, mut at) = (f64::NEG_INFINITY, 0);
        for i in 0..k {
            let here = angle(order[i]);
            let next = if i + 1 == k {
                angle(order[0]) + std::f64::consts::TAU
            } else {
                angle(order[i + 1])
            };
            if next - here > gap {
                gap = next - here;
                at = i;
            }
        }
        let aperture = std::f64::consts::TAU - gap;
        if aperture >= std::f64::consts::PI - 1e-12 {
            return Err(Error::NotPointed);
        }
        let r_lo = rays[order[(at + 1) % k]].clone();
        let r_hi = rays[order[at]].clone();
        // Outward perpendiculars: rotate the low ray clockwise, the high ray
        // counter-clockwise.
        let w_lo = vec![r_lo[1], -r_lo[0]];
        let w_hi = vec![-r_hi[1], r_hi[0]];
        Ok((vec![r_lo, r_hi], vec![w_lo, w_hi]))
    } else {
        let (center, radius) = smallest_enclosing_cap(&rays)?;
        if radius >= std::f64::consts::FRAC_PI_2 - 1e-12 {
            return Err(Error::NotPointed);
        }
        // Central projection onto the plane <x, center> = 1; extreme rays
        // are the strict hull vertices of the projected points.
        let (e1, e2) = vm::plane_basis(&center);
        let pts: Vec<[f64; 2]> = rays
            .iter()
            .map(|r| {
                let p = vm::scale(r, 1.0 / vm::dot(r, &center));
                [vm::dot(&p, &e1), vm::dot(&p, &e2)]
            })
            .collect();
        let hull = convex_hull_strict(&pts);
        if hull.len() < 3 {
            return Err(Error::NotFullDimensional);
        }
        let extreme: Vec<Vec<f64>> = hull.iter().map(|&i| rays[i].clone()).collect();
        let k = extreme.len();
        let mut facets = Vec::with_capacity(k);
        for i in 0..k {
            let a = &extreme[i];
            let b = &extreme[(i + 1) % k];
            let w = vm::normalized(&vm::cross3(a, b)).ok_or(Error::NotPointed)?;
            let w = if vm::dot(&w, &center) > 0.0 {
                vm::scale(&w, -1.0)
            } else {
                w
            };
            facets.push(w);
        }
        Ok((extreme, facets))
    }
}

/// Smallest enclosing spherical cap of a set of unit vectors, by support-set
/// enumeration (pairs and triples). Returns (center, angular radius).
fn smallest_enclosing_cap(points: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let radius_of = |c: &[f64]| -> f64 {
        points
            .iter()
            .map(|p| vm::angle_between_units(c, p))
            .fold(0.0f64, f64::max)
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |c: Vec<f64>| {
        let r = radius_of(&c);
        if best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((c, r));
        }
    };
    for p in points {
        consider(p.clone());
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if let Some(mid) = vm::normalized(&vm::add(&points[i], &points[j])) {
                consider(mid);
            }
            for k in j + 1..points.len() {
                // Circumcenter: equidistant direction, x ∝ (a-b) x (b-c).
                let ab = vm::sub(&points[i], &points[j]);
                let bc = vm::sub(&points[j], &points[k]);
                if let Some(x) = vm::normalized(&vm::cross3(&ab, &bc)) {
                    consider(x.clone());
                    consider(vm::scale(&x, -1.0));
                }
            }
        }
    }
    best.ok_or(Error::NotFullDimensional)
}

/// Strict 2-D convex hull (collinear points dropped); returns indices in
/// counter-clockwise order.
fn convex_hull_strict(pts: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .total_cmp(&pts[b][0])
            .then(pts[a][1].total_cmp(&pts[b][1]))
    });
    idx.dedup_by(|&mut a, &mut b| {
        (pts[a][0] - pts[b][0]).abs() < 1e-12 && (pts[a][1] - pts[b][1]).abs() < 1e-12
    });
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| -> f64 {
        (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1])
            - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0])
    };
    // Monotone chain, lower then upper hull, counter-clockwise.
    let mut hull: Vec<usize> = Vec::new();
    for &i in &idx {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 1e-12 {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= 1e-12
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

fn finish(
    dim: usize,
    facet_normals: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
    v_frak: Option<Vec<f64>>,
) -> Result<Arc<Cone>> {
    let supplied = v_frak.is_some();
    let v = match v_frak {
        Some(v) => vm::normalized(&v).ok_or(Error::ZeroVector)?,
        None => {
            let mut s = vec![0.0; dim];
            for r in &rays {
                for (si, ri) in s.iter_mut().zip(r) {
                    *si += ri;
                }
            }
            vm::normalized(&s).ok_or(Error::NotPointed)?
        }
    };
    let cone = Cone {
        dim,
        facet_normals,
        rays,
        v_frak: v,
    };
    let hint = if supplied { "" } else { " (default ray sum; supply v_frak explicitly)" };
    if !cone
        .facet_normals
        .iter()
        .all(|w| vm::dot(&cone.v_frak, w) < -INTERIOR_MARGIN)
    {
        return Err(Error::BadVFrak(format!("not interior to the cone{hint}")));
    }
    if !cone
        .rays
        .iter()
        .all(|r| vm::dot(&cone.v_frak, r) > INTERIOR_MARGIN)
    {
        return Err(Error::BadVFrak(format!(
            "its negative is not interior to the dual cone{hint}"
        )));
    }
    Ok(Arc::new(cone))
}
