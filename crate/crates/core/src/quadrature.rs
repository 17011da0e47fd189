//! Adaptive quadrature primitives for Θ-integrals.
//!
//! One-dimensional panels use a fixed Gauss-Legendre 16 rule with adaptive
//! bisection; two-dimensional panels (flat facet polygons and spherical
//! charts) use a degree-8 collapsed-product triangle rule with adaptive
//! quadrisection. Spherical integrals run through a flat barycentric chart
//! per geodesic triangle: for unit vertices A, B, C and p = the affine
//! parametrization of the flat triangle, the spherical area element is
//! `|det[A,B,C]| / |p|^3 ds dt`, so no geodesic subdivision is ever needed.
//!
//! Piecewise-smooth integrands on 2-D arcs (radial functions of polyhedral
//! bodies) are handled by breakpoint detection: the caller supplies a panel
//! classifier (active facet index) and panels are split at classifier
//! changes, located by bisection to 1e-12 radians.

use std::sync::OnceLock;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::vecmath as vm;
use crate::weight::WeightFunction;

/// Panel classifier for piecewise-smooth integrands (active facet index).
pub type PanelClassifier<'a> = &'a dyn Fn(&[f64]) -> usize;

/// Tolerances and depth limits for the adaptive rules.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Target relative tolerance of each integral.
    pub rel_tol: f64,
    /// Maximum bisection/quadrisection depth per panel.
    pub max_depth: u32,
}

impl QuadratureConfig {
    /// Defaults per dimension: 1e-10 for n = 2, 1e-8 for n = 3.
    pub fn for_dim(dim: usize) -> Self {
        if dim == 2 {
            QuadratureConfig {
                rel_tol: 1e-10,
                max_depth: 40,
            }
        } else {
            QuadratureConfig {
                rel_tol: 1e-8,
                max_depth: 24,
            }
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

// ---------------------------------------------------------------------------
// Fixed rules
// ---------------------------------------------------------------------------

const GAUSS_N: usize = 16;

/// Gauss-Legendre nodes/weights on (-1, 1), computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss16() -> &'static ([f64; GAUSS_N], [f64; GAUSS_N]) {
    static RULE: OnceLock<([f64; GAUSS_N], [f64; GAUSS_N])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_N;
        let mut nodes = [0.0; GAUSS_N];
        let mut weights = [0.0; GAUSS_N];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Degree-8 rule on the reference triangle {(s,t) : s,t >= 0, s+t <= 1},
/// built by collapsing a 5x5 Gauss product rule (Duffy map). Weights sum to
/// the reference area 1/2, and every bivariate polynomial of total degree
/// <= 8 is integrated exactly.
fn triangle_rule() -> &'static Vec<(f64, f64, f64)> {
    static RULE: OnceLock<Vec<(f64, f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 5;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_and_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            nodes[i] = 0.5 * (x + 1.0);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        let mut rule = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // s = u, t = v(1-u), Jacobian (1-u).
                let u = nodes[i];
                let v = nodes[j];
                rule.push((u, v * (1.0 - u), weights[i] * weights[j] * (1.0 - u)));
            }
        }
        rule
    })
}

// ---------------------------------------------------------------------------
// Adaptive engines
// ---------------------------------------------------------------------------

struct Budget {
    converged: bool,
    worst_rel: f64,
}

fn gauss_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss16();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

fn adaptive_interval(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    depth: u32,
    whole: f64,
    budget: &mut Budget,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss_panel(f, a, m);
    let right = gauss_panel(f, m, b);
    let err = (left + right - whole).abs();
    if err <= eps || depth == 0 {
        if err > eps {
            budget.converged = false;
            budget.worst_rel = budget.worst_rel.max(err);
        }
        return left + right;
    }
    adaptive_interval(f, a, m, 0.5 * eps, depth - 1, left, budget)
        + adaptive_interval(f, m, b, 0.5 * eps, depth - 1, right, budget)
}

/// Integrates `f` over `[a, b]` to relative tolerance `cfg.rel_tol`.
pub fn integrate_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let rough = gauss_panel(f, a, b);
    let eps = cfg.rel_tol * rough.abs().max(1e-300);
    let mut budget = Budget {
        converged: true,
        worst_rel: 0.0,
    };
    let value = adaptive_interval(f, a, b, eps, cfg.max_depth, rough, &mut budget);
    if budget.converged {
        Ok(value)
    } else {
        Err(Error::ToleranceNotMet {
            achieved: budget.worst_rel / value.abs().max(1e-300),
            requested: cfg.rel_tol,
        })
    }
}

#[derive(Clone, Copy)]
struct Tri2 {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
}

impl Tri2 {
    const REFERENCE: Tri2 = Tri2 {
        a: [0.0, 0.0],
        b: [1.0, 0.0],
        c: [0.0, 1.0],
    };

    fn area2(&self) -> f64 {
        // Twice the signed area.
        (self.b[0] - self.a[0]) * (self.c[1] - self.a[1])
            - (self.b[1] - self.a[1]) * (self.c[0] - self.a[0])
    }

    fn children(&self) -> [Tri2; 4] {
        let mab = [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])];
        let mbc = [0.5 * (self.b[0] + self.c[0]), 0.5 * (self.b[1] + self.c[1])];
        let mca = [0.5 * (self.c[0] + self.a[0]), 0.5 * (self.c[1] + self.a[1])];
        [
            Tri2 { a: self.a, b: mab, c: mca },
            Tri2 { a: mab, b: self.b, c: mbc },
            Tri2 { a: mca, b: mbc, c: self.c },
            Tri2 { a: mab, b: mbc, c: mca },
        ]
    }
}

fn tri_panel(g: &dyn Fn(f64, f64) -> f64, tri: &Tri2) -> f64 {
    let j = tri.area2();
    let mut acc = 0.0;
    for &(s, t, w) in triangle_rule() {
        let x = tri.a[0] + s * (tri.b[0] - tri.a[0]) + t * (tri.c[0] - tri.a[0]);
        let y = tri.a[1] + s * (tri.b[1] - tri.a[1]) + t * (tri.c[1] - tri.a[1]);
        acc += w * g(x, y);
    }
    acc * j
}

fn adaptive_triangle(
    g: &dyn Fn(f64, f64) -> f64,
    tri: &Tri2,
    eps: f64,
    depth: u32,
    whole: f64,
    budget: &mut Budget,
) -> f64 {
    let children = tri.children();
    let vals: Vec<f64> = children.iter().map(|t| tri_panel(g, t)).collect();
    let refined: f64 = vals.iter().sum();
    let err = (refined - whole).abs();
    if err <= eps || depth == 0 {
        if err > eps {
            budget.converged = false;
            budget.worst_rel = budget.worst_rel.max(err);
        }
        return refined;
    }
    children
        .iter()
        .zip(&vals)
        .map(|(t, &v)| adaptive_triangle(g, t, 0.25 * eps, depth - 1, v, budget))
        .sum()
}

/// Integrates `g(s, t)` over the reference triangle adaptively.
fn integrate_reference_triangle(
    g: &dyn Fn(f64, f64) -> f64,
    cfg: &QuadratureConfig,
    eps_abs: Option<f64>,
) -> Result<f64> {
    let tri = Tri2::REFERENCE;
    let rough = tri_panel(g, &tri);
    let eps = eps_abs.unwrap_or(cfg.rel_tol * rough.abs().max(1e-300));
    let mut budget = Budget {
        converged: true,
        worst_rel: 0.0,
    };
    let value = adaptive_triangle(g, &tri, eps, cfg.max_depth, rough, &mut budget);
    if budget.converged {
        Ok(value)
    } else {
        Err(Error::ToleranceNotMet {
            achieved: budget.worst_rel / value.abs().max(1e-300),
            requested: cfg.rel_tol,
        })
    }
}

// ---------------------------------------------------------------------------
// Θ-integrals over segments and polygons
// ---------------------------------------------------------------------------

/// `∫_{[a,b]} Θ dH^1` for a segment inside `C \ {o}`.
pub fn segment_integral(
    w: &WeightFunction,
    a: &[f64],
    b: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let cone = w.cone();
    let tol_a = 1e-9 * (1.0 + vm::norm(a));
    if cone.max_violation(a) > tol_a || cone.max_violation(b) > tol_a {
        return Err(Error::OutsideCone);
    }
    let origin = vec![0.0; a.len()];
    if vm::point_segment_distance(&origin, a, b) < 1e-12 {
        return Err(Error::SegmentThroughOrigin);
    }
    let len = vm::dist(a, b);
    if len < 1e-15 {
        return Ok(0.0);
    }
    let dir = vm::sub(b, a);
    let f = |t: f64| w.eval_unchecked(&vm::add_scaled(a, &dir, t));
    Ok(len * integrate_interval(&f, 0.0, 1.0, cfg)?)
}

/// `∫_F Θ dH^2` for a planar convex polygon `F ⊂ C \ {o}` with cyclically
/// ordered vertices (n = 3 only).
pub fn polygon_integral(
    w: &WeightFunction,
    verts: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if w.cone().dim() != 3 {
        return Err(Error::UnsupportedDimension(w.cone().dim()));
    }
    if verts.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    let area = crate::polytope::polygon_area3(verts);
    if area < 1e-18 {
        return Err(Error::DegeneratePolygon);
    }
    for v in verts {
        if w.cone().max_violation(v) > 1e-9 * (1.0 + vm::norm(v)) {
            return Err(Error::OutsideCone);
        }
    }
    if crate::polytope::point_polygon_distance(&[0.0, 0.0, 0.0], verts) < 1e-12 {
        return Err(Error::OriginArgument);
    }

    // Fan triangulation from the centroid, tolerance split by panel weight.
    let k = verts.len() as f64;
    let mut centroid = vec![0.0; 3];
    for v in verts {
        for (ci, vi) in centroid.iter_mut().zip(v) {
            *ci += vi / k;
        }
    }
    let tris: Vec<(&Vec<f64>, &Vec<f64>)> = (0..verts.len())
        .map(|i| (&verts[i], &verts[(i + 1) % verts.len()]))
        .collect();
    let mut roughs = Vec::with_capacity(tris.len());
    let mut charts = Vec::with_capacity(tris.len());
    for (b, c) in &tris {
        let (ga, gb, gc) = (centroid.clone(), (*b).clone(), (*c).clone());
        let jac = 2.0 * triangle_area3(&ga, &gb, &gc);
        charts.push((ga, gb, gc, jac));
    }
    for (ga, gb, gc, jac) in &charts {
        let g = flat_chart(w, ga, gb, gc, *jac);
        roughs.push(tri_panel(&g, &Tri2::REFERENCE));
    }
    let total_rough: f64 = roughs.iter().map(|r| r.abs()).sum();
    let mut total = 0.0;
    for ((ga, gb, gc, jac), rough) in charts.iter().zip(&roughs) {
        let g = flat_chart(w, ga, gb, gc, *jac);
        let eps = cfg.rel_tol * total_rough.max(1e-300) * (rough.abs() / total_rough.max(1e-300));
        total += integrate_reference_triangle(&g, cfg, Some(eps.max(1e-300)))?;
    }
    Ok(total)
}

fn triangle_area3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    0.5 * vm::norm(&vm::cross3(&vm::sub(b, a), &vm::sub(c, a)))
}

fn flat_chart<'a>(
    w: &'a WeightFunction,
    a: &'a [f64],
    b: &'a [f64],
    c: &'a [f64],
    jac: f64,
) -> impl Fn(f64, f64) -> f64 + 'a {
    move |s: f64, t: f64| {
        let p = [
            a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
            a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2]),
        ];
        jac * w.eval_unchecked(&p)
    }
}

// ---------------------------------------------------------------------------
// Spherical quadrature
// ---------------------------------------------------------------------------

/// Integrates `f` over the geodesic triangle with unit vertices (a, b, c)
/// through the flat chart; `eps_abs` is the absolute tolerance share.
fn spherical_triangle_integral(
    f: &dyn Fn(&[f64]) -> f64,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    cfg: &QuadratureConfig,
    eps_abs: Option<f64>,
) -> Result<f64> {
    let det = vm::dot(a, &vm::cross3(b, c)).abs();
    if det < 1e-300 {
        return Ok(0.0);
    }
    let g = move |s: f64, t: f64| {
        let p = [
            a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
            a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2]),
        ];
        let r = vm::norm(&p);
        let v = [p[0] / r, p[1] / r, p[2] / r];
        det / (r * r * r) * f(&v)
    };
    integrate_reference_triangle(&g, cfg, eps_abs)
}

/// Integral of `f` over a spherically convex polygon with cyclically
/// ordered unit vertices, fanned from `apex` (defaults to the normalized
/// vertex sum).
pub fn spherical_polygon_integral(
    f: &dyn Fn(&[f64]) -> f64,
    verts: &[Vec<f64>],
    apex: Option<&[f64]>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if verts.len() < 3 {
        return Ok(0.0);
    }
    let apex: Vec<f64> = match apex {
        Some(a) => a.to_vec(),
        None => {
            let mut s = vec![0.0; 3];
            for v in verts {
                for (si, vi) in s.iter_mut().zip(v) {
                    *si += vi;
                }
            }
            vm::normalized(&s).ok_or(Error::DegeneratePolygon)?
        }
    };
    let k = verts.len();
    let mut roughs = Vec::with_capacity(k);
    for i in 0..k {
        let (b, c) = (&verts[i], &verts[(i + 1) % k]);
        let det = vm::dot(&apex, &vm::cross3(b, c)).abs();
        roughs.push(det.max(1e-300));
    }
    let rough_total: f64 = roughs.iter().sum();
    let mut rough_vals = Vec::with_capacity(k);
    for i in 0..k {
        let (b, c) = (&verts[i], &verts[(i + 1) % k]);
        // Single-panel estimate to apportion the tolerance.
        let v = spherical_triangle_integral(
            f,
            &apex,
            b,
            c,
            &QuadratureConfig {
                rel_tol: 1.0,
                max_depth: 0,
            },
            Some(f64::INFINITY),
        )?;
        rough_vals.push(v);
    }
    let abs_total: f64 = rough_vals.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
    let mut total = 0.0;
    for i in 0..k {
        let (b, c) = (&verts[i], &verts[(i + 1) % k]);
        let share = rough_vals[i].abs().max(1e-3 * roughs[i] / rough_total * abs_total);
        let eps = cfg.rel_tol * abs_total * (share / abs_total);
        total += spherical_triangle_integral(f, &apex, b, c, cfg, Some(eps.max(1e-300)))?;
    }
    Ok(total)
}

/// `∫_{Ω_C} f(v) dv` with spherical Lebesgue measure.
///
/// For n = 2 the sector is parametrized by angle, with optional breakpoint
/// detection driven by `classifier` (panels are split where the classifier
/// value changes; change points are located by bisection to 1e-12 rad).
/// For n = 3 the spherical polygon `Ω_C` is fanned from `v_frak`.
pub fn sphere_quadrature(
    cone: &Cone,
    f: &dyn Fn(&[f64]) -> f64,
    classifier: Option<PanelClassifier<'_>>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if cone.dim() == 2 {
        let (lo, hi) = cone.sector_angles();
        let g = |phi: f64| f(&[phi.cos(), phi.sin()]);
        let mut cuts = vec![lo, hi];
        if let Some(class) = classifier {
            let cphi = |phi: f64| class(&[phi.cos(), phi.sin()]);
            locate_breakpoints(&cphi, lo, hi, &mut cuts);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut total = 0.0;
        for win in cuts.windows(2) {
            if win[1] - win[0] > 1e-12 {
                total += integrate_interval(&g, win[0], win[1], cfg)?;
            }
        }
        Ok(total)
    } else {
        spherical_polygon_integral(f, cone.rays(), Some(cone.v_frak()), cfg)
    }
}

/// Finds classifier change points in `[lo, hi]` by scanning and bisection.
fn locate_breakpoints(class: &dyn Fn(f64) -> usize, lo: f64, hi: f64, cuts: &mut Vec<f64>) {
    let samples = 257;
    let step = (hi - lo) / (samples as f64 - 1.0);
    let mut prev_phi = lo;
    let mut prev_class = class(lo);
    for i in 1..samples {
        let phi = lo + step * i as f64;
        let c = class(phi);
        if c != prev_class {
            let (mut a, mut b) = (prev_phi, phi);
            let ca = prev_class;
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                if class(m) == ca {
                    a = m;
                } else {
                    b = m;
                }
            }
            cuts.push(0.5 * (a + b));
        }
        prev_phi = phi;
        prev_class = c;
    }
}
