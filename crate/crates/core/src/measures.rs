//! Θ-weighted surface area measure and covolume of polyhedral pseudo-cones.
//!
//! The surface area measure of a facet direction is the Θ-integral over its
//! facet. The covolume `V_Θ(K) = ∫_{C \ K} Θ dH^n` is computed by two
//! independent routes:
//!
//! * facet summation ("euler"): `V_Θ = (n-q)^{-1} Σ_i h̄_i S_i`, exact for
//!   tightened polyhedral bodies because every radial ray through `int C`
//!   meets a facet;
//! * radial quadrature: `V_Θ = (n-q)^{-1} ∫_{Ω_C} ρ(v)^{n-q} Θ(v) dv`, with
//!   panels aligned to the kinks of the piecewise-smooth radial function.
//!
//! The gradient of the covolume in the support numbers is the surface area
//! measure itself; `covolume_gradient` exposes that identity.

use crate::error::{Error, Result};
use crate::pseudocone::PseudoCone;
use crate::quadrature::{self, QuadratureConfig};
use crate::vecmath as vm;
use crate::weight::WeightFunction;

#[derive(Debug, Clone)]
pub struct SurfaceMeasure {
    /// Per-direction facet masses, aligned with the body's direction list.
    pub masses: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovolumeMethod {
    Euler,
    Radial,
}

#[derive(Debug, Clone)]
pub struct CovolumeResult {
    pub value: f64,
    pub method: CovolumeMethod,
    /// Crude error estimate derived from the quadrature tolerance.
    pub est_error: f64,
}

/// `S^Θ_{n-1}(K, {u_i})` for every facet direction. Slack or degenerate
/// facets carry exactly zero mass. The body is tightened internally when
/// needed; the measure is a property of the point set.
pub fn surface_measure(
    pc: &PseudoCone,
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<SurfaceMeasure> {
    w.require_surface_valid()?;
    let dim = pc.dim();
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let tight;
    let body = if pc.is_tightened() {
        pc
    } else {
        tight = pc.tighten()?;
        &tight
    };
    let fc = body.facet_complex()?;
    let mut masses = Vec::with_capacity(body.directions().len());
    for i in 0..body.directions().len() {
        if !fc.is_facet_nondegenerate(dim, i) {
            masses.push(0.0);
            continue;
        }
        let f = &fc.facets[i];
        let s = if dim == 2 {
            quadrature::segment_integral(w, &f[0], &f[1], cfg)?
        } else {
            quadrature::polygon_integral(w, f, cfg)?
        };
        masses.push(s);
    }
    let total = masses.iter().sum();
    Ok(SurfaceMeasure { masses, total })
}

/// Covolume by facet summation; requires an explicitly tightened body
/// because slack support numbers would overstate the result.
pub fn covolume_euler(
    pc: &PseudoCone,
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<CovolumeResult> {
    w.require_solver_valid()?;
    if !pc.is_tightened() {
        return Err(Error::NotTightened);
    }
    let s = surface_measure(pc, w, cfg)?;
    let n = pc.dim() as f64;
    let value = pc
        .support_numbers()
        .iter()
        .zip(&s.masses)
        .map(|(h, m)| h * m)
        .sum::<f64>()
        / (n - w.q());
    Ok(CovolumeResult {
        value,
        method: CovolumeMethod::Euler,
        est_error: cfg.rel_tol * value,
    })
}

/// Covolume by radial quadrature over `Ω_C`; independent of the facet
/// summation route. Accepts slack representations (the radial function does
/// not care).
pub fn covolume_radial(
    pc: &PseudoCone,
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<CovolumeResult> {
    w.require_solver_valid()?;
    let n = pc.dim() as f64;
    let q = w.q();
    let exponent = n - q;
    let integrand = |v: &[f64]| pc.radial_function_unchecked(v).powf(exponent) * w.eval_unchecked(v);
    let value = if pc.dim() == 2 {
        let classifier = |v: &[f64]| pc.radial_argmax(v);
        quadrature::sphere_quadrature(pc.cone(), &integrand, Some(&classifier), cfg)?
    } else {
        // Kink-aware panels: the radial cells are the central projections
        // of the facets, with great-circle boundaries, so the integrand is
        // smooth on each cell.
        let tight;
        let body = if pc.is_tightened() {
            pc
        } else {
            tight = pc.tighten()?;
            &tight
        };
        let fc = body.facet_complex()?;
        let mut total = 0.0;
        for i in 0..body.directions().len() {
            if !fc.is_facet_nondegenerate(3, i) {
                continue;
            }
            let cell: Vec<Vec<f64>> = fc.facets[i]
                .iter()
                .map(|p| vm::normalized(p).expect("facet vertices avoid the origin"))
                .collect();
            total += quadrature::spherical_polygon_integral(&integrand, &cell, None, cfg)?;
        }
        total
    } / exponent;
    Ok(CovolumeResult {
        value,
        method: CovolumeMethod::Radial,
        est_error: cfg.rel_tol * value,
    })
}

/// The per-direction partial derivatives of `V_Θ([h])`: exactly the surface
/// area measure (the variational identity behind the solver's gradient).
pub fn covolume_gradient(
    pc: &PseudoCone,
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    Ok(surface_measure(pc, w, cfg)?.masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pyramid_cone, quadrant_cone, random_tight_body, rng};
    use crate::weight::{WeightKind, WeightFunction};
    use std::sync::Arc;

    fn q2_single() -> PseudoCone {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        PseudoCone::new(c, vec![vec![-s, -s]], vec![1.0])
            .unwrap()
            .tighten()
            .unwrap()
    }

    fn height_weight(cone: &Arc<crate::cone::Cone>, q: f64) -> WeightFunction {
        WeightFunction::new(WeightKind::HeightPower, q, cone.clone())
    }

    #[test]
    fn q2_single_facet_mass() {
        let pc = q2_single();
        let w = height_weight(pc.cone(), 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let s = surface_measure(&pc, &w, &cfg).unwrap();
        assert!((s.masses[0] - 2.0).abs() < 1e-10);
        assert!((s.total - 2.0).abs() < 1e-10);
    }

    #[test]
    fn facet_at_height_four_has_unit_mass() {
        // S^Θ(C(t)+C) = ϑ(t) = 2 t^{-1/2} equals 1 at t = 4.
        let c = quadrant_cone();
        let s2 = (0.5f64).sqrt();
        let pc = PseudoCone::new(c.clone(), vec![vec![-s2, -s2]], vec![4.0])
            .unwrap()
            .tighten()
            .unwrap();
        let w = height_weight(&c, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let s = surface_measure(&pc, &w, &cfg).unwrap();
        assert!((s.masses[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn surface_scaling_law() {
        let cone = quadrant_cone();
        let w = height_weight(&cone, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(5);
        for _ in 0..5 {
            let pc = random_tight_body(&cone, 5, 0.1, &mut r);
            let s1 = surface_measure(&pc, &w, &cfg).unwrap();
            let s2 = surface_measure(&pc.scaled(2.0), &w, &cfg).unwrap();
            let factor = 2f64.powf(2.0 - 1.0 - 1.5);
            for (a, b) in s1.masses.iter().zip(&s2.masses) {
                assert!((b - factor * a).abs() <= 1e-9 * b.abs().max(1e-30));
            }
        }
    }

    #[test]
    fn empty_facet_mass_is_exactly_zero() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let u2 = vm::normalized(&[-1.0, -2.0]).unwrap();
        let pc = PseudoCone::new(c.clone(), vec![vec![-s, -s], u2], vec![1.0, 0.1]).unwrap();
        let w = height_weight(&c, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let sm = surface_measure(&pc, &w, &cfg).unwrap();
        assert_eq!(sm.masses[1], 0.0);
        assert!(sm.masses[0] > 0.0);
    }

    #[test]
    fn covolume_euler_q2() {
        let pc = q2_single();
        let w = height_weight(pc.cone(), 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let v = covolume_euler(&pc, &w, &cfg).unwrap();
        assert!((v.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn covolume_radial_q2() {
        // Integrand sec^2 φ over the quarter arc integrates to 2; with the
        // 1/(n-q) factor the covolume is 4.
        let pc = q2_single();
        let w = height_weight(pc.cone(), 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let v = covolume_radial(&pc, &w, &cfg).unwrap();
        assert!((v.value - 4.0).abs() < 1e-9, "got {}", v.value);
    }

    #[test]
    fn covolume_o3_square_facet() {
        let c = pyramid_cone();
        let pc = PseudoCone::new(c.clone(), vec![vec![0.0, 0.0, -1.0]], vec![1.0])
            .unwrap()
            .tighten()
            .unwrap();
        let w = height_weight(&c, 2.5);
        let cfg = QuadratureConfig::for_dim(3);
        let s = surface_measure(&pc, &w, &cfg).unwrap();
        assert!((s.masses[0] - 4.0).abs() < 1e-8);
        let ve = covolume_euler(&pc, &w, &cfg).unwrap();
        assert!((ve.value - 8.0).abs() < 1e-7);
        let vr = covolume_radial(&pc, &w, &cfg).unwrap();
        assert!(
            (vr.value - ve.value).abs() < 1e-6 * ve.value,
            "euler {} vs radial {}",
            ve.value,
            vr.value
        );
    }

    #[test]
    fn covolume_requires_regime_and_tightening() {
        let pc = q2_single();
        let w = height_weight(pc.cone(), 0.5);
        let cfg = QuadratureConfig::for_dim(2);
        assert!(matches!(
            covolume_euler(&pc, &w, &cfg),
            Err(Error::InvalidExponent { .. })
        ));
        let w0 = WeightFunction::new(WeightKind::RadialPower, 0.0, pc.cone().clone());
        assert!(matches!(
            covolume_radial(&pc, &w0, &cfg),
            Err(Error::InvalidExponent { .. })
        ));
        let slack = pc.with_support_numbers(vec![1.0]).unwrap();
        let w = height_weight(pc.cone(), 1.5);
        assert!(matches!(
            covolume_euler(&slack, &w, &cfg),
            Err(Error::NotTightened)
        ));
    }

    #[test]
    fn covolume_scaling_law() {
        let cone = quadrant_cone();
        let w = WeightFunction::new(WeightKind::RadialPower, 1.25, cone.clone());
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(9);
        let pc = random_tight_body(&cone, 4, 0.1, &mut r);
        let v1 = covolume_euler(&pc, &w, &cfg).unwrap().value;
        let v2 = covolume_euler(&pc.scaled(2.0), &w, &cfg).unwrap().value;
        let factor = 2f64.powf(2.0 - 1.25);
        assert!((v2 - factor * v1).abs() <= 1e-9 * v2.abs());
    }

    #[test]
    fn dual_route_agreement_on_random_bodies() {
        let cone = quadrant_cone();
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(2024);
        for i in 0..50 {
            let m = 2 + (i % 6);
            let pc = random_tight_body(&cone, m, 0.1, &mut r);
            let q = [1.25, 1.5, 1.9][i % 3];
            for kind in [WeightKind::HeightPower, WeightKind::RadialPower] {
                let w = WeightFunction::new(kind, q, cone.clone());
                let ve = covolume_euler(&pc, &w, &cfg).unwrap().value;
                let vr = covolume_radial(&pc, &w, &cfg).unwrap().value;
                assert!(
                    (ve - vr).abs() <= 1e-8 * ve,
                    "fixture {i} q={q} kind={kind:?}: euler {ve} radial {vr}"
                );
            }
        }
    }

    #[test]
    fn gradient_identity_and_finite_differences() {
        let cone = quadrant_cone();
        let w = height_weight(&cone, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(31);
        let pc = random_tight_body(&cone, 4, 0.12, &mut r);
        let grad = covolume_gradient(&pc, &w, &cfg).unwrap();
        let s = surface_measure(&pc, &w, &cfg).unwrap();
        assert_eq!(grad, s.masses);

        // Central finite differences of the euler covolume in each support
        // number, step 1e-5, built on re-tightened Wulff shapes.
        let h0 = pc.support_numbers().to_vec();
        let eps = 1e-5;
        for i in 0..h0.len() {
            let mut hp = h0.clone();
            hp[i] += eps;
            let mut hm = h0.clone();
            hm[i] -= eps;
            let vp = covolume_euler(&pc.with_support_numbers(hp).unwrap().tighten().unwrap(), &w, &cfg)
                .unwrap()
                .value;
            let vmn = covolume_euler(&pc.with_support_numbers(hm).unwrap().tighten().unwrap(), &w, &cfg)
                .unwrap()
                .value;
            let fd = (vp - vmn) / (2.0 * eps);
            assert!(
                (fd - s.masses[i]).abs() <= 1e-4 * s.masses[i].abs(),
                "direction {i}: fd {fd} vs S {}",
                s.masses[i]
            );
        }
    }

    #[test]
    fn slack_direction_has_zero_partial_until_activated() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let u2 = vm::normalized(&[-1.0, -2.0]).unwrap();
        let pc = PseudoCone::new(c.clone(), vec![vec![-s, -s], u2.clone()], vec![1.0, 0.1]).unwrap();
        let w = height_weight(&c, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let grad = covolume_gradient(&pc, &w, &cfg).unwrap();
        assert_eq!(grad[1], 0.0);
        // Pushing the slack support number far enough activates the facet.
        let active = PseudoCone::new(c, vec![vec![-s, -s], u2], vec![1.0, 0.8]).unwrap();
        let grad = covolume_gradient(&active, &w, &cfg).unwrap();
        assert!(grad[1] > 0.0);
    }

    #[test]
    fn weak_continuity_under_support_perturbation() {
        // max_i |S_i(K_ε) - S_i(K)| decreases monotonically to 0 as ε halves.
        let cone = quadrant_cone();
        let w = height_weight(&cone, 1.5);
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(47);
        let pc = random_tight_body(&cone, 5, 0.1, &mut r);
        let s0 = surface_measure(&pc, &w, &cfg).unwrap();
        let bump: Vec<f64> = (0..5).map(|i| if i % 2 == 0 { 1.0 } else { -0.5 }).collect();
        let mut eps = 0.02;
        let mut prev = f64::INFINITY;
        for _ in 0..18 {
            let h: Vec<f64> = pc
                .support_numbers()
                .iter()
                .zip(&bump)
                .map(|(h, b)| h + eps * b)
                .collect();
            let moved = pc.with_support_numbers(h).unwrap();
            let s = surface_measure(&moved, &w, &cfg).unwrap();
            let dev = s0
                .masses
                .iter()
                .zip(&s.masses)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(dev <= prev * (1.0 + 1e-9));
            prev = dev;
            eps *= 0.5;
        }
        assert!(prev < 1e-6, "final deviation {prev}");
    }

    use crate::vecmath as vm;
}
