//! Weight functions Θ on the cone and their scalar integrals.
//!
//! Two kinds are supported, both continuous and positive on `C \ {o}` and
//! homogeneous of degree `-q`:
//!
//! * radial power: `Θ(y) = |y|^{-q}`
//! * height power: `Θ(y) = <y, v_frak>^{-q}`
//!
//! The kernel itself accepts any real `q`, which lets tests run exact
//! length/area checks at `q = 0`. Covolume routines and the solver enforce
//! the regime `n-1 < q < n` where the weighted surface area measure and
//! covolume are finite.

use std::sync::Arc;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureConfig};
use crate::vecmath as vm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    RadialPower,
    HeightPower,
}

#[derive(Debug, Clone)]
pub struct WeightFunction {
    kind: WeightKind,
    q: f64,
    cone: Arc<Cone>,
}

impl WeightFunction {
    pub fn new(kind: WeightKind, q: f64, cone: Arc<Cone>) -> Self {
        WeightFunction { kind, q, cone }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn cone(&self) -> &Arc<Cone> {
        &self.cone
    }

    /// Whether `q` lies in the open interval `(n-1, n)` required by the
    /// solver and the covolume routines.
    pub fn solver_valid(&self) -> bool {
        let n = self.cone.dim() as f64;
        self.q > n - 1.0 && self.q < n
    }

    pub fn require_solver_valid(&self) -> Result<()> {
        if self.solver_valid() {
            Ok(())
        } else {
            let n = self.cone.dim() as f64;
            Err(Error::InvalidExponent {
                q: self.q,
                lo: n - 1.0,
                hi: n,
            })
        }
    }

    /// Requires only the lower bound `q > n-1` (finiteness of the surface
    /// area measure).
    pub fn require_surface_valid(&self) -> Result<()> {
        let n = self.cone.dim() as f64;
        if self.q > n - 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidExponent {
                q: self.q,
                lo: n - 1.0,
                hi: f64::INFINITY,
            })
        }
    }

    /// Evaluates Θ with domain checks: `y` must lie in `C` (within 1e-12,
    /// scaled) and away from the origin.
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        let r = vm::norm(y);
        if r < 1e-14 {
            return Err(Error::OriginArgument);
        }
        if self.cone.max_violation(y) > 1e-12 * (1.0 + r) {
            return Err(Error::OutsideCone);
        }
        Ok(self.eval_unchecked(y))
    }

    /// Evaluates Θ without domain checks; callers guarantee `y ∈ C \ {o}`.
    #[inline]
    pub fn eval_unchecked(&self, y: &[f64]) -> f64 {
        match self.kind {
            WeightKind::RadialPower => vm::norm(y).powf(-self.q),
            WeightKind::HeightPower => self.cone.height(y).powf(-self.q),
        }
    }

    /// ϑ(t): the Θ-integral over the cross-section `C(t)`, homogeneous of
    /// degree `n - 1 - q` in `t`.
    pub fn cross_section_theta(&self, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let section = self.cone.cross_section(t);
        if self.cone.dim() == 2 {
            quadrature::segment_integral(self, &section[0], &section[1], cfg)
        } else {
            quadrature::polygon_integral(self, &section, cfg)
        }
    }

    /// Weighted volume of `C ∩ B^n`, computed radially as
    /// `(n-q)^{-1} ∫_{Ω_C} Θ(v) dv`. Finite only for `q < n`; the solver
    /// regime `n-1 < q < n` is enforced.
    pub fn ball_covolume_density(&self, cfg: &QuadratureConfig) -> Result<f64> {
        self.require_solver_valid()?;
        let n = self.cone.dim() as f64;
        let integral =
            quadrature::sphere_quadrature(&self.cone, &|v: &[f64]| self.eval_unchecked(v), None, cfg)?;
        Ok(integral / (n - self.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pyramid_cone, quadrant_cone};

    #[test]
    fn theta_height_power_at_v_frak() {
        let c = quadrant_cone();
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, c.clone());
        let v = c.v_frak().to_vec();
        assert!((w.eval(&v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn theta_radial_power_unit_norm() {
        let c = pyramid_cone();
        for q in [-1.0, 0.0, 0.7, 2.5] {
            let w = WeightFunction::new(WeightKind::RadialPower, q, c.clone());
            let y = vm::normalized(&[0.3, -0.1, 1.0]).unwrap();
            assert!((w.eval(&y).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn theta_homogeneity() {
        let c = quadrant_cone();
        for kind in [WeightKind::RadialPower, WeightKind::HeightPower] {
            let w = WeightFunction::new(kind, 1.5, c.clone());
            let y = [0.4, 1.3];
            let lhs = w.eval(&vm::scale(&y, 2.0)).unwrap();
            let rhs = 2f64.powf(-1.5) * w.eval(&y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }

    #[test]
    fn theta_domain_errors() {
        let c = quadrant_cone();
        let w = WeightFunction::new(WeightKind::RadialPower, 1.5, c);
        assert_eq!(w.eval(&[-1.0, 0.5]).unwrap_err(), Error::OutsideCone);
        assert_eq!(w.eval(&[0.0, 0.0]).unwrap_err(), Error::OriginArgument);
    }

    #[test]
    fn cross_section_theta_closed_forms() {
        let cfg2 = crate::quadrature::QuadratureConfig::for_dim(2);
        let c = quadrant_cone();
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, c);
        // Θ ≡ 1 on the height-1 segment of length 2.
        assert!((w.cross_section_theta(1.0, &cfg2).unwrap() - 2.0).abs() < 1e-10);
        // ϑ(4) = 2 * 4^{-1/2} = 1.
        assert!((w.cross_section_theta(4.0, &cfg2).unwrap() - 1.0).abs() < 1e-10);
        let cfg3 = crate::quadrature::QuadratureConfig::for_dim(3);
        let o = pyramid_cone();
        let w = WeightFunction::new(WeightKind::HeightPower, 2.5, o);
        assert!((w.cross_section_theta(1.0, &cfg3).unwrap() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn cross_section_theta_homogeneity() {
        // ϑ(t) = t^{n-1-q} ϑ(1), relative deviation at most 1e-10.
        for (cone, q) in [(quadrant_cone(), 1.25), (pyramid_cone(), 2.5)] {
            let n = cone.dim() as f64;
            let cfg = crate::quadrature::QuadratureConfig::for_dim(cone.dim())
                .with_rel_tol(1e-12);
            for kind in [WeightKind::RadialPower, WeightKind::HeightPower] {
                let w = WeightFunction::new(kind, q, cone.clone());
                let theta1 = w.cross_section_theta(1.0, &cfg).unwrap();
                for t in [0.5, 2.0, 10.0] {
                    let theta_t = w.cross_section_theta(t, &cfg).unwrap();
                    let expect = t.powf(n - 1.0 - q) * theta1;
                    assert!(
                        (theta_t - expect).abs() <= 1e-10 * theta_t.abs(),
                        "kind {kind:?} t {t}: {theta_t} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn ball_covolume_closed_forms_and_oracle() {
        let cfg = crate::quadrature::QuadratureConfig::for_dim(2);
        let c = quadrant_cone();
        // Radial power: Θ ≡ 1 on the arc, density = 2 * (π/2) = π.
        let w = WeightFunction::new(WeightKind::RadialPower, 1.5, c.clone());
        let v = w.ball_covolume_density(&cfg).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-10);
        // Height power: 2 ∫_{-π/4}^{π/4} cos^{-3/2} φ dφ, against an
        // independent Simpson-rule oracle.
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, c);
        let got = w.ball_covolume_density(&cfg).unwrap();
        let f = |phi: f64| phi.cos().powf(-1.5);
        let (a, b) = (-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4);
        let n = 40_000;
        let h = (b - a) / n as f64;
        let mut simpson = f(a) + f(b);
        for i in 1..n {
            simpson += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        simpson *= h / 3.0;
        let oracle = 2.0 * simpson;
        assert!((got - oracle).abs() < 1e-9 * oracle, "{got} vs {oracle}");
        // Pyramid cone with the radial weight: density = 2 * area(Ω_{O3}).
        let o = pyramid_cone();
        let cfg3 = crate::quadrature::QuadratureConfig::for_dim(3);
        let w = WeightFunction::new(WeightKind::RadialPower, 2.5, o.clone());
        let got = w.ball_covolume_density(&cfg3).unwrap();
        assert!((got - 2.0 * o.omega_measure()).abs() < 1e-8 * got);
    }

    #[test]
    fn exponent_gates() {
        let c = quadrant_cone();
        let w = WeightFunction::new(WeightKind::RadialPower, 2.5, c.clone());
        assert!(!w.solver_valid());
        assert!(matches!(
            w.require_solver_valid(),
            Err(Error::InvalidExponent { .. })
        ));
        // Surface-measure gate only needs q > n-1.
        assert!(w.require_surface_valid().is_ok());
        let w0 = WeightFunction::new(WeightKind::RadialPower, 0.5, c);
        assert!(w0.require_surface_valid().is_err());
    }
}
