//! Independent verification oracles: seeded Monte Carlo estimates for the
//! surface area measure and covolume, finite-difference checks of the
//! radial derivative formulas of logarithmic and linear Wulff families, the
//! non-uniqueness construction, and the facet-stability check for direction
//! restrictions.
//!
//! Monte Carlo sampling draws each 4096-sample block from its own
//! counter-indexed ChaCha stream and merges block statistics pairwise, so
//! results are bit-reproducible for a fixed `(seed, n)` and independent of
//! evaluation order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::polytope::{self, Halfspace, Polytope};
use crate::pseudocone::{hausdorff_distance, PseudoCone, TruncatedBody};
use crate::quadrature::{self, QuadratureConfig};
use crate::vecmath as vm;
use crate::weight::WeightFunction;

const BLOCK: u64 = 4096;

/// A seeded Monte Carlo estimate with its normal-approximation standard
/// error.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Per-direction Monte Carlo surface measure.
#[derive(Debug, Clone)]
pub struct McSurfaceMeasure {
    pub per_direction: Vec<McEstimate>,
    pub hits: Vec<u64>,
}

/// Monte Carlo covolume with the analytic truncation tail bound.
#[derive(Debug, Clone)]
pub struct McCovolume {
    pub mc: McEstimate,
    /// Closed-form bound on the weighted volume of `(C \ K) \ C⁻(T)`.
    pub tail_bound: f64,
    pub trunc_height: f64,
}

#[derive(Clone)]
struct Moments {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    hits: Vec<u64>,
}

impl Moments {
    fn new(m: usize) -> Self {
        Moments {
            sum: vec![0.0; m],
            sumsq: vec![0.0; m],
            hits: vec![0; m],
        }
    }

    fn merge(mut a: Moments, b: &Moments) -> Moments {
        for i in 0..a.sum.len() {
            a.sum[i] += b.sum[i];
            a.sumsq[i] += b.sumsq[i];
            a.hits[i] += b.hits[i];
        }
        a
    }
}

/// Pairwise (tree) reduction in a fixed bracketing.
fn reduce(blocks: &[Moments]) -> Moments {
    match blocks.len() {
        0 => unreachable!("no blocks"),
        1 => blocks[0].clone(),
        k => {
            let mid = k / 2;
            Moments::merge(reduce(&blocks[..mid]), &reduce(&blocks[mid..]))
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block.wrapping_add(1));
    rng
}

fn sample_omega_c(cone: &Cone, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Rejection from the uniform sphere distribution.
    let dim = cone.dim();
    loop {
        let mut v = [0.0f64; 3];
        for x in v.iter_mut().take(dim) {
            *x = gaussian(rng);
        }
        let v = &v[..dim];
        let n = vm::norm(v);
        if n < 1e-8 {
            continue;
        }
        let unit: Vec<f64> = v.iter().map(|x| x / n).collect();
        if cone.contains_interior(&unit) {
            return unit;
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 > 1e-300 {
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

/// Monte Carlo estimate of every facet mass: uniform directions on `Ω_C`,
/// classified by the radial Gauss map (argmax facet, lowest index on the
/// measure-zero ties), weighted by `Θ(ρv) ρ^{n-1} / |<v, u_i>|`.
pub fn mc_surface_measure(
    pc: &PseudoCone,
    w: &WeightFunction,
    n: u64,
    seed: u64,
) -> Result<McSurfaceMeasure> {
    let tight;
    let body = if pc.is_tightened() {
        pc
    } else {
        tight = pc.tighten()?;
        &tight
    };
    let cone = body.cone();
    let area = cone.omega_measure();
    let m = body.directions().len();
    let dim = cone.dim() as i32;
    let blocks = n.div_ceil(BLOCK);
    let mut stats = Vec::with_capacity(blocks as usize);
    for b in 0..blocks {
        let mut rng = block_rng(seed, b);
        let count = BLOCK.min(n - b * BLOCK);
        let mut mom = Moments::new(m);
        for _ in 0..count {
            let v = sample_omega_c(cone, &mut rng);
            let i = body.radial_argmax(&v);
            let rho = body.radial_function_unchecked(&v);
            let point = vm::scale(&v, rho);
            let x = area * w.eval_unchecked(&point) * rho.powi(dim - 1)
                / vm::dot(&v, &body.directions()[i]).abs();
            mom.sum[i] += x;
            mom.sumsq[i] += x * x;
            mom.hits[i] += 1;
        }
        stats.push(mom);
    }
    let total = reduce(&stats);
    let nf = n as f64;
    let per_direction = (0..m)
        .map(|i| {
            let mean = total.sum[i] / nf;
            let var = ((total.sumsq[i] - total.sum[i] * total.sum[i] / nf) / (nf - 1.0)).max(0.0);
            McEstimate {
                estimate: mean,
                std_error: (var / nf).sqrt(),
                samples: n,
                seed,
            }
        })
        .collect();
    Ok(McSurfaceMeasure {
        per_direction,
        hits: total.hits,
    })
}

/// Monte Carlo estimate of the covolume by the radial formula
/// `(n-q)^{-1} ρ(v)^{n-q} Θ(v)` on uniform `Ω_C` directions. The estimator
/// carries no truncation bias; `trunc_height` only parametrizes the
/// reported analytic tail bound.
pub fn mc_covolume(
    pc: &PseudoCone,
    w: &WeightFunction,
    n: u64,
    seed: u64,
    trunc_height: f64,
) -> Result<McCovolume> {
    w.require_solver_valid()?;
    let cone = pc.cone();
    let area = cone.omega_measure();
    let nf_dim = cone.dim() as f64;
    let q = w.q();
    let blocks = n.div_ceil(BLOCK);
    let mut stats = Vec::with_capacity(blocks as usize);
    for b in 0..blocks {
        let mut rng = block_rng(seed, b);
        let count = BLOCK.min(n - b * BLOCK);
        let mut mom = Moments::new(1);
        for _ in 0..count {
            let v = sample_omega_c(cone, &mut rng);
            let rho = pc.radial_function_unchecked(&v);
            let x = area * rho.powf(nf_dim - q) * w.eval_unchecked(&v) / (nf_dim - q);
            mom.sum[0] += x;
            mom.sumsq[0] += x * x;
            mom.hits[0] += 1;
        }
        stats.push(mom);
    }
    let total = reduce(&stats);
    let nf = n as f64;
    let mean = total.sum[0] / nf;
    let var = ((total.sumsq[0] - total.sum[0] * total.sum[0] / nf) / (nf - 1.0)).max(0.0);
    Ok(McCovolume {
        mc: McEstimate {
            estimate: mean,
            std_error: (var / nf).sqrt(),
            samples: n,
            seed,
        },
        tail_bound: covolume_tail_bound(pc, w, trunc_height),
        trunc_height,
    })
}

/// Closed-form bound on `H^n_Θ((C \ K) \ C⁻(T))`: with `t` the height of a
/// translated cone contained in `K`, `c0` the maximum of Θ on `C(1)` and
/// `c2 = H^{n-1}(C(1))`,
/// `bound = c0 c2 ∫_T^∞ τ^{-q} [τ^{n-1} - (τ-t)^{n-1}] dτ`.
pub fn covolume_tail_bound(pc: &PseudoCone, w: &WeightFunction, trunc_height: f64) -> f64 {
    let cone = pc.cone();
    let q = w.q();
    let t = pc.radial_function_unchecked(cone.v_frak());
    let big_t = trunc_height.max(t);
    let section = cone.cross_section(1.0);
    let (c2, min_norm) = if cone.dim() == 2 {
        (
            vm::dist(&section[0], &section[1]),
            vm::point_segment_distance(&[0.0, 0.0], &section[0], &section[1]),
        )
    } else {
        (
            polytope::polygon_area3(&section),
            polytope::point_polygon_distance(&[0.0, 0.0, 0.0], &section),
        )
    };
    let c0 = match w.kind() {
        crate::weight::WeightKind::HeightPower => 1.0,
        crate::weight::WeightKind::RadialPower => min_norm.powf(-q),
    };
    let integral = if cone.dim() == 2 {
        t * big_t.powf(1.0 - q) / (q - 1.0)
    } else {
        2.0 * t * big_t.powf(2.0 - q) / (q - 2.0) - t * t * big_t.powf(1.0 - q) / (q - 1.0)
    };
    c0 * c2 * integral
}

// ---------------------------------------------------------------------------
// Radial derivative checks
// ---------------------------------------------------------------------------

/// A logarithmic family of Wulff shapes over a finite direction set:
/// `h_t(u_i) = h_0(u_i) exp(t f_i)` (the admissible remainder term chosen
/// identically zero).
#[derive(Debug, Clone)]
pub struct LogFamily {
    base: PseudoCone,
    perturbation: Vec<f64>,
}

impl LogFamily {
    pub fn new(base: PseudoCone, perturbation: Vec<f64>) -> Result<Self> {
        if perturbation.len() != base.directions().len() {
            return Err(Error::InvalidMeasure(
                "perturbation length must match the direction count".into(),
            ));
        }
        let base = base.tighten()?;
        Ok(LogFamily { base, perturbation })
    }

    pub fn base(&self) -> &PseudoCone {
        &self.base
    }

    pub fn perturbation(&self) -> &[f64] {
        &self.perturbation
    }

    pub fn support_at(&self, t: f64) -> Vec<f64> {
        self.base
            .support_numbers()
            .iter()
            .zip(&self.perturbation)
            .map(|(h, f)| h * (t * f).exp())
            .collect()
    }

    pub fn body_at(&self, t: f64) -> Result<PseudoCone> {
        self.base.with_support_numbers(self.support_at(t))
    }

    /// The linear companion family `h_t = h̄ + t f`.
    pub fn linear_support_at(&self, t: f64) -> Vec<f64> {
        self.base
            .support_numbers()
            .iter()
            .zip(&self.perturbation)
            .map(|(h, f)| h + t * f)
            .collect()
    }

    pub fn linear_body_at(&self, t: f64) -> Result<PseudoCone> {
        self.base.with_support_numbers(self.linear_support_at(t))
    }
}

#[derive(Debug, Clone)]
pub struct DerivativeCheckReport {
    pub samples: usize,
    /// Worst relative error of the log-family derivative
    /// `d log ρ / dt = f(α(v))` against central differences.
    pub max_rel_err_log: f64,
    /// Worst relative error of the linear-family derivative
    /// `dρ/dt = f(α(v)) ρ(v) / h̄(α(v))`.
    pub max_rel_err_linear: f64,
    /// Largest observed difference quotient `|ρ_t - ρ_0| / |t|`.
    pub lipschitz_max: f64,
    /// Ridge hits that were resampled.
    pub resampled: usize,
    /// Median empirical convergence order of the central differences.
    pub median_order: f64,
}

/// Compares the closed-form radial derivatives of a family against central
/// finite differences on non-ridge sample directions.
pub fn radial_derivative_check(
    family: &LogFamily,
    samples: usize,
    step: f64,
    seed: u64,
) -> Result<DerivativeCheckReport> {
    let base = family.base();
    let cone = base.cone().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_log = 0.0f64;
    let mut max_lin = 0.0f64;
    let mut lipschitz = 0.0f64;
    let mut resampled = 0usize;
    let mut orders: Vec<f64> = Vec::new();

    let bodies = |t: f64| -> Result<(PseudoCone, PseudoCone)> {
        Ok((family.body_at(t)?, family.linear_body_at(t)?))
    };
    let (log_p, lin_p) = bodies(step)?;
    let (log_m, lin_m) = bodies(-step)?;
    let (log_p2, lin_p2) = bodies(0.5 * step)?;
    let (log_m2, lin_m2) = bodies(-0.5 * step)?;

    for _ in 0..samples {
        let mut attempts = 0;
        let v = loop {
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::RidgeSample(attempts));
            }
            let v = {
                let mut w = [0.0f64; 3];
                for x in w.iter_mut().take(cone.dim()) {
                    *x = gaussian(&mut rng);
                }
                match vm::normalized(&w[..cone.dim()]) {
                    Some(u) => u,
                    None => continue,
                }
            };
            if !cone.contains_interior(&v) {
                continue;
            }
            // Ridge guard: the argmax must stay isolated across the stencil.
            let mut vals: Vec<f64> = base
                .directions()
                .iter()
                .zip(base.support_numbers())
                .map(|(u, &h)| h / (-vm::dot(&v, u)))
                .collect();
            vals.sort_by(|a, b| b.total_cmp(a));
            let gap = if vals.len() > 1 {
                (vals[0] - vals[1]) / vals[0]
            } else {
                1.0
            };
            let fmax = family
                .perturbation()
                .iter()
                .fold(0.0f64, |acc, f| acc.max(f.abs()));
            if gap < 50.0 * step * (1.0 + fmax) {
                resampled += 1;
                continue;
            }
            break v;
        };

        let alpha = base.radial_argmax(&v);
        let f_alpha = family.perturbation()[alpha];
        let rho0 = base.radial_function_unchecked(&v);
        let hbar = base.support_numbers()[alpha];

        // Log family: d log ρ / dt.
        let fd_log = (log_p.radial_function_unchecked(&v).ln()
            - log_m.radial_function_unchecked(&v).ln())
            / (2.0 * step);
        let err_log = (fd_log - f_alpha).abs() / (1.0 + f_alpha.abs());
        max_log = max_log.max(err_log);

        // Linear family: dρ/dt = f(α) ρ / h̄(α).
        let closed = f_alpha * rho0 / hbar;
        let fd_lin = (lin_p.radial_function_unchecked(&v) - lin_m.radial_function_unchecked(&v))
            / (2.0 * step);
        let err_lin = (fd_lin - closed).abs() / (1.0 + closed.abs());
        max_lin = max_lin.max(err_lin);

        lipschitz = lipschitz
            .max((lin_p.radial_function_unchecked(&v) - rho0).abs() / step)
            .max((lin_m.radial_function_unchecked(&v) - rho0).abs() / step);

        // Convergence order: on a stable cell both families are exactly
        // exponential/affine in t, so their central differences carry no
        // truncation error. The curved quantity is log ρ of the linear
        // family, with derivative f(α)/h̄(α).
        let closed_loglin = f_alpha / hbar;
        let e1 = ((lin_p.radial_function_unchecked(&v).ln()
            - lin_m.radial_function_unchecked(&v).ln())
            / (2.0 * step)
            - closed_loglin)
            .abs();
        let e2 = ((lin_p2.radial_function_unchecked(&v).ln()
            - lin_m2.radial_function_unchecked(&v).ln())
            / step
            - closed_loglin)
            .abs();
        if e1 > 1e-12 && e2 > 1e-13 {
            orders.push((e1 / e2).log2());
        }
        let _ = (log_p2.radial_function_unchecked(&v), log_m2.radial_function_unchecked(&v));
    }
    orders.sort_by(f64::total_cmp);
    let median_order = if orders.is_empty() {
        2.0
    } else {
        orders[orders.len() / 2]
    };
    Ok(DerivativeCheckReport {
        samples,
        max_rel_err_log: max_log,
        max_rel_err_linear: max_lin,
        lipschitz_max: lipschitz,
        resampled,
        median_order,
    })
}

// ---------------------------------------------------------------------------
// Non-uniqueness construction
// ---------------------------------------------------------------------------

/// Two distinct pseudo-cones with the same weighted surface area measure
/// (unit mass at `-v_frak`): `K = C(t0) + C` with `ϑ(t0) = 1`, and
/// `L = F + C` where `F` is a centroid homothet of `C(t0/2)` shrunk until
/// its Θ-mass is 1.
#[derive(Debug, Clone)]
pub struct NonUniquenessPair {
    pub t0: f64,
    pub t1: f64,
    /// Homothety factor of `F` inside `C(t1)`.
    pub shrink: f64,
    pub k: PseudoCone,
    /// Base facet of `L` (vertices).
    pub l_base: Vec<Vec<f64>>,
    pub mass_k: f64,
    pub mass_l: f64,
    /// Hausdorff distance of the truncations at height `2 t0`.
    pub hausdorff: f64,
    pub trunc_height: f64,
}

impl NonUniquenessPair {
    /// The construction is valid when both masses are 1 within `tol` and
    /// the bodies are genuinely distinct.
    pub fn verified(&self, tol: f64) -> bool {
        (self.mass_k - 1.0).abs() <= tol && (self.mass_l - 1.0).abs() <= tol && self.hausdorff > 0.01
    }

    /// H-representation of `L ∩ C⁻(trunc_height)`.
    pub fn l_truncated(&self, cone: &Cone) -> Result<TruncatedBody> {
        let mut hs: Vec<Halfspace> = Vec::new();
        for w in cone.facet_normals() {
            let offset = self
                .l_base
                .iter()
                .map(|p| vm::dot(p, w))
                .fold(f64::NEG_INFINITY, f64::max);
            hs.push(Halfspace::new(w.clone(), offset));
        }
        let minus_v: Vec<f64> = cone.v_frak().iter().map(|x| -x).collect();
        hs.push(Halfspace::new(minus_v, -self.t1));
        hs.push(Halfspace::new(cone.v_frak().to_vec(), self.trunc_height));
        let polytope = Polytope::from_halfspaces(cone.dim(), hs)?;
        Ok(TruncatedBody {
            polytope,
            height: self.trunc_height,
        })
    }
}

pub fn nonuniqueness_pair(
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<NonUniquenessPair> {
    w.require_solver_valid()?;
    let cone = w.cone().clone();
    let n = cone.dim() as f64;
    let q = w.q();
    // ϑ is (n-1-q)-homogeneous, so ϑ(t0) = 1 at t0 = ϑ(1)^{1/(q-n+1)}.
    let theta1 = w.cross_section_theta(1.0, cfg)?;
    let t0 = theta1.powf(1.0 / (q - n + 1.0));
    let minus_v: Vec<f64> = cone.v_frak().iter().map(|x| -x).collect();
    let k = PseudoCone::new(cone.clone(), vec![minus_v], vec![t0])?.tighten()?;
    let mass_k = w.cross_section_theta(t0, cfg)?;

    let t1 = 0.5 * t0;
    let section = cone.cross_section(t1);
    let mut centroid = vec![0.0; cone.dim()];
    for p in &section {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / section.len() as f64;
        }
    }
    let homothet = |s: f64| -> Vec<Vec<f64>> {
        section
            .iter()
            .map(|p| vm::add_scaled(&centroid, &vm::sub(p, &centroid), s))
            .collect()
    };
    let mass_of = |s: f64| -> Result<f64> {
        let f = homothet(s);
        if cone.dim() == 2 {
            quadrature::segment_integral(w, &f[0], &f[1], cfg)
        } else {
            quadrature::polygon_integral(w, &f, cfg)
        }
    };
    // ϑ(t1) = 2^{q-n+1} ϑ(t0) > 1, so s = 1 brackets the root from above.
    let mut hi = 1.0f64;
    let mut g_hi = mass_of(hi)? - 1.0;
    if g_hi <= 0.0 {
        return Err(Error::RootBracketFailure(format!(
            "mass at full section is {:.6} <= 1",
            g_hi + 1.0
        )));
    }
    let mut lo = 1e-3f64;
    let mut g_lo = mass_of(lo)? - 1.0;
    let mut guard = 0;
    while g_lo > 0.0 {
        lo *= 0.1;
        g_lo = mass_of(lo)? - 1.0;
        guard += 1;
        if guard > 100 {
            return Err(Error::RootBracketFailure("no lower bracket".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = mass_of(mid)? - 1.0;
        if g > 0.0 {
            hi = mid;
            g_hi = g;
        } else {
            lo = mid;
            g_lo = g;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let _ = (g_lo, g_hi);
    let shrink = 0.5 * (lo + hi);
    let l_base = homothet(shrink);
    let mass_l = mass_of(shrink)?;

    let trunc_height = 2.0 * t0;
    let pair = NonUniquenessPair {
        t0,
        t1,
        shrink,
        k: k.clone(),
        l_base,
        mass_k,
        mass_l,
        hausdorff: 0.0,
        trunc_height,
    };
    let k_trunc = k.truncate(trunc_height)?;
    let l_trunc = pair.l_truncated(&cone)?;
    let hausdorff = hausdorff_distance(&k_trunc, &l_trunc);
    Ok(NonUniquenessPair { hausdorff, ..pair })
}

// ---------------------------------------------------------------------------
// Restriction stability (facet equality under constraint dropping)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Lemma72Report {
    pub max_vertex_deviation: f64,
    pub pass: bool,
}

/// Checks that the facets of `K^(β)` in the directions of `ω` coincide with
/// the facets of `K`, vertex by vertex within 1e-9.
///
/// For finitely many directions, "ω strictly inside β" is enforced as: every
/// index of `ω` belongs to `β`, and every `ω`-direction keeps an angular
/// distance of at least 1e-3 rad from every dropped direction.
pub fn lemma72_check(pc: &PseudoCone, omega: &[usize], beta: &[usize]) -> Result<Lemma72Report> {
    if beta.is_empty() {
        return Err(Error::EmptySubset);
    }
    if omega.is_empty() {
        return Err(Error::MarginViolation("omega is empty".into()));
    }
    for &i in omega {
        if !beta.contains(&i) {
            return Err(Error::MarginViolation(format!(
                "omega index {i} is not in beta"
            )));
        }
    }
    let dropped: Vec<usize> = (0..pc.directions().len())
        .filter(|i| !beta.contains(i))
        .collect();
    for &i in omega {
        for &d in &dropped {
            let angle = vm::angle_between_units(&pc.directions()[i], &pc.directions()[d]);
            if angle < 1e-3 {
                return Err(Error::MarginViolation(format!(
                    "omega direction {i} is {angle:.2e} rad from dropped direction {d}"
                )));
            }
        }
    }
    let tight = pc.tighten()?;
    let full = tight.facet_complex()?;
    let restricted = pc.restrict(beta)?;
    let rc = restricted.facet_complex()?;
    let mut max_dev = 0.0f64;
    let mut pass = true;
    for &i in omega {
        let j = beta.iter().position(|&b| b == i).expect("checked above");
        let fa = &full.facets[i];
        let fb = &rc.facets[j];
        if fa.len() != fb.len() {
            pass = false;
            max_dev = f64::INFINITY;
            continue;
        }
        for va in fa {
            let d = fb
                .iter()
                .map(|vb| vm::dist(va, vb))
                .fold(f64::INFINITY, f64::min);
            max_dev = max_dev.max(d);
            if d > 1e-9 * (1.0 + vm::norm(va)) {
                pass = false;
            }
        }
    }
    Ok(Lemma72Report {
        max_vertex_deviation: max_dev,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pyramid_cone, quadrant_cone, random_tight_body, rng};
    use crate::measures::surface_measure;
    use crate::weight::WeightKind;

    fn q2_single(h: f64) -> PseudoCone {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        PseudoCone::new(c, vec![vec![-s, -s]], vec![h])
            .unwrap()
            .tighten()
            .unwrap()
    }

    #[test]
    fn mc_surface_single_facet_within_3_sigma() {
        let pc = q2_single(1.0);
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, pc.cone().clone());
        let est = mc_surface_measure(&pc, &w, 200_000, 42).unwrap();
        let e = &est.per_direction[0];
        assert!(
            (e.estimate - 2.0).abs() <= 3.0 * e.std_error,
            "estimate {} se {}",
            e.estimate,
            e.std_error
        );
        assert_eq!(est.hits[0], 200_000);
    }

    #[test]
    fn mc_surface_multi_facet_matches_quadrature() {
        let cone = quadrant_cone();
        let w = WeightFunction::new(WeightKind::RadialPower, 1.5, cone.clone());
        let cfg = QuadratureConfig::for_dim(2);
        let mut r = rng(8);
        let pc = random_tight_body(&cone, 4, 0.1, &mut r);
        let exact = surface_measure(&pc, &w, &cfg).unwrap();
        let est = mc_surface_measure(&pc, &w, 400_000, 7).unwrap();
        for (e, x) in est.per_direction.iter().zip(&exact.masses) {
            assert!(
                (e.estimate - x).abs() <= 3.0 * e.std_error.max(1e-12),
                "estimate {} exact {x} se {}",
                e.estimate,
                e.std_error
            );
        }
    }

    #[test]
    fn mc_surface_slack_direction_gets_zero() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let u2 = vm::normalized(&[-1.0, -2.0]).unwrap();
        let pc = PseudoCone::new(c.clone(), vec![vec![-s, -s], u2], vec![1.0, 0.1]).unwrap();
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, c);
        let est = mc_surface_measure(&pc, &w, 50_000, 3).unwrap();
        assert_eq!(est.hits[1], 0);
        assert_eq!(est.per_direction[1].estimate, 0.0);
    }

    #[test]
    fn mc_is_bit_reproducible() {
        let pc = q2_single(1.0);
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, pc.cone().clone());
        let a = mc_surface_measure(&pc, &w, 30_000, 5).unwrap();
        let b = mc_surface_measure(&pc, &w, 30_000, 5).unwrap();
        assert_eq!(a.per_direction[0].estimate, b.per_direction[0].estimate);
        assert_eq!(a.per_direction[0].std_error, b.per_direction[0].std_error);
        let c = mc_surface_measure(&pc, &w, 30_000, 6).unwrap();
        assert_ne!(a.per_direction[0].estimate, c.per_direction[0].estimate);
    }

    #[test]
    fn mc_covolume_matches_deterministic() {
        let pc = q2_single(1.0);
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, pc.cone().clone());
        let est = mc_covolume(&pc, &w, 300_000, 11, 10.0).unwrap();
        assert!(
            (est.mc.estimate - 4.0).abs() <= 3.0 * est.mc.std_error,
            "estimate {} se {}",
            est.mc.estimate,
            est.mc.std_error
        );
        // Tail bound decreases with the truncation height.
        let far = mc_covolume(&pc, &w, 1_000, 11, 20.0).unwrap();
        assert!(far.tail_bound < est.tail_bound);
        assert!(est.tail_bound > 0.0);
    }

    #[test]
    fn mc_covolume_scaling() {
        let pc = q2_single(1.0);
        let scaled = pc.scaled(2.0);
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, pc.cone().clone());
        let a = mc_covolume(&pc, &w, 200_000, 13, 10.0).unwrap();
        let b = mc_covolume(&scaled, &w, 200_000, 13, 10.0).unwrap();
        let factor = 2f64.powf(2.0 - 1.5);
        assert!(
            (b.mc.estimate - factor * a.mc.estimate).abs()
                <= 3.0 * (factor * a.mc.std_error + b.mc.std_error)
        );
    }

    #[test]
    fn radial_derivative_uniform_inflation() {
        // f ≡ 1 inflates the body: d log ρ / dt = 1 everywhere.
        let pc = q2_single(1.0);
        let family = LogFamily::new(pc, vec![1.0]).unwrap();
        let report = radial_derivative_check(&family, 50, 1e-4, 1).unwrap();
        assert!(report.max_rel_err_log < 1e-8, "{report:?}");
        assert!(report.max_rel_err_linear < 1e-8);
        assert!(report.lipschitz_max.is_finite());
    }

    #[test]
    fn radial_derivative_two_facets() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let u2 = vm::normalized(&[-1.0, -3.0]).unwrap();
        let pc = PseudoCone::new(c, vec![vec![-s, -s], u2], vec![1.0, 0.55])
            .unwrap()
            .tighten()
            .unwrap();
        let family = LogFamily::new(pc, vec![0.7, -0.4]).unwrap();
        let report = radial_derivative_check(&family, 200, 1e-4, 2).unwrap();
        assert!(report.max_rel_err_log < 1e-5, "{report:?}");
        assert!(report.max_rel_err_linear < 1e-5, "{report:?}");
        assert!(
            (report.median_order - 2.0).abs() < 0.7,
            "order {}",
            report.median_order
        );
    }

    #[test]
    fn nonuniqueness_quadrant() {
        let c = quadrant_cone();
        let w = WeightFunction::new(WeightKind::HeightPower, 1.5, c);
        let cfg = QuadratureConfig::for_dim(2);
        let pair = nonuniqueness_pair(&w, &cfg).unwrap();
        assert!((pair.t0 - 4.0).abs() < 1e-10, "t0 {}", pair.t0);
        assert!((pair.mass_k - 1.0).abs() < 1e-8);
        assert!((pair.mass_l - 1.0).abs() < 1e-8);
        assert!(pair.hausdorff > 0.01, "d_H {}", pair.hausdorff);
        assert!(pair.verified(1e-8));
    }

    #[test]
    fn nonuniqueness_pyramid() {
        let c = pyramid_cone();
        let w = WeightFunction::new(WeightKind::HeightPower, 2.5, c);
        let cfg = QuadratureConfig::for_dim(3);
        let pair = nonuniqueness_pair(&w, &cfg).unwrap();
        // ϑ(1) = 4 and ϑ(t) = 4 t^{-1/2}: root at t0 = 16.
        assert!((pair.t0 - 16.0).abs() < 1e-6, "t0 {}", pair.t0);
        assert!(pair.verified(1e-6));
    }

    #[test]
    fn lemma72_cases() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let u1 = vm::normalized(&[-0.4, -1.0]).unwrap();
        let u3 = vm::normalized(&[-1.0, -0.4]).unwrap();
        let pc = PseudoCone::new(
            c,
            vec![u1, vec![-s, -s], u3],
            vec![0.9, 1.0, 0.9],
        )
        .unwrap();
        // β = everything: restriction is the identity.
        let all = lemma72_check(&pc, &[1], &[0, 1, 2]).unwrap();
        assert!(all.pass, "{all:?}");
        // Dropping the far end keeps the first facet intact.
        let keep = lemma72_check(&pc, &[0], &[0, 1]).unwrap();
        assert!(keep.pass, "{keep:?}");
        // Dropping the adjacent middle constraint grows the facet.
        let grow = lemma72_check(&pc, &[0], &[0, 2]).unwrap();
        assert!(!grow.pass);
        // Margin enforcement.
        assert!(matches!(
            lemma72_check(&pc, &[0], &[1, 2]),
            Err(Error::MarginViolation(_))
        ));
        assert!(matches!(
            lemma72_check(&pc, &[], &[0, 1]),
            Err(Error::MarginViolation(_))
        ));
        assert!(matches!(
            lemma72_check(&pc, &[0], &[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn lemma72_margin_violation_when_dropped_is_close() {
        let c = quadrant_cone();
        let s = (0.5f64).sqrt();
        let near = vm::normalized(&[-s - 1e-4, -s + 1e-4]).unwrap();
        let u3 = vm::normalized(&[-1.0, -0.3]).unwrap();
        let pc = PseudoCone::new(
            c,
            vec![vec![-s, -s], near, u3],
            vec![1.0, 1.0, 0.8],
        )
        .unwrap();
        assert!(matches!(
            lemma72_check(&pc, &[0], &[0, 2]),
            Err(Error::MarginViolation(_))
        ));
    }

    use crate::vecmath as vm;
}
