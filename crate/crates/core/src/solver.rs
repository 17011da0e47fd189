//! Variational solver for the weighted Minkowski problem with finitely
//! supported data.
//!
//! Given atoms `(u_i, φ_i)` on `Ω_{C°}` and a weight Θ of exponent
//! `q ∈ (n-1, n)`, the solver maximizes
//!
//! `Φ(h) = V_Θ([h])^{-1/(n-q)} · Σ_i h_i φ_i`
//!
//! over positive support vectors. Φ is homogeneous of degree zero, so each
//! iterate is renormalized to covolume one; the ascent direction is
//! `g_i = φ_i - λ̂ S_i` with `λ̂ = (Σ h_i φ_i)/(n-q)`, which is the gradient
//! of `log Φ` up to a positive factor because the covolume gradient equals
//! the surface area measure. A monotone Armijo backtracking line search
//! drives the ascent, with seeded jittered restarts on stalls. At the
//! stationary point `φ = λ̂ S` holds, `λ = (n-q)^{-1} Σ h̄_i φ_i` and the
//! rescaled body `λ^{1/(n-1-q)} K₀` carries the prescribed measure.
//!
//! First-order ascent alone resolves clustered-direction instances slowly,
//! so once the residual is small the solve switches to a damped Newton
//! polish on the square system `S(h) = φ` with a finite-difference
//! Jacobian; the gradient phase then only has to deliver a good basin
//! point. Every normalized ascent iterate is checked against the covolume
//! bound `h̄ <= (H^n_Θ(C ∩ B^n))^{-1/(n-q)}`.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::measures::{covolume_euler, covolume_radial, surface_measure};
use crate::pseudocone::PseudoCone;
use crate::quadrature::QuadratureConfig;
use crate::vecmath as vm;
use crate::weight::WeightFunction;

/// A finitely supported Borel measure on `Ω_{C°}`: distinct interior unit
/// directions with strictly positive masses.
#[derive(Debug, Clone)]
pub struct DirectionalMeasure {
    directions: Vec<Vec<f64>>,
    masses: Vec<f64>,
    alpha: f64,
}

impl DirectionalMeasure {
    pub fn new(cone: &Cone, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("measure has no atoms".into()));
        }
        let mut directions = Vec::with_capacity(atoms.len());
        let mut masses = Vec::with_capacity(atoms.len());
        let mut alpha = f64::INFINITY;
        for (i, (u, mass)) in atoms.into_iter().enumerate() {
            let u = vm::normalized(&u)
                .ok_or_else(|| Error::InvalidMeasure(format!("atom {i} has a zero direction")))?;
            let delta = cone.delta_c(&u);
            if delta <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} is not strictly inside the dual direction set (delta_C = {delta:.3e})"
                )));
            }
            if !mass.is_finite() || mass <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} has non-positive or non-finite mass {mass}"
                )));
            }
            alpha = alpha.min(delta);
            directions.push(u);
            masses.push(mass);
        }
        for i in 0..directions.len() {
            for j in i + 1..directions.len() {
                if vm::angle_between_units(&directions[i], &directions[j]) <= 1e-9 {
                    return Err(Error::InvalidMeasure(format!(
                        "atoms {i} and {j} have duplicate directions"
                    )));
                }
            }
        }
        Ok(DirectionalMeasure {
            directions,
            masses,
            alpha,
        })
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Smallest interior margin `min_i δ_C(u_i)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Residual tolerance on `max_i |S_i - φ_i| / φ_i`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Armijo sufficient-increase fraction.
    pub armijo_slope: f64,
    /// Step shrink factor of the backtracking line search.
    pub backtrack: f64,
    /// Relative magnitude of the multiplicative restart jitter.
    pub jitter: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl SolverOptions {
    pub fn for_dim(dim: usize) -> Self {
        SolverOptions {
            tolerance: if dim == 2 { 1e-8 } else { 1e-6 },
            max_iterations: 2000,
            armijo_slope: 1e-4,
            backtrack: 0.5,
            jitter: 0.05,
            max_restarts: 5,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.tolerance > 0.0
            && self.tolerance < 1.0
            && self.max_iterations > 0
            && self.armijo_slope > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.jitter > 0.0
            && self.max_restarts > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMeasure("invalid solver options".into()))
        }
    }
}

/// Outcome of a solve, converged or not.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// The solution body (tightened), rescaled so its weighted surface area
    /// measure matches the data.
    pub solution: PseudoCone,
    /// Multiplier `(n-q)^{-1} Σ h̄_i φ_i` of the normalized maximizer.
    pub lambda: f64,
    /// Φ value of every accepted normalized iterate.
    pub phi_trace: Vec<f64>,
    /// Final per-direction relative residuals `|S_i - φ_i| / φ_i`.
    pub residuals: Vec<f64>,
    /// Distance of the solution from the origin.
    pub b_of_k: f64,
    pub covolume_euler: f64,
    pub covolume_radial: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// Covolume-one support bound and whether every normalized iterate
    /// satisfied it.
    pub lemma71_bound: f64,
    pub lemma71_ok: bool,
}

impl SolveReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0f64, f64::max)
    }
}

/// `Φ(h) = V_Θ([h])^{-1/(n-q)} Σ_i h_i φ_i` for a raw positive support
/// vector on the measure's directions.
pub fn phi_functional(
    h: &[f64],
    measure: &DirectionalMeasure,
    w: &WeightFunction,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    w.require_solver_valid()?;
    let cone = w.cone().clone();
    let pc = PseudoCone::new(cone, measure.directions().to_vec(), h.to_vec())?;
    let tight = pc.tighten()?;
    let v = covolume_euler(&tight, w, cfg)?.value;
    let n = tight.dim() as f64;
    let weighted: f64 = h.iter().zip(measure.masses()).map(|(h, p)| h * p).sum();
    Ok(v.powf(-1.0 / (n - w.q())) * weighted)
}

/// The explicit covolume-one support bound
/// `c = (H^n_Θ(C ∩ B^n))^{-1/(n-q)}`: every pseudo-cone with `V_Θ(K) = 1`
/// has `h̄_K <= c`.
pub fn lemma71_bound(w: &WeightFunction, cfg: &QuadratureConfig) -> Result<f64> {
    let n = w.cone().dim() as f64;
    let density = w.ball_covolume_density(cfg)?;
    Ok(density.powf(-1.0 / (n - w.q())))
}

/// The bound check itself, exposed so that a fabricated support vector can
/// be tested against a claimed covolume-one normalization.
pub fn lemma71_holds(normalized_supports: &[f64], bound: f64) -> bool {
    normalized_supports
        .iter()
        .all(|&h| h <= bound * (1.0 + 1e-9))
}

/// Solves `S^Θ_{n-1}(K, ·) = φ` for a polyhedral C-pseudo-cone `K`.
///
/// Returns a report in all cases; `converged = false` marks an honest
/// failure (the caller decides whether that is an error).
pub fn solve_minkowski(
    cone: &Arc<Cone>,
    w: &WeightFunction,
    measure: &DirectionalMeasure,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let dim = cone.dim();
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    w.require_solver_valid()?;
    opts.validate()?;
    let n = dim as f64;
    let q = w.q();
    let cfg = QuadratureConfig::for_dim(dim);
    let bound = lemma71_bound(w, &cfg)?;
    let phi = measure.masses();
    let m = measure.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut h = vec![1.0; m];
    let mut phi_trace: Vec<f64> = Vec::new();
    let mut lemma71_ok = true;
    let mut iterations = 0usize;
    let mut restarts = 0usize;
    let mut alpha_seed = 1.0f64;
    let mut best: Option<(f64, Vec<f64>)> = None;

    // Coarse target of the ascent phase; the Newton polish takes over from
    // there and the ascent resumes only if polishing fails.
    let coarse_tol = opts.tolerance.max(1e-3);
    let mut phase_tol = coarse_tol;

    let make_body = |h: &[f64]| -> Result<PseudoCone> {
        PseudoCone::new(cone.clone(), measure.directions().to_vec(), h.to_vec())
    };

    // The covolume-one normalization can put bodies at absurd scales when q
    // approaches n (the covolume-one support bound is
    // density^{-1/(n-q)}), so iterates are kept at a fixed O(1) reference
    // covolume and the covolume-one bookkeeping is done on scalars.
    let v_ref = covolume_euler(&make_body(&h)?.tighten()?, w, &cfg)?.value;
    // Converts a reference-normalized support value to its covolume-one
    // counterpart.
    let unit_factor = v_ref.powf(-1.0 / (n - q));

    'ascent: while iterations < opts.max_iterations {
        iterations += 1;
        // Project onto tight vectors and renormalize to the reference
        // covolume.
        let tight = make_body(&h)?.tighten()?;
        let v = covolume_euler(&tight, w, &cfg)?.value;
        let scale = (v_ref / v).powf(1.0 / (n - q));
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::NotConverged(format!(
                "degenerate covolume {v:e} during normalization"
            )));
        }
        let body = tight.scaled(scale);
        h = body.support_numbers().to_vec();
        let s = surface_measure(&body, w, &cfg)?;

        let weighted: f64 = h.iter().zip(phi).map(|(h, p)| h * p).sum();
        let lambda_hat = weighted / ((n - q) * v_ref);
        let phi_value = v_ref.powf(-1.0 / (n - q)) * weighted;
        phi_trace.push(phi_value);
        let normalized: Vec<f64> = h.iter().map(|x| x * unit_factor).collect();
        if !lemma71_holds(&normalized, bound) {
            lemma71_ok = false;
        }

        let residual = s
            .masses
            .iter()
            .zip(phi)
            .map(|(si, pi)| (lambda_hat * si - pi).abs() / pi)
            .fold(0.0f64, f64::max);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, h.clone()));
        }
        if residual <= phase_tol {
            match finalize(
                cone, w, measure, &cfg, &h, unit_factor, opts, phi_trace.clone(), iterations,
                restarts, bound, lemma71_ok,
            ) {
                Ok(report) if report.converged => return Ok(report),
                Ok(report) => {
                    // Polish could not reach the tolerance; push the ascent
                    // further before giving up.
                    if phase_tol <= opts.tolerance {
                        return Ok(report);
                    }
                    phase_tol = (phase_tol * 1e-2).max(opts.tolerance);
                }
                Err(e) => return Err(e),
            }
        }

        // Ascent direction: gradient of log Φ up to the positive factor
        // Σ h φ.
        let g: Vec<f64> = phi
            .iter()
            .zip(&s.masses)
            .map(|(p, si)| p - lambda_hat * si)
            .collect();
        let slope = vm::dot(&g, &g) / weighted;
        if slope <= 0.0 {
            break 'ascent;
        }
        let mut alpha_cap = f64::INFINITY;
        for (hi, gi) in h.iter().zip(&g) {
            if *gi < 0.0 {
                alpha_cap = alpha_cap.min(0.5 * hi / (-gi));
            }
        }
        let mut alpha = alpha_seed.min(alpha_cap);
        let ln_phi = phi_value.ln();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = h.iter().zip(&g).map(|(hi, gi)| hi + alpha * gi).collect();
            if trial.iter().all(|&x| x > 0.0) {
                let phi_trial = phi_functional(&trial, measure, w, &cfg)?;
                if phi_trial.ln() >= ln_phi + opts.armijo_slope * alpha * slope {
                    h = trial;
                    alpha_seed = (alpha * 2.0).min(1e6);
                    accepted = true;
                    break;
                }
            }
            alpha *= opts.backtrack;
            if alpha < 1e-18 {
                break;
            }
        }
        if !accepted {
            // Stall: try a polish from the best point so far, then restart
            // with multiplicative jitter.
            if let Some((_, ref bh)) = best {
                let report = finalize(
                    cone, w, measure, &cfg, bh, unit_factor, opts, phi_trace.clone(), iterations,
                    restarts, bound, lemma71_ok,
                )?;
                if report.converged {
                    return Ok(report);
                }
            }
            if restarts >= opts.max_restarts {
                break 'ascent;
            }
            restarts += 1;
            alpha_seed = 1.0;
            let base = best.as_ref().map(|(_, bh)| bh.clone()).unwrap_or(h);
            h = base
                .iter()
                .map(|hi| hi * (opts.jitter * (2.0 * rng.random::<f64>() - 1.0)).exp())
                .collect();
        }
    }

    let final_h = best.map(|(_, bh)| bh).unwrap_or(h);
    finalize(
        cone, w, measure, &cfg, &final_h, unit_factor, opts, phi_trace, iterations, restarts,
        bound, lemma71_ok,
    )
}

/// λ-rescaling, Newton polish and final verification.
///
/// `reference_h` lives at the solver's O(1) reference covolume;
/// `unit_factor` converts its entries to the covolume-one normalization, on
/// scalars only, so no geometry is ever built at the possibly extreme
/// covolume-one scale.
#[allow(clippy::too_many_arguments)]
fn finalize(
    cone: &Arc<Cone>,
    w: &WeightFunction,
    measure: &DirectionalMeasure,
    cfg: &QuadratureConfig,
    reference_h: &[f64],
    unit_factor: f64,
    opts: &SolverOptions,
    phi_trace: Vec<f64>,
    iterations: usize,
    restarts: usize,
    bound: f64,
    lemma71_ok: bool,
) -> Result<SolveReport> {
    let n = cone.dim() as f64;
    let q = w.q();
    let body0 = PseudoCone::new(cone.clone(), measure.directions().to_vec(), reference_h.to_vec())?
        .tighten()?;
    let lambda: f64 = body0
        .support_numbers()
        .iter()
        .zip(measure.masses())
        .map(|(h, p)| h * unit_factor * p)
        .sum::<f64>()
        / (n - q);
    // K = λ^{1/(n-1-q)} K₀ with K₀ the covolume-one body; composed on the
    // support scalars directly.
    let scale = lambda.powf(1.0 / (n - 1.0 - q)) * unit_factor;
    let mut h: Vec<f64> = body0.support_numbers().iter().map(|x| x * scale).collect();

    // Damped Newton polish on S(h) = φ with a finite-difference Jacobian.
    let mut polished = polish(cone, w, measure, cfg, &mut h, opts.tolerance)?;
    let mut body = PseudoCone::new(cone.clone(), measure.directions().to_vec(), h.clone())?
        .tighten()?;
    let mut s = surface_measure(&body, w, cfg)?;
    let mut residuals: Vec<f64> = s
        .masses
        .iter()
        .zip(measure.masses())
        .map(|(si, pi)| (si - pi).abs() / pi)
        .fold(Vec::new(), |mut acc, r| {
            acc.push(r);
            acc
        });
    if !polished {
        // One more attempt from the unpolished rescaled point with a looser
        // damping start sometimes helps; otherwise report honestly.
        polished = polish(cone, w, measure, cfg, &mut h, opts.tolerance)?;
        body = PseudoCone::new(cone.clone(), measure.directions().to_vec(), h.clone())?.tighten()?;
        s = surface_measure(&body, w, cfg)?;
        residuals = s
            .masses
            .iter()
            .zip(measure.masses())
            .map(|(si, pi)| (si - pi).abs() / pi)
            .collect();
    }
    let max_residual = residuals.iter().copied().fold(0.0f64, f64::max);
    let converged = max_residual <= opts.tolerance && polished;

    let ve = covolume_euler(&body, w, cfg)?.value;
    let vr = covolume_radial(&body, w, cfg)?.value;
    let b_of_k = body.distance_from_origin()?;
    Ok(SolveReport {
        solution: body,
        lambda,
        phi_trace,
        residuals,
        b_of_k,
        covolume_euler: ve,
        covolume_radial: vr,
        iterations,
        restarts,
        converged,
        lemma71_bound: bound,
        lemma71_ok,
    })
}

/// Damped Newton iteration on `S(h) - φ = 0`. Returns whether the target
/// tolerance was reached; `h` is updated in place with the best point.
fn polish(
    cone: &Arc<Cone>,
    w: &WeightFunction,
    measure: &DirectionalMeasure,
    cfg: &QuadratureConfig,
    h: &mut Vec<f64>,
    tol: f64,
) -> Result<bool> {
    let m = h.len();
    let phi = measure.masses();
    let eval_s = |h: &[f64]| -> Result<Vec<f64>> {
        let pc = PseudoCone::new(cone.clone(), measure.directions().to_vec(), h.to_vec())?;
        Ok(surface_measure(&pc, w, cfg)?.masses)
    };
    let resid_of = |s: &[f64]| -> f64 {
        s.iter()
            .zip(phi)
            .map(|(si, pi)| (si - pi).abs() / pi)
            .fold(0.0f64, f64::max)
    };

    let mut s = eval_s(h)?;
    let mut resid = resid_of(&s);
    for _ in 0..40 {
        if resid <= tol * 0.5 {
            return Ok(true);
        }
        // Finite-difference Jacobian J_ij = dS_i/dh_j.
        let mut jac = vec![vec![0.0f64; m]; m];
        for j in 0..m {
            // Relative step keeps the perturbed supports positive at any
            // body scale.
            let delta = 1e-6 * h[j];
            let mut hp = h.clone();
            hp[j] += delta;
            let mut hm = h.clone();
            hm[j] -= delta;
            let sp = eval_s(&hp)?;
            let sm = eval_s(&hm)?;
            for i in 0..m {
                jac[i][j] = (sp[i] - sm[i]) / (2.0 * delta);
            }
        }
        let rhs: Vec<f64> = s.iter().zip(phi).map(|(si, pi)| pi - si).collect();
        let step = match solve_dense(&mut jac, &rhs) {
            Some(step) => step,
            None => return Ok(resid <= tol),
        };
        // Damping: keep supports safely positive and require residual
        // decrease.
        let mut beta: f64 = 1.0;
        for (hi, di) in h.iter().zip(&step) {
            if *di < 0.0 {
                beta = beta.min(0.9 * hi / (-di));
            }
        }
        let mut improved = false;
        for _ in 0..25 {
            let trial: Vec<f64> = h.iter().zip(&step).map(|(hi, di)| hi + beta * di).collect();
            if trial.iter().all(|&x| x > 0.0) {
                let st = eval_s(&trial)?;
                let rt = resid_of(&st);
                if rt < resid * (1.0 - 1e-3 * beta) {
                    *h = trial;
                    s = st;
                    resid = rt;
                    improved = true;
                    break;
                }
            }
            beta *= 0.5;
            if beta < 1e-12 {
                break;
            }
        }
        if !improved {
            return Ok(resid <= tol);
        }
    }
    Ok(resid <= tol * 0.5 || resid <= tol)
}

/// Gaussian elimination with partial pivoting; consumes the matrix.
#[allow(clippy::needless_range_loop)]
fn solve_dense(a: &mut [Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let mut x = b.to_vec();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for i in (0..m).rev() {
        let mut s = x[i];
        for k in i + 1..m {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}
