//! Canonical cones and seeded random fixtures shared by tests, the
//! verification suites and the CLI.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::pseudocone::PseudoCone;
use crate::vecmath as vm;

/// The planar quadrant cone Q2.
pub fn quadrant_cone() -> Arc<Cone> {
    Cone::from_facet_normals(2, &[vec![0.0, -1.0], vec![-1.0, 0.0]], None)
        .expect("quadrant cone is valid")
}

/// The square-pyramid cone O3 with apex direction (0,0,1) and rays
/// (±1,±1,1)/√3.
pub fn pyramid_cone() -> Arc<Cone> {
    let s = (0.5f64).sqrt();
    Cone::from_facet_normals(
        3,
        &[
            vec![s, 0.0, -s],
            vec![-s, 0.0, -s],
            vec![0.0, s, -s],
            vec![0.0, -s, -s],
        ],
        None,
    )
    .expect("pyramid cone is valid")
}

/// The canonical fixture cone for a dimension.
pub fn canonical_cone(dim: usize) -> Arc<Cone> {
    if dim == 2 {
        quadrant_cone()
    } else {
        pyramid_cone()
    }
}

/// Seeded generator used across fixtures.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random unit vector of the sphere in `dim` dimensions.
pub fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        // Box-Muller pairs; rejection keeps it unbiased and simple.
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Some(u) = vm::normalized(&v) {
            return u;
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

/// A uniformly random direction of `Ω_C` (rejection from the sphere).
pub fn random_omega_c(cone: &Cone, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v = random_unit(cone.dim(), rng);
        if cone.contains_interior(&v) {
            return v;
        }
    }
}

/// `m` random directions in `ω(min_delta) ⊂ Ω_{C°}` with pairwise angular
/// separation at least `min_sep`.
pub fn random_directions(
    cone: &Cone,
    m: usize,
    min_delta: f64,
    min_sep: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut attempts = 0;
    while dirs.len() < m {
        attempts += 1;
        if attempts > 100_000 {
            // Over-packed request; restart with what we have.
            dirs.clear();
            attempts = 0;
        }
        let u = random_unit(cone.dim(), rng);
        if cone.delta_c(&u) < min_delta {
            continue;
        }
        if dirs
            .iter()
            .all(|d| vm::angle_between_units(d, &u) >= min_sep)
        {
            dirs.push(u);
        }
    }
    dirs
}

/// A random tightened body with every facet nondegenerate.
///
/// Support numbers are sampled from a random ellipsoid deep inside the
/// cone: `h_i = -<u_i, c> - |A u_i|`. The Wulff shape over those values
/// contains the ellipsoid and touches every constraint plane at its unique
/// tangent point, so each support number is attained and each facet has
/// the tangent point in its relative interior. That makes the fixture
/// tight and fully active by construction instead of by rejection.
pub fn random_tight_body(
    cone: &Arc<Cone>,
    m: usize,
    min_delta: f64,
    rng: &mut ChaCha8Rng,
) -> PseudoCone {
    let min_sep = if cone.dim() == 2 { 0.03 } else { 0.1 };
    let dim = cone.dim();
    loop {
        let dirs = random_directions(cone, m, min_delta, min_sep, rng);
        // Ellipsoid center: a point on the axis with mild tangential jitter.
        let scale = 1.5 + 1.5 * rng.random::<f64>();
        let mut center = vm::scale(cone.v_frak(), scale);
        for c in center.iter_mut() {
            *c += 0.05 * scale * (2.0 * rng.random::<f64>() - 1.0);
        }
        if !cone.contains_interior(&center) {
            continue;
        }
        let axes: Vec<f64> = (0..dim).map(|_| 0.15 + 0.35 * rng.random::<f64>()).collect();
        let h: Vec<f64> = dirs
            .iter()
            .map(|u| {
                let support_ellipsoid = u
                    .iter()
                    .zip(&axes)
                    .map(|(ui, a)| (ui * a) * (ui * a))
                    .sum::<f64>()
                    .sqrt();
                -vm::dot(u, &center) - support_ellipsoid
            })
            .collect();
        if h.iter().any(|&x| x < 0.05) {
            continue;
        }
        let pc = match PseudoCone::new(cone.clone(), dirs, h) {
            Ok(pc) => pc,
            Err(_) => continue,
        };
        let tight = match pc.tighten() {
            Ok(t) => t,
            Err(_) => continue,
        };
        let fc = match tight.facet_complex() {
            Ok(fc) => fc,
            Err(_) => continue,
        };
        let all_active = (0..m).all(|i| {
            fc.is_facet_nondegenerate(dim, i) && facet_extent(&fc.facets[i]) > 1e-3
        });
        if all_active {
            return tight;
        }
    }
}

fn facet_extent(f: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            d = d.max(vm::dist(&f[i], &f[j]));
        }
    }
    d
}

/// Random positive masses for `m` atoms, in [0.5, 3].
pub fn random_masses(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..m).map(|_| 0.5 + 2.5 * rng.random::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_directions_respect_margins() {
        let cone = pyramid_cone();
        let mut r = rng(7);
        let dirs = random_directions(&cone, 8, 0.1, 0.1, &mut r);
        assert_eq!(dirs.len(), 8);
        for (i, u) in dirs.iter().enumerate() {
            assert!(cone.delta_c(u) >= 0.1);
            for v in dirs.iter().skip(i + 1) {
                assert!(vm::angle_between_units(u, v) >= 0.1);
            }
        }
    }

    #[test]
    fn random_bodies_are_tight_and_active() {
        let cone = quadrant_cone();
        let mut r = rng(3);
        for _ in 0..5 {
            let body = random_tight_body(&cone, 6, 0.1, &mut r);
            assert!(body.is_tightened());
            let fc = body.facet_complex().unwrap();
            for i in 0..6 {
                assert!(fc.is_facet_nondegenerate(2, i));
            }
        }
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let cone = quadrant_cone();
        let a = random_tight_body(&cone, 5, 0.1, &mut rng(11));
        let b = random_tight_body(&cone, 5, 0.1, &mut rng(11));
        for (x, y) in a.support_numbers().iter().zip(b.support_numbers()) {
            assert_eq!(x, y);
        }
    }
}
