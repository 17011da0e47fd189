//! Small dense vector helpers for dimensions 2 and 3.
//!
//! All geometry in this crate works on `&[f64]` slices so that the same code
//! paths serve n = 2 and n = 3. Hot loops keep data in stack arrays and slice
//! them down to the active dimension.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// a + s*b
pub fn add_scaled(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Returns `a / |a|`, or `None` when `|a|` is too small to normalize safely.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n < 1e-14 {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Counter-clockwise perpendicular in the plane.
pub fn perp2(a: &[f64]) -> [f64; 2] {
    [-a[1], a[0]]
}

/// Numerically robust angle between two unit vectors (Kahan's formula).
pub fn angle_between_units(a: &[f64], b: &[f64]) -> f64 {
    let d = dist(a, b);
    let s = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x + y) * (x + y))
        .sum::<f64>()
        .sqrt();
    2.0 * (d / 2.0).atan2(s / 2.0)
}

/// Solves the 2x2 system `m x = b` (row-major). `None` when near-singular.
pub fn solve2(m: &[[f64; 2]; 2], b: &[f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    if det.abs() < 1e-12 * scale * scale {
        return None;
    }
    Some([
        (b[0] * m[1][1] - b[1] * m[0][1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ])
}

/// Solves the 3x3 system `m x = b` by Gaussian elimination with partial
/// pivoting. `None` when near-singular.
#[allow(clippy::needless_range_loop)]
pub fn solve3(m: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = b[i];
    }
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = a[i][3];
        for k in i + 1..3 {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// Rank of a set of vectors, judged against a relative tolerance, via
/// modified Gram-Schmidt.
pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        if norm(&w) > tol {
            let n = norm(&w);
            for wi in w.iter_mut() {
                *wi /= n;
            }
            basis.push(w);
        }
    }
    basis.len()
}

/// Orthonormal basis of the plane orthogonal to the unit vector `u` (n = 3).
pub fn plane_basis(u: &[f64]) -> ([f64; 3], [f64; 3]) {
    debug_assert_eq!(u.len(), 3);
    let pick = if u[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let c = cross3(u, &pick);
    let n = norm(&c);
    let e1 = [c[0] / n, c[1] / n, c[2] / n];
    let e2 = cross3(u, &e1);
    (e1, e2)
}

/// Distance from point `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let denom = dot(&ab, &ab);
    if denom < 1e-300 {
        return dist(p, a);
    }
    let t = (dot(&sub(p, a), &ab) / denom).clamp(0.0, 1.0);
    dist(p, &add_scaled(a, &ab, t))
}
