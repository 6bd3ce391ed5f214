//! Small dense helpers on `Vec<f64>` vectors.

use nalgebra::{DMatrix, DVector};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `Σ c_j v_j`
pub(crate) fn combine(vectors: &[Vec<f64>], coef: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, &c) in vectors.iter().zip(coef) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

fn columns(vectors: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i])
}

/// Orthonormal basis of `span(vectors)`; singular values below
/// `tol · max(1, σ_max)` count as zero.
pub(crate) fn orthonormal_basis(vectors: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let svd = columns(vectors, dim).svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol * smax.max(1.0) {
            out.push(u.column(k).iter().cloned().collect());
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of an orthonormal set.
pub(crate) fn complement(orthonormal: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut p = DMatrix::<f64>::identity(dim, dim);
    for u in orthonormal {
        let v = DVector::from_column_slice(u);
        p -= &v * v.transpose();
    }
    let eig = p.symmetric_eigen();
    let mut idx: Vec<usize> = (0..dim).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    idx.into_iter().map(|k| canonical_sign(eig.eigenvectors.column(k).iter().cloned().collect())).collect()
}

/// Removes the components of `v` along an orthonormal set.
pub(crate) fn project_off(v: &[f64], orthonormal: &[Vec<f64>]) -> Vec<f64> {
    let mut out = v.to_vec();
    for u in orthonormal {
        let c = dot(&out, u);
        for (o, x) in out.iter_mut().zip(u) {
            *o -= c * x;
        }
    }
    out
}

/// Least-squares coordinates of `v` in a linearly independent family and the
/// norm of the residual.
pub(crate) fn coordinates(basis: &[Vec<f64>], v: &[f64]) -> (Vec<f64>, f64) {
    if basis.is_empty() {
        return (Vec::new(), norm(v));
    }
    let r = basis.len();
    let gram = DMatrix::from_fn(r, r, |i, j| dot(&basis[i], &basis[j]));
    let rhs = DVector::from_fn(r, |i, _| dot(&basis[i], v));
    let c: Vec<f64> = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs).iter().cloned().collect(),
        None => gram.pseudo_inverse(1e-14).map(|p| (p * rhs).iter().cloned().collect()).unwrap_or(vec![0.0; r]),
    };
    let fit = combine(basis, &c, v.len());
    (c, norm(&sub(v, &fit)))
}

/// `2π B (BᵀB)^{-1}` for generators given as columns `B`.
pub(crate) fn dual_basis(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let b = columns(basis, dim);
    let gram = b.transpose() * &b;
    let inv = gram.try_inverse().expect("lattice generators are linearly independent");
    let d = b * inv * std::f64::consts::TAU;
    (0..basis.len()).map(|j| d.column(j).iter().cloned().collect()).collect()
}

/// Cosines of the principal angles between two subspaces given by
/// orthonormal bases of equal size.
pub(crate) fn principal_cosines(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(a.len(), b.len(), |i, j| dot(&a[i], &b[j]));
    m.singular_values().iter().map(|s| s.min(1.0)).collect()
}

/// Flips `v` so that its first entry above `1e-12` in magnitude is positive.
pub(crate) fn canonical_sign(v: Vec<f64>) -> Vec<f64> {
    match v.iter().find(|x| x.abs() > 1e-12) {
        Some(&x) if x < 0.0 => v.into_iter().map(|y| -y).collect(),
        _ => v,
    }
}

/// Continued-fraction approximation `p/q` with `q ≤ max_den` and
/// `|x − p/q| ≤ tol`.
pub(crate) fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return Some((p1, q1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    (q1 > 0 && (x - p1 as f64 / q1 as f64).abs() <= tol).then_some((p1, q1))
}
