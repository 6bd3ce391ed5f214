//! Integer Hermite normal form, greedy reduction of real lattices, and the
//! orthogonal subgroup `{x : e^{iγ·x} = 1 ∀γ}` of a subspace ⊕ lattice group.

use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::linalg::{
    canonical_sign, combine, complement, coordinates, dot, dual_basis, norm, orthonormal_basis, project_off, rationalize, sub,
};
use super::zeroset::ZeroSetStructure;
use crate::error::StructureError;

/// Column-style Hermite normal form of the lattice spanned by `generators`
/// (each a column vector of the same length).
///
/// The output columns are lower triangular in echelon form: each pivot is
/// positive and the entries to its left in the pivot row lie in `[0, pivot)`.
pub fn hnf_lattice<I: Integer + Signed + Copy>(generators: &[Vec<I>]) -> Vec<Vec<I>> {
    let rows = generators.first().map_or(0, |g| g.len());
    let mut cols: Vec<Vec<I>> = generators.iter().filter(|g| g.iter().any(|v| !v.is_zero())).cloned().collect();
    let axpy = |cols: &mut Vec<Vec<I>>, target: usize, q: I, source: usize| {
        for r in 0..rows {
            let s = cols[source][r];
            cols[target][r] = cols[target][r] - q * s;
        }
    };
    let mut pivot = 0;
    for row in 0..rows {
        if pivot >= cols.len() {
            break;
        }
        loop {
            let best = (pivot..cols.len()).filter(|&j| !cols[j][row].is_zero()).min_by_key(|&j| (cols[j][row].abs(), j));
            let Some(b) = best else { break };
            cols.swap(pivot, b);
            let mut clean = true;
            for j in (pivot + 1)..cols.len() {
                if !cols[j][row].is_zero() {
                    let q = cols[j][row].div_floor(&cols[pivot][row]);
                    axpy(&mut cols, j, q, pivot);
                    clean &= cols[j][row].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if cols[pivot][row].is_zero() {
            continue;
        }
        if cols[pivot][row].is_negative() {
            for v in cols[pivot].iter_mut() {
                *v = -*v;
            }
        }
        let p = cols[pivot][row];
        for j in 0..pivot {
            let q = cols[j][row].div_floor(&p);
            if !q.is_zero() {
                axpy(&mut cols, j, q, pivot);
            }
        }
        pivot += 1;
    }
    cols.truncate(pivot);
    cols
}

/// Exact membership of `v` in the lattice spanned by an HNF basis.
pub fn hnf_contains<I: Integer + Signed + Copy>(basis: &[Vec<I>], v: &[I]) -> bool {
    let mut rest = v.to_vec();
    for col in basis {
        let Some(row) = col.iter().position(|x| !x.is_zero()) else { continue };
        let (q, r) = rest[row].div_rem(&col[row]);
        if !r.is_zero() {
            return false;
        }
        for (x, &c) in rest.iter_mut().zip(col) {
            *x = *x - q * c;
        }
    }
    rest.iter().all(|x| x.is_zero())
}

/// Greedy basis extraction for the discrete group generated by `vectors`.
///
/// Vectors are taken by increasing norm; each is reduced by rounded integer
/// combinations of the current basis. Independent remainders extend the
/// basis, integral ones are dropped, and a rational dependence with small
/// denominator is merged through the integer Hermite form. Returns `None`
/// when a dependence is not rational within the tolerance, which signals a
/// non-discrete group.
pub fn reduce_lattice(vectors: &[Vec<f64>], tol: f64) -> Option<Vec<Vec<f64>>> {
    let Some(dim) = vectors.first().map(|v| v.len()) else { return Some(Vec::new()) };
    let mut sorted: Vec<&Vec<f64>> = vectors.iter().collect();
    sorted.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in sorted {
        let scale = norm(v).max(1.0);
        if norm(v) <= tol * scale {
            continue;
        }
        let (c, residual) = coordinates(&basis, v);
        if residual > tol * scale {
            basis.push(v.clone());
            basis = size_reduce(basis);
            continue;
        }
        if c.iter().all(|x| (x - x.round()).abs() <= tol * scale) {
            continue;
        }
        let mut fracs = Vec::with_capacity(c.len());
        for &x in &c {
            fracs.push(rationalize(x, 1000, tol * scale)?);
        }
        let den = fracs.iter().fold(1i128, |acc, &(_, q)| acc.lcm(&(q as i128)));
        let r = basis.len();
        let mut gens: Vec<Vec<i128>> = (0..r)
            .map(|i| (0..r).map(|j| if i == j { den } else { 0 }).collect())
            .collect();
        gens.push(fracs.iter().map(|&(p, q)| p as i128 * (den / q as i128)).collect());
        let h = hnf_lattice(&gens);
        let old = basis.clone();
        basis = h
            .iter()
            .map(|col| {
                let coef: Vec<f64> = col.iter().map(|&x| x as f64 / den as f64).collect();
                combine(&old, &coef, dim)
            })
            .collect();
        basis = size_reduce(basis);
    }
    Some(basis.into_iter().map(canonical_sign).collect())
}

/// Pairwise size reduction until no vector shortens, then sorting by norm.
fn size_reduce(mut basis: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for _ in 0..64 {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let bj = &basis[j];
                let mu = dot(&basis[i], bj) / dot(bj, bj);
                let q = mu.round();
                if q != 0.0 {
                    let cand: Vec<f64> = basis[i].iter().zip(bj).map(|(x, y)| x - q * y).collect();
                    if norm(&cand) < norm(&basis[i]) * (1.0 - 1e-12) {
                        basis[i] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    basis
}

/// A closed subgroup `V ⊕ Λ` of ℝⁿ: a subspace and a lattice inside its
/// orthogonal complement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub dim: usize,
    pub subspace_basis: Vec<Vec<f64>>,
    pub lattice_generators: Vec<Vec<f64>>,
    /// Built from rational data by integer algebra.
    pub exact: bool,
}

impl GroupDescriptor {
    pub fn trivial(dim: usize) -> Self {
        Self { dim, subspace_basis: Vec::new(), lattice_generators: Vec::new(), exact: true }
    }

    pub fn full(dim: usize) -> Self {
        let subspace_basis = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { dim, subspace_basis, lattice_generators: Vec::new(), exact: true }
    }

    pub fn is_full_space(&self) -> bool {
        self.subspace_basis.len() == self.dim
    }

    pub fn is_trivial(&self) -> bool {
        self.subspace_basis.is_empty() && self.lattice_generators.is_empty()
    }

    /// Distance from `x` to the nearest group element found by rounding
    /// lattice coordinates after removing the subspace part.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let on = orthonormal_basis(&self.subspace_basis, self.dim, 1e-12);
        let y = project_off(x, &on);
        let lat: Vec<Vec<f64>> = self.lattice_generators.iter().map(|g| project_off(g, &on)).collect();
        let (c, _) = coordinates(&lat, &y);
        let rounded: Vec<f64> = c.iter().map(|v| v.round()).collect();
        norm(&sub(&y, &combine(&lat, &rounded, self.dim)))
    }

    /// `{x : e^{iγ·x} = 1 for all γ in the group}`.
    pub fn orthogonal(&self) -> Self {
        orthogonal_of(self.dim, &self.subspace_basis, &self.lattice_generators)
    }
}

pub(crate) fn orthogonal_of(dim: usize, subspace: &[Vec<f64>], lattice: &[Vec<f64>]) -> GroupDescriptor {
    let e = orthonormal_basis(subspace, dim, 1e-12);
    let projected: Vec<Vec<f64>> = lattice.iter().map(|g| project_off(g, &e)).collect();
    let all: Vec<Vec<f64>> = e.iter().chain(&projected).cloned().collect();
    let span = orthonormal_basis(&all, dim, 1e-12);
    let free = complement(&span, dim);
    let dual = dual_basis(&projected, dim);
    let lattice_generators = reduce_lattice(&dual, 1e-9).unwrap_or(dual);
    GroupDescriptor { dim, subspace_basis: free, lattice_generators, exact: false }
}

/// Orthogonal subgroup of a detected zero set: the complement of
/// `span(E ∪ Λ)` plus the dual lattice `2π B (BᵀB)^{-1} ℤ^r`.
pub fn orthogonal_subgroup(z: &ZeroSetStructure) -> Result<GroupDescriptor, StructureError> {
    if z.dense_flag {
        return Err(StructureError::Dense);
    }
    Ok(orthogonal_of(z.dim, &z.subspace_basis, &z.lattice_generators))
}
