//! Exact description of `closure(G_ν + W)` from the triplet data, where
//! `G_ν` is the closed group generated by the support of ν and
//! `W = span{σ₁, …, σₙ, b + c_ν}` with `σ_j` the columns of `√Q`.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::lattice::{hnf_lattice, reduce_lattice, GroupDescriptor};
use super::linalg::{canonical_sign, orthonormal_basis, project_off, rationalize};
use crate::error::StructureError;
use crate::levy::{LevyTriplet, PsdMatrix};

/// Largest denominator accepted when reading atom coordinates as rationals.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlibaudData {
    /// `Σ = √Q`
    pub sigma: PsdMatrix<f64>,
    /// HNF generators of the lattice part of `G_ν`.
    pub g_nu_generators: Vec<Vec<Ratio<i64>>>,
    /// Subspace part `V_ν` of `G_ν`.
    pub v_nu_basis: Vec<Vec<f64>>,
    /// `c_ν = −∫_{{|y|<1} ∖ V_ν} y ν(dy)`
    pub c_nu: Vec<f64>,
    pub w_basis: Vec<Vec<f64>>,
}

/// `closure(G_ν + W)` in subspace ⊕ lattice form, with the data it was built
/// from. Atom coordinates must be rational with denominators up to
/// [`MAX_DENOMINATOR`]; densities make `V_ν` the whole space.
pub fn alibaud_group(t: &LevyTriplet<f64>) -> Result<(GroupDescriptor, AlibaudData), StructureError> {
    let n = t.dim();
    let sigma = t.gaussian().sqrt();
    let sigma_cols: Vec<Vec<f64>> = sigma.rows();
    if t.has_continuous_jumps() {
        let full = GroupDescriptor::full(n);
        let mut w_vectors = sigma_cols;
        w_vectors.push(t.drift().to_vec());
        let data = AlibaudData {
            sigma,
            g_nu_generators: Vec::new(),
            v_nu_basis: full.subspace_basis.clone(),
            c_nu: vec![0.0; n],
            w_basis: orthonormal_basis(&w_vectors, n, 1e-10),
        };
        return Ok((full, data));
    }

    let mut fracs: Vec<Vec<(i64, i64)>> = Vec::new();
    for a in t.atoms() {
        let mut row = Vec::with_capacity(n);
        for &x in a.location.iter() {
            let Some(r) = rationalize(x, MAX_DENOMINATOR, 1e-15 * (1.0 + x.abs())) else {
                return Err(StructureError::ExactPathUnavailable(format!(
                    "atom at {:?} is not rational with denominator up to {MAX_DENOMINATOR}",
                    a.location.to_vec()
                )));
            };
            row.push(r);
        }
        fracs.push(row);
    }
    let den = fracs.iter().flatten().fold(1i128, |acc, &(_, q)| acc.lcm(&(q as i128)));
    let ints: Vec<Vec<i128>> =
        fracs.iter().map(|row| row.iter().map(|&(p, q)| p as i128 * (den / q as i128)).collect()).collect();
    let h = hnf_lattice(&ints);
    let overflow = || StructureError::ExactPathUnavailable("lattice entries overflow 64-bit rationals".into());
    let den64 = i64::try_from(den).map_err(|_| overflow())?;
    let mut g_nu_generators = Vec::with_capacity(h.len());
    for col in &h {
        let mut v = Vec::with_capacity(n);
        for &x in col {
            v.push(Ratio::new(i64::try_from(x).map_err(|_| overflow())?, den64));
        }
        g_nu_generators.push(v);
    }
    let lattice: Vec<Vec<f64>> = h.iter().map(|col| col.iter().map(|&x| x as f64 / den as f64).collect()).collect();

    let mut c_nu = vec![0.0; n];
    for a in t.atoms() {
        if a.location.norm() < 1.0 {
            for (c, x) in c_nu.iter_mut().zip(a.location.iter()) {
                *c -= a.mass * x;
            }
        }
    }
    let shifted: Vec<f64> = t.drift().iter().zip(&c_nu).map(|(b, c)| b + c).collect();
    let mut w_vectors = sigma_cols;
    w_vectors.push(shifted);
    let w_basis: Vec<Vec<f64>> =
        orthonormal_basis(&w_vectors, n, 1e-10).into_iter().map(canonical_sign).collect();

    let group = if w_basis.is_empty() {
        GroupDescriptor { dim: n, subspace_basis: Vec::new(), lattice_generators: lattice, exact: true }
    } else {
        let projected: Vec<Vec<f64>> = lattice.iter().map(|g| project_off(g, &w_basis)).collect();
        let reduced = reduce_lattice(&projected, 1e-9).ok_or(StructureError::Dense)?;
        GroupDescriptor { dim: n, subspace_basis: w_basis.clone(), lattice_generators: reduced, exact: false }
    };
    let data = AlibaudData { sigma, g_nu_generators, v_nu_basis: Vec::new(), c_nu, w_basis };
    Ok((group, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Atom;

    #[test]
    fn two_and_three_generate_the_integers() {
        let t = LevyTriplet::compound_poisson(vec![Atom::new(vec![2.0], 1.0), Atom::new(vec![3.0], 1.0)]).unwrap();
        let (g, data) = alibaud_group(&t).unwrap();
        assert!(g.exact && g.subspace_basis.is_empty());
        assert_eq!(g.lattice_generators, vec![vec![1.0]]);
        assert_eq!(data.c_nu, vec![0.0]);
    }

    #[test]
    fn gaussian_or_drift_fill_the_line() {
        let (g, _) = alibaud_group(&LevyTriplet::brownian_motion(2)).unwrap();
        assert!(g.is_full_space());
        let drift = LevyTriplet::new(vec![1.0], vec![vec![0.0]], vec![]).unwrap();
        let (g, _) = alibaud_group(&drift).unwrap();
        assert!(g.is_full_space() && g.lattice_generators.is_empty());
    }

    #[test]
    fn irrational_atoms_have_no_exact_path() {
        let t = LevyTriplet::compound_poisson(vec![Atom::new(vec![std::f64::consts::PI], 1.0)]).unwrap();
        assert!(matches!(alibaud_group(&t), Err(StructureError::ExactPathUnavailable(_))));
    }
}
