//! Numerical check that the orthogonal subgroup of the detected zero set
//! equals the group computed exactly from the triplet.

use serde::{Deserialize, Serialize};

use super::alibaud::{alibaud_group, AlibaudData};
use super::lattice::{orthogonal_subgroup, GroupDescriptor};
use super::linalg::{combine, coordinates, norm, orthonormal_basis, principal_cosines, project_off, sub};
use super::zeroset::{find_zero_set, SearchParams, ZeroSetStructure};
use crate::error::StructureError;
use crate::levy::LevyTriplet;

/// Tolerance on principal angles and lattice membership.
pub const DUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub subspace_dims: [usize; 2],
    pub lattice_ranks: [usize; 2],
    pub max_principal_angle: f64,
    /// Worst distance from a generator of one lattice to the other lattice.
    pub max_membership_defect: f64,
    pub equal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualityOutcome {
    Equal,
    Different,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub outcome: DualityOutcome,
    pub zero_set: ZeroSetStructure,
    pub from_zero_set: Option<GroupDescriptor>,
    pub alibaud: GroupDescriptor,
    pub alibaud_data: AlibaudData,
    pub comparison: Option<GroupComparison>,
}

fn lattice_distance(lattice: &[Vec<f64>], v: &[f64], dim: usize) -> f64 {
    let (c, _) = coordinates(lattice, v);
    let rounded: Vec<f64> = c.iter().map(|x| x.round()).collect();
    norm(&sub(v, &combine(lattice, &rounded, dim)))
}

/// Compares two subspace ⊕ lattice groups: subspaces by principal angles,
/// lattices (taken modulo the first subspace) by mutual membership.
pub fn compare_groups(a: &GroupDescriptor, b: &GroupDescriptor, tol: f64) -> GroupComparison {
    let n = a.dim;
    let ea = orthonormal_basis(&a.subspace_basis, n, 1e-12);
    let eb = orthonormal_basis(&b.subspace_basis, n, 1e-12);
    let max_principal_angle = if ea.len() != eb.len() {
        std::f64::consts::FRAC_PI_2
    } else {
        principal_cosines(&ea, &eb).into_iter().map(|c| c.acos()).fold(0.0, f64::max)
    };
    let la: Vec<Vec<f64>> =
        a.lattice_generators.iter().map(|g| project_off(g, &ea)).filter(|g| norm(g) > 1e-12).collect();
    let lb: Vec<Vec<f64>> =
        b.lattice_generators.iter().map(|g| project_off(g, &ea)).filter(|g| norm(g) > 1e-12).collect();
    let max_membership_defect = if la.len() != lb.len() {
        f64::INFINITY
    } else {
        la.iter()
            .map(|g| lattice_distance(&lb, g, n))
            .chain(lb.iter().map(|g| lattice_distance(&la, g, n)))
            .fold(0.0, f64::max)
    };
    let equal = ea.len() == eb.len()
        && la.len() == lb.len()
        && max_principal_angle < tol
        && max_membership_defect < tol;
    GroupComparison {
        subspace_dims: [ea.len(), eb.len()],
        lattice_ranks: [la.len(), lb.len()],
        max_principal_angle,
        max_membership_defect,
        equal,
    }
}

/// Orthogonal subgroup of `find_zero_set(ψ)` against [`alibaud_group`].
pub fn cross_check_duality(t: &LevyTriplet<f64>, params: &SearchParams) -> Result<DualityReport, StructureError> {
    let (alibaud, alibaud_data) = alibaud_group(t)?;
    let zero_set = find_zero_set(&t.clone().into(), params)?;
    if !zero_set.is_conclusive() {
        return Ok(DualityReport {
            outcome: DualityOutcome::Inconclusive,
            zero_set,
            from_zero_set: None,
            alibaud,
            alibaud_data,
            comparison: None,
        });
    }
    let from_zero_set = orthogonal_subgroup(&zero_set)?;
    let comparison = compare_groups(&from_zero_set, &alibaud, DUALITY_TOLERANCE);
    let outcome = if comparison.equal { DualityOutcome::Equal } else { DualityOutcome::Different };
    Ok(DualityReport {
        outcome,
        zero_set,
        from_zero_set: Some(from_zero_set),
        alibaud,
        alibaud_data,
        comparison: Some(comparison),
    })
}
