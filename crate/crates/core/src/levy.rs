//! Lévy triplets `(b, Q, ν)`: data model, validation and generalized moments.
//!
//! The jump measure ν is a finite sum of three component families:
//!
//! * `Atoms`: finitely many point masses away from the origin,
//! * `IsotropicStable`: density `scale · |x|^{-n-α}` on ℝⁿ∖{0}, 0 < α < 2,
//! * `RadialDensity`: density `p(|x|)` supported on the annulus
//!   `r_min ≤ |x| ≤ r_max`, with `p` a power or exponential profile.
//!
//! Every integral against ν therefore has either an exact evaluation or a
//! quadrature over a bounded radial interval.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::LevyError;
use crate::quadrature::composite_rule;
use crate::scalar::{dot, norm, sphere_area, Scalar};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// A point of ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct RealVector<T>(pub Vec<T>);

impl<T: Scalar> RealVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self(self.0.iter().map(|&v| v * factor).collect())
    }
}

impl<T> Deref for RealVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for RealVector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

/// Symmetric positive semidefinite matrix, stored row-major.
///
/// Construction rejects asymmetry beyond 1e-12 and eigenvalues below −1e-12;
/// eigenvalues in `[-1e-12, 0)` are clamped to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<T>>", into = "Vec<Vec<T>>")]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct PsdMatrix<T: Scalar> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> PsdMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self, LevyError> {
        let dim = rows.len();
        for row in &rows {
            if row.len() != dim {
                return Err(LevyError::DimensionMismatch {
                    field: "gaussian".into(),
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(LevyError::NonFinite { field: "gaussian".into() });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let gap = Float::abs(rows[i][j] - rows[j][i]).as_f64();
                if gap > SYMMETRY_TOL {
                    return Err(LevyError::AsymmetricGaussian { row: i, col: j, gap });
                }
            }
        }
        let entries: Vec<T> = rows.into_iter().flatten().collect();
        let mut m = Self { dim, entries };
        let eig = m.eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if dim > 0 && min < -PSD_TOL {
            return Err(LevyError::NotPsd { min_eigenvalue: min });
        }
        if dim > 0 && min < 0.0 {
            let mut values = eig.eigenvalues.clone();
            values.iter_mut().for_each(|v| *v = v.max(0.0));
            let rebuilt = &eig.eigenvectors
                * DMatrix::from_diagonal(&values)
                * eig.eigenvectors.transpose();
            m.entries = (0..dim * dim)
                .map(|k| {
                    let (i, j) = (k / dim, k % dim);
                    T::lit(0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]))
                })
                .collect();
        }
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, T::one())
    }

    pub fn scaled_identity(dim: usize, s: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = s;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim.max(1)).take(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| v.is_zero())
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.dim).map(|i| dot(&self.entries[i * self.dim..(i + 1) * self.dim], v)).collect()
    }

    /// `aᵀ Q b`.
    pub fn bilinear(&self, a: &[T], b: &[T]) -> T {
        dot(a, &self.apply(b))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).as_f64())
    }

    /// Eigen-decomposition in double precision (dimensions here are tiny).
    pub fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        SymmetricEigen::new(self.to_nalgebra())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        self.eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Number of eigenvalues above `tol · max(1, largest eigenvalue)`.
    pub fn rank(&self, tol: f64) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let eig = self.eigen();
        let top = eig.eigenvalues.iter().cloned().fold(1.0_f64, f64::max);
        eig.eigenvalues.iter().filter(|&&v| v > tol * top).count()
    }

    /// The positive semidefinite square root Σ with Σ² = Q.
    pub fn sqrt(&self) -> Self {
        if self.dim == 0 {
            return self.clone();
        }
        let eig = self.eigen();
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let s = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
        Self {
            dim: self.dim,
            entries: (0..self.dim * self.dim)
                .map(|k| {
                    let (i, j) = (k / self.dim, k % self.dim);
                    T::lit(0.5 * (s[(i, j)] + s[(j, i)]))
                })
                .collect(),
        }
    }

    /// `A Q Aᵀ` for a square matrix `A` given by rows.
    pub fn congruence(&self, a: &[Vec<T>]) -> Self {
        let n = self.dim;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            let qa: Vec<T> = self.apply(&a[i]);
            for j in 0..n {
                out[j * n + i] = dot(&a[j], &qa);
            }
        }
        Self { dim: n, entries: out }
    }
}

impl<T: Scalar> TryFrom<Vec<Vec<T>>> for PsdMatrix<T> {
    type Error = LevyError;
    fn try_from(rows: Vec<Vec<T>>) -> Result<Self, Self::Error> {
        Self::new(rows)
    }
}

impl<T: Scalar> From<PsdMatrix<T>> for Vec<Vec<T>> {
    fn from(m: PsdMatrix<T>) -> Self {
        m.rows()
    }
}

/// A point mass of the jump measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Atom<T> {
    pub location: RealVector<T>,
    pub mass: T,
}

impl<T: Scalar> Atom<T> {
    pub fn new(location: Vec<T>, mass: T) -> Self {
        Self { location: RealVector(location), mass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct AtomicMeasure<T> {
    pub atoms: Vec<Atom<T>>,
}

/// Isotropic α-stable jump density `scale · |x|^{-n-α}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct IsotropicStable<T> {
    pub alpha: T,
    pub scale: T,
}

impl<T: Scalar> IsotropicStable<T> {
    /// Density constant `C(n, α)` for which `C · |x|^{-n-α}` has symbol `|ξ|^α`:
    /// `C = α 2^{α-1} Γ((n+α)/2) / (π^{n/2} Γ(1-α/2))`.
    pub fn unit_density_constant(alpha: f64, dim: usize) -> f64 {
        use statrs::function::gamma::gamma;
        let n = dim as f64;
        alpha * 2f64.powf(alpha - 1.0) * gamma((n + alpha) / 2.0)
            / (std::f64::consts::PI.powf(n / 2.0) * gamma(1.0 - alpha / 2.0))
    }

    /// κ in `ψ(ξ) = κ |ξ|^α`, i.e. `scale / C(n, α)`.
    pub fn symbol_coefficient(&self, dim: usize) -> T {
        self.scale / T::lit(Self::unit_density_constant(self.alpha.as_f64(), dim))
    }
}

/// Radial profile `p(r)` of a [`RadialDensity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum RadialProfile<T> {
    /// `coef · r^exponent`
    Power { coef: T, exponent: T },
    /// `coef · e^{-rate·r}`
    Exponential { coef: T, rate: T },
}

impl<T: Scalar> RadialProfile<T> {
    pub fn eval(&self, r: T) -> T {
        match *self {
            RadialProfile::Power { coef, exponent } => coef * r.powf(exponent),
            RadialProfile::Exponential { coef, rate } => coef * (-rate * r).exp(),
        }
    }
}

fn default_nodes() -> usize {
    16
}
fn default_panels() -> usize {
    32
}

/// Composite Gauss–Legendre specification used for radial integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_panels")]
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: default_nodes(), panels: default_panels() }
    }
}

/// Isotropic density `p(|x|)` on `r_min ≤ |x| ≤ r_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct RadialDensity<T> {
    pub profile: RadialProfile<T>,
    pub r_min: T,
    pub r_max: T,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl<T: Scalar> RadialDensity<T> {
    /// `S_{n-1} r^{n-1} p(r)`: the density of |X| under ν.
    pub fn radial_weight(&self, r: T, dim: usize) -> T {
        T::lit(sphere_area(dim)) * r.powi(dim as i32 - 1) * self.profile.eval(r)
    }

    /// Quadrature nodes `(r, w)` over `[a, b] ∩ [r_min, r_max]` with the
    /// radial weight folded into `w`.
    pub fn radial_nodes(&self, a: T, b: T, dim: usize) -> Vec<(T, T)> {
        let lo = Float::max(a, self.r_min);
        let hi = Float::min(b, self.r_max);
        if !(hi > lo) {
            return Vec::new();
        }
        let full = (self.r_max - self.r_min).as_f64();
        let frac = ((hi - lo).as_f64() / full).clamp(0.0, 1.0);
        let panels = ((self.quadrature.panels as f64 * frac).ceil() as usize).max(1);
        composite_rule(lo, hi, panels, self.quadrature.nodes)
            .into_iter()
            .map(|(r, w)| (r, w * self.radial_weight(r, dim)))
            .collect()
    }

    /// Closed-form `∫_a^r S_{n-1} s^{n-1} p(s) ds` for `a = r_min`.
    pub fn mass_below(&self, r: T, dim: usize) -> T {
        let r = Float::min(Float::max(r, self.r_min), self.r_max);
        let s = T::lit(sphere_area(dim));
        match self.profile {
            RadialProfile::Power { coef, exponent } => {
                let k = exponent + T::lit(dim as f64);
                if Float::abs(k) < T::lit(1e-12) {
                    s * coef * (r / self.r_min).ln()
                } else {
                    s * coef * (r.powf(k) - self.r_min.powf(k)) / k
                }
            }
            RadialProfile::Exponential { coef, rate } => {
                let anti = |x: T| exp_poly_antiderivative(x, rate, dim - 1);
                s * coef * (anti(r) - anti(self.r_min))
            }
        }
    }

    pub fn total_mass(&self, dim: usize) -> T {
        self.mass_below(self.r_max, dim)
    }

    /// Inverse of the normalized radial CDF, exact for power profiles and by
    /// bisection on the closed-form CDF otherwise.
    pub fn inverse_cdf(&self, u: T, dim: usize) -> T {
        if let RadialProfile::Power { exponent, .. } = self.profile {
            let k = exponent + T::lit(dim as f64);
            if Float::abs(k) < T::lit(1e-12) {
                return self.r_min * (self.r_max / self.r_min).powf(u);
            }
            let a = self.r_min.powf(k);
            let b = self.r_max.powf(k);
            return (a + u * (b - a)).powf(T::one() / k);
        }
        let target = u * self.total_mass(dim);
        let (mut lo, mut hi) = (self.r_min, self.r_max);
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mass_below(mid, dim) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / T::lit(2.0)
    }
}

/// `∫ x^m e^{-λx} dx = -e^{-λx} Σ_{j≤m} m!/j! x^j / λ^{m-j+1}`.
fn exp_poly_antiderivative<T: Scalar>(x: T, rate: T, m: usize) -> T {
    let mut sum = T::zero();
    let mut fact_ratio = T::one(); // m!/j!
    for j in (0..=m).rev() {
        sum = sum + fact_ratio * x.powi(j as i32) / rate.powi((m - j + 1) as i32);
        fact_ratio = fact_ratio * T::lit(j as f64);
    }
    -(-rate * x).exp() * sum
}

/// One summand of the jump measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum LevyMeasureComponent<T> {
    #[serde(rename = "atoms")]
    Atoms(AtomicMeasure<T>),
    #[serde(rename = "stable")]
    IsotropicStable(IsotropicStable<T>),
    #[serde(rename = "radial")]
    RadialDensity(RadialDensity<T>),
}

impl<T: Scalar> LevyMeasureComponent<T> {
    pub fn atoms(atoms: Vec<Atom<T>>) -> Self {
        Self::Atoms(AtomicMeasure { atoms })
    }

    pub fn stable(alpha: T, scale: T) -> Self {
        Self::IsotropicStable(IsotropicStable { alpha, scale })
    }

    pub fn radial(profile: RadialProfile<T>, r_min: T, r_max: T) -> Self {
        Self::RadialDensity(RadialDensity { profile, r_min, r_max, quadrature: QuadratureSpec::default() })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Atoms(_) => "atoms",
            Self::IsotropicStable(_) => "stable",
            Self::RadialDensity(_) => "radial",
        }
    }

    fn check(&self, index: usize, dim: usize) -> Result<(), LevyError> {
        match self {
            Self::Atoms(m) => {
                for (k, atom) in m.atoms.iter().enumerate() {
                    if atom.location.dim() != dim {
                        return Err(LevyError::DimensionMismatch {
                            field: format!("jumps/{index}/atoms/{k}/location"),
                            expected: dim,
                            found: atom.location.dim(),
                        });
                    }
                    if !atom.location.is_finite() || !atom.mass.is_finite() {
                        return Err(LevyError::NonFinite { field: format!("jumps/{index}/atoms/{k}") });
                    }
                    if !(atom.mass > T::zero()) {
                        return Err(LevyError::NonPositiveMass {
                            component: index,
                            atom: k,
                            mass: atom.mass.as_f64(),
                        });
                    }
                    if atom.location.iter().all(|v| v.is_zero()) {
                        return Err(LevyError::AtomAtOrigin { component: index, atom: k });
                    }
                }
            }
            Self::IsotropicStable(s) => {
                if !(s.alpha > T::zero() && s.alpha < T::lit(2.0)) {
                    return Err(LevyError::AlphaOutOfRange { component: index, alpha: s.alpha.as_f64() });
                }
                if !(s.scale > T::zero()) || !s.scale.is_finite() {
                    return Err(LevyError::NonPositiveScale { component: index, scale: s.scale.as_f64() });
                }
            }
            Self::RadialDensity(d) => {
                let bad = |reason: &str| LevyError::InvalidRadial { component: index, reason: reason.into() };
                if dim > 3 {
                    return Err(bad("radial densities are supported in dimensions 1 to 3"));
                }
                if !(d.r_min > T::zero() && d.r_max > d.r_min && d.r_max.is_finite()) {
                    return Err(bad("cutoffs must satisfy 0 < r_min < r_max < inf"));
                }
                if d.quadrature.nodes == 0 || d.quadrature.panels == 0 {
                    return Err(bad("quadrature needs at least one node and one panel"));
                }
                match d.profile {
                    RadialProfile::Power { coef, exponent } => {
                        if !(coef > T::zero()) || !exponent.is_finite() {
                            return Err(bad("power profile needs coef > 0 and a finite exponent"));
                        }
                    }
                    RadialProfile::Exponential { coef, rate } => {
                        if !(coef > T::zero()) || !(rate > T::zero()) || !rate.is_finite() {
                            return Err(bad("exponential profile needs coef > 0 and rate > 0"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `∫ min(|x|², 1) dν` over this component.
    pub fn jump_integral(&self, dim: usize) -> T {
        match self {
            Self::Atoms(m) => m
                .atoms
                .iter()
                .map(|a| a.mass * Float::min(dot(&a.location, &a.location), T::one()))
                .fold(T::zero(), |x, y| x + y),
            Self::IsotropicStable(s) => {
                T::lit(sphere_area(dim))
                    * s.scale
                    * (T::one() / (T::lit(2.0) - s.alpha) + T::one() / s.alpha)
            }
            Self::RadialDensity(d) => {
                let inner: T = d
                    .radial_nodes(d.r_min, T::one(), dim)
                    .into_iter()
                    .map(|(r, w)| w * r * r)
                    .fold(T::zero(), |x, y| x + y);
                let outer: T = d
                    .radial_nodes(T::one(), d.r_max, dim)
                    .into_iter()
                    .map(|(_, w)| w)
                    .fold(T::zero(), |x, y| x + y);
                inner + outer
            }
        }
    }

    /// Whether the component is symmetric under x ↦ −x.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Atoms(m) => m.atoms.iter().all(|a| {
                m.atoms.iter().any(|b| {
                    Float::abs(b.mass - a.mass) <= T::lit(1e-14) * a.mass
                        && a.location.iter().zip(b.location.iter()).all(|(&x, &y)| Float::abs(x + y) <= T::lit(1e-14))
                })
            }),
            _ => true,
        }
    }
}

/// Submultiplicative growth bound g with `g(x+y) ≤ c·g(x)·g(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar"))]
pub enum GrowthBound<T> {
    /// `g ≡ c`, c > 0
    Constant { c: T },
    /// `g(y) = (1 + |y|)^k`
    Power { k: u32 },
    /// `g(y) = e^{β|y|}`, β ≥ 0
    Exponential { beta: T },
}

impl<T: Scalar> GrowthBound<T> {
    pub fn eval(&self, y: &[T]) -> T {
        self.eval_radius(norm(y))
    }

    pub fn eval_radius(&self, r: T) -> T {
        match *self {
            GrowthBound::Constant { c } => c,
            GrowthBound::Power { k } => (T::one() + r).powi(k as i32),
            GrowthBound::Exponential { beta } => (beta * r).exp(),
        }
    }

    /// The constant in the submultiplicativity inequality.
    pub fn submultiplicative_constant(&self) -> T {
        match *self {
            GrowthBound::Constant { c } => T::one() / c,
            GrowthBound::Power { .. } | GrowthBound::Exponential { .. } => T::one(),
        }
    }

    fn check(&self) -> Result<(), LevyError> {
        match *self {
            GrowthBound::Constant { c } if !(c > T::zero() && c.is_finite()) => {
                Err(LevyError::InvalidGrowth(format!("constant must be positive, got {c}")))
            }
            GrowthBound::Exponential { beta } if !(beta >= T::zero() && beta.is_finite()) => {
                Err(LevyError::InvalidGrowth(format!("exponential rate must be >= 0, got {beta}")))
            }
            _ => Ok(()),
        }
    }
}

impl<T: Scalar> FromStr for GrowthBound<T> {
    type Err = LevyError;

    /// Parses `const:c`, `pow:k` or `exp:b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| LevyError::InvalidGrowth(format!("expected kind:value, got {s:?}")))?;
        let number = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| LevyError::InvalidGrowth(format!("{v:?}: {e}")))
        };
        let g = match kind.trim() {
            "const" => GrowthBound::Constant { c: T::lit(number(value)?) },
            "pow" => GrowthBound::Power {
                k: value
                    .trim()
                    .parse()
                    .map_err(|e| LevyError::InvalidGrowth(format!("{value:?}: {e}")))?,
            },
            "exp" => GrowthBound::Exponential { beta: T::lit(number(value)?) },
            other => return Err(LevyError::InvalidGrowth(format!("unknown kind {other:?}"))),
        };
        g.check()?;
        Ok(g)
    }
}

impl<T: Scalar> fmt::Display for GrowthBound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthBound::Constant { c } => write!(f, "const:{c}"),
            GrowthBound::Power { k } => write!(f, "pow:{k}"),
            GrowthBound::Exponential { beta } => write!(f, "exp:{beta}"),
        }
    }
}

/// Structurally well-formed triplet as it appears in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct TripletSpec<T: Scalar> {
    pub dim: usize,
    pub drift: Vec<T>,
    pub gaussian: Vec<Vec<T>>,
    #[serde(default)]
    pub jumps: Vec<LevyMeasureComponent<T>>,
}

/// Per-component line of a [`ValidationReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentCheck<T> {
    pub index: usize,
    pub kind: &'static str,
    /// `∫ min(|x|², 1)` over the component.
    pub jump_integral: T,
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    pub ok: bool,
    pub dim: usize,
    pub gaussian_min_eigenvalue: f64,
    pub gaussian_psd: bool,
    pub components: Vec<ComponentCheck<T>>,
}

/// Checks the conditions on `(b, Q, ν)`: matching dimensions, finite drift,
/// symmetric PSD covariance, and `∫ min(|x|², 1) dν < ∞` per component.
pub fn validate_triplet<T: Scalar>(spec: &TripletSpec<T>) -> Result<ValidationReport<T>, LevyError> {
    let n = spec.dim;
    if n == 0 {
        return Err(LevyError::ZeroDimension);
    }
    if spec.drift.len() != n {
        return Err(LevyError::DimensionMismatch { field: "drift".into(), expected: n, found: spec.drift.len() });
    }
    if spec.drift.iter().any(|v| !v.is_finite()) {
        return Err(LevyError::NonFinite { field: "drift".into() });
    }
    if spec.gaussian.len() != n {
        return Err(LevyError::DimensionMismatch {
            field: "gaussian".into(),
            expected: n,
            found: spec.gaussian.len(),
        });
    }
    let (gaussian_min_eigenvalue, gaussian_psd) = match PsdMatrix::new(spec.gaussian.clone()) {
        Ok(q) => (q.min_eigenvalue(), true),
        Err(LevyError::NotPsd { min_eigenvalue }) => (min_eigenvalue, false),
        Err(e) => return Err(e),
    };
    let mut components = Vec::with_capacity(spec.jumps.len());
    for (index, c) in spec.jumps.iter().enumerate() {
        c.check(index, n)?;
        let jump_integral = c.jump_integral(n);
        components.push(ComponentCheck { index, kind: c.kind(), jump_integral, finite: jump_integral.is_finite() });
    }
    let ok = gaussian_psd && components.iter().all(|c| c.finite);
    Ok(ValidationReport { ok, dim: n, gaussian_min_eigenvalue, gaussian_psd, components })
}

/// A validated Lévy triplet `(b, Q, ν)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripletSpec<T>", into = "TripletSpec<T>")]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub struct LevyTriplet<T: Scalar> {
    dim: usize,
    drift: RealVector<T>,
    gaussian: PsdMatrix<T>,
    jumps: Vec<LevyMeasureComponent<T>>,
}

impl<T: Scalar> TryFrom<TripletSpec<T>> for LevyTriplet<T> {
    type Error = LevyError;
    fn try_from(spec: TripletSpec<T>) -> Result<Self, Self::Error> {
        let report = validate_triplet(&spec)?;
        if !report.ok {
            if !report.gaussian_psd {
                return Err(LevyError::NotPsd { min_eigenvalue: report.gaussian_min_eigenvalue });
            }
            let bad = report.components.iter().find(|c| !c.finite).map(|c| c.index).unwrap_or(0);
            return Err(LevyError::NonFinite { field: format!("jumps/{bad}") });
        }
        Ok(Self {
            dim: spec.dim,
            drift: RealVector(spec.drift),
            gaussian: PsdMatrix::new(spec.gaussian)?,
            jumps: spec.jumps,
        })
    }
}

impl<T: Scalar> From<LevyTriplet<T>> for TripletSpec<T> {
    fn from(t: LevyTriplet<T>) -> Self {
        t.to_spec()
    }
}

impl<T: Scalar> LevyTriplet<T> {
    pub fn new(
        drift: Vec<T>,
        gaussian: Vec<Vec<T>>,
        jumps: Vec<LevyMeasureComponent<T>>,
    ) -> Result<Self, LevyError> {
        TripletSpec { dim: drift.len(), drift, gaussian, jumps }.try_into()
    }

    /// Standard Brownian motion, `Q = I`.
    pub fn brownian_motion(dim: usize) -> Self {
        Self {
            dim,
            drift: RealVector::zeros(dim),
            gaussian: PsdMatrix::identity(dim),
            jumps: Vec::new(),
        }
    }

    /// Pure-jump triplet with the given atoms and no drift.
    pub fn compound_poisson(atoms: Vec<Atom<T>>) -> Result<Self, LevyError> {
        let dim = atoms.first().map(|a| a.location.dim()).unwrap_or(1);
        Self::new(vec![T::zero(); dim], vec![vec![T::zero(); dim]; dim], vec![LevyMeasureComponent::atoms(atoms)])
    }

    pub fn with_drift(mut self, drift: Vec<T>) -> Result<Self, LevyError> {
        if drift.len() != self.dim {
            return Err(LevyError::DimensionMismatch { field: "drift".into(), expected: self.dim, found: drift.len() });
        }
        self.drift = RealVector(drift);
        Ok(self)
    }

    pub fn with_component(mut self, c: LevyMeasureComponent<T>) -> Result<Self, LevyError> {
        c.check(self.jumps.len(), self.dim)?;
        self.jumps.push(c);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &RealVector<T> {
        &self.drift
    }

    pub fn gaussian(&self) -> &PsdMatrix<T> {
        &self.gaussian
    }

    pub fn jumps(&self) -> &[LevyMeasureComponent<T>] {
        &self.jumps
    }

    pub fn to_spec(&self) -> TripletSpec<T> {
        TripletSpec {
            dim: self.dim,
            drift: self.drift.0.clone(),
            gaussian: self.gaussian.rows(),
            jumps: self.jumps.clone(),
        }
    }

    pub fn validate(&self) -> ValidationReport<T> {
        validate_triplet(&self.to_spec()).expect("a constructed triplet is structurally valid")
    }

    /// All atoms across components.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom<T>> {
        self.jumps.iter().flat_map(|c| match c {
            LevyMeasureComponent::Atoms(m) => m.atoms.as_slice(),
            _ => &[],
        })
    }

    /// Whether ν has a component with a density (stable or radial).
    pub fn has_continuous_jumps(&self) -> bool {
        self.jumps.iter().any(|c| !matches!(c, LevyMeasureComponent::Atoms(_)))
    }

    /// Triplet of `-X`: drift negated and atoms reflected.
    pub fn reflected(&self) -> Self {
        let jumps = self
            .jumps
            .iter()
            .map(|c| match c {
                LevyMeasureComponent::Atoms(m) => LevyMeasureComponent::atoms(
                    m.atoms.iter().map(|a| Atom { location: a.location.scaled(-T::one()), mass: a.mass }).collect(),
                ),
                other => other.clone(),
            })
            .collect();
        Self {
            dim: self.dim,
            drift: self.drift.scaled(-T::one()),
            gaussian: self.gaussian.clone(),
            jumps,
        }
    }

    /// Same triplet with all atoms of norm above `radius` removed.
    pub fn truncated(&self, radius: T) -> Self {
        let jumps = self
            .jumps
            .iter()
            .filter_map(|c| match c {
                LevyMeasureComponent::Atoms(m) => {
                    let atoms: Vec<_> = m.atoms.iter().filter(|a| a.location.norm() <= radius).cloned().collect();
                    (!atoms.is_empty()).then(|| LevyMeasureComponent::atoms(atoms))
                }
                other => Some(other.clone()),
            })
            .collect();
        Self { jumps, ..self.clone() }
    }

    /// Triplet of `A X` for an invertible `A` (rows given), so that the new
    /// symbol satisfies `ψ_A(ξ) = ψ(Aᵀ ξ)`.
    ///
    /// Atoms are mapped exactly and the drift absorbs the change of the
    /// small-jump compensator. Isotropic components stay isotropic only when
    /// `A` is a multiple of an orthogonal matrix; other maps are rejected.
    pub fn transformed(&self, a: &[Vec<T>]) -> Result<Self, LevyError> {
        let n = self.dim;
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(LevyError::DimensionMismatch { field: "transform".into(), expected: n, found: a.len() });
        }
        let apply = |v: &[T]| -> Vec<T> { a.iter().map(|row| dot(row, v)).collect() };
        let mut drift = apply(&self.drift);
        let mut jumps = Vec::with_capacity(self.jumps.len());
        let mut conformal: Option<T> = None;
        let conformal_factor = || -> Result<T, LevyError> {
            // AᵀA = c²I
            let c2 = dot(&a.iter().map(|r| r[0]).collect::<Vec<_>>(), &a.iter().map(|r| r[0]).collect::<Vec<_>>());
            for i in 0..n {
                for j in 0..n {
                    let col_i: Vec<T> = a.iter().map(|r| r[i]).collect();
                    let col_j: Vec<T> = a.iter().map(|r| r[j]).collect();
                    let target = if i == j { c2 } else { T::zero() };
                    if Float::abs(dot(&col_i, &col_j) - target) > T::lit(1e-10) * Float::max(c2, T::one()) {
                        return Err(LevyError::Unsupported(
                            "isotropic components need a conformal (scaled orthogonal) transform".into(),
                        ));
                    }
                }
            }
            Ok(c2.sqrt())
        };
        for c in &self.jumps {
            match c {
                LevyMeasureComponent::Atoms(m) => {
                    let mut atoms = Vec::with_capacity(m.atoms.len());
                    for atom in &m.atoms {
                        let y = apply(&atom.location);
                        let inside_old = atom.location.norm() < T::one();
                        let inside_new = norm(&y) < T::one();
                        if inside_new != inside_old {
                            let sign = if inside_new { T::one() } else { -T::one() };
                            for (d, &yi) in drift.iter_mut().zip(&y) {
                                *d = *d + sign * atom.mass * yi;
                            }
                        }
                        atoms.push(Atom { location: RealVector(y), mass: atom.mass });
                    }
                    jumps.push(LevyMeasureComponent::atoms(atoms));
                }
                LevyMeasureComponent::IsotropicStable(s) => {
                    let c = match conformal {
                        Some(c) => c,
                        None => *conformal.insert(conformal_factor()?),
                    };
                    jumps.push(LevyMeasureComponent::stable(s.alpha, s.scale * c.powf(s.alpha)));
                }
                LevyMeasureComponent::RadialDensity(d) => {
                    let c = match conformal {
                        Some(c) => c,
                        None => *conformal.insert(conformal_factor()?),
                    };
                    let nn = T::lit(n as f64);
                    let profile = match d.profile {
                        RadialProfile::Power { coef, exponent } => {
                            RadialProfile::Power { coef: coef * c.powf(-nn - exponent), exponent }
                        }
                        RadialProfile::Exponential { coef, rate } => {
                            RadialProfile::Exponential { coef: coef * c.powf(-nn), rate: rate / c }
                        }
                    };
                    jumps.push(LevyMeasureComponent::RadialDensity(RadialDensity {
                        profile,
                        r_min: d.r_min * c,
                        r_max: d.r_max * c,
                        quadrature: d.quadrature,
                    }));
                }
            }
        }
        Ok(Self { dim: n, drift: RealVector(drift), gaussian: self.gaussian.congruence(a), jumps })
    }
}

/// `∫_{|y|≥1} g(y) ν(dy)`; `+∞` when some component diverges.
pub fn levy_moment<T: Scalar>(nu: &[LevyMeasureComponent<T>], g: &GrowthBound<T>, dim: usize) -> T {
    nu.iter().map(|c| component_moment(c, g, dim)).fold(T::zero(), |a, b| a + b)
}

fn component_moment<T: Scalar>(c: &LevyMeasureComponent<T>, g: &GrowthBound<T>, dim: usize) -> T {
    match c {
        LevyMeasureComponent::Atoms(m) => m
            .atoms
            .iter()
            .filter(|a| a.location.norm() >= T::one())
            .map(|a| a.mass * g.eval(&a.location))
            .fold(T::zero(), |x, y| x + y),
        LevyMeasureComponent::IsotropicStable(s) => {
            let base = T::lit(sphere_area(dim)) * s.scale;
            match *g {
                GrowthBound::Constant { c } => c * base / s.alpha,
                GrowthBound::Exponential { beta } if beta.is_zero() => base / s.alpha,
                GrowthBound::Exponential { .. } => T::infinity(),
                GrowthBound::Power { k } => {
                    // ∫₁^∞ (1+r)^k r^{-1-α} dr = Σ_j C(k,j)/(α-j), finite iff k < α
                    if T::lit(k as f64) >= s.alpha {
                        return T::infinity();
                    }
                    let mut binom = T::one();
                    let mut sum = T::zero();
                    for j in 0..=k {
                        sum = sum + binom / (s.alpha - T::lit(j as f64));
                        binom = binom * T::lit((k - j) as f64) / T::lit((j + 1) as f64);
                    }
                    base * sum
                }
            }
        }
        LevyMeasureComponent::RadialDensity(d) => d
            .radial_nodes(T::one(), d.r_max, dim)
            .into_iter()
            .map(|(r, w)| w * g.eval_radius(r))
            .fold(T::zero(), |x, y| x + y),
    }
}

/// `∫_{0<|y|<1} |y|² ν(dy)`.
pub fn small_ball_second_moment<T: Scalar>(nu: &[LevyMeasureComponent<T>], dim: usize) -> T {
    nu.iter()
        .map(|c| match c {
            LevyMeasureComponent::Atoms(m) => m
                .atoms
                .iter()
                .filter(|a| a.location.norm() < T::one())
                .map(|a| a.mass * dot(&a.location, &a.location))
                .fold(T::zero(), |x, y| x + y),
            LevyMeasureComponent::IsotropicStable(s) => {
                T::lit(sphere_area(dim)) * s.scale / (T::lit(2.0) - s.alpha)
            }
            LevyMeasureComponent::RadialDensity(d) => d
                .radial_nodes(d.r_min, T::one(), dim)
                .into_iter()
                .map(|(r, w)| w * r * r)
                .fold(T::zero(), |x, y| x + y),
        })
        .fold(T::zero(), |a, b| a + b)
}

/// Spherical average of `e^{s ω·e}` over unit ω: cosh, I₀, sinh(s)/s.
fn spherical_exp_average<T: Scalar>(s: T, dim: usize) -> T {
    match dim {
        1 => s.cosh(),
        2 => {
            // I₀(s) = Σ (s/2)^{2k} / (k!)²
            let q = s * s / T::lit(4.0);
            let mut term = T::one();
            let mut sum = T::one();
            for k in 1..5000 {
                term = term * q / T::lit((k * k) as f64);
                sum = sum + term;
                if !sum.is_finite() || term < sum * T::epsilon() {
                    break;
                }
            }
            sum
        }
        _ => {
            if s.is_zero() {
                T::one()
            } else {
                s.sinh() / s
            }
        }
    }
}

/// `∫_{|y|≥1} e^{η·y} ν(dy)`; finite exactly on the strip region F.
pub fn directional_exponential_moment<T: Scalar>(nu: &[LevyMeasureComponent<T>], eta: &[T], dim: usize) -> T {
    let eta_norm = norm(eta);
    nu.iter()
        .map(|c| match c {
            LevyMeasureComponent::Atoms(m) => m
                .atoms
                .iter()
                .filter(|a| a.location.norm() >= T::one())
                .map(|a| a.mass * dot(eta, &a.location).exp())
                .fold(T::zero(), |x, y| x + y),
            LevyMeasureComponent::IsotropicStable(s) => {
                if eta_norm.is_zero() {
                    T::lit(sphere_area(dim)) * s.scale / s.alpha
                } else {
                    T::infinity()
                }
            }
            LevyMeasureComponent::RadialDensity(d) => d
                .radial_nodes(T::one(), d.r_max, dim)
                .into_iter()
                .map(|(r, w)| w * spherical_exp_average(r * eta_norm, dim))
                .fold(T::zero(), |x, y| x + y),
        })
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(location: f64, mass: f64) -> Vec<LevyMeasureComponent<f64>> {
        vec![LevyMeasureComponent::atoms(vec![Atom::new(vec![location], mass)])]
    }

    #[test]
    fn single_atom_validates_with_unit_jump_integral() {
        let spec = TripletSpec { dim: 1, drift: vec![0.0], gaussian: vec![vec![0.0]], jumps: poisson(1.0, 1.0) };
        let report = validate_triplet(&spec).unwrap();
        assert!(report.ok);
        assert_eq!(report.components[0].jump_integral, 1.0);
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        let spec = TripletSpec {
            dim: 1,
            drift: vec![0.0],
            gaussian: vec![vec![0.0]],
            jumps: vec![LevyMeasureComponent::stable(2.5, 1.0)],
        };
        let err = validate_triplet(&spec).unwrap_err();
        assert!(err.to_string().contains("alpha out of range"), "{err}");
        assert_eq!(err.pointer(), "/jumps/0/alpha");
    }

    #[test]
    fn rejects_bad_atoms_and_asymmetric_gaussian() {
        let t = LevyTriplet::<f64>::new(vec![0.0], vec![vec![0.0]], poisson(0.0, 1.0));
        assert!(matches!(t, Err(LevyError::AtomAtOrigin { .. })));
        let t = LevyTriplet::<f64>::new(vec![0.0], vec![vec![0.0]], poisson(1.0, -1.0));
        assert!(matches!(t, Err(LevyError::NonPositiveMass { .. })));
        let t = LevyTriplet::<f64>::new(vec![0.0, 0.0], vec![vec![1.0, 0.5], vec![0.4, 1.0]], vec![]);
        assert!(matches!(t, Err(LevyError::AsymmetricGaussian { .. })));
        let t = LevyTriplet::<f64>::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![]);
        assert!(matches!(t, Err(LevyError::NotPsd { .. })));
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let q = PsdMatrix::<f64>::new(vec![vec![1.0, 1.0], vec![1.0, 1.0 - 1e-13]]).unwrap();
        assert!(q.min_eigenvalue() >= -1e-15);
    }

    #[test]
    fn moments_of_atoms() {
        let nu = poisson(2.0, 3.0);
        assert_eq!(levy_moment(&nu, &GrowthBound::Power { k: 2 }, 1), 27.0);
        let nu = poisson(0.5, 7.0);
        assert_eq!(levy_moment(&nu, &GrowthBound::Exponential { beta: 4.0 }, 1), 0.0);
        assert_eq!(small_ball_second_moment(&poisson(0.5, 4.0), 1), 1.0);
        assert_eq!(small_ball_second_moment(&poisson(2.0, 1.0), 1), 0.0);
    }

    #[test]
    fn stable_moments() {
        let nu = vec![LevyMeasureComponent::stable(0.5, 1.0)];
        assert!(levy_moment(&nu, &GrowthBound::Exponential { beta: 1.0 }, 1).is_infinite());
        assert!(levy_moment(&nu, &GrowthBound::Power { k: 1 }, 1).is_infinite());
        // ∫_{|y|≥1} |y|^{-1.5} dy = 2 · 2 = 4
        assert!((levy_moment(&nu, &GrowthBound::Power { k: 0 }, 1) - 4.0).abs() < 1e-14);
        let nu = vec![LevyMeasureComponent::stable(1.0, 0.7)];
        assert!((small_ball_second_moment(&nu, 1) - 1.4).abs() < 1e-14);
        // ∫₁^∞ (1+r) r^{-2.5} dr = 1/1.5 + 1/0.5
        let nu = vec![LevyMeasureComponent::stable(1.5, 1.0)];
        let m = levy_moment(&nu, &GrowthBound::Power { k: 1 }, 1);
        assert!((m - 2.0 * (1.0 / 1.5 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn growth_bound_parsing() {
        assert_eq!("exp:3".parse::<GrowthBound<f64>>().unwrap(), GrowthBound::Exponential { beta: 3.0 });
        assert_eq!("pow:2".parse::<GrowthBound<f64>>().unwrap(), GrowthBound::Power { k: 2 });
        assert_eq!("const:0.5".parse::<GrowthBound<f64>>().unwrap(), GrowthBound::Constant { c: 0.5 });
        assert!("const:-1".parse::<GrowthBound<f64>>().is_err());
        assert!("cube:1".parse::<GrowthBound<f64>>().is_err());
    }

    #[test]
    fn radial_mass_matches_quadrature() {
        for dim in 1..=3 {
            for profile in [
                RadialProfile::Power { coef: 2.0, exponent: -1.5 },
                RadialProfile::Exponential { coef: 1.3, rate: 0.7 },
            ] {
                let d = RadialDensity { profile, r_min: 0.2, r_max: 3.0, quadrature: QuadratureSpec::default() };
                let quad: f64 = d.radial_nodes(0.2, 3.0, dim).iter().map(|&(_, w)| w).sum();
                assert!((quad - d.total_mass(dim)).abs() < 1e-10 * quad, "dim {dim}");
                let r = d.inverse_cdf(0.3, dim);
                assert!((d.mass_below(r, dim) / d.total_mass(dim) - 0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_schema_round_trip_and_unknown_fields() {
        let json = r#"{"dim":1,"drift":[0.5],"gaussian":[[1.0]],
            "jumps":[{"type":"atoms","atoms":[{"location":[1.0],"mass":2.0}]},
                     {"type":"stable","alpha":1.5,"scale":1.0},
                     {"type":"radial","profile":{"kind":"power","coef":1.0,"exponent":-2.0},"r_min":0.5,"r_max":2.0}]}"#;
        let t: LevyTriplet<f64> = serde_json::from_str(json).unwrap();
        assert_eq!(t.jumps().len(), 3);
        let back: LevyTriplet<f64> = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"dim":1,"drift":[0.0],"gaussian":[[0.0]],"jumps":[{"type":"stable","alpha":1.0,"scale":1.0,"skew":0.0}]}"#;
        assert!(serde_json::from_str::<LevyTriplet<f64>>(bad).is_err());
        let bad = r#"{"dim":1,"drift":[0.0],"gaussian":[[0.0]],"extra":1}"#;
        assert!(serde_json::from_str::<LevyTriplet<f64>>(bad).is_err());
    }

    #[test]
    fn transform_by_conformal_map() {
        let t = LevyTriplet::<f64>::new(
            vec![0.3, -0.2],
            vec![vec![1.0, 0.2], vec![0.2, 0.5]],
            vec![
                LevyMeasureComponent::atoms(vec![Atom::new(vec![0.5, 0.1], 1.0), Atom::new(vec![2.0, 0.0], 0.5)]),
                LevyMeasureComponent::stable(1.2, 0.3),
            ],
        )
        .unwrap();
        let a = vec![vec![0.0, -2.0], vec![2.0, 0.0]];
        assert!(t.transformed(&a).is_ok());
        let shear = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        assert!(t.transformed(&shear).is_err());
    }
}
