//! Liouville and strong-Liouville properties of Lévy generators.
//!
//! A Lévy triplet `(b, Q, ν)` determines the characteristic exponent ψ and
//! the generator `L_ψ`. Bounded solutions of `L_ψ f = 0` are constant exactly
//! when `{ψ = 0} = {0}`; positive solutions below a submultiplicative bound
//! additionally need `{η : ψ(−iη) = 0} = {0}`. The crate evaluates ψ, applies
//! `L_ψ`, `P_t` and resolvents spectrally, by quadrature or by Monte Carlo,
//! and searches both zero sets to produce verdicts with verified witnesses.
//!
//! Numerical types are generic over [`Scalar`] (`f32` or `f64`); the zero-set
//! machinery in [`structure`] is `f64` only. The aliases below fix `f64`.

pub mod bernstein;
pub mod error;
pub mod generator;
pub mod levy;
pub mod quadrature;
pub mod scalar;
pub mod structure;
pub mod symbol;

pub use bernstein::BernsteinFunction;
pub use error::{DomainError, GeneratorError, LevyError, StructureError};
pub use levy::{
    directional_exponential_moment, levy_moment, small_ball_second_moment, validate_triplet, Atom, AtomicMeasure,
    GrowthBound, IsotropicStable, LevyMeasureComponent, LevyTriplet, PsdMatrix, RadialDensity, RadialProfile,
    RealVector, TripletSpec, ValidationReport,
};
pub use scalar::Scalar;
pub use symbol::{adjoint, eval_psi, eval_psi_complex, subordinate, ComplexStripArg, Symbol};

pub type Triplet = LevyTriplet<f64>;
pub type Psi = Symbol<f64>;
pub type Growth = GrowthBound<f64>;
pub type Bernstein = BernsteinFunction<f64>;
pub type Component = LevyMeasureComponent<f64>;
pub type Grid = generator::TorusGrid<f64>;
pub type GridFn = generator::GridFunction<f64>;
