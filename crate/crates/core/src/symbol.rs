//! Characteristic exponents
//! `ψ(ξ) = −i b·ξ + ½ Qξ·ξ + ∫(1 − e^{iξ·x} + iξ·x 1_{|x|<1}) ν(dx)`
//! and their extension to the strip `ξ − iη`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinFunction;
use crate::error::DomainError;
use crate::levy::{directional_exponential_moment, LevyMeasureComponent, LevyTriplet, RadialDensity};
use crate::scalar::{dot, norm, Scalar};

/// An evaluatable characteristic exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub enum Symbol<T: Scalar> {
    Triplet { triplet: LevyTriplet<T> },
    /// `h ∘ ψ`
    Subordinated { h: BernsteinFunction<T>, inner: Box<Symbol<T>> },
    /// `conj ψ`, the symbol of `−X`
    Conjugated { inner: Box<Symbol<T>> },
}

/// Argument `ξ − iη` in the complex strip.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStripArg<T> {
    pub xi: Vec<T>,
    pub eta: Vec<T>,
}

impl<T: Scalar> ComplexStripArg<T> {
    pub fn new(xi: Vec<T>, eta: Vec<T>) -> Self {
        Self { xi, eta }
    }

    /// `−iη`
    pub fn imaginary(eta: Vec<T>) -> Self {
        Self { xi: vec![T::zero(); eta.len()], eta }
    }
}

impl<T: Scalar> From<LevyTriplet<T>> for Symbol<T> {
    fn from(triplet: LevyTriplet<T>) -> Self {
        Symbol::Triplet { triplet }
    }
}

impl<T: Scalar> Symbol<T> {
    pub fn dim(&self) -> usize {
        match self {
            Symbol::Triplet { triplet } => triplet.dim(),
            Symbol::Subordinated { inner, .. } | Symbol::Conjugated { inner } => inner.dim(),
        }
    }

    /// The innermost triplet.
    pub fn base_triplet(&self) -> &LevyTriplet<T> {
        match self {
            Symbol::Triplet { triplet } => triplet,
            Symbol::Subordinated { inner, .. } | Symbol::Conjugated { inner } => inner.base_triplet(),
        }
    }

    pub fn as_triplet(&self) -> Option<&LevyTriplet<T>> {
        match self {
            Symbol::Triplet { triplet } => Some(triplet),
            _ => None,
        }
    }

    /// Whether every Bernstein layer vanishes only at the origin, so that the
    /// zero set equals that of the base triplet.
    pub fn preserves_zero_set(&self) -> bool {
        match self {
            Symbol::Triplet { .. } => true,
            Symbol::Conjugated { inner } => inner.preserves_zero_set(),
            Symbol::Subordinated { h, inner } => h.vanishes_only_at_origin() && inner.preserves_zero_set(),
        }
    }

    /// Whether some layer is an identically vanishing Bernstein function.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            Symbol::Triplet { .. } => false,
            Symbol::Conjugated { inner } => inner.is_identically_zero(),
            Symbol::Subordinated { h, inner } => h.is_zero() || inner.is_identically_zero(),
        }
    }

    /// Same symbol tree with large atoms of the base triplet removed.
    pub fn truncated(&self, radius: T) -> Self {
        match self {
            Symbol::Triplet { triplet } => Symbol::Triplet { triplet: triplet.truncated(radius) },
            Symbol::Subordinated { h, inner } => {
                Symbol::Subordinated { h: h.clone(), inner: Box::new(inner.truncated(radius)) }
            }
            Symbol::Conjugated { inner } => Symbol::Conjugated { inner: Box::new(inner.truncated(radius)) },
        }
    }

    pub fn eval(&self, xi: &[T]) -> Complex<T> {
        eval_psi(self, xi)
    }
}

/// `ψ(ξ)` for real ξ.
pub fn eval_psi<T: Scalar>(s: &Symbol<T>, xi: &[T]) -> Complex<T> {
    debug_assert_eq!(xi.len(), s.dim());
    match s {
        Symbol::Triplet { triplet } => triplet_symbol(triplet, xi),
        Symbol::Subordinated { h, inner } => h.eval(eval_psi(inner, xi)),
        Symbol::Conjugated { inner } => eval_psi(inner, xi).conj(),
    }
}

/// `ψ(ξ − iη)` on the strip where the directional exponential moment is finite.
pub fn eval_psi_complex<T: Scalar>(s: &Symbol<T>, arg: &ComplexStripArg<T>) -> Result<Complex<T>, DomainError> {
    if arg.xi.len() != s.dim() || arg.eta.len() != s.dim() {
        return Err(DomainError::new("argument dimension does not match the symbol"));
    }
    match s {
        Symbol::Triplet { triplet } => triplet_symbol_complex(triplet, &arg.xi, &arg.eta),
        Symbol::Conjugated { inner } => {
            let flipped = ComplexStripArg {
                xi: arg.xi.iter().map(|&v| -v).collect(),
                eta: arg.eta.iter().map(|&v| -v).collect(),
            };
            eval_psi_complex(inner, &flipped)
        }
        Symbol::Subordinated { h, inner } => {
            let z = eval_psi_complex(inner, arg)?;
            if z.re < T::zero() {
                return Err(DomainError::new(format!(
                    "inner symbol has negative real part {} at this point; the Bernstein function is not extended there",
                    z.re
                )));
            }
            Ok(h.eval(z))
        }
    }
}

/// `h ∘ s`, evaluated lazily.
pub fn subordinate<T: Scalar>(h: BernsteinFunction<T>, s: Symbol<T>) -> Symbol<T> {
    Symbol::Subordinated { h, inner: Box::new(s) }
}

/// Symbol of the dual process: `conj ψ`. Triplet-backed symbols are reflected
/// at the triplet level, Bernstein layers commute with conjugation, and a
/// conjugation wrapper is unwrapped.
pub fn adjoint<T: Scalar>(s: &Symbol<T>) -> Symbol<T> {
    match s {
        Symbol::Triplet { triplet } => Symbol::Triplet { triplet: triplet.reflected() },
        Symbol::Conjugated { inner } => (**inner).clone(),
        Symbol::Subordinated { h, inner } => Symbol::Subordinated { h: h.clone(), inner: Box::new(adjoint(inner)) },
    }
}

fn two_sin_sq_half<T: Scalar>(theta: T) -> T {
    let s = (theta / T::lit(2.0)).sin();
    T::lit(2.0) * s * s
}

fn triplet_symbol<T: Scalar>(t: &LevyTriplet<T>, xi: &[T]) -> Complex<T> {
    let n = t.dim();
    let mut re = t.gaussian().bilinear(xi, xi) / T::lit(2.0);
    let mut im = -dot(t.drift(), xi);
    for c in t.jumps() {
        match c {
            LevyMeasureComponent::Atoms(m) => {
                for a in &m.atoms {
                    let theta = dot(&a.location, xi);
                    re = re + a.mass * two_sin_sq_half(theta);
                    let comp = if a.location.norm() < T::one() { theta } else { T::zero() };
                    im = im + a.mass * (comp - theta.sin());
                }
            }
            LevyMeasureComponent::IsotropicStable(s) => {
                let r = norm(xi);
                if r > T::zero() {
                    re = re + s.symbol_coefficient(n) * r.powf(s.alpha);
                }
            }
            LevyMeasureComponent::RadialDensity(d) => {
                re = re + radial_symbol(d, norm(xi), n);
            }
        }
    }
    Complex::new(re, im)
}

/// `∫(1 − cos ξ·x) ν(dx)` for a radial density: the spherical average of
/// `1 − e^{iξ·x}` depends on `s = |ξ| r` only.
fn radial_symbol<T: Scalar>(d: &RadialDensity<T>, xi_norm: T, dim: usize) -> T {
    if xi_norm.is_zero() {
        return T::zero();
    }
    d.radial_nodes(d.r_min, d.r_max, dim)
        .into_iter()
        .map(|(r, w)| w * one_minus_spherical_cos(xi_norm * r, dim))
        .fold(T::zero(), |a, b| a + b)
}

/// `1 − K_n(s)` with `K_1 = cos`, `K_2 = J₀`, `K_3 = sin(s)/s`.
fn one_minus_spherical_cos<T: Scalar>(s: T, dim: usize) -> T {
    match dim {
        1 => two_sin_sq_half(s),
        2 => {
            // 1 − J₀(s) = (1/π)∫₀^π 2 sin²(s cos θ / 2) dθ, trapezoid on a periodic integrand
            let m = 24 + (1.5 * s.as_f64()).ceil() as usize;
            let mut acc = T::zero();
            for j in 0..m {
                let theta = T::PI() * (T::lit(j as f64) + T::lit(0.5)) / T::lit(m as f64);
                acc = acc + two_sin_sq_half(s * theta.cos());
            }
            acc / T::lit(m as f64)
        }
        _ => {
            if s < T::lit(1e-2) {
                let s2 = s * s;
                s2 / T::lit(6.0) * (T::one() - s2 / T::lit(20.0) * (T::one() - s2 / T::lit(42.0)))
            } else {
                T::one() - s.sin() / s
            }
        }
    }
}

/// Complex-argument `K_n(z)`, even and entire in z.
fn spherical_cos_complex<T: Scalar>(z: Complex<T>, dim: usize) -> Complex<T> {
    match dim {
        1 => z.cos(),
        2 => {
            let m = 24 + (1.5 * z.norm().as_f64()).ceil() as usize;
            let mut acc = Complex::zero();
            for j in 0..m {
                let theta = T::PI() * (T::lit(j as f64) + T::lit(0.5)) / T::lit(m as f64);
                acc = acc + (z * theta.cos()).cos();
            }
            acc / T::lit(m as f64)
        }
        _ => {
            if z.norm() < T::lit(1e-2) {
                let z2 = z * z;
                Complex::new(T::one(), T::zero()) - z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
            } else {
                z.sin() / z
            }
        }
    }
}

fn triplet_symbol_complex<T: Scalar>(t: &LevyTriplet<T>, xi: &[T], eta: &[T]) -> Result<Complex<T>, DomainError> {
    if eta.iter().all(|v| v.is_zero()) {
        return Ok(triplet_symbol(t, xi));
    }
    let n = t.dim();
    let moment = directional_exponential_moment(t.jumps(), eta, n);
    if !moment.is_finite() {
        return Err(DomainError::new("exponential moment along eta is infinite; eta lies outside the strip region"));
    }
    let q = t.gaussian();
    let b = t.drift();
    let mut re = -dot(b, eta) + q.bilinear(xi, xi) / T::lit(2.0) - q.bilinear(eta, eta) / T::lit(2.0);
    let mut im = -dot(b, xi) - q.bilinear(xi, eta);
    for c in t.jumps() {
        match c {
            LevyMeasureComponent::Atoms(m) => {
                for a in &m.atoms {
                    let tx = dot(&a.location, xi);
                    let ex = dot(&a.location, eta);
                    let small = a.location.norm() < T::one();
                    let grow = ex.exp();
                    // 1 − cos(tx) e^{ex} + ex·1, arranged to keep precision near 0
                    let one_minus = -ex.exp_m1() + grow * two_sin_sq_half(tx);
                    let comp_re = if small { ex } else { T::zero() };
                    let comp_im = if small { tx } else { T::zero() };
                    re = re + a.mass * (one_minus + comp_re);
                    im = im + a.mass * (comp_im - tx.sin() * grow);
                }
            }
            LevyMeasureComponent::IsotropicStable(_) => unreachable!("moment is infinite for stable parts"),
            LevyMeasureComponent::RadialDensity(d) => {
                // average of e^{i(ξ − iη)·x} over |x| = r equals K_n(r √(ζ·ζ)), ζ·ζ = |ξ|² − |η|² − 2iξ·η
                let zz = Complex::new(dot(xi, xi) - dot(eta, eta), -T::lit(2.0) * dot(xi, eta));
                let root = zz.sqrt();
                let one = Complex::new(T::one(), T::zero());
                for (r, w) in d.radial_nodes(d.r_min, d.r_max, n) {
                    let v = (one - spherical_cos_complex(root * r, n)) * w;
                    re = re + v.re;
                    im = im + v.im;
                }
            }
        }
    }
    let out = Complex::new(re, im);
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(DomainError::new("symbol overflows at this strip point"));
    }
    Ok(out)
}
