//! Bernstein functions `h(λ) = aλ + ∫(1 − e^{−λs}) π(ds)` on `Re λ ≥ 0`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::levy::{LevyMeasureComponent, RadialDensity};
use crate::error::LevyError;
use crate::quadrature::composite_rule;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar", serialize = "T: Scalar"))]
pub enum BernsteinFunction<T: Scalar> {
    /// `λ^α`, 0 < α < 1
    Power { alpha: T },
    /// `log(1 + λ)`
    Log1p,
    /// `λ / (τ + λ)`
    Resolvent { tau: T },
    /// `1 − e^{−tλ}`
    Semigroup { t: T },
    /// Explicit pair `(a, π)`. Atoms of π sit at `s > 0` (one-dimensional
    /// locations); a radial component is read as the density `p(s)` on
    /// `[r_min, r_max] ⊂ (0, ∞)`.
    General { a: T, pi: Vec<LevyMeasureComponent<T>> },
}

impl<T: Scalar> BernsteinFunction<T> {
    /// `h(λ) = λ`.
    pub fn identity() -> Self {
        Self::General { a: T::one(), pi: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), LevyError> {
        let bad = |msg: String| Err(LevyError::Unsupported(msg));
        match self {
            Self::Power { alpha } if !(*alpha > T::zero() && *alpha < T::one()) => {
                bad(format!("bernstein power needs alpha in (0,1), got {alpha}"))
            }
            Self::Resolvent { tau } if !(*tau > T::zero() && tau.is_finite()) => {
                bad(format!("bernstein resolvent needs tau > 0, got {tau}"))
            }
            Self::Semigroup { t } if !(*t > T::zero() && t.is_finite()) => {
                bad(format!("bernstein semigroup needs t > 0, got {t}"))
            }
            Self::General { a, pi } => {
                if !(*a >= T::zero() && a.is_finite()) {
                    return bad(format!("bernstein linear coefficient must be >= 0, got {a}"));
                }
                for c in pi {
                    match c {
                        LevyMeasureComponent::Atoms(m) => {
                            for atom in &m.atoms {
                                if atom.location.dim() != 1
                                    || !(atom.location[0] > T::zero())
                                    || !(atom.mass > T::zero())
                                    || !atom.location[0].is_finite()
                                    || !atom.mass.is_finite()
                                {
                                    return bad("bernstein atoms need positive 1-D location and mass".into());
                                }
                            }
                        }
                        LevyMeasureComponent::RadialDensity(d) => {
                            if !(d.r_min > T::zero() && d.r_max > d.r_min && d.r_max.is_finite()) {
                                return bad("bernstein density needs 0 < r_min < r_max < inf".into());
                            }
                        }
                        LevyMeasureComponent::IsotropicStable(_) => {
                            return bad("stable components are not supported in a bernstein measure".into())
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Linear coefficient `a = lim h(λ)/λ`.
    pub fn linear_coefficient(&self) -> T {
        match self {
            Self::General { a, .. } => *a,
            _ => T::zero(),
        }
    }

    /// Whether `h` vanishes identically.
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::General { a, pi } if a.is_zero() && pi.is_empty())
    }

    /// Whether `h(λ) = 0` with `Re λ ≥ 0` forces `λ = 0`. Fails exactly when π
    /// is carried by a lattice `sℤ₊` and a = 0, as for `1 − e^{−tλ}`.
    pub fn vanishes_only_at_origin(&self) -> bool {
        match self {
            Self::Semigroup { .. } => false,
            Self::General { a, pi } => {
                if *a > T::zero() {
                    return true;
                }
                if pi.iter().any(|c| !matches!(c, LevyMeasureComponent::Atoms(_))) {
                    return true;
                }
                let locations: Vec<f64> = pi
                    .iter()
                    .flat_map(|c| match c {
                        LevyMeasureComponent::Atoms(m) => m.atoms.iter().map(|a| a.location[0].as_f64()).collect(),
                        _ => Vec::new(),
                    })
                    .collect();
                if locations.is_empty() {
                    return false;
                }
                // atoms at commensurable points share an imaginary-axis zero
                let base = locations[0];
                !locations.iter().all(|&s| {
                    let q = s / base;
                    let r = num_rational::Ratio::<i64>::approximate_float(q);
                    r.map(|r| (*r.numer() as f64 / *r.denom() as f64 - q).abs() < 1e-12 && *r.denom() < 1_000_000)
                        .unwrap_or(false)
                })
            }
            _ => true,
        }
    }

    /// `h(ζ)` for `Re ζ ≥ 0`, principal branches for powers and logarithms.
    pub fn eval(&self, zeta: Complex<T>) -> Complex<T> {
        if zeta.is_zero() {
            return Complex::zero();
        }
        let one = Complex::new(T::one(), T::zero());
        match self {
            Self::Power { alpha } => zeta.powf(*alpha),
            Self::Log1p => (one + zeta).ln(),
            Self::Resolvent { tau } => zeta / (Complex::new(*tau, T::zero()) + zeta),
            Self::Semigroup { t } => one_minus_exp(zeta * *t),
            Self::General { a, pi } => {
                let mut acc = zeta * *a;
                for c in pi {
                    match c {
                        LevyMeasureComponent::Atoms(m) => {
                            for atom in &m.atoms {
                                acc = acc + one_minus_exp(zeta * atom.location[0]) * atom.mass;
                            }
                        }
                        LevyMeasureComponent::RadialDensity(d) => {
                            acc = acc + half_line_integral(d, zeta);
                        }
                        LevyMeasureComponent::IsotropicStable(_) => {}
                    }
                }
                acc
            }
        }
    }

    /// Real restriction `h(λ)`, λ ≥ 0.
    pub fn eval_real(&self, lambda: T) -> T {
        self.eval(Complex::new(lambda, T::zero())).re
    }
}

/// `1 − e^{−z}` without cancellation for small |z|.
fn one_minus_exp<T: Scalar>(z: Complex<T>) -> Complex<T> {
    if z.norm() < T::lit(1e-3) {
        // z − z²/2 + z³/6 − z⁴/24 + z⁵/120
        let mut term = z;
        let mut sum = z;
        for k in 2..=6 {
            term = -term * z / T::lit(k as f64);
            sum = sum + term;
        }
        sum
    } else {
        Complex::new(T::one(), T::zero()) - (-z).exp()
    }
}

fn half_line_integral<T: Scalar>(d: &RadialDensity<T>, zeta: Complex<T>) -> Complex<T> {
    composite_rule(d.r_min, d.r_max, d.quadrature.panels, d.quadrature.nodes)
        .into_iter()
        .map(|(s, w)| one_minus_exp(zeta * s) * (w * d.profile.eval(s)))
        .fold(Complex::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Atom, RadialProfile};

    #[test]
    fn presets() {
        let c = |x: f64| Complex::new(x, 0.0);
        assert!((BernsteinFunction::Power { alpha: 0.5 }.eval(c(4.0)) - c(2.0)).norm() < 1e-15);
        assert!((BernsteinFunction::Resolvent { tau: 1.0 }.eval(c(1.0)) - c(0.5)).norm() < 1e-15);
        assert_eq!(BernsteinFunction::Semigroup { t: 1.0 }.eval(c(0.0)), c(0.0));
        assert!((BernsteinFunction::<f64>::Log1p.eval(c(std::f64::consts::E - 1.0)) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn general_pair_matches_closed_forms() {
        // single atom at t reproduces the semigroup preset
        let g = BernsteinFunction::General {
            a: 0.0,
            pi: vec![LevyMeasureComponent::atoms(vec![Atom::new(vec![0.7], 1.0)])],
        };
        let s = BernsteinFunction::Semigroup { t: 0.7 };
        for z in [Complex::new(0.3, 2.0), Complex::new(5.0, -1.0), Complex::new(1e-5, 1e-5)] {
            assert!((g.eval(z) - s.eval(z)).norm() < 1e-14);
        }
        assert!(!g.vanishes_only_at_origin());
        // ∫(1 − e^{−λs}) e^{−s} ds = λ/(1+λ)
        let mut d = LevyMeasureComponent::radial(RadialProfile::Exponential { coef: 1.0, rate: 1.0 }, 1e-9, 60.0);
        if let LevyMeasureComponent::RadialDensity(r) = &mut d {
            r.quadrature.panels = 256;
        }
        let g = BernsteinFunction::General { a: 0.0, pi: vec![d] };
        let r = BernsteinFunction::Resolvent { tau: 1.0 };
        let z = Complex::new(0.8, 0.4);
        assert!((g.eval(z) - r.eval(z)).norm() < 1e-9);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn validation() {
        assert!(BernsteinFunction::Power { alpha: 1.2 }.validate().is_err());
        assert!(BernsteinFunction::Resolvent { tau: 0.0 }.validate().is_err());
        assert!(BernsteinFunction::<f64>::identity().validate().is_ok());
        let bad = BernsteinFunction::General { a: 0.0, pi: vec![LevyMeasureComponent::stable(0.5, 1.0)] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn preset_json_shape() {
        let h: BernsteinFunction<f64> = serde_json::from_str(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert_eq!(h, BernsteinFunction::Power { alpha: 0.5 });
        let h: BernsteinFunction<f64> = serde_json::from_str(r#"{"kind":"log1p"}"#).unwrap();
        assert_eq!(h, BernsteinFunction::Log1p);
        assert!(serde_json::from_str::<BernsteinFunction<f64>>(r#"{"kind":"resolvent","tau":1,"x":2}"#).is_err());
    }
}
