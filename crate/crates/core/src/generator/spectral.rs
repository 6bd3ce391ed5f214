//! Fourier-multiplier operators on torus grids: `L_ψ`, `P_t`, `λR_λ`, `L_ψⁿ`.

use num_complex::Complex;

use crate::generator::grid::GridFunction;
use crate::generator::grid::TorusGrid;
use crate::scalar::Scalar;
use crate::symbol::{eval_psi, Symbol};

/// ψ at every grid frequency, made Hermitian on the grid:
/// `ψ_g(k) = ½(ψ(ξ_k) + conj ψ(ξ_{−k}))`.
///
/// Away from the Nyquist modes this equals ψ exactly; on them it keeps the
/// discrete adjoint of `L_ψ` equal to `L_{ψ̄}` and maps real data to real data.
pub fn grid_symbol<T: Scalar>(s: &Symbol<T>, grid: &TorusGrid<T>) -> Vec<Complex<T>> {
    let raw: Vec<Complex<T>> = (0..grid.len()).map(|k| eval_psi(s, &grid.frequency(k))).collect();
    (0..grid.len())
        .map(|k| {
            let m = grid.mirror(k);
            if m == k {
                Complex::new(raw[k].re, T::zero())
            } else if grid.frequency(m).iter().zip(grid.frequency(k)).all(|(a, b)| *a == -b) {
                raw[k]
            } else {
                (raw[k] + raw[m].conj()) * T::lit(0.5)
            }
        })
        .collect()
}

/// Applies the multiplier `m(ψ_g(k))` to `f`.
pub fn apply_multiplier<T: Scalar>(
    s: &Symbol<T>,
    f: &GridFunction<T>,
    m: impl Fn(Complex<T>) -> Complex<T>,
) -> GridFunction<T> {
    let psi = grid_symbol(s, &f.grid);
    let mut c = f.coefficients();
    for (ck, p) in c.iter_mut().zip(psi) {
        *ck = *ck * m(p);
    }
    GridFunction::from_coefficients(f.grid.clone(), c)
}

/// `L_ψ f`: multiplier `−ψ(ξ_k)`.
pub fn apply_generator_spectral<T: Scalar>(s: &Symbol<T>, f: &GridFunction<T>) -> GridFunction<T> {
    apply_multiplier(s, f, |p| -p)
}

/// `P_t f`: multiplier `e^{−tψ(ξ_k)}`.
pub fn semigroup_apply_spectral<T: Scalar>(s: &Symbol<T>, t: T, f: &GridFunction<T>) -> GridFunction<T> {
    assert!(t >= T::zero(), "semigroup time must be nonnegative");
    apply_multiplier(s, f, |p| (-p * t).exp())
}

/// `λR_λ f`: multiplier `λ / (λ + ψ(ξ_k))`.
pub fn resolvent_apply<T: Scalar>(s: &Symbol<T>, lambda: T, f: &GridFunction<T>) -> GridFunction<T> {
    assert!(lambda > T::zero(), "resolvent parameter must be positive");
    let l = Complex::new(lambda, T::zero());
    apply_multiplier(s, f, |p| l / (l + p))
}

/// `L_ψⁿ f`: multiplier `(−ψ(ξ_k))ⁿ`, formed by repeated multiplication.
pub fn power_generator_apply<T: Scalar>(s: &Symbol<T>, n: u32, f: &GridFunction<T>) -> GridFunction<T> {
    assert!(n >= 1, "generator power must be at least 1");
    apply_multiplier(s, f, |p| {
        let base = -p;
        let mut acc = base;
        for _ in 1..n {
            acc = acc * base;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Atom, LevyTriplet};
    use std::f64::consts::TAU;

    fn poisson() -> Symbol<f64> {
        LevyTriplet::compound_poisson(vec![Atom::new(vec![1.0], 1.0)]).unwrap().into()
    }

    #[test]
    fn plane_waves_are_eigenfunctions() {
        let s = poisson();
        let grid = TorusGrid::cubic(1, 4.0, 64).unwrap();
        let gamma = [TAU * 3.0 / 4.0];
        let f = GridFunction::plane_wave(grid, &gamma);
        let lf = apply_generator_spectral(&s, &f);
        let want = f.scaled(-s.eval(&gamma));
        assert!(lf.max_abs_diff(&want) < 1e-12);
        let pf = semigroup_apply_spectral(&s, 0.7, &f);
        assert!(pf.max_abs_diff(&f.scaled((-s.eval(&gamma) * 0.7).exp())) < 1e-12);
    }

    #[test]
    fn periodic_fixed_point() {
        let s = poisson();
        let grid = TorusGrid::cubic(1, 1.0, 32).unwrap();
        let f = GridFunction::from_real_fn(grid, |x| (TAU * x[0]).cos());
        for t in [1.0, 2f64.sqrt()] {
            assert!(semigroup_apply_spectral(&s, t, &f).max_abs_diff(&f) < 1e-10);
        }
        assert!(resolvent_apply(&s, 1.0, &f).max_abs_diff(&f) < 1e-10);
        assert!(power_generator_apply(&s, 3, &f).sup_norm() < 1e-10);
    }

    #[test]
    fn power_one_is_the_generator() {
        let s = poisson();
        let grid = TorusGrid::cubic(1, 5.0, 64).unwrap();
        let f = GridFunction::from_real_fn(grid, |x: &[f64]| (-(x[0] - 2.5).powi(2)).exp());
        assert_eq!(power_generator_apply(&s, 1, &f), apply_generator_spectral(&s, &f));
    }
}
