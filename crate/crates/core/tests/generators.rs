use std::f64::consts::TAU;

use levy_liouville::generator::{
    apply_generator_quadrature, apply_generator_spectral, mc_semigroup, sample_paths, semigroup_apply_spectral, MCConfig,
    SmoothFunction,
};
use levy_liouville::{Atom, Component, Grid, GridFn, Psi, Triplet};
use num_complex::Complex;

/// `Σ_k exp(−(x − c − 2πk)² / 2σ²)` with closed-form derivatives.
struct Bump {
    centre: f64,
    sigma: f64,
}

impl Bump {
    fn terms(&self, x: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        (-4..=4).map(move |k| {
            let u = x - self.centre - TAU * k as f64;
            (u, (-u * u / (2.0 * self.sigma * self.sigma)).exp())
        })
    }
}

impl SmoothFunction<f64> for Bump {
    fn value(&self, x: &[f64]) -> Complex<f64> {
        Complex::new(self.terms(x[0]).map(|(_, e)| e).sum(), 0.0)
    }

    fn gradient(&self, x: &[f64]) -> Vec<Complex<f64>> {
        let s2 = self.sigma * self.sigma;
        vec![Complex::new(self.terms(x[0]).map(|(u, e)| -u / s2 * e).sum(), 0.0)]
    }

    fn hessian(&self, x: &[f64]) -> Vec<Vec<Complex<f64>>> {
        let s2 = self.sigma * self.sigma;
        vec![vec![Complex::new(self.terms(x[0]).map(|(u, e)| (u * u / s2 - 1.0) / s2 * e).sum(), 0.0)]]
    }
}

fn cp(drift: f64, atoms: &[(f64, f64)]) -> Triplet {
    Triplet::compound_poisson(atoms.iter().map(|&(x, m)| Atom::new(vec![x], m)).collect())
        .unwrap()
        .with_drift(vec![drift])
        .unwrap()
}

#[test]
fn spectral_and_quadrature_generators_agree() {
    let triplets = vec![
        cp(0.0, &[(1.0, 1.0)]),
        cp(0.0, &[(2.0, 1.0), (3.0, 1.0)]),
        cp(0.5, &[(0.5, 2.0), (-1.5, 0.7)]),
        cp(-1.0, &[(0.25, 1.0), (0.75, 0.5), (-2.5, 0.3)]),
        cp(0.0, &[(TAU / 3.0, 1.0), (-0.1, 4.0)]),
    ];
    let bumps = [(0.0, 0.5), (1.0, 0.4), (-2.0, 0.6), (3.0, 0.3), (0.5, 0.8)];
    let grid = Grid::cubic(1, TAU, 2048).unwrap();
    for t in &triplets {
        let s: Psi = t.clone().into();
        for &(centre, sigma) in &bumps {
            let f = Bump { centre, sigma };
            let sampled = GridFn::from_fn(grid.clone(), |x| f.value(x));
            let spectral = apply_generator_spectral(&s, &sampled);
            let mut worst: f64 = 0.0;
            for k in 0..grid.len() {
                let x = grid.point(k);
                let q = apply_generator_quadrature(t, &f, &x).unwrap();
                worst = worst.max((q - spectral.values[k]).norm());
            }
            assert!(worst < 1e-6, "{t:?} bump ({centre}, {sigma}): {worst}");
        }
    }
}

#[test]
fn gaussian_part_agrees_with_closed_form_hessian() {
    let t = Triplet::new(vec![0.3], vec![vec![0.8]], vec![]).unwrap();
    let s: Psi = t.clone().into();
    let grid = Grid::cubic(1, TAU, 256).unwrap();
    let f = Bump { centre: 0.2, sigma: 0.5 };
    let spectral = apply_generator_spectral(&s, &GridFn::from_fn(grid.clone(), |x| f.value(x)));
    for k in (0..grid.len()).step_by(7) {
        let q = apply_generator_quadrature(&t, &f, &grid.point(k)).unwrap();
        assert!((q - spectral.values[k]).norm() < 1e-9);
    }
}

#[test]
fn semigroup_property_on_the_torus() {
    let t = cp(0.3, &[(0.5, 1.0), (-2.0, 0.4)]).with_component(Component::stable(1.2, 0.5)).unwrap();
    let s: Psi = t.into();
    let grid = Grid::cubic(1, TAU, 512).unwrap();
    let f = GridFn::from_real_fn(grid, |x| (-(x[0] - 1.0).powi(2)).exp() + x[0].sin());
    let two_step = semigroup_apply_spectral(&s, 0.4, &semigroup_apply_spectral(&s, 0.7, &f));
    let one_step = semigroup_apply_spectral(&s, 1.1, &f);
    assert!(two_step.max_abs_diff(&one_step) < 1e-12);
    assert!(semigroup_apply_spectral(&s, 0.0, &f).max_abs_diff(&f) < 1e-14);
}

#[test]
fn pure_drift_paths_are_exact() {
    let t = Triplet::new(vec![0.75, -2.0], vec![vec![0.0; 2]; 2], vec![]).unwrap();
    for p in sample_paths(&t, 2.0, &MCConfig::new(9, 1000, 4)).unwrap() {
        assert_eq!(p.value, vec![1.5, -4.0]);
    }
}

#[test]
fn poisson_mean_and_brownian_variance() {
    let cfg = MCConfig::new(42, 1_000_000, 8);
    let poisson = sample_paths(&cp(0.0, &[(1.0, 1.0)]), 1.0, &cfg).unwrap();
    let n = poisson.len() as f64;
    let mean = poisson.iter().map(|p| p.value[0]).sum::<f64>() / n;
    // X_1 ~ Poisson(1): mean 1, variance 1
    assert!((mean - 1.0).abs() < 4.0 / n.sqrt(), "{mean}");

    let bm = sample_paths(&Triplet::brownian_motion(1), 1.0, &cfg).unwrap();
    let m = bm.iter().map(|p| p.value[0]).sum::<f64>() / n;
    let var = bm.iter().map(|p| (p.value[0] - m).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((var - 1.0).abs() < 0.01, "{var}");
}

#[test]
fn worker_count_does_not_change_results() {
    let t = cp(0.2, &[(0.5, 1.0), (-1.0, 2.0)]).with_component(Component::stable(1.5, 0.3)).unwrap();
    let f = |x: &[f64]| x[0].cos();
    let runs: Vec<_> = [1, 4, 8]
        .iter()
        .map(|&w| mc_semigroup(&t, 1.0, &f, &[0.1], &MCConfig::new(7, 20_000, w), None).unwrap())
        .collect();
    assert!(runs.windows(2).all(|r| r[0].estimate.to_bits() == r[1].estimate.to_bits()));
    assert!(runs.windows(2).all(|r| r[0].stderr.to_bits() == r[1].stderr.to_bits()));
}

#[test]
fn monte_carlo_matches_the_characteristic_function() {
    // P_t cos(x) at 0 is Re e^{−tψ(1)}
    let t = cp(0.4, &[(0.5, 1.0), (-2.0, 0.6)]).with_component(Component::stable(0.8, 0.5)).unwrap();
    let s: Psi = t.clone().into();
    let exact = (-s.eval(&[1.0])).exp().re;
    let est = mc_semigroup(&t, 1.0, &|x: &[f64]| x[0].cos(), &[0.0], &MCConfig::new(3, 400_000, 4), None).unwrap();
    assert!((est.estimate - exact).abs() < 4.0 * est.stderr, "{est:?} vs {exact}");
}
