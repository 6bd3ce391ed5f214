//! Quadrature rules: composite Gauss–Legendre on bounded intervals, adaptive
//! Gauss–Kronrod (7/15) for integrands with endpoint singularities, and
//! symmetric direction rules on the unit sphere in dimensions 1–3.

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex;
use num_traits::Float;

use crate::scalar::Scalar;

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(nodes: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(nodes.max(1)).expect("nonzero");
    let mut pairs = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Composite Gauss–Legendre rule on `[a, b]` with equal panels, returned as
/// `(node, weight)` pairs.
pub fn composite_rule<T: Scalar>(a: T, b: T, panels: usize, nodes: usize) -> Vec<(T, T)> {
    let base = gauss_legendre(nodes);
    let panels = panels.max(1);
    let width = (b - a) / T::lit(panels as f64);
    let half = width / T::lit(2.0);
    let mut out = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let mid = a + width * T::lit(p as f64) + half;
        for &(x, w) in &base {
            out.push((mid + half * T::lit(x), half * T::lit(w)));
        }
    }
    out
}

// Kronrod 15-point nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome<T> {
    pub value: Complex<T>,
    pub error: T,
    pub converged: bool,
    pub evaluations: usize,
}

fn gk15<T: Scalar, F: FnMut(T) -> Complex<T>>(f: &mut F, a: T, b: T) -> (Complex<T>, T) {
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let sum = f(center - dx) + f(center + dx);
        kronrod = kronrod + sum * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + sum * T::lit(WG[j / 2]);
        }
    }
    let err = (kronrod - gauss).norm() * Float::abs(half);
    (kronrod * half, err)
}

struct Segment<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod integration of a complex-valued integrand
/// on a finite interval. The segment with the largest error estimate is
/// bisected until the summed estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk15<T, F>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_segments: usize,
) -> QuadOutcome<T>
where
    T: Scalar,
    F: FnMut(T) -> Complex<T>,
{
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 15;
    loop {
        let target = Float::max(abs_tol, rel_tol * total.norm());
        if total_err <= target {
            return QuadOutcome { value: total, error: total_err, converged: true, evaluations };
        }
        if heap.len() >= max_segments {
            return QuadOutcome { value: total, error: total_err, converged: false, evaluations };
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = (worst.a + worst.b) / T::lit(2.0);
        let (lv, le) = gk15(&mut f, worst.a, mid);
        let (rv, re) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + lv + rv;
        total_err = total_err - worst.error + le + re;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
    }
}

/// Symmetric direction rule on the unit sphere S^{n-1}; weights sum to one.
#[derive(Clone, Debug)]
pub struct SphereRule<T> {
    pub directions: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> SphereRule<T> {
    /// `resolution` controls the angular node count for n ≥ 2: equally spaced
    /// angles on the circle, Gauss–Legendre in the polar cosine times equally
    /// spaced azimuths on the 2-sphere. Node counts are rounded up to even so
    /// that every direction comes with its antipode.
    pub fn new(dim: usize, resolution: usize) -> Self {
        let m = (resolution.max(4) + 1) / 2 * 2;
        match dim {
            1 => Self {
                directions: vec![vec![T::one()], vec![-T::one()]],
                weights: vec![T::lit(0.5), T::lit(0.5)],
            },
            2 => {
                let mut directions = Vec::with_capacity(m);
                for j in 0..m {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    directions.push(vec![T::lit(theta.cos()), T::lit(theta.sin())]);
                }
                Self { directions, weights: vec![T::lit(1.0 / m as f64); m] }
            }
            3 => {
                let polar = gauss_legendre(m / 2 + 1);
                let mut directions = Vec::new();
                let mut weights = Vec::new();
                for &(z, w) in &polar {
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    for j in 0..m {
                        let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                        directions.push(vec![
                            T::lit(rho * phi.cos()),
                            T::lit(rho * phi.sin()),
                            T::lit(z),
                        ]);
                        weights.push(T::lit(0.5 * w / m as f64));
                    }
                }
                Self { directions, weights }
            }
            _ => panic!("sphere rules are provided for dimensions 1 to 3, got {dim}"),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_integrates_cubic_exactly() {
        let rule = composite_rule(0.0_f64, 3.0, 4, 3);
        let v: f64 = rule.iter().map(|&(x, w)| w * x * x * x).sum();
        assert!((v - 81.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_integrable_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let out = adaptive_gk15(
            |x: f64| Complex::new(x.powf(-0.5), 0.0),
            0.0,
            1.0,
            1e-10,
            1e-12,
            500,
        );
        assert!(out.converged);
        assert!((out.value.re - 2.0).abs() < 1e-8, "{:?}", out.value);
    }

    #[test]
    fn sphere_rule_moments() {
        for dim in 1..=3 {
            let rule = SphereRule::<f64>::new(dim, 24);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
            // E[ω₁²] = 1/n, E[ω₁] = 0
            let second: f64 = rule
                .directions
                .iter()
                .zip(&rule.weights)
                .map(|(d, w)| w * d[0] * d[0])
                .sum();
            let first: f64 = rule.directions.iter().zip(&rule.weights).map(|(d, w)| w * d[0]).sum();
            assert!((second - 1.0 / dim as f64).abs() < 1e-12, "dim {dim}: {second}");
            assert!(first.abs() < 1e-14);
        }
    }
}
