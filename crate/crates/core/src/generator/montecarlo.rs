//! Exact-in-distribution sampling of `X_t` for finite-activity jump parts
//! plus Gaussian and stable components, and Monte Carlo semigroup estimates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;
use crate::levy::{levy_moment, GrowthBound, LevyMeasureComponent, LevyTriplet, RadialDensity};
use crate::scalar::{pairwise_sum, Scalar};

/// Seed, path count and worker count. Results depend on `(seed, paths)` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MCConfig {
    pub seed: u64,
    pub paths: usize,
    pub workers: usize,
}

impl MCConfig {
    pub fn new(seed: u64, paths: usize, workers: usize) -> Self {
        Self { seed, paths, workers }
    }

    fn check(&self) -> Result<(), GeneratorError> {
        if self.paths == 0 || self.workers == 0 {
            return Err(GeneratorError::Sampling("paths and workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Independent stream for path `index`.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

impl Default for MCConfig {
    fn default() -> Self {
        Self { seed: 0, paths: 100_000, workers: 1 }
    }
}

/// Terminal value `X_t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePath<T> {
    pub value: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate<T> {
    pub estimate: T,
    pub stderr: T,
    pub paths: usize,
    pub seed: u64,
}

enum JumpLaw {
    Atoms { cumulative: Vec<f64>, locations: Vec<Vec<f64>> },
    Radial(RadialDensity<f64>),
}

struct PoissonPart {
    rate: f64,
    law: JumpLaw,
}

enum StablePart {
    /// Chambers–Mallows–Stuck, `E e^{iξS} = e^{−c|ξ|^α}` per unit time
    OneDimensional { alpha: f64, coefficient: f64 },
    /// `√(2A) G` with `A` positive α/2-stable (Kanter)
    SubGaussian { alpha: f64, coefficient: f64 },
}

/// Precomputed sampler for a triplet.
pub struct LevySampler {
    dim: usize,
    drift: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    poisson: Vec<PoissonPart>,
    stable: Vec<StablePart>,
}

impl LevySampler {
    pub fn new<T: Scalar>(t: &LevyTriplet<T>) -> Result<Self, GeneratorError> {
        let n = t.dim();
        let mut drift: Vec<f64> = t.drift().iter().map(|v| v.as_f64()).collect();
        let sigma: Vec<Vec<f64>> =
            t.gaussian().sqrt().rows().into_iter().map(|r| r.into_iter().map(|v| v.as_f64()).collect()).collect();
        let mut poisson = Vec::new();
        let mut stable = Vec::new();
        for c in t.jumps() {
            match c {
                LevyMeasureComponent::Atoms(m) => {
                    let mut cumulative = Vec::with_capacity(m.atoms.len());
                    let mut locations = Vec::with_capacity(m.atoms.len());
                    let mut total = 0.0;
                    for a in &m.atoms {
                        let loc: Vec<f64> = a.location.iter().map(|v| v.as_f64()).collect();
                        let mass = a.mass.as_f64();
                        // small atoms carry the compensator −t ∫_{|x|<1} x ν(dx)
                        if a.location.norm() < T::one() {
                            for (d, y) in drift.iter_mut().zip(&loc) {
                                *d -= mass * y;
                            }
                        }
                        total += mass;
                        cumulative.push(total);
                        locations.push(loc);
                    }
                    if total > 0.0 {
                        poisson.push(PoissonPart { rate: total, law: JumpLaw::Atoms { cumulative, locations } });
                    }
                }
                LevyMeasureComponent::RadialDensity(d) => {
                    let d64 = RadialDensity {
                        profile: match d.profile {
                            crate::levy::RadialProfile::Power { coef, exponent } => {
                                crate::levy::RadialProfile::Power { coef: coef.as_f64(), exponent: exponent.as_f64() }
                            }
                            crate::levy::RadialProfile::Exponential { coef, rate } => {
                                crate::levy::RadialProfile::Exponential { coef: coef.as_f64(), rate: rate.as_f64() }
                            }
                        },
                        r_min: d.r_min.as_f64(),
                        r_max: d.r_max.as_f64(),
                        quadrature: d.quadrature,
                    };
                    if !(d64.r_min > 0.0) {
                        return Err(GeneratorError::Sampling("radial densities need r_min > 0".into()));
                    }
                    let rate = d64.total_mass(n);
                    poisson.push(PoissonPart { rate, law: JumpLaw::Radial(d64) });
                }
                LevyMeasureComponent::IsotropicStable(s) => {
                    let coefficient = s.symbol_coefficient(n).as_f64();
                    let alpha = s.alpha.as_f64();
                    stable.push(if n == 1 {
                        StablePart::OneDimensional { alpha, coefficient }
                    } else {
                        StablePart::SubGaussian { alpha, coefficient }
                    });
                }
            }
        }
        Ok(Self { dim: n, drift, sigma, poisson, stable })
    }

    /// One jump from the normalized finite-activity part of ν, or `None` when
    /// that part is empty.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        let total: f64 = self.poisson.iter().map(|p| p.rate).sum();
        if !(total > 0.0) {
            return None;
        }
        let mut u = rng.random::<f64>() * total;
        let part = self
            .poisson
            .iter()
            .find(|p| {
                u -= p.rate;
                u < 0.0
            })
            .unwrap_or_else(|| self.poisson.last().expect("nonempty"));
        Some(self.draw_jump(part, rng))
    }

    fn draw_jump<R: Rng + ?Sized>(&self, part: &PoissonPart, rng: &mut R) -> Vec<f64> {
        match &part.law {
            JumpLaw::Atoms { cumulative, locations } => {
                let total = *cumulative.last().expect("nonempty");
                let u: f64 = rng.random::<f64>() * total;
                let k = cumulative.partition_point(|&c| c <= u).min(locations.len() - 1);
                locations[k].clone()
            }
            JumpLaw::Radial(d) => {
                let r = d.inverse_cdf(rng.random::<f64>(), self.dim);
                uniform_direction(self.dim, rng).into_iter().map(|o| r * o).collect()
            }
        }
    }

    /// One draw of `X_time`.
    pub fn sample<R: Rng + ?Sized>(&self, time: f64, rng: &mut R) -> Vec<f64> {
        let n = self.dim;
        let mut x: Vec<f64> = self.drift.iter().map(|b| b * time).collect();
        if self.sigma.iter().flatten().any(|&v| v != 0.0) {
            let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            let root = time.sqrt();
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += root * self.sigma[i].iter().zip(&z).map(|(s, z)| s * z).sum::<f64>();
            }
        }
        for part in &self.poisson {
            let mean = part.rate * time;
            let count = if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(rng) as u64
            } else {
                0
            };
            for _ in 0..count {
                let y = self.draw_jump(part, rng);
                for (xi, v) in x.iter_mut().zip(&y) {
                    *xi += v;
                }
            }
        }
        for part in &self.stable {
            match *part {
                StablePart::OneDimensional { alpha, coefficient } => {
                    let scale = (coefficient * time).powf(1.0 / alpha);
                    x[0] += scale * symmetric_stable(alpha, rng);
                }
                StablePart::SubGaussian { alpha, coefficient } => {
                    let a = positive_stable(alpha / 2.0, rng);
                    let scale = (2.0 * a).sqrt() * (coefficient * time).powf(1.0 / alpha);
                    for xi in x.iter_mut() {
                        let g: f64 = StandardNormal.sample(rng);
                        *xi += scale * g;
                    }
                }
            }
        }
        x
    }
}

fn uniform_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    if n == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-300 {
            return g.into_iter().map(|v| v / r).collect();
        }
    }
}

/// Symmetric α-stable with `E e^{iξS} = e^{−|ξ|^α}` (Chambers–Mallows–Stuck).
fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((v * (1.0 - alpha)).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Positive β-stable, `E e^{−λA} = e^{−λ^β}`, 0 < β < 1 (Kanter's representation).
fn positive_stable<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u = std::f64::consts::PI * rng.random::<f64>();
    let e: f64 = Exp1.sample(rng);
    let a = ((1.0 - beta) * u).sin() * (beta * u).sin().powf(beta / (1.0 - beta)) / u.sin().powf(1.0 / (1.0 - beta));
    (a / e).powf((1.0 - beta) / beta)
}

/// A single draw of `X_time` from the given stream.
pub fn sample_levy<T: Scalar, R: Rng + ?Sized>(
    t: &LevyTriplet<T>,
    time: T,
    rng: &mut R,
) -> Result<SamplePath<T>, GeneratorError> {
    let sampler = LevySampler::new(t)?;
    Ok(SamplePath { value: sampler.sample(time.as_f64(), rng).into_iter().map(T::lit).collect() })
}

fn run_paths<V: Send>(cfg: &MCConfig, body: impl Fn(usize) -> V + Sync + Send) -> Result<Vec<V>, GeneratorError> {
    cfg.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| GeneratorError::Sampling(e.to_string()))?;
    Ok(pool.install(|| (0..cfg.paths).into_par_iter().map(&body).collect()))
}

/// `cfg.paths` terminal values, path `i` drawn from stream `i`.
pub fn sample_paths<T: Scalar>(
    t: &LevyTriplet<T>,
    time: T,
    cfg: &MCConfig,
) -> Result<Vec<SamplePath<T>>, GeneratorError> {
    let sampler = LevySampler::new(t)?;
    let time = time.as_f64();
    run_paths(cfg, |i| {
        let mut rng = cfg.rng(i);
        SamplePath { value: sampler.sample(time, &mut rng).into_iter().map(T::lit).collect() }
    })
}

/// Monte Carlo estimate of `P_time f(x) = E f(x + X_time)` with its standard
/// error. When a growth bound is declared, its generalized moment is checked
/// before any sampling.
pub fn mc_semigroup<T: Scalar>(
    t: &LevyTriplet<T>,
    time: T,
    f: &(dyn Fn(&[T]) -> T + Sync),
    x: &[T],
    cfg: &MCConfig,
    growth: Option<&GrowthBound<T>>,
) -> Result<MCEstimate<T>, GeneratorError> {
    if let Some(g) = growth {
        if !levy_moment(t.jumps(), g, t.dim()).is_finite() {
            return Err(GeneratorError::GrowthBound);
        }
    }
    let sampler = LevySampler::new(t)?;
    let time = time.as_f64();
    let values: Vec<T> = run_paths(cfg, |i| {
        let mut rng = cfg.rng(i);
        let y: Vec<T> = sampler.sample(time, &mut rng).into_iter().zip(x).map(|(v, &xi)| xi + T::lit(v)).collect();
        f(&y)
    })?;
    Ok(summarize(&values, cfg))
}

fn summarize<T: Scalar>(values: &[T], cfg: &MCConfig) -> MCEstimate<T> {
    let n = T::lit(values.len() as f64);
    let mean = pairwise_sum(values) / n;
    let stderr = if values.len() > 1 {
        let sq: Vec<T> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&sq) / (n - T::one()) / n).sqrt()
    } else {
        T::zero()
    };
    MCEstimate { estimate: mean, stderr, paths: cfg.paths, seed: cfg.seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Atom;
    use crate::symbol::Symbol;

    #[test]
    fn pure_drift_is_deterministic() {
        let t = LevyTriplet::new(vec![0.5, -1.0], vec![vec![0.0; 2]; 2], vec![]).unwrap();
        for seed in 0..5 {
            let mut rng = MCConfig::new(seed, 1, 1).rng(0);
            assert_eq!(sample_levy(&t, 2.0, &mut rng).unwrap().value, vec![1.0, -2.0]);
        }
    }

    #[test]
    fn constant_function_has_zero_error() {
        let t = LevyTriplet::compound_poisson(vec![Atom::new(vec![1.0], 1.0)]).unwrap();
        let est = mc_semigroup(&t, 1.0, &|_: &[f64]| 1.0, &[0.0], &MCConfig::new(3, 1000, 2), None).unwrap();
        assert_eq!((est.estimate, est.stderr), (1.0, 0.0));
    }

    #[test]
    fn stable_characteristic_function() {
        // E cos(ξ X_t) = e^{−t ψ(ξ)} for isotropic stable laws in 1-D and 2-D
        for (dim, alpha) in [(1, 0.7), (1, 1.0), (1, 1.6), (2, 1.2), (3, 0.8)] {
            let t = LevyTriplet::new(
                vec![0.0; dim],
                vec![vec![0.0; dim]; dim],
                vec![LevyMeasureComponent::stable(alpha, 0.4)],
            )
            .unwrap();
            let s: Symbol<f64> = t.clone().into();
            let mut xi = vec![0.0; dim];
            xi[dim - 1] = 0.9;
            let xi2 = xi.clone();
            let f = move |y: &[f64]| y.iter().zip(&xi2).map(|(a, b)| a * b).sum::<f64>().cos();
            let est = mc_semigroup(&t, 1.0, &f, &vec![0.0; dim], &MCConfig::new(11, 200_000, 4), None).unwrap();
            let want = (-s.eval(&xi).re).exp();
            assert!((est.estimate - want).abs() < 5.0 * est.stderr + 1e-9, "dim {dim} alpha {alpha}: {est:?} vs {want}");
        }
    }

    #[test]
    fn radial_jumps_match_symbol() {
        let t = LevyTriplet::new(
            vec![0.0, 0.0],
            vec![vec![0.0; 2]; 2],
            vec![LevyMeasureComponent::radial(
                crate::levy::RadialProfile::Exponential { coef: 0.3, rate: 1.0 },
                0.2,
                3.0,
            )],
        )
        .unwrap();
        let s: Symbol<f64> = t.clone().into();
        let f = |y: &[f64]| (1.1 * y[0]).cos();
        let est = mc_semigroup(&t, 1.0, &f, &[0.0, 0.0], &MCConfig::new(5, 200_000, 4), None).unwrap();
        let want = (-s.eval(&[1.1, 0.0]).re).exp();
        assert!((est.estimate - want).abs() < 5.0 * est.stderr);
    }

    #[test]
    fn small_atoms_are_compensated() {
        // X_t = N_t · 0.5 − 0.5 t m, so E X_t = 0
        let t = LevyTriplet::compound_poisson(vec![Atom::new(vec![0.5], 2.0)]).unwrap();
        let est = mc_semigroup(&t, 1.0, &|y: &[f64]| y[0], &[0.0], &MCConfig::new(1, 100_000, 2), None).unwrap();
        assert!(est.estimate.abs() < 5.0 * est.stderr);
    }

    #[test]
    fn growth_bound_is_checked_first() {
        let t = LevyTriplet::new(vec![0.0], vec![vec![0.0]], vec![LevyMeasureComponent::stable(0.5, 1.0)]).unwrap();
        let g = GrowthBound::Exponential { beta: 1.0 };
        let r = mc_semigroup(&t, 1.0, &|y: &[f64]| y[0].exp(), &[0.0], &MCConfig::new(0, 10, 1), Some(&g));
        assert_eq!(r, Err(GeneratorError::GrowthBound));
    }
}
