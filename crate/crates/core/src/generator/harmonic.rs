//! Harmonicity checks: `P_t f = f` at two times, spectrally for grid
//! candidates and by Monte Carlo at probe points for callable candidates.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;
use crate::generator::grid::{fft_nd, GridFunction};
use crate::generator::montecarlo::{mc_semigroup, LevySampler, MCConfig};
use crate::generator::spectral::semigroup_apply_spectral;
use crate::levy::LevyTriplet;
use crate::scalar::Scalar;
use crate::symbol::Symbol;

/// Spectral residual below which a grid candidate counts as harmonic.
pub const SPECTRAL_TOLERANCE: f64 = 1e-8;
/// Monte Carlo acceptance band in standard errors.
pub const MC_SIGMAS: f64 = 4.0;
const ROUNDING_FLOOR: f64 = 1e-12;

/// A harmonic-function candidate.
pub enum Candidate<'a, T: Scalar> {
    Grid(&'a GridFunction<T>),
    Callable { f: &'a (dyn Fn(&[T]) -> T + Sync), probes: Vec<Vec<T>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult<T> {
    pub time: T,
    pub x: Vec<T>,
    pub target: T,
    pub estimate: T,
    pub stderr: T,
    /// `|estimate − target| / stderr`; zero when the gap is at rounding level.
    pub z_score: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport<T> {
    pub times: Vec<T>,
    /// `‖P_t f − f‖∞` per time, grid candidates only.
    pub spectral_residuals: Vec<T>,
    pub probes: Vec<ProbeResult<T>>,
    pub spectral_tolerance: f64,
    pub mc_sigmas: f64,
    pub harmonic: bool,
}

/// Checks `P_t f = f` for every `t` in `times`. Two incommensurable times
/// (the default pair is `1, √2`) stand in for all `t > 0`.
pub fn check_harmonic<T: Scalar>(
    s: &Symbol<T>,
    candidate: Candidate<'_, T>,
    times: &[T],
    cfg: &MCConfig,
) -> Result<HarmonicityReport<T>, GeneratorError> {
    if times.len() < 2 || times.iter().any(|&t| !(t > T::zero())) {
        return Err(GeneratorError::Sampling("need at least two positive times".into()));
    }
    let mut spectral_residuals = Vec::new();
    let mut probes = Vec::new();
    let mut harmonic = true;
    match candidate {
        Candidate::Grid(f) => {
            for &t in times {
                let r = semigroup_apply_spectral(s, t, f).max_abs_diff(f);
                harmonic &= r.as_f64() <= SPECTRAL_TOLERANCE;
                spectral_residuals.push(r);
            }
        }
        Candidate::Callable { f, probes: points } => {
            let triplet = s.as_triplet().ok_or_else(|| {
                GeneratorError::Sampling("Monte Carlo checks need a triplet-backed symbol".into())
            })?;
            for &t in times {
                for x in &points {
                    let est = mc_semigroup(triplet, t, f, x, cfg, None)?;
                    let target = f(x);
                    let gap = Float::abs(est.estimate - target);
                    // differences at rounding level count as exact agreement
                    let z_score = if gap.as_f64() <= ROUNDING_FLOOR * (1.0 + target.as_f64().abs()) {
                        T::zero()
                    } else if est.stderr > T::zero() {
                        gap / est.stderr
                    } else {
                        T::infinity()
                    };
                    harmonic &= z_score.as_f64() <= MC_SIGMAS;
                    probes.push(ProbeResult { time: t, x: x.clone(), target, estimate: est.estimate, stderr: est.stderr, z_score });
                }
            }
        }
    }
    Ok(HarmonicityReport {
        times: times.to_vec(),
        spectral_residuals,
        probes,
        spectral_tolerance: SPECTRAL_TOLERANCE,
        mc_sigmas: MC_SIGMAS,
        harmonic,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoquetDenyReport<T> {
    /// `‖h ∗ μ̃_t − h‖∞`, computed with the multiplier `e^{−tψ}`.
    pub residual: T,
    pub jumps_sampled: usize,
    pub distinct_jumps: usize,
    /// `max_y max_x |h(x+y) − h(x)|` over the sampled jumps y.
    pub max_shift_defect: T,
}

/// Convolution fixed-point residual plus an empirical check that sampled
/// jumps of the compound-Poisson part are periods of `h`.
pub fn choquet_deny_check<T: Scalar>(
    t: &LevyTriplet<T>,
    time: T,
    h: &GridFunction<T>,
    cfg: &MCConfig,
) -> Result<ChoquetDenyReport<T>, GeneratorError> {
    let s: Symbol<T> = t.clone().into();
    let residual = semigroup_apply_spectral(&s, time, h).max_abs_diff(h);
    let sampler = LevySampler::new(t)?;
    let wanted = cfg.paths.max(1000);
    let mut distinct: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
    let mut sampled = 0;
    for i in 0..wanted {
        let mut rng = cfg.rng(i);
        match sampler.sample_jump(&mut rng) {
            Some(y) => {
                sampled += 1;
                let key: Vec<i64> = y.iter().map(|v| (v * 1e9).round() as i64).collect();
                distinct.entry(key).or_insert(y);
            }
            None => break,
        }
    }
    let coef = h.coefficients();
    let mut max_shift_defect = T::zero();
    for y in distinct.values() {
        let shifted: Vec<Complex<T>> = coef
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let phase = h.grid.frequency(k).iter().zip(y).fold(T::zero(), |a, (&f, &v)| a + f * T::lit(v));
                *c * (Complex::new(phase.cos(), phase.sin()) - Complex::new(T::one(), T::zero()))
            })
            .collect();
        let mut data = shifted;
        fft_nd(&mut data, h.grid.points(), h.grid.dim(), true);
        let defect = data.iter().fold(T::zero(), |m, v| {
            let a = v.norm();
            if a > m {
                a
            } else {
                m
            }
        });
        if defect > max_shift_defect {
            max_shift_defect = defect;
        }
    }
    Ok(ChoquetDenyReport { residual, jumps_sampled: sampled, distinct_jumps: distinct.len(), max_shift_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::grid::TorusGrid;
    use crate::levy::Atom;
    use std::f64::consts::TAU;

    fn atom(at: f64) -> LevyTriplet<f64> {
        LevyTriplet::compound_poisson(vec![Atom::new(vec![at], 1.0)]).unwrap()
    }

    #[test]
    fn periodic_cosine_is_harmonic_for_unit_atom() {
        let s: Symbol<f64> = atom(1.0).into();
        let grid = TorusGrid::cubic(1, 1.0, 32).unwrap();
        let f = GridFunction::from_real_fn(grid.clone(), |x| (TAU * x[0]).cos());
        let cfg = MCConfig::new(1, 20_000, 2);
        let r = check_harmonic(&s, Candidate::Grid(&f), &[1.0, 2f64.sqrt()], &cfg).unwrap();
        assert!(r.harmonic && r.spectral_residuals.iter().all(|&v| v < 1e-10));

        let g = GridFunction::from_real_fn(TorusGrid::cubic(1, TAU, 32).unwrap(), |x| x[0].cos());
        let r = check_harmonic(&s, Candidate::Grid(&g), &[1.0, 2f64.sqrt()], &cfg).unwrap();
        assert!(!r.harmonic && r.spectral_residuals[0] > 0.1);

        let c = GridFunction::from_real_fn(grid, |_| 3.0);
        let r = check_harmonic(&s, Candidate::Grid(&c), &[1.0, 2f64.sqrt()], &cfg).unwrap();
        assert!(r.harmonic && r.spectral_residuals.iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn callable_candidates_use_monte_carlo() {
        let s: Symbol<f64> = atom(1.0).into();
        let f = |x: &[f64]| (TAU * x[0]).cos();
        let cfg = MCConfig::new(2, 20_000, 2);
        let r = check_harmonic(&s, Candidate::Callable { f: &f, probes: vec![vec![0.0], vec![0.3]] }, &[1.0, 2f64.sqrt()], &cfg)
            .unwrap();
        assert!(r.harmonic, "{r:#?}");
    }

    #[test]
    fn choquet_deny_shift_defects() {
        let grid = TorusGrid::cubic(1, 1.0, 32).unwrap();
        let h = GridFunction::from_real_fn(grid, |x| (TAU * x[0]).cos());
        let cfg = MCConfig::new(0, 1000, 1);
        let r = choquet_deny_check(&atom(1.0), 1.0, &h, &cfg).unwrap();
        assert!(r.residual < 1e-10 && r.max_shift_defect < 1e-10 && r.distinct_jumps == 1);
        // ψ(2π) = 2 + iπ: the compensator of the small atom adds iπ
        let r = choquet_deny_check(&atom(0.5), 1.0, &h, &cfg).unwrap();
        assert!((r.residual - (1.0 + (-2f64).exp())).abs() < 1e-12, "{r:?}");
        let cancelled = atom(0.5).with_drift(vec![0.5]).unwrap();
        let r = choquet_deny_check(&cancelled, 1.0, &h, &cfg).unwrap();
        assert!((r.residual - (1.0 - (-2f64).exp())).abs() < 1e-12, "{r:?}");
        assert!((r.max_shift_defect - 2.0).abs() < 1e-12);
    }
}
