//! Liouville and strong-Liouville verdicts with verified witnesses.

use std::f64::consts::{SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use super::linalg::norm;
use super::zeroset::{find_zero_set, SearchBox, SearchParams, ZeroSetStructure};
use crate::error::StructureError;
use crate::generator::{check_harmonic, Candidate, GridFunction, MCConfig, ProbeResult, TorusGrid};
use crate::levy::{directional_exponential_moment, levy_moment, GrowthBound, LevyMeasureComponent, LevyTriplet};
use crate::quadrature::SphereRule;
use crate::symbol::{eval_psi_complex, ComplexStripArg, Symbol};

/// Largest radius probed for the strip region `F`.
pub const STRIP_RADIUS: f64 = 50.0;
const SCAN_POINTS: usize = 400;
/// Roots of `η ↦ ψ(−iη)` closer than this to the origin are the trivial one.
pub const TRIVIAL_ROOT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    /// `cos(γ·x)`
    Trig,
    /// `e^{η·x}`
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub vector: Vec<f64>,
    /// `|ψ(γ)|` or `|ψ(−iη)|`.
    pub psi_at_vector: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictResiduals {
    pub times: Vec<f64>,
    /// `‖P_t f − f‖∞` of a trigonometric witness on its torus.
    pub spectral: Vec<f64>,
    /// Monte Carlo probes of an exponential witness.
    pub monte_carlo: Vec<ProbeResult<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionProbe {
    pub direction: Vec<f64>,
    /// Radius up to which the directional exponential moment is finite.
    pub radius: f64,
    pub root: Option<f64>,
    /// The root lies within one scan step of a finite radius below the cap.
    pub boundary: bool,
    /// The scan stopped early because ψ(−iη) overflowed.
    pub overflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialSearch {
    pub probes: Vec<DirectionProbe>,
    /// Nonzero roots of `η ↦ ψ(−iη)` away from the boundary of `F`.
    pub roots: Vec<Vec<f64>>,
    pub boundary_roots: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Outcome,
    pub witness: Option<Witness>,
    pub residuals: VerdictResiduals,
    pub search_box: Option<SearchBox>,
    pub reason: String,
    pub zero_set: Option<ZeroSetStructure>,
    pub exponential_search: Option<ExponentialSearch>,
}

impl Verdict {
    fn new(verdict: Outcome, reason: impl Into<String>) -> Self {
        Self {
            verdict,
            witness: None,
            residuals: VerdictResiduals::default(),
            search_box: None,
            reason: reason.into(),
            zero_set: None,
            exponential_search: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Outcome::Fails
    }

    pub fn is_inconclusive(&self) -> bool {
        self.verdict == Outcome::Inconclusive
    }
}

/// `cos(γ·x)` on the smallest torus it lives on: period `2π/|γ_j|` along
/// axes with `γ_j ≠ 0`, `2π` elsewhere, 16 points per axis.
pub fn trig_witness(gamma: &[f64]) -> GridFunction<f64> {
    let periods: Vec<f64> = gamma.iter().map(|g| if g.abs() > 1e-12 { TAU / g.abs() } else { TAU }).collect();
    let grid = TorusGrid::new(periods, 16).expect("positive periods");
    GridFunction::from_real_fn(grid, |x| x.iter().zip(gamma).map(|(a, b)| a * b).sum::<f64>().cos())
}

/// Liouville verdict for a triplet: holds iff `{ψ = 0} = {0}`.
pub fn liouville_verdict(t: &LevyTriplet<f64>, params: &SearchParams) -> Result<Verdict, StructureError> {
    liouville_verdict_symbol(&t.clone().into(), params)
}

/// Liouville verdict for any symbol tree. A full-rank Gaussian part decides
/// at once since `Re ψ(ξ) ≥ ½ Qξ·ξ`; otherwise the zero set is searched and
/// a nonzero zero γ yields the witness `cos(γ·x)`, which must pass the
/// spectral fixed-point check before the verdict is reported.
pub fn liouville_verdict_symbol(s: &Symbol<f64>, params: &SearchParams) -> Result<Verdict, StructureError> {
    let n = s.dim();
    if s.is_identically_zero() {
        let mut gamma = vec![0.0; n];
        gamma[0] = 1.0;
        let mut v = Verdict::new(Outcome::Fails, "the symbol vanishes identically");
        v.witness = Some(Witness { kind: WitnessKind::Trig, vector: gamma, psi_at_vector: 0.0 });
        return Ok(v);
    }
    if s.base_triplet().gaussian().rank(1e-12) == n {
        return Ok(Verdict::new(Outcome::Holds, "Gaussian part has full rank"));
    }
    let z = find_zero_set(s, params)?;
    let mut v = Verdict::new(Outcome::Holds, "zero set is trivial within the search box");
    v.search_box = Some(z.search_box);
    if !z.is_conclusive() {
        v.verdict = Outcome::Inconclusive;
        v.reason = if z.dense_flag {
            "zeros do not form a resolvable lattice".into()
        } else {
            "zero search hit its resolution limit".into()
        };
        v.zero_set = Some(z);
        return Ok(v);
    }
    let gamma = match (z.lattice_generators.first(), z.subspace_basis.first()) {
        (Some(g), _) => g.clone(),
        (None, Some(e)) => e.clone(),
        (None, None) => {
            v.zero_set = Some(z);
            return Ok(v);
        }
    };
    let f = trig_witness(&gamma);
    let times = [1.0, SQRT_2];
    // h(ψ(γ)) amplifies the rounding in γ when h is not Lipschitz at 0 (λ^α);
    // layers vanishing only at 0 share the zero set of the base symbol, so
    // the fixed point is checked there.
    let base: Symbol<f64>;
    let check_sym = if s.as_triplet().is_none() && s.preserves_zero_set() {
        base = s.base_triplet().clone().into();
        &base
    } else {
        s
    };
    let report = check_harmonic(check_sym, Candidate::Grid(&f), &times, &MCConfig::new(params.seed, 1, 1))?;
    v.residuals = VerdictResiduals { times: times.to_vec(), spectral: report.spectral_residuals, monte_carlo: Vec::new() };
    v.witness = Some(Witness { kind: WitnessKind::Trig, psi_at_vector: s.eval(&gamma).norm(), vector: gamma });
    if report.harmonic {
        v.verdict = Outcome::Fails;
        v.reason = "nonzero zero of the symbol; cos(γ·x) is a bounded harmonic function".into();
    } else {
        v.verdict = Outcome::Inconclusive;
        v.reason = "candidate zero failed the spectral fixed-point check".into();
    }
    v.zero_set = Some(z);
    Ok(v)
}

fn probe_directions(t: &LevyTriplet<f64>) -> Vec<Vec<f64>> {
    let n = t.dim();
    // ∇κ(0) for κ(η) = −ψ(−iη)
    let mut grad: Vec<f64> = t.drift().to_vec();
    for a in t.atoms() {
        if a.location.norm() >= 1.0 {
            for (g, x) in grad.iter_mut().zip(a.location.iter()) {
                *g += a.mass * x;
            }
        }
    }
    let mut dirs = Vec::new();
    let gn = norm(&grad);
    if gn > 1e-12 {
        dirs.push(grad.iter().map(|g| -g / gn).collect());
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    if n >= 2 {
        dirs.extend(SphereRule::<f64>::new(n, 8).directions);
    }
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for d in dirs {
        if !unique.iter().any(|u| u.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() > 1.0 - 1e-12) {
            unique.push(d);
        }
    }
    unique
}

fn strip_radius(nu: &[LevyMeasureComponent<f64>], d: &[f64], n: usize) -> f64 {
    let finite = |r: f64| {
        let eta: Vec<f64> = d.iter().map(|v| v * r).collect();
        directional_exponential_moment(nu, &eta, n).is_finite()
    };
    if finite(STRIP_RADIUS) {
        return STRIP_RADIUS;
    }
    if !finite(1e-9) {
        return 0.0;
    }
    let (mut lo, mut hi) = (1e-9, STRIP_RADIUS);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if finite(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Nonzero roots of the real function `η ↦ ψ(−iη)` inside the strip region.
///
/// `κ(η) = −ψ(−iη)` is convex with `κ(0) = 0`, so each ray carries at most one
/// nonzero root unless κ vanishes along it. Rays are probed along `−∇κ(0)`
/// first, then the coordinate axes and a spherical design; each is scanned
/// up to its radius in `F` and sign changes are bisected.
pub fn exponential_zero_search(t: &LevyTriplet<f64>) -> ExponentialSearch {
    let n = t.dim();
    let s: Symbol<f64> = t.clone().into();
    let phi = |eta: Vec<f64>| -> Option<f64> {
        eval_psi_complex(&s, &ComplexStripArg::imaginary(eta)).ok().filter(|z| z.re.is_finite()).map(|z| z.re)
    };
    let mut out = ExponentialSearch { probes: Vec::new(), roots: Vec::new(), boundary_roots: Vec::new() };
    for d in probe_directions(t) {
        let radius = strip_radius(t.jumps(), &d, n);
        let mut probe = DirectionProbe { direction: d.clone(), radius, root: None, boundary: false, overflow: false };
        if radius > 0.0 {
            let at = |r: f64| phi(d.iter().map(|v| v * r).collect());
            let step = radius / SCAN_POINTS as f64;
            let mut prev: Option<(f64, f64)> = None;
            for i in 1..=SCAN_POINTS {
                let r = step * i as f64;
                let Some(v) = at(r) else {
                    probe.overflow = true;
                    break;
                };
                if v.abs() <= 1e-13 * (1.0 + r * r) {
                    probe.root = Some(r);
                    break;
                }
                if let Some((r0, v0)) = prev {
                    if v0.signum() != v.signum() {
                        let (mut lo, mut hi, mut vlo) = (r0, r, v0);
                        for _ in 0..200 {
                            let mid = 0.5 * (lo + hi);
                            if mid <= lo || mid >= hi {
                                break;
                            }
                            let Some(vm) = at(mid) else { break };
                            if vm == 0.0 {
                                (lo, hi) = (mid, mid);
                                break;
                            }
                            if vm.signum() == vlo.signum() {
                                lo = mid;
                                vlo = vm;
                            } else {
                                hi = mid;
                            }
                        }
                        let root = if at(lo).map_or(f64::INFINITY, f64::abs) <= at(hi).map_or(f64::INFINITY, f64::abs) {
                            lo
                        } else {
                            hi
                        };
                        probe.root = Some(root);
                        break;
                    }
                }
                prev = Some((r, v));
            }
            if let Some(r) = probe.root {
                probe.boundary = radius < STRIP_RADIUS && r > radius - step;
                let eta: Vec<f64> = d.iter().map(|v| v * r).collect();
                if norm(&eta) > TRIVIAL_ROOT {
                    let list = if probe.boundary { &mut out.boundary_roots } else { &mut out.roots };
                    if !list.iter().any(|q| norm(&super::linalg::sub(q, &eta)) < 1e-6 * (1.0 + r)) {
                        list.push(eta);
                    }
                }
            }
        }
        out.probes.push(probe);
    }
    out
}

/// Strong-Liouville verdict for positive `g`-bounded solutions: holds iff
/// both `{ψ = 0}` and `{η : ψ(−iη) = 0}` are trivial. An exponential witness
/// `e^{η·x}` is checked by Monte Carlo at `x ∈ {0, 0.3·𝟙}` and `t ∈ {1, √2}`.
pub fn strong_liouville_verdict(
    t: &LevyTriplet<f64>,
    g: &GrowthBound<f64>,
    params: &SearchParams,
    cfg: &MCConfig,
) -> Result<Verdict, StructureError> {
    let n = t.dim();
    let moment = levy_moment(t.jumps(), g, n);
    if !moment.is_finite() {
        return Err(StructureError::HypothesisUnmet(format!(
            "the large-jump moment of g = {g} is infinite; no submultiplicative bound applies"
        )));
    }
    let real = liouville_verdict(t, params)?;
    if real.verdict != Outcome::Holds {
        return Ok(real);
    }
    let search = exponential_zero_search(t);
    let mut v = real;
    let Some(eta) = search.roots.first().cloned() else {
        if search.boundary_roots.is_empty() {
            v.reason = "both zero sets are trivial".into();
        } else {
            v.verdict = Outcome::Inconclusive;
            v.reason = "exponential zeros found only at the boundary of the strip region".into();
        }
        v.exponential_search = Some(search);
        return Ok(v);
    };
    let s: Symbol<f64> = t.clone().into();
    let psi = eval_psi_complex(&s, &ComplexStripArg::imaginary(eta.clone()))?.norm();
    let e = eta.clone();
    let f = move |x: &[f64]| x.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>().exp();
    let times = [1.0, SQRT_2];
    let probes = vec![vec![0.0; n], vec![0.3; n]];
    let report = check_harmonic(&s, Candidate::Callable { f: &f, probes }, &times, cfg)?;
    v.residuals = VerdictResiduals { times: times.to_vec(), spectral: Vec::new(), monte_carlo: report.probes };
    v.witness = Some(Witness { kind: WitnessKind::Exponential, vector: eta, psi_at_vector: psi });
    if report.harmonic {
        v.verdict = Outcome::Fails;
        v.reason = "nonzero root of ψ(−iη); e^{η·x} is a positive harmonic function".into();
    } else {
        v.verdict = Outcome::Inconclusive;
        v.reason = "exponential candidate failed the Monte Carlo fixed-point check".into();
    }
    v.exponential_search = Some(search);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::Atom;

    #[test]
    fn unit_atom_fails_with_cosine_witness() {
        let t = LevyTriplet::compound_poisson(vec![Atom::new(vec![1.0], 1.0)]).unwrap();
        let v = liouville_verdict(&t, &SearchParams::default()).unwrap();
        assert!(v.fails(), "{v:?}");
        let w = v.witness.unwrap();
        assert!((w.vector[0] - TAU).abs() < 1e-8);
        assert!(v.residuals.spectral.iter().all(|&r| r < 1e-10));
    }

    #[test]
    fn drifted_brownian_motion_has_exponential_zero() {
        let t = LevyTriplet::brownian_motion(1).with_drift(vec![1.0]).unwrap();
        let search = exponential_zero_search(&t);
        assert_eq!(search.roots.len(), 1, "{search:?}");
        assert!((search.roots[0][0] + 2.0).abs() < 1e-12);
        let v = strong_liouville_verdict(&t, &GrowthBound::Exponential { beta: 3.0 }, &SearchParams::default(), &MCConfig::new(3, 50_000, 2))
            .unwrap();
        assert!(v.fails(), "{v:?}");
        assert_eq!(v.witness.unwrap().kind, WitnessKind::Exponential);

        let v = strong_liouville_verdict(
            &LevyTriplet::brownian_motion(1),
            &GrowthBound::Exponential { beta: 3.0 },
            &SearchParams::default(),
            &MCConfig::default(),
        )
        .unwrap();
        assert!(v.holds(), "{v:?}");
    }

    #[test]
    fn stable_components_break_the_moment_hypothesis() {
        let t = LevyTriplet::new(vec![0.0], vec![vec![0.0]], vec![LevyMeasureComponent::stable(1.5, 1.0)]).unwrap();
        let r = strong_liouville_verdict(&t, &GrowthBound::Exponential { beta: 1.0 }, &SearchParams::default(), &MCConfig::default());
        assert!(matches!(r, Err(StructureError::HypothesisUnmet(_))));
    }
}
