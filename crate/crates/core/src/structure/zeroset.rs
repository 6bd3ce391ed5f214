//! Detection of `{ψ = 0} = E ⊕ Λ` inside a search box.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::{reduce_lattice, GroupDescriptor};
use super::linalg::{add, canonical_sign, combine, complement, dual_basis, norm, orthonormal_basis, project_off, sub};
use crate::error::StructureError;
use crate::levy::LevyTriplet;
use crate::symbol::Symbol;

/// Periodicity defect below which a vector counts as a period of ψ.
pub const PERIODICITY_TOLERANCE: f64 = 1e-6;
/// `|ψ|` bound along the lines spanned by subspace directions.
pub const SUBSPACE_TOLERANCE: f64 = 1e-8;
const PERIODICITY_SAMPLES: usize = 100;
const LINE_SAMPLES: usize = 50;
const MAX_CANDIDATES: usize = 20_000;

/// Search controls. Unset fields fall back to triplet-dependent defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    #[serde(default)]
    pub box_halfwidth: Option<f64>,
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-6
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { box_halfwidth: None, grid_points: None, tol: default_tol(), seed: 0 }
    }
}

impl SearchParams {
    pub fn with_box(mut self, halfwidth: f64) -> Self {
        self.box_halfwidth = Some(halfwidth);
        self
    }

    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points = Some(points);
        self
    }
}

/// The box actually searched: `[−halfwidth, halfwidth]^d` in coordinates of
/// `E^⊥`, sampled with `grid_points` per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub halfwidth: f64,
    pub grid_points: usize,
    pub tol: f64,
    pub search_dim: usize,
}

/// `{ψ = 0}` as a subspace `E` plus a lattice inside `E^⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetStructure {
    pub dim: usize,
    pub subspace_basis: Vec<Vec<f64>>,
    pub lattice_generators: Vec<Vec<f64>>,
    /// Accepted zeros were not integer combinations of a discrete basis.
    pub dense_flag: bool,
    /// Zeros too close to resolve, unresolved atoms or failed verification.
    pub resolution_limit: bool,
    /// `max |ψ(γ)|` over the generators.
    pub residuals: f64,
    /// Worst periodicity defect over generators and their pairwise sums.
    pub periodicity_defect: f64,
    pub zeros_found: usize,
    pub search_box: SearchBox,
}

impl ZeroSetStructure {
    pub fn is_trivial(&self) -> bool {
        self.subspace_basis.is_empty() && self.lattice_generators.is_empty()
    }

    pub fn is_conclusive(&self) -> bool {
        !(self.dense_flag || self.resolution_limit)
    }

    pub fn as_group(&self) -> GroupDescriptor {
        GroupDescriptor {
            dim: self.dim,
            subspace_basis: self.subspace_basis.clone(),
            lattice_generators: self.lattice_generators.clone(),
            exact: false,
        }
    }
}

/// `2 · max_j |d_j| · (1 + |b|₁)` where `d_j` runs over the dual basis
/// `2π B (BᵀB)^{-1}` of the lattice `B` generated by the atoms. When the
/// atoms generate no lattice `|d_j|` is replaced by `2π / s`, `s` the
/// smallest distance among the origin and the atoms; `4π` without atoms.
pub fn default_halfwidth(t: &LevyTriplet<f64>) -> f64 {
    let pts: Vec<Vec<f64>> = t.atoms().map(|a| a.location.to_vec()).collect();
    if pts.is_empty() {
        return 2.0 * TAU;
    }
    let drift: f64 = t.drift().iter().map(|v| v.abs()).sum();
    if let Some(basis) = reduce_lattice(&pts, 1e-9) {
        let longest = dual_basis(&basis, t.dim()).iter().map(|d| norm(d)).fold(0.0, f64::max);
        if longest > 0.0 {
            return 2.0 * longest * (1.0 + drift);
        }
    }
    let mut spacing = f64::INFINITY;
    for (i, p) in pts.iter().enumerate() {
        spacing = spacing.min(norm(p));
        for q in &pts[i + 1..] {
            let d = norm(&sub(p, q));
            if d > 1e-12 {
                spacing = spacing.min(d);
            }
        }
    }
    2.0 * TAU / spacing * (1.0 + drift)
}

fn max_points(search_dim: usize) -> usize {
    match search_dim {
        1 => 1 << 16,
        2 => 1024,
        _ => 128,
    }
}

fn default_points(search_dim: usize) -> usize {
    match search_dim {
        1 => 2048,
        2 => 256,
        _ => 64,
    }
}

/// `max |ψ(ξ + γ) − ψ(ξ)|` over uniform ξ in `[−w, w]ⁿ`.
pub fn periodicity_defect(s: &Symbol<f64>, gamma: &[f64], halfwidth: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let xi: Vec<f64> = (0..gamma.len()).map(|_| rng.random_range(-halfwidth..halfwidth)).collect();
        let d = (s.eval(&add(&xi, gamma)) - s.eval(&xi)).norm();
        worst = worst.max(d);
    }
    worst
}

/// Directions on which ψ vanishes identically: the kernel of
/// `Q + Σ m x xᵀ` inside `b^⊥`, empty when ν has a density part.
fn degenerate_subspace(t: &LevyTriplet<f64>) -> Vec<Vec<f64>> {
    if t.has_continuous_jumps() {
        return Vec::new();
    }
    let n = t.dim();
    let mut m = DMatrix::from_fn(n, n, |i, j| t.gaussian().get(i, j));
    for a in t.atoms() {
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += a.mass * a.location[i] * a.location[j];
            }
        }
    }
    let eig = m.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let null: Vec<Vec<f64>> = (0..n)
        .filter(|&k| eig.eigenvalues[k].abs() <= 1e-12 * scale)
        .map(|k| eig.eigenvectors.column(k).iter().cloned().collect())
        .collect();
    if null.is_empty() {
        return null;
    }
    let b: Vec<f64> = t.drift().to_vec();
    let pb = sub(&b, &project_off(&b, &null));
    let basis = if norm(&pb) > 1e-12 * (1.0 + norm(&b)) {
        let dir = vec![pb.iter().map(|v| v / norm(&pb)).collect::<Vec<f64>>()];
        let reduced: Vec<Vec<f64>> = null.iter().map(|v| project_off(v, &dir)).collect();
        orthonormal_basis(&reduced, n, 1e-9)
    } else {
        null
    };
    basis.into_iter().map(canonical_sign).collect()
}

/// Pattern search on `f` from `start` with initial step `step`; the step
/// halves whenever no compass or diagonal direction improves.
fn compass(f: &dyn Fn(&[f64]) -> f64, start: Vec<f64>, step: f64) -> (Vec<f64>, f64) {
    let m = start.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; m];
            d[i] = s;
            dirs.push(d);
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in (i + 1)..m {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; m];
                d[i] = si * r;
                d[j] = sj * r;
                dirs.push(d);
            }
        }
    }
    let mut x = start;
    let mut fx = f(&x);
    let mut h = step;
    let mut evals = 0;
    while fx > 0.0 && evals < 20_000 && h > 1e-16 * (1.0 + norm(&x)) {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for d in &dirs {
            let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
            let fy = f(&y);
            evals += 1;
            if fy < best.as_ref().map_or(fx, |b| b.1) {
                best = Some((y, fy));
            }
        }
        match best {
            Some((y, fy)) => {
                x = y;
                fx = fy;
            }
            None => h *= 0.5,
        }
    }
    (x, fx)
}

/// Levenberg–Marquardt on a residual vector with a central difference
/// Jacobian, each step capped at `max_step`.
fn levenberg(r: &dyn Fn(&[f64]) -> Vec<f64>, start: Vec<f64>, max_step: f64) -> Vec<f64> {
    let m = start.len();
    let mut x = start;
    let mut rx = r(&x);
    let mut mu = 1e-3;
    for _ in 0..100 {
        let fx = norm(&rx);
        if fx == 0.0 {
            break;
        }
        let h = 1e-6 * (1.0 + norm(&x));
        let mut jac = DMatrix::<f64>::zeros(rx.len(), m);
        for j in 0..m {
            let mut p = x.clone();
            let mut q = x.clone();
            p[j] += h;
            q[j] -= h;
            let (rp, rq) = (r(&p), r(&q));
            for i in 0..rx.len() {
                jac[(i, j)] = (rp[i] - rq[i]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&rx);
        let scale = (a.trace() / m as f64).max(f64::MIN_POSITIVE);
        let mut accepted = false;
        for _ in 0..12 {
            let damped = &a + DMatrix::<f64>::identity(m, m) * (mu * scale);
            let Some(d) = damped.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let len = d.norm();
            let d = if len > max_step { d * (max_step / len) } else { d };
            let y: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + b).collect();
            let ry = r(&y);
            if norm(&ry) < fx {
                x = y;
                rx = ry;
                mu = (mu * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    x
}

fn dedupe(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| {
        norm(a).total_cmp(&norm(b)).then_with(|| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let tol = 1e-6 * (1.0 + norm(&p));
        if !kept.iter().any(|q| norm(&sub(&p, q)) <= tol) {
            kept.push(p);
        }
    }
    kept
}

/// Two-stage search for `{ψ = 0}`.
///
/// Directions where ψ vanishes identically come from the kernel of
/// `Q + Σ m x xᵀ` and are confirmed by line probes. The complement is scanned
/// on a grid for local minima of `Re ψ`, each refined by Levenberg–Marquardt
/// on `(Re ψ, Im ψ, ∇Re ψ)` with a pattern search on `|ψ|` as fallback. Atoms too fine for the grid are added afterwards in stages of
/// growing radius; each stage keeps only the zeros that survive refinement,
/// which is exact because adding atoms can only shrink the zero set. The
/// surviving zeros are reduced to a lattice basis and every generator and
/// pairwise sum is checked as a period of ψ.
pub fn find_zero_set(s: &Symbol<f64>, params: &SearchParams) -> Result<ZeroSetStructure, StructureError> {
    let n = s.dim();
    if n == 0 || n > 3 {
        return Err(StructureError::Dimension(n));
    }
    let base = s.base_triplet();
    let w = params.box_halfwidth.unwrap_or_else(|| default_halfwidth(base));
    if !(w > 0.0 && w.is_finite()) {
        return Err(StructureError::InvalidSearch(format!("box halfwidth must be positive and finite, got {w}")));
    }
    if !(params.tol > 0.0) {
        return Err(StructureError::InvalidSearch(format!("tolerance must be positive, got {}", params.tol)));
    }
    let mut out = ZeroSetStructure {
        dim: n,
        subspace_basis: Vec::new(),
        lattice_generators: Vec::new(),
        dense_flag: false,
        resolution_limit: false,
        residuals: 0.0,
        periodicity_defect: 0.0,
        zeros_found: 0,
        search_box: SearchBox { halfwidth: w, grid_points: 0, tol: params.tol, search_dim: 0 },
    };
    if s.is_identically_zero() {
        out.subspace_basis = GroupDescriptor::full(n).subspace_basis;
        return Ok(out);
    }

    let mut e = Vec::new();
    for dir in degenerate_subspace(base) {
        let worst = (0..LINE_SAMPLES)
            .map(|k| {
                let t = -w + 2.0 * w * k as f64 / (LINE_SAMPLES - 1) as f64;
                s.eval(&dir.iter().map(|v| v * t).collect::<Vec<_>>()).norm()
            })
            .fold(0.0f64, f64::max);
        if worst < SUBSPACE_TOLERANCE {
            e.push(dir);
        } else {
            out.resolution_limit = true;
        }
    }
    out.subspace_basis = e.clone();
    let u = complement(&e, n);
    let m = u.len();
    out.search_box.search_dim = m;
    if m == 0 {
        return Ok(out);
    }

    // the first stage must hold atoms spanning every jump direction, or Re ψ
    // is flat along some axis and the coarse scan sees no isolated minima
    let mut atoms: Vec<(f64, Vec<f64>)> = base.atoms().map(|a| (a.location.norm(), a.location.to_vec())).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let all: Vec<Vec<f64>> = atoms.iter().map(|a| a.1.clone()).collect();
    let rank = orthonormal_basis(&all, n, 1e-9).len();
    let r_span = (1..=atoms.len())
        .find(|&k| orthonormal_basis(&all[..k], n, 1e-9).len() == rank)
        .map_or(0.0, |k| atoms[k - 1].0);
    let r_max = atoms.last().map_or(0.0, |a| a.0);
    // Δ ≤ 2π / (8 r_span)
    let needed = (2.0 * w * 8.0 * r_span / TAU).ceil() as usize + 1;
    let pts = match params.grid_points {
        Some(p) => p,
        None => default_points(m).max(needed.min(max_points(m))),
    };
    if pts < 3 {
        return Err(StructureError::InvalidSearch(format!("need at least 3 grid points per axis, got {pts}")));
    }
    out.search_box.grid_points = pts;
    let delta = 2.0 * w / (pts - 1) as f64;
    let to_xi = |c: &[f64]| combine(&u, c, n);

    let resolved = TAU / (8.0 * delta);
    let r0 = resolved.max(1.0).max(r_span);
    if atoms.iter().any(|a| a.0 > resolved && a.0 <= r0) {
        out.resolution_limit = true;
    }
    let mut radii = Vec::new();
    let mut r = r0;
    while r < r_max {
        radii.push(r);
        r *= 3.0;
    }
    // Bernstein layers vanishing only at 0 leave the zero set unchanged, so
    // refinement runs on the better conditioned base symbol and the layered
    // symbol is only used to accept the result.
    let via_base = s.as_triplet().is_none() && s.preserves_zero_set();
    let work = |sym: Symbol<f64>| if via_base { Symbol::from(sym.base_triplet().clone()) } else { sym };
    let mut stages: Vec<(Symbol<f64>, Symbol<f64>, f64)> =
        radii.iter().map(|&r| (s.truncated(r), work(s.truncated(r)), r)).collect();
    stages.push((s.clone(), work(s.clone()), r_max.max(r0)));

    // coarse scan of Re ψ on the first stage
    let total = pts.pow(m as u32);
    let coord = |k: usize| -> Vec<f64> {
        let mut c = vec![0.0; m];
        let mut rest = k;
        for j in (0..m).rev() {
            c[j] = -w + (rest % pts) as f64 * delta;
            rest /= pts;
        }
        c
    };
    let first = &stages[0].1;
    let values: Vec<f64> = (0..total).into_par_iter().map(|k| first.eval(&to_xi(&coord(k))).re).collect();
    let is_min = |k: usize| -> bool {
        let mut idx = vec![0usize; m];
        let mut rest = k;
        for j in (0..m).rev() {
            idx[j] = rest % pts;
            rest /= pts;
        }
        for off in 0..3usize.pow(m as u32) {
            let mut o = off;
            let mut nb = 0usize;
            let mut centre = true;
            let mut inside = true;
            for &i in &idx {
                let step = (o % 3) as i64 - 1;
                o /= 3;
                centre &= step == 0;
                let j = i as i64 + step;
                if j < 0 || j >= pts as i64 {
                    inside = false;
                    break;
                }
                nb = nb * pts + j as usize;
            }
            if centre || !inside {
                continue;
            }
            if values[nb] < values[k] || (values[nb] == values[k] && nb < k) {
                return false;
            }
        }
        true
    };
    let mut minima: Vec<usize> = (0..total).into_par_iter().filter(|&k| is_min(k)).collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    if minima.len() > MAX_CANDIDATES {
        minima.truncate(MAX_CANDIDATES);
        out.resolution_limit = true;
    }

    let origin_radius = 0.5 * delta;
    let refine = |stage: &(Symbol<f64>, Symbol<f64>, f64), start: Vec<f64>, step: f64| -> Option<Vec<f64>> {
        let (sym, wsym, _) = stage;
        // Re ψ is minimal at a zero, so its gradient vanishes there too; this
        // pins the zero along valleys where |ψ| is only quadratic
        let r = |c: &[f64]| {
            let v = wsym.eval(&to_xi(c));
            let h = 1e-5 * (1.0 + norm(c));
            let mut out = vec![v.re, v.im];
            for j in 0..c.len() {
                let mut p = c.to_vec();
                let mut q = c.to_vec();
                p[j] += h;
                q[j] -= h;
                out.push((wsym.eval(&to_xi(&p)).re - wsym.eval(&to_xi(&q)).re) / (2.0 * h));
            }
            out
        };
        let f = |c: &[f64]| wsym.eval(&to_xi(c)).norm();
        let mut c = levenberg(&r, start, step);
        if f(&c) >= params.tol {
            c = compass(&f, c, step).0;
        }
        (sym.eval(&to_xi(&c)).norm() < params.tol && norm(&c) > origin_radius).then_some(c)
    };
    let mut zeros: Vec<Vec<f64>> = minima
        .par_iter()
        .filter_map(|&k| {
            let c = coord(k);
            if norm(&c) < origin_radius {
                return None;
            }
            refine(&stages[0], c, delta)
        })
        .collect();
    zeros = dedupe(zeros);
    for stage in stages.iter().skip(1) {
        let step = (TAU / (16.0 * stage.2)).min(delta);
        zeros = dedupe(zeros.into_par_iter().filter_map(|c| refine(stage, c, step)).collect());
    }
    out.zeros_found = zeros.len();
    if zeros.is_empty() {
        return Ok(out);
    }

    let points: Vec<Vec<f64>> = zeros.iter().map(|c| to_xi(c)).collect();
    let Some(generators) = reduce_lattice(&points, 1e-6) else {
        out.dense_flag = true;
        out.resolution_limit = true;
        return Ok(out);
    };
    if generators.iter().any(|g| norm(g) < 4.0 * delta) {
        out.resolution_limit = true;
    }
    let mut worst: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for (i, g) in generators.iter().enumerate() {
        residual = residual.max(s.eval(g).norm());
        worst = worst.max(periodicity_defect(s, g, w, PERIODICITY_SAMPLES, params.seed.wrapping_add(i as u64)));
        for h in &generators[i + 1..] {
            worst = worst.max(periodicity_defect(s, &add(g, h), w, PERIODICITY_SAMPLES, params.seed));
        }
    }
    if worst >= PERIODICITY_TOLERANCE {
        out.resolution_limit = true;
    }
    out.lattice_generators = generators;
    out.residuals = residual;
    out.periodicity_defect = worst;
    Ok(out)
}
