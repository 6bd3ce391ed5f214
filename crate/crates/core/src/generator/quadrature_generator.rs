//! Direct evaluation of
//! `L f(x) = b·∇f(x) + ½ ∇·Q∇f(x) + ∫(f(x+y) − f(x) − y·∇f(x) 1_{|y|<1}) ν(dy)`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::GeneratorError;
use crate::levy::{LevyMeasureComponent, LevyTriplet};
use crate::quadrature::{adaptive_gk15, SphereRule};
use crate::scalar::{sphere_area, Scalar};

/// A twice differentiable function. Derivatives default to central finite
/// differences; implementors with closed forms may override them.
pub trait SmoothFunction<T: Scalar> {
    fn value(&self, x: &[T]) -> Complex<T>;

    fn gradient(&self, x: &[T]) -> Vec<Complex<T>> {
        let h = T::lit(6e-6);
        (0..x.len())
            .map(|j| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[j] = p[j] + h;
                m[j] = m[j] - h;
                (self.value(&p) - self.value(&m)) / (h + h)
            })
            .collect()
    }

    fn hessian(&self, x: &[T]) -> Vec<Vec<Complex<T>>> {
        let h = T::lit(1e-4);
        let n = x.len();
        let f0 = self.value(x);
        let shifted = |i: usize, si: T, j: usize, sj: T| {
            let mut p = x.to_vec();
            p[i] = p[i] + si;
            p[j] = p[j] + sj;
            self.value(&p)
        };
        let mut out = vec![vec![Complex::zero(); n]; n];
        for i in 0..n {
            out[i][i] = (shifted(i, h, i, T::zero()) + shifted(i, -h, i, T::zero()) - f0 * T::lit(2.0)) / (h * h);
            for j in (i + 1)..n {
                let v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h))
                    / (T::lit(4.0) * h * h);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }
}

/// Closure-backed [`SmoothFunction`] with finite-difference derivatives.
pub struct Callable<F>(pub F);

impl<T: Scalar, F: Fn(&[T]) -> Complex<T>> SmoothFunction<T> for Callable<F> {
    fn value(&self, x: &[T]) -> Complex<T> {
        (self.0)(x)
    }
}

/// Tolerances for the stable-part integrals.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
    /// Angular resolution of the sphere rule in dimensions 2 and 3.
    pub sphere_resolution: usize,
}

impl Default for QuadratureTolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-10, max_segments: 2000, sphere_resolution: 32 }
    }
}

pub fn apply_generator_quadrature<T: Scalar, F: SmoothFunction<T> + ?Sized>(
    t: &LevyTriplet<T>,
    f: &F,
    x: &[T],
) -> Result<Complex<T>, GeneratorError> {
    apply_generator_quadrature_with(t, f, x, QuadratureTolerance::default())
}

pub fn apply_generator_quadrature_with<T: Scalar, F: SmoothFunction<T> + ?Sized>(
    t: &LevyTriplet<T>,
    f: &F,
    x: &[T],
    tol: QuadratureTolerance,
) -> Result<Complex<T>, GeneratorError> {
    let n = t.dim();
    let f0 = f.value(x);
    let needs_gradient = !t.drift().iter().all(|v| v.is_zero())
        || t.atoms().any(|a| a.location.norm() < T::one());
    let grad = if needs_gradient { f.gradient(x) } else { Vec::new() };
    let mut acc = Complex::zero();
    if needs_gradient {
        for (b, g) in t.drift().iter().zip(&grad) {
            acc = acc + g * *b;
        }
    }
    if !t.gaussian().is_zero() {
        let hess = f.hessian(x);
        for i in 0..n {
            for j in 0..n {
                acc = acc + hess[i][j] * (t.gaussian().get(i, j) / T::lit(2.0));
            }
        }
    }
    let shifted = |y: &[T]| {
        let p: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
        f.value(&p)
    };
    for c in t.jumps() {
        match c {
            LevyMeasureComponent::Atoms(m) => {
                for a in &m.atoms {
                    let mut term = shifted(&a.location) - f0;
                    if a.location.norm() < T::one() {
                        for (y, g) in a.location.iter().zip(&grad) {
                            term = term - g * *y;
                        }
                    }
                    acc = acc + term * a.mass;
                }
            }
            LevyMeasureComponent::RadialDensity(d) => {
                // the compensator integrates to zero over spheres
                let rule = SphereRule::<T>::new(n, tol.sphere_resolution);
                for (r, w) in d.radial_nodes(d.r_min, d.r_max, n) {
                    let mut avg = Complex::zero();
                    for (omega, wo) in rule.directions.iter().zip(&rule.weights) {
                        let y: Vec<T> = omega.iter().map(|&o| o * r).collect();
                        avg = avg + (shifted(&y) - f0) * *wo;
                    }
                    acc = acc + avg * w;
                }
            }
            LevyMeasureComponent::IsotropicStable(s) => {
                acc = acc + stable_part(n, s.alpha, s.scale, f, x, f0, tol)?;
            }
        }
    }
    Ok(acc)
}

/// `scale · S_{n−1} ∫₀^∞ A(r) r^{−1−α} dr` with `A(r)` the spherical mean of
/// `½(f(x+rω) + f(x−rω)) − f(x)`; below `r = 1e-3` the second-order Taylor
/// term `r² tr(H)/(2n)` replaces A.
fn stable_part<T: Scalar, F: SmoothFunction<T> + ?Sized>(
    n: usize,
    alpha: T,
    scale: T,
    f: &F,
    x: &[T],
    f0: Complex<T>,
    tol: QuadratureTolerance,
) -> Result<Complex<T>, GeneratorError> {
    let rule = SphereRule::<T>::new(n, tol.sphere_resolution);
    let cut = T::lit(1e-3);
    let hess = f.hessian(x);
    let laplacian = (0..n).fold(Complex::zero(), |a, i| a + hess[i][i]);
    let mean_second = |r: T| -> Complex<T> {
        let mut avg = Complex::zero();
        for (omega, wo) in rule.directions.iter().zip(&rule.weights) {
            let p: Vec<T> = x.iter().zip(omega).map(|(&a, &o)| a + o * r).collect();
            let m: Vec<T> = x.iter().zip(omega).map(|(&a, &o)| a - o * r).collect();
            avg = avg + ((f.value(&p) + f.value(&m)) * T::lit(0.5) - f0) * *wo;
        }
        avg
    };
    let one = T::one();
    // [0, cut]: Taylor, ∫₀^c r² r^{−1−α} dr = c^{2−α}/(2−α)
    let taylor = laplacian / T::lit(2.0 * n as f64) * (cut.powf(T::lit(2.0) - alpha) / (T::lit(2.0) - alpha));
    let inner = adaptive_gk15(
        |r: T| mean_second(r) * r.powf(-one - alpha),
        cut,
        one,
        T::lit(tol.abs),
        T::lit(tol.rel),
        tol.max_segments,
    );
    // [1, ∞): the constant −f(x) integrates to −f(x)/α; the remaining mean
    // B(r) = A(r) + f(x) goes through r = 1/u, ∫₀¹ B(1/u) u^{α−1} du, which
    // converges when f decays and reports nonconvergence when it oscillates
    let outer = adaptive_gk15(
        |u: T| {
            if u.is_zero() {
                Complex::zero()
            } else {
                (mean_second(one / u) + f0) * u.powf(alpha - one)
            }
        },
        T::zero(),
        one,
        T::lit(tol.abs),
        T::lit(tol.rel),
        tol.max_segments,
    );
    let constant_tail = -f0 / alpha;
    let factor = scale * T::lit(sphere_area(n));
    let value = (taylor + inner.value + outer.value + constant_tail) * factor;
    let estimate = (inner.error + outer.error) * factor;
    if !(inner.converged && outer.converged) {
        return Err(GeneratorError::Nonconvergence {
            value_re: value.re.as_f64(),
            value_im: value.im.as_f64(),
            estimate: estimate.as_f64(),
            tolerance: tol.abs.max(tol.rel * value.norm().as_f64()),
        });
    }
    Ok(value)
}
